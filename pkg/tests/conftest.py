import numpy as np
import pytest

from cepgeo import filters
from cepgeo.filters import FilterSpec, validate

# sigma for which the transfer-function prefactor sigma^2/(2 pi) is exactly 1,
# i.e. the zeroth cepstrum coefficient vanishes
GAIN = filters.GAIN_TERM_UNIT


def make_filter(poles=(), zeros=(), blaschke=(), z_power=0, gain=GAIN):
    return validate(
        FilterSpec(
            gain=gain,
            poles=tuple(poles),
            zeros=tuple(zeros),
            blaschke_points=tuple(blaschke),
            z_power=z_power,
        )
    )


def arma_from_roots(row, p):
    """Validated filter with the first p roots as poles, the rest as zeros."""
    row = tuple(row)
    return make_filter(poles=row[:p], zeros=row[p:])


@pytest.fixture
def ar1():
    return make_filter(poles=(0.5,))


@pytest.fixture
def arma11():
    return make_filter(poles=(0.5,), zeros=(0.3,))
