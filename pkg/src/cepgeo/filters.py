"""Rational transfer-function models: validation, evaluation, cepstrum.

A filter is described by a positive gain ``sigma``, pole and zero locations
in the complex plane, optional Blaschke (all-pass) points, and an integer
power of ``z``.  The transfer function evaluated at ``z`` is

    h(z) = (sigma^2 / 2 pi) * z^R * prod_j (1 - zeta_j / z)
                                  / prod_i (1 - p_i / z)
                                  * prod_s b(z, z_s)

with the Blaschke factor ``b(z, z_s) = (|z_s|/z_s) (z_s - z)/(1 - conj(z_s) z)``
(and ``b(z, 0) = z``).  The spectral density is ``S(w) = |h(e^{iw})|^2``;
Blaschke factors and ``z^R`` are unimodular on the circle and leave it
unchanged.

Everything here is a pure function of immutable inputs; values are safe to
share across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

EPS_STAB_DEFAULT = 1e-6
TRUNCATION_DEFAULT = 256
GAIN_TERM_UNIT = math.sqrt(2.0 * math.pi)  # sigma for which sigma^2/(2 pi) == 1


class FilterError(ValueError):
    """Base class for filter validation and evaluation failures."""

    code = "FILTER_ERROR"


class PoleOutsideDisk(FilterError):
    code = "POLE_OUTSIDE_DISK"

    def __init__(self, violations: list[tuple[int, float]]):
        self.violations = violations
        detail = ", ".join(f"poles[{i}] has modulus {m:.6g}" for i, m in violations)
        super().__init__(f"poles must lie strictly inside the unit disk: {detail}")


class ZeroOutsideDisk(FilterError):
    code = "ZERO_OUTSIDE_DISK"

    def __init__(self, violations: list[tuple[int, float]]):
        self.violations = violations
        detail = ", ".join(f"zeros[{i}] has modulus {m:.6g}" for i, m in violations)
        super().__init__(
            f"zeros outside the unit disk (filter is not minimum phase): {detail}"
        )


class ZeroOnCircle(FilterError):
    code = "ZERO_ON_CIRCLE"

    def __init__(self, violations: list[tuple[int, float]]):
        self.violations = violations
        detail = ", ".join(f"zeros[{i}] has modulus {m:.6g}" for i, m in violations)
        super().__init__(
            "zeros on (or within the stability margin of) the unit circle are not "
            f"representable: the log-transfer series diverges there: {detail}"
        )


class NonPositiveGain(FilterError):
    code = "NON_POSITIVE_GAIN"

    def __init__(self, gain: float):
        super().__init__(f"gain must be positive, got {gain!r}")


class BlaschkePointOutsideDisk(FilterError):
    code = "BLASCHKE_POINT_OUTSIDE_DISK"

    def __init__(self, violations: list[tuple[int, float]]):
        self.violations = violations
        detail = ", ".join(f"blaschke[{i}] has modulus {m:.6g}" for i, m in violations)
        super().__init__(f"Blaschke points must lie inside the open unit disk: {detail}")


class EvalAtPole(FilterError):
    code = "EVAL_AT_POLE"


def _as_complex_tuple(values, what: str) -> tuple[complex, ...]:
    out = []
    for v in values:
        z = complex(v)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"{what} must be finite, got {z!r}")
        out.append(z)
    return tuple(out)


@dataclass(frozen=True)
class FilterSpec:
    """Gain plus pole/zero/Blaschke description of a rational transfer function.

    A ``FilterSpec`` is a plain record; only finiteness is checked at
    construction.  Stability and minimum phase are enforced by
    :func:`validate`, which is the sole way to obtain a
    :class:`ValidatedFilter`.
    """

    gain: float
    poles: tuple[complex, ...] = ()
    zeros: tuple[complex, ...] = ()
    blaschke_points: tuple[complex, ...] = ()
    z_power: int = 0

    def __post_init__(self):
        gain = float(self.gain)
        if not math.isfinite(gain):
            raise ValueError(f"gain must be finite, got {gain!r}")
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "poles", _as_complex_tuple(self.poles, "poles"))
        object.__setattr__(self, "zeros", _as_complex_tuple(self.zeros, "zeros"))
        object.__setattr__(
            self, "blaschke_points", _as_complex_tuple(self.blaschke_points, "blaschke_points")
        )
        object.__setattr__(self, "z_power", int(self.z_power))

    @property
    def gain_term(self) -> float:
        """Prefactor sigma^2/(2 pi) of the transfer function."""
        return self.gain * self.gain / (2.0 * math.pi)


@dataclass(frozen=True)
class ValidatedFilter:
    """A stable, minimum-phase filter with all roots inside the margin.

    Construct through :func:`validate`.  Coordinates of the underlying
    manifold are the poles followed by the zeros; ``signature`` holds the
    conventional -1 (pole) / +1 (zero) markers.
    """

    gain: float
    poles: tuple[complex, ...]
    zeros: tuple[complex, ...]
    blaschke_points: tuple[complex, ...]
    z_power: int
    eps_stab: float
    has_exact_cancellation: bool

    @property
    def dimension(self) -> int:
        return len(self.poles) + len(self.zeros)

    @property
    def signature(self) -> tuple[int, ...]:
        return (-1,) * len(self.poles) + (1,) * len(self.zeros)

    @property
    def coordinates(self) -> tuple[complex, ...]:
        return self.poles + self.zeros

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"pole{i}" for i in range(len(self.poles))) + tuple(
            f"zero{j}" for j in range(len(self.zeros))
        )

    @property
    def gain_term(self) -> float:
        return self.gain * self.gain / (2.0 * math.pi)

    def to_spec(self) -> FilterSpec:
        return FilterSpec(
            gain=self.gain,
            poles=self.poles,
            zeros=self.zeros,
            blaschke_points=self.blaschke_points,
            z_power=self.z_power,
        )


@dataclass(frozen=True)
class CepstrumSeries:
    """Truncated series coefficients of the logarithmic transfer function.

    ``coeffs[r-1]`` holds the coefficient of ``z^{-r}`` (the complex
    cepstrum), ``blaschke_coeffs[r-1]`` the constant-in-parameters
    coefficient of ``z^{+r}`` contributed by Blaschke factors, and
    ``tail_bound`` a closed-form upper bound on the discarded
    ``sum_{r>N} |phi_r|^2``.
    """

    phi0: complex
    coeffs: np.ndarray
    blaschke_coeffs: np.ndarray
    truncation: int
    tail_bound: float


def validate(spec: FilterSpec, eps_stab: float = EPS_STAB_DEFAULT) -> ValidatedFilter:
    """Check stability and minimum phase, returning a ValidatedFilter.

    Every pole and zero must satisfy ``|root| <= 1 - eps_stab``.  Zeros
    within the band ``(1 - eps_stab, 1/(1 - eps_stab))`` raise
    :class:`ZeroOnCircle` (the geometry is singular there); zeros beyond the
    band raise :class:`ZeroOutsideDisk` and can be routed through
    :func:`outer_factor` instead.  All offending roots are reported at once.

    Exactly coinciding pole/zero pairs are legal but degenerate downstream;
    they are flagged on the result, never cancelled silently.
    """
    if not (0.0 < eps_stab < 1.0):
        raise ValueError(f"eps_stab must be in (0, 1), got {eps_stab!r}")
    if spec.gain <= 0.0:
        raise NonPositiveGain(spec.gain)

    limit = 1.0 - eps_stab
    bad_poles = [(i, abs(p)) for i, p in enumerate(spec.poles) if abs(p) > limit]
    if bad_poles:
        raise PoleOutsideDisk(bad_poles)

    bad_blaschke = [(i, abs(b)) for i, b in enumerate(spec.blaschke_points) if abs(b) >= 1.0]
    if bad_blaschke:
        raise BlaschkePointOutsideDisk(bad_blaschke)

    on_circle = [
        (j, abs(zt)) for j, zt in enumerate(spec.zeros) if limit < abs(zt) < 1.0 / limit
    ]
    if on_circle:
        raise ZeroOnCircle(on_circle)
    outside = [(j, abs(zt)) for j, zt in enumerate(spec.zeros) if abs(zt) > limit]
    if outside:
        raise ZeroOutsideDisk(outside)

    cancellation = bool(set(spec.poles) & set(spec.zeros))
    return ValidatedFilter(
        gain=spec.gain,
        poles=spec.poles,
        zeros=spec.zeros,
        blaschke_points=spec.blaschke_points,
        z_power=spec.z_power,
        eps_stab=eps_stab,
        has_exact_cancellation=cancellation,
    )


def transfer_values(f: ValidatedFilter | FilterSpec, z: np.ndarray) -> np.ndarray:
    """Vectorised transfer-function evaluation at an array of points."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0.0) and (f.poles or f.zeros or f.z_power < 0):
        raise EvalAtPole("transfer function is singular at z = 0")
    h = np.full(z.shape, f.gain_term, dtype=complex)
    if f.z_power:
        h = h * z**f.z_power
    for zt in f.zeros:
        h = h * (1.0 - zt / z)
    for p in f.poles:
        den = 1.0 - p / z
        if np.any(den == 0.0):
            raise EvalAtPole(f"evaluation point coincides with pole {p!r}")
        h = h / den
    for zs in f.blaschke_points:
        if zs == 0.0:
            h = h * z
        else:
            den = 1.0 - np.conj(zs) * z
            if np.any(den == 0.0):
                raise EvalAtPole(f"evaluation point coincides with Blaschke pole 1/conj({zs!r})")
            # |zs|/zs as a phase: exact modulus even for subnormal zs
            h = h * cmath.exp(-1j * cmath.phase(zs)) * (zs - z) / den
    return h


def eval_transfer(f: ValidatedFilter, z: complex) -> complex:
    """Evaluate h(z) at a single point off the poles."""
    return complex(transfer_values(f, np.asarray(z, dtype=complex)))


def spectral_density(f: ValidatedFilter, w) -> float | np.ndarray:
    """Spectral density S(w) = |h(e^{iw})|^2 at real frequency w (scalar or array)."""
    w_arr = np.asarray(w, dtype=float)
    s = np.abs(transfer_values(f, np.exp(1j * w_arr))) ** 2
    if np.isscalar(w) or w_arr.ndim == 0:
        return float(s)
    return s


def _series_tail_bound(n_roots: int, rho: float, trunc: int) -> float:
    # |phi_r| <= n rho^r / r, hence
    # sum_{r>N} |phi_r|^2 <= n^2 rho^{2(N+1)} / ((N+1)^2 (1 - rho^2)).
    if n_roots == 0 or rho == 0.0:
        return 0.0
    return n_roots**2 * rho ** (2 * (trunc + 1)) / ((trunc + 1) ** 2 * (1.0 - rho * rho))


def cepstrum(f: ValidatedFilter, trunc: int = TRUNCATION_DEFAULT) -> CepstrumSeries:
    """Complex-cepstrum coefficients of log h up to order ``trunc``.

    Coefficients come from the closed-form root power sums,

        phi_r = (sum_i p_i^r - sum_j zeta_j^r) / r,

    not from an FFT of sampled log h; the FFT route lives in the quadrature
    module so the two paths stay independent.  Blaschke points contribute
    the parameter-independent ``beta_r`` on the anticausal side; a Blaschke
    point at the origin is a pure z factor and adds nothing.
    """
    if trunc < 1:
        raise ValueError(f"truncation must be >= 1, got {trunc}")
    r = np.arange(1, trunc + 1, dtype=float)
    phi = np.zeros(trunc, dtype=complex)
    for p in f.poles:
        phi += np.power(p, r)
    for zt in f.zeros:
        phi -= np.power(zt, r)
    phi /= r

    beta = np.zeros(trunc, dtype=complex)
    for zs in f.blaschke_points:
        if zs != 0.0:
            beta += (abs(zs) ** (2.0 * r) - 1.0) / np.power(zs, r) / r

    moduli = [abs(x) for x in f.poles + f.zeros]
    rho = max(moduli, default=0.0)
    tail = _series_tail_bound(len(moduli), rho, trunc)
    return CepstrumSeries(
        phi0=complex(cmath.log(f.gain_term)),
        coeffs=phi,
        blaschke_coeffs=beta,
        truncation=trunc,
        tail_bound=tail,
    )


def factor_z_power(spec: FilterSpec) -> tuple[int, FilterSpec]:
    """Split off the z^R factor, returning (R, spec with z_power = 0)."""
    return spec.z_power, replace(spec, z_power=0)


def outer_factor(spec: FilterSpec, eps_stab: float = EPS_STAB_DEFAULT) -> ValidatedFilter:
    """Reflect zeros outside the disk to their minimum-phase positions.

    Each zero with ``|zeta| > 1`` is replaced by ``1/conj(zeta)`` and the
    gain term ``sigma^2/(2 pi)`` is multiplied by ``|zeta|``, which preserves
    the spectral density pointwise on the circle.  Zeros within the margin
    band around the circle raise :class:`ZeroOnCircle`.  Minimum-phase input
    is returned unchanged (the map is idempotent).
    """
    limit = 1.0 - eps_stab
    on_circle = [
        (j, abs(zt)) for j, zt in enumerate(spec.zeros) if limit < abs(zt) < 1.0 / limit
    ]
    if on_circle:
        raise ZeroOnCircle(on_circle)

    new_zeros = []
    gain_term_factor = 1.0
    for zt in spec.zeros:
        m = abs(zt)
        if m > 1.0:
            new_zeros.append(1.0 / zt.conjugate())
            gain_term_factor *= m
        else:
            new_zeros.append(zt)
    reflected = replace(
        spec,
        zeros=tuple(new_zeros),
        gain=spec.gain * math.sqrt(gain_term_factor),
    )
    return validate(reflected, eps_stab)


def reflect_zero_out(f: ValidatedFilter, index: int) -> FilterSpec:
    """Move one zero outside the disk, compensating the gain term.

    Inverse of the :func:`outer_factor` reflection for a single zero: the
    returned spec has the same spectral density but is no longer minimum
    phase.  Used by the invariance checks.
    """
    zt = f.zeros[index]
    if zt == 0.0:
        raise ValueError("cannot reflect a zero at the origin")
    zeros = list(f.zeros)
    zeros[index] = 1.0 / zt.conjugate()
    return FilterSpec(
        gain=f.gain * math.sqrt(abs(zt)),
        poles=f.poles,
        zeros=tuple(zeros),
        blaschke_points=f.blaschke_points,
        z_power=f.z_power,
    )


def reciprocal(f: ValidatedFilter) -> ValidatedFilter:
    """Filter of the inverse system 1/h: poles and zeros swap roles.

    The gain maps as sigma -> 2 pi / sigma so the gain terms are mutual
    reciprocals.  Only root/gain filters are invertible in this family;
    Blaschke factors would put poles inside the disk.
    """
    if f.blaschke_points:
        raise ValueError("reciprocal of a filter with Blaschke factors is not minimum phase")
    return validate(
        FilterSpec(
            gain=2.0 * math.pi / f.gain,
            poles=f.zeros,
            zeros=f.poles,
            blaschke_points=(),
            z_power=-f.z_power,
        ),
        f.eps_stab,
    )
