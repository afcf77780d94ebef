import numpy as np
import pytest

from cepgeo.closed_form import ModelPoint, connection0, metric, ricci0, t_tensor
from cepgeo.filters import FilterSpec, cepstrum, reciprocal, validate
from cepgeo.quadrature import (
    QuadratureConfig,
    QuadratureUnconvergedWarning,
    cepstrum_fft,
    circle_nodes,
    connection_numeric,
    divergence,
    duality_check,
    invariance_suite,
    log_derivatives,
    metric_numeric,
    ricci_numeric,
    scalar_curvature_numeric,
    t_tensor_numeric,
)
from cepgeo.sampling import sample_root_tuples

from conftest import GAIN, arma_from_roots, make_filter

CFG = QuadratureConfig(nodes=2048)
LI2_QUARTER = float(sum(0.25**r / r**2 for r in range(1, 201)))


class TestQuadratureConfig:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            QuadratureConfig(nodes=1000)

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            QuadratureConfig(nodes=32)

    def test_rejects_step_out_of_range(self):
        with pytest.raises(ValueError):
            QuadratureConfig(deriv_step=1e-2)


class TestLogDerivatives:
    def test_pole_substitution(self, ar1):
        d = log_derivatives(ar1, CFG)
        assert d[0, 0] == pytest.approx(1.0 / (1.0 - 0.5))  # node 0 is z = 1

    def test_zero_substitution(self):
        f = make_filter(zeros=(0.3,))
        d = log_derivatives(f, CFG)
        assert d[0, 0] == pytest.approx(-1.0 / 0.7)

    def test_no_constant_fourier_mode(self, arma11):
        d = log_derivatives(arma11, CFG)
        assert np.max(np.abs(d.mean(axis=1))) < 1e-12


class TestMetricNumeric:
    def test_ar1_value(self, ar1):
        g = metric_numeric(ar1, CFG)
        assert g.mixed[0, 0] == pytest.approx(4.0 / 3.0, abs=1e-12)
        assert g.converged and g.residual < 1e-9

    def test_origin(self):
        f = make_filter(poles=(0.0,))
        assert metric_numeric(f, CFG).mixed[0, 0] == pytest.approx(1.0, abs=1e-14)

    def test_arma11_matrix(self, arma11):
        expected = np.array([[4.0 / 3.0, -1.0 / 0.85], [-1.0 / 0.85, 1.0 / 0.91]])
        assert np.allclose(metric_numeric(arma11, CFG).mixed, expected, atol=1e-12)

    def test_exactly_hermitian_by_construction(self):
        rows = sample_root_tuples(2, 3, 4, 0.9, 0.02)
        for row in rows:
            g = metric_numeric(arma_from_roots(row, 2), CFG)
            assert np.array_equal(g.mixed, g.mixed.conj().T)
            assert np.min(np.linalg.eigvalsh(g.mixed)) > 0.0

    def test_entries_match_independent_recomputation(self, arma11):
        g = metric_numeric(arma11, CFG).mixed
        z = circle_nodes(CFG.nodes)
        d = log_derivatives(arma11, CFG)
        for i in range(2):
            for j in range(2):
                direct = np.mean(d[i] * d[j].conj())
                assert abs(g[i, j] - direct) < 1e-12

    def test_pure_block_vanishes_at_constant_gain(self, arma11):
        assert np.max(np.abs(metric_numeric(arma11, CFG).pure)) < 1e-12

    def test_gain_coordinate_orthogonal_to_roots(self, arma11):
        g = metric_numeric(arma11, CFG, include_gain=True)
        assert g.labels[0] == "gain"
        assert np.max(np.abs(g.mixed[0, 1:])) < 1e-10
        assert g.mixed[0, 0] == pytest.approx(4.0 / arma11.gain**2, rel=1e-12)
        assert g.pure[0, 0] == pytest.approx(4.0 / arma11.gain**2, rel=1e-12)

    def test_convergence_at_doubled_grid(self):
        rows = sample_root_tuples(4, 3, 4, 0.9, 0.0)
        for row in rows:
            assert metric_numeric(arma_from_roots(row, 2), CFG).residual < 1e-9

    def test_slow_convergence_warns_instead_of_aborting(self):
        f = make_filter(poles=(0.9999,), gain=GAIN)
        with pytest.warns(QuadratureUnconvergedWarning):
            g = metric_numeric(f, QuadratureConfig(nodes=64))
        assert not g.converged
        assert g.residual > 1e-9


class TestConnectionNumeric:
    def test_ar1_levi_civita(self, ar1):
        conn = connection_numeric(ar1, 0.0, CFG)
        assert conn.gamma_mixed[0, 0, 0] == pytest.approx(8.0 / 9.0, abs=1e-12)

    def test_origin_vanishes(self):
        f = make_filter(poles=(0.0,))
        conn = connection_numeric(f, 0.0, CFG)
        assert np.max(np.abs(conn.gamma_mixed)) < 1e-14

    def test_mixed_pair_components_vanish_at_alpha_zero(self, arma11):
        conn = connection_numeric(arma11, 0.0, CFG)
        assert np.all(conn.gamma_cross == 0.0)
        assert np.all(conn.gamma_cross_bar == 0.0)

    def test_ar1_alpha_one_flat(self, ar1):
        conn = connection_numeric(ar1, 1.0, CFG)
        assert abs(conn.gamma_mixed[0, 0, 0]) < 1e-12


class TestTTensorNumeric:
    def test_ar1_value(self, ar1):
        t = t_tensor_numeric(ar1, CFG)
        assert t.t_mixed[0, 0, 0] == pytest.approx(16.0 / 9.0, abs=1e-12)

    def test_origin(self):
        f = make_filter(poles=(0.0,))
        assert np.max(np.abs(t_tensor_numeric(f, CFG).t_mixed)) < 1e-14

    def test_symmetry_in_first_two_indices(self, arma11):
        t = t_tensor_numeric(arma11, CFG).t_mixed
        assert np.max(np.abs(t - np.transpose(t, (1, 0, 2)))) < 1e-12


class TestOracleAgreement:
    def test_closed_forms_match_quadrature(self):
        rows = sample_root_tuples(6, 5, 4, 0.9, 0.05)
        cfg = QuadratureConfig(nodes=4096)
        for row in rows:
            f = arma_from_roots(row, 2)
            m = ModelPoint.from_filter(f)
            assert np.max(np.abs(metric(m).mixed - metric_numeric(f, cfg).mixed)) < 1e-10
            assert (
                np.max(
                    np.abs(
                        connection0(m).gamma_mixed
                        - connection_numeric(f, 0.0, cfg).gamma_mixed
                    )
                )
                < 1e-10
            )
            assert (
                np.max(np.abs(t_tensor(m).t_mixed - t_tensor_numeric(f, cfg).t_mixed))
                < 1e-10
            )
            assert np.max(np.abs(ricci0(m).ricci - ricci_numeric(f, cfg))) < 1e-8
            assert ricci0(m).scalar == pytest.approx(
                scalar_curvature_numeric(f, cfg), abs=1e-8
            )


class TestDivergence:
    def test_identical_inputs_give_zero(self, arma11):
        for alpha in (-1.0, -0.5, 0.0, 0.5, 1.0):
            assert divergence(arma11, arma11, alpha, CFG).value == 0.0

    def test_zero_alpha_equals_potential_for_normalised_filter(self, ar1):
        allpass = make_filter()
        d = divergence(allpass, ar1, 0.0, CFG)
        assert d.value == pytest.approx(LI2_QUARTER, abs=1e-12)

    def test_reciprocal_pair_swaps_alpha_sign(self):
        rows = sample_root_tuples(8, 4, 4, 0.9, 0.0)
        f1 = arma_from_roots(rows[0], 2)
        f2 = arma_from_roots(rows[1], 2)
        lhs = divergence(reciprocal(f1), reciprocal(f2), 0.5, CFG).value
        rhs = divergence(f1, f2, -0.5, CFG).value
        assert abs(lhs - rhs) < 1e-10

    def test_nonnegative_for_alpha_family(self):
        rows = sample_root_tuples(10, 4, 4, 0.9, 0.0)
        f1 = arma_from_roots(rows[0], 2)
        f2 = arma_from_roots(rows[1], 2)
        for alpha in np.linspace(-2.0, 2.0, 9):
            assert divergence(f1, f2, float(alpha), CFG).value >= -1e-12

    def test_multiplication_rule(self):
        allpass = make_filter()
        f = arma_from_roots(sample_root_tuples(12, 1, 4, 0.9, 0.0)[0], 2)
        d1 = divergence(allpass, reciprocal(f), 0.0, CFG).value
        d2 = divergence(allpass, f, 0.0, CFG).value
        d3 = divergence(f, allpass, 0.0, CFG).value
        assert abs(d1 - d2) < 1e-10
        assert abs(d2 - d3) < 1e-10


class TestCepstrumFFT:
    def test_matches_power_sum_route(self, arma11):
        coeffs = cepstrum_fft(arma11, 16, 4096)
        series = cepstrum(arma11, 16)
        assert abs(coeffs[0] - series.phi0) < 1e-13
        assert np.max(np.abs(coeffs[1:] - series.coeffs)) < 1e-13

    def test_rejects_winding_factors(self):
        f = make_filter(poles=(0.5,), z_power=2)
        with pytest.raises(ValueError):
            cepstrum_fft(f, 8)


class TestInvarianceSuite:
    def test_all_legs_within_tolerance(self, arma11):
        report = invariance_suite(arma11, CFG)
        assert report.identity.metric_residual == 0.0
        assert report.z_power.metric_residual < 1e-12
        assert report.blaschke.metric_residual < 1e-10
        assert report.outer_reflection is not None
        assert report.outer_reflection.metric_residual < 1e-10
        assert report.max_metric_residual < 1e-10

    def test_sdf_preserved_by_each_transformation(self, arma11):
        report = invariance_suite(arma11, CFG)
        for leg in (report.z_power, report.blaschke, report.outer_reflection):
            assert leg.sdf_residual < 1e-10

    def test_reflection_leg_absent_without_zeros(self, ar1):
        assert invariance_suite(ar1, CFG).outer_reflection is None


class TestDualityCheck:
    def test_ar1_identity_holds(self, ar1):
        report = duality_check(ar1, 0.0, CFG)
        assert report.duality_residual < 1e-6

    def test_alpha_sign_relabelling(self, arma11):
        plus = duality_check(arma11, 1.0, CFG)
        minus = duality_check(arma11, -1.0, CFG)
        assert plus.duality_residual == pytest.approx(minus.duality_residual, rel=1e-12)

    def test_reciprocal_connection_swap(self):
        f = arma_from_roots(sample_root_tuples(14, 1, 4, 0.9, 0.05)[0], 2)
        for alpha in (0.5, 1.0):
            assert duality_check(f, alpha, CFG).reciprocal_residual < 1e-6
