"""Independent quadrature oracle for the filter geometry.

Every geometric object has a defining integral over the unit circle,

    (1/2 pi) int_{-pi}^{pi} G(e^{iw}) dw  =  (1/2 pi i) oint G(z) dz/z,

discretised here by the uniform trapezoid rule (spectrally accurate for the
rational integrands at hand).  First and second parameter derivatives of
log h are analytic rational expressions, never differenced; only
derivatives *of tensors* use central Wirtinger differences.  This module
never calls the closed forms in :mod:`cepgeo.closed_form`, so agreement
between the two is a genuine cross-check.

Convergence is monitored by comparing each result against the same
computation on a doubled grid; disagreement beyond ``tol`` attaches a
:class:`QuadratureUnconvergedWarning` to the run and marks the result, but
does not abort (roots near the circle legitimately converge slowly).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .closed_form import ConnectionTensors, HermitianMetric
from .filters import (
    FilterSpec,
    ValidatedFilter,
    outer_factor,
    reciprocal,
    reflect_zero_out,
    transfer_values,
    validate,
)

NODES_DEFAULT = 4096
DERIV_STEP_DEFAULT = 1e-5


class QuadratureUnconvergedWarning(UserWarning):
    """Grid doubling changed a quadrature result by more than the tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Circle-grid size and Wirtinger step for tensor derivatives."""

    nodes: int = NODES_DEFAULT
    deriv_step: float = DERIV_STEP_DEFAULT

    def __post_init__(self):
        nodes = int(self.nodes)
        if nodes < 64 or nodes & (nodes - 1):
            raise ValueError(f"nodes must be a power of two >= 64, got {nodes}")
        step = float(self.deriv_step)
        if not (1e-7 <= step <= 1e-3):
            raise ValueError(f"deriv_step must lie in [1e-7, 1e-3], got {step!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "deriv_step", step)


@dataclass(frozen=True)
class DivergenceValue:
    """alpha-divergence between two spectral densities."""

    alpha: float
    value: float
    residual: float = 0.0
    converged: bool = True


def circle_nodes(m: int) -> np.ndarray:
    """m-th roots of unity, the quadrature grid."""
    return np.exp(2j * np.pi * np.arange(m) / m)


def _deriv_arrays(f: ValidatedFilter, z: np.ndarray, include_gain: bool = False):
    """First and second parameter derivatives of log h on a grid.

    For a pole p:  d_p log h = 1/(z - p),  d_p^2 log h = 1/(z - p)^2;
    for a zero the sign flips.  Cross second derivatives vanish because
    log h separates per root.  With ``include_gain`` a leading row for the
    gain coordinate (d_sigma log h = 2/sigma, constant on the grid) is
    prepended.
    """
    roots = f.coordinates
    signs = f.signature
    n = len(roots)
    extra = 1 if include_gain else 0
    d = np.empty((n + extra, z.size), dtype=complex)
    dd = np.empty((n + extra, z.size), dtype=complex)
    if include_gain:
        d[0] = 2.0 / f.gain
        dd[0] = -2.0 / (f.gain * f.gain)
    for i, (root, c) in enumerate(zip(roots, signs)):
        d[extra + i] = -c / (z - root)
        dd[extra + i] = -c / (z - root) ** 2
    return d, dd


def log_derivatives(
    f: ValidatedFilter, cfg: QuadratureConfig = QuadratureConfig()
) -> np.ndarray:
    """d_i log h evaluated at the circle nodes, one row per coordinate."""
    d, _ = _deriv_arrays(f, circle_nodes(cfg.nodes))
    return d


def _check_convergence(value, value_2m, tol: float, what: str) -> tuple[float, bool]:
    residual = float(np.max(np.abs(np.asarray(value) - np.asarray(value_2m)))) if np.size(value) else 0.0
    converged = residual <= tol
    if not converged:
        warnings.warn(
            f"{what}: doubling the grid changed the result by {residual:.3g} (> {tol:.3g})",
            QuadratureUnconvergedWarning,
            stacklevel=3,
        )
    return residual, converged


def _metric_blocks(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Per-entry dots in fixed order keep the result bitwise deterministic and
    # the mixed block Hermitian by construction.
    n, m = d.shape
    mixed = np.empty((n, n), dtype=complex)
    pure = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            mixed[i, j] = np.dot(d[i], d[j].conj()) / m
            mixed[j, i] = mixed[i, j].conjugate()
            pure[i, j] = np.dot(d[i], d[j]) / m
            pure[j, i] = pure[i, j]
    return mixed, pure


def metric_numeric(
    f: ValidatedFilter,
    cfg: QuadratureConfig = QuadratureConfig(),
    include_gain: bool = False,
    tol: float = 1e-9,
) -> HermitianMetric:
    """Metric by quadrature: mixed_{ij} = mean over nodes of d_i log h conj(d_j log h).

    The pure block uses the same average without conjugation and vanishes on
    the constant-gain submanifold; request ``include_gain`` to see the gain
    row, whose mixed entries against root coordinates vanish while the pure
    gain-gain entry does not.
    """
    z2 = circle_nodes(2 * cfg.nodes)
    d2, _ = _deriv_arrays(f, z2, include_gain)
    mixed2, pure2 = _metric_blocks(d2)
    mixed, pure = _metric_blocks(d2[:, ::2])
    res_m, conv_m = _check_convergence(mixed, mixed2, tol, "metric")
    res_p, conv_p = _check_convergence(pure, pure2, tol, "metric pure block")
    labels = (("gain",) if include_gain else ()) + f.labels
    return HermitianMetric(
        mixed=mixed,
        pure=pure,
        labels=labels,
        residual=max(res_m, res_p),
        converged=conv_m and conv_p,
    )


def _gamma_families(d, dd, alpha):
    n, m = d.shape
    dc = d.conj()
    triple = np.einsum("im,jm,km->ijk", d, d, dc) / m
    triple_pure = np.einsum("im,jm,km->ijk", d, d, d) / m
    cross = np.einsum("im,jm,km->ijk", d, dc, d) / m
    cross_bar = np.einsum("im,jm,km->ijk", d, dc, dc) / m
    second_mixed = np.einsum("im,km->ik", dd, dc) / m
    second_pure = np.einsum("im,km->ik", dd, d) / m
    gamma_mixed = -alpha * triple
    gamma_pure = -alpha * triple_pure
    for i in range(n):
        gamma_mixed[i, i, :] += second_mixed[i]
        gamma_pure[i, i, :] += second_pure[i]
    return gamma_mixed, gamma_pure, -alpha * cross, -alpha * cross_bar


def connection_numeric(
    f: ValidatedFilter,
    alpha: float,
    cfg: QuadratureConfig = QuadratureConfig(),
    tol: float = 1e-9,
) -> ConnectionTensors:
    """All four alpha-connection index families by quadrature.

    The second-derivative term contributes only when the first two indices
    are an unbarred pair (or, by conjugation, a barred pair); purely mixed
    pairs carry only the -alpha triple product.
    """
    z2 = circle_nodes(2 * cfg.nodes)
    d2, dd2 = _deriv_arrays(f, z2)
    fams2 = _gamma_families(d2, dd2, alpha)
    fams = _gamma_families(d2[:, ::2], dd2[:, ::2], alpha)
    residual = 0.0
    converged = True
    for a, b, name in zip(fams, fams2, ("gamma_mixed", "gamma_pure", "gamma_cross", "gamma_cross_bar")):
        res, conv = _check_convergence(a, b, tol, f"connection {name}")
        residual = max(residual, res)
        converged = converged and conv
    return ConnectionTensors(
        alpha=float(alpha),
        gamma_mixed=fams[0],
        gamma_pure=fams[1],
        gamma_cross=fams[2],
        gamma_cross_bar=fams[3],
        residual=residual,
        converged=converged,
    )


def t_tensor_numeric(
    f: ValidatedFilter,
    cfg: QuadratureConfig = QuadratureConfig(),
    tol: float = 1e-9,
) -> ConnectionTensors:
    """Symmetric tensor by quadrature, with the factor-2 normalisation

    T_{ij,kbar} = (1/pi i) oint (d_i log h)(d_j log h)(d_k log h)* dz/z.
    """

    def blocks(d):
        m = d.shape[1]
        t_mixed = 2.0 * np.einsum("im,jm,km->ijk", d, d, d.conj()) / m
        t_pure = 2.0 * np.einsum("im,jm,km->ijk", d, d, d) / m
        return t_mixed, t_pure

    z2 = circle_nodes(2 * cfg.nodes)
    d2, _ = _deriv_arrays(f, z2)
    tm2, tp2 = blocks(d2)
    tm, tp = blocks(d2[:, ::2])
    res_m, conv_m = _check_convergence(tm, tm2, tol, "t_tensor mixed")
    res_p, conv_p = _check_convergence(tp, tp2, tol, "t_tensor pure")
    return ConnectionTensors(
        alpha=0.0,
        t_mixed=tm,
        t_pure=tp,
        residual=max(res_m, res_p),
        converged=conv_m and conv_p,
    )


def ricci_numeric(
    f: ValidatedFilter, cfg: QuadratureConfig = QuadratureConfig()
) -> np.ndarray:
    """Ricci block R_{i jbar} = -d_i d_jbar log det g, from quadrature alone.

    Uses the exact identity d log det g = tr(g^-1 dg): every parameter
    derivative of the metric is itself a circle integral with an analytic
    integrand, so no finite differencing enters,

        R_{i jbar} = ginv[j,i] (v_i . ginv . u_j  -  w_{ij})

    with v_i[n] = <dd_i, d_n>, u_j[m] = <d_m, dd_j>, w_{ij} = <dd_i, dd_j>
    (brackets are grid averages against conjugated second factors).
    """
    z = circle_nodes(cfg.nodes)
    d, dd = _deriv_arrays(f, z)
    m = z.size
    g = np.einsum("im,jm->ij", d, d.conj()) / m
    v = np.einsum("im,jm->ij", dd, d.conj()) / m  # v[i][n]
    u = v.conj().T  # u[m][j] = <d_m, dd_j>
    w = np.einsum("im,jm->ij", dd, dd.conj()) / m
    ginv = np.linalg.inv(g)
    n = d.shape[0]
    ricci = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            ricci[i, j] = ginv[j, i] * (v[i] @ ginv @ u[:, j] - w[i, j])
    return ricci


def scalar_curvature_numeric(
    f: ValidatedFilter, cfg: QuadratureConfig = QuadratureConfig()
) -> float:
    """Scalar curvature from the numeric metric and numeric Ricci block."""
    z = circle_nodes(cfg.nodes)
    d, _ = _deriv_arrays(f, z)
    g = np.einsum("im,jm->ij", d, d.conj()) / d.shape[1]
    ricci = ricci_numeric(f, cfg)
    return float(np.trace(np.linalg.inv(g) @ ricci).real)


def _spectral_grid(f, m: int) -> np.ndarray:
    # works on ValidatedFilter and FilterSpec alike
    return np.abs(transfer_values(f, circle_nodes(m))) ** 2


def divergence(
    f1: ValidatedFilter,
    f2: ValidatedFilter,
    alpha: float,
    cfg: QuadratureConfig = QuadratureConfig(),
    tol: float = 1e-9,
) -> DivergenceValue:
    """alpha-divergence D^(alpha)(S1 || S2) between the two spectral densities.

    For alpha != 0 the integrand ((S2/S1)^alpha - 1 - alpha log(S2/S1))/alpha^2
    is evaluated in the log domain via expm1, which keeps small ratios exact
    and avoids overflow; alpha = 0 is the separate squared-log branch
    (half the squared Hellinger-type integrand).  alpha = -1 recovers the
    Kullback-Leibler (Itakura-Saito) form.
    """

    def value_on(m: int) -> float:
        ell = np.log(_spectral_grid(f2, m)) - np.log(_spectral_grid(f1, m))
        if alpha == 0.0:
            return float(np.mean(ell * ell) / 2.0)
        return float(np.mean(np.expm1(alpha * ell) - alpha * ell) / (alpha * alpha))

    val = value_on(cfg.nodes)
    val2 = value_on(2 * cfg.nodes)
    residual, converged = _check_convergence(val, val2, tol, "divergence")
    return DivergenceValue(alpha=float(alpha), value=val, residual=residual, converged=converged)


def cepstrum_fft(f: ValidatedFilter, trunc: int, nodes: int = NODES_DEFAULT) -> np.ndarray:
    """Cepstrum coefficients phi_0..phi_N from an FFT of sampled log h.

    Samples log h as a sum of per-factor principal logarithms (each factor
    1 - root/z stays in the right half-plane, so no unwrapping is needed)
    and reads the z^{-r} coefficients off the inverse FFT.  Independent of
    the closed-form power sums in :func:`cepgeo.filters.cepstrum`.  Requires
    a winding-free log, i.e. no z power and no Blaschke factors.
    """
    if f.z_power or f.blaschke_points:
        raise ValueError("FFT cepstrum requires z_power == 0 and no Blaschke points")
    if trunc >= nodes // 2:
        raise ValueError("truncation must be below half the node count")
    z = circle_nodes(nodes)
    logh = np.full(nodes, math.log(f.gain_term), dtype=complex)
    for zt in f.zeros:
        logh += np.log(1.0 - zt / z)
    for p in f.poles:
        logh -= np.log(1.0 - p / z)
    return np.fft.ifft(logh)[: trunc + 1]


@dataclass(frozen=True)
class TransformResiduals:
    """Residuals for one geometry-preserving transformation."""

    metric_residual: float
    sdf_residual: float


@dataclass(frozen=True)
class InvarianceReport:
    """Metric and spectral-density residuals under unimodular transformations."""

    identity: TransformResiduals
    z_power: TransformResiduals
    blaschke: TransformResiduals
    outer_reflection: TransformResiduals | None

    @property
    def max_metric_residual(self) -> float:
        legs = [self.identity, self.z_power, self.blaschke]
        if self.outer_reflection is not None:
            legs.append(self.outer_reflection)
        return max(leg.metric_residual for leg in legs)


def _metric_residual(f1: ValidatedFilter, f2: ValidatedFilter, cfg: QuadratureConfig) -> float:
    g1 = metric_numeric(f1, cfg).mixed
    g2 = metric_numeric(f2, cfg).mixed
    return float(np.max(np.abs(g1 - g2))) if g1.size else 0.0


def _sdf_residual(f1, f2, grid: int = 1024) -> float:
    s1 = _spectral_grid(f1, grid)
    s2 = _spectral_grid(f2, grid)
    return float(np.max(np.abs(s1 - s2) / s1))


def invariance_suite(
    f: ValidatedFilter,
    cfg: QuadratureConfig = QuadratureConfig(),
    z_power_shift: int = 5,
    blaschke_point: complex = 0.4,
) -> InvarianceReport:
    """Residuals of the metric and spectral density under unimodular factors.

    Checks (i) multiplying by z^R, (ii) appending a Blaschke point, and
    (iii) reflecting a zero outside the disk with gain compensation and
    recovering it through :func:`cepgeo.filters.outer_factor`.  For (i) and
    (ii) the spectral density changes only at rounding level while the
    coordinates are untouched; for (iii) both the root list and the gain are
    transformed and recovered.  The outer-reflection leg is None when the
    filter has no nonzero zero to reflect.
    """
    spec = f.to_spec()
    f_z = validate(replace(spec, z_power=spec.z_power + z_power_shift), f.eps_stab)
    f_b = validate(
        replace(spec, blaschke_points=spec.blaschke_points + (complex(blaschke_point),)),
        f.eps_stab,
    )
    identity = TransformResiduals(_metric_residual(f, f, cfg), _sdf_residual(f, f))
    leg_z = TransformResiduals(_metric_residual(f, f_z, cfg), _sdf_residual(f, f_z))
    leg_b = TransformResiduals(_metric_residual(f, f_b, cfg), _sdf_residual(f, f_b))

    reflection = None
    candidates = [j for j, zt in enumerate(f.zeros) if zt != 0.0]
    if candidates:
        j = max(candidates, key=lambda idx: abs(f.zeros[idx]))
        twin = reflect_zero_out(f, j)  # same S, no longer minimum phase
        recovered = outer_factor(twin, f.eps_stab)
        reflection = TransformResiduals(
            _metric_residual(f, recovered, cfg),
            _sdf_residual(f, twin),
        )
    return InvarianceReport(
        identity=identity, z_power=leg_z, blaschke=leg_b, outer_reflection=reflection
    )


@dataclass(frozen=True)
class DualityReport:
    """Residuals of the alpha-duality identity and the reciprocal-filter swap."""

    alpha: float
    duality_residual: float
    reciprocal_residual: float


def _full_index_arrays(f: ValidatedFilter, m: int):
    z = circle_nodes(m)
    d, dd = _deriv_arrays(f, z)
    big_d = np.vstack([d, d.conj()])
    big_dd = np.vstack([dd, dd.conj()])
    return big_d, big_dd


def _gamma_full(f: ValidatedFilter, alpha: float, m: int) -> np.ndarray:
    """Gamma^{(alpha)}_{mu nu, rho} over the full 2n complexified index range."""
    big_d, big_dd = _full_index_arrays(f, m)
    two_n = big_d.shape[0]
    gamma = -alpha * np.einsum("am,bm,cm->abc", big_d, big_d, big_d) / m
    second = np.einsum("am,cm->ac", big_dd, big_d) / m
    for a in range(two_n):
        gamma[a, a, :] += second[a]
    return gamma


def _metric_full(f: ValidatedFilter, m: int) -> np.ndarray:
    big_d, _ = _full_index_arrays(f, m)
    return np.einsum("am,bm->ab", big_d, big_d) / m


def _with_coordinate(f: ValidatedFilter, index: int, value: complex) -> ValidatedFilter:
    p = len(f.poles)
    poles = list(f.poles)
    zeros = list(f.zeros)
    if index < p:
        poles[index] = value
    else:
        zeros[index - p] = value
    return validate(
        FilterSpec(
            gain=f.gain,
            poles=tuple(poles),
            zeros=tuple(zeros),
            blaschke_points=f.blaschke_points,
            z_power=f.z_power,
        ),
        f.eps_stab,
    )


def duality_check(
    f: ValidatedFilter,
    alpha: float,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> DualityReport:
    """Residuals of d_mu g_{nu rho} = Gamma^{(a)}_{mu nu,rho} + Gamma^{(-a)}_{mu rho,nu}.

    Both sides run over all holomorphic and anti-holomorphic index
    combinations; the left side uses central Wirtinger differences of the
    quadrature metric, so the residual is finite-difference limited.  Also
    checks the reciprocal-system swap: the alpha-connection of the inverse
    filter equals the (-alpha)-connection of the original once the swapped
    pole/zero ordering is permuted back.
    """
    m = cfg.nodes
    n = f.dimension
    step = cfg.deriv_step
    gamma_a = _gamma_full(f, alpha, m)
    gamma_ma = _gamma_full(f, -alpha, m)

    worst = 0.0
    for i in range(n):
        xi = f.coordinates[i]
        gxp = _metric_full(_with_coordinate(f, i, xi + step), m)
        gxm = _metric_full(_with_coordinate(f, i, xi - step), m)
        gyp = _metric_full(_with_coordinate(f, i, xi + 1j * step), m)
        gym = _metric_full(_with_coordinate(f, i, xi - 1j * step), m)
        dx = (gxp - gxm) / (2.0 * step)
        dy = (gyp - gym) / (2.0 * step)
        d_hol = 0.5 * (dx - 1j * dy)
        d_anti = 0.5 * (dx + 1j * dy)
        for mu, lhs in ((i, d_hol), (n + i, d_anti)):
            rhs = gamma_a[mu] + gamma_ma[mu].T
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))

    rec = reciprocal(f)
    p, q = len(f.poles), len(f.zeros)
    perm = list(range(p, p + q)) + list(range(p))
    perm_full = perm + [n + a for a in perm]
    gamma_rec = _gamma_full(rec, alpha, m)
    expected = gamma_ma[np.ix_(perm_full, perm_full, perm_full)]
    rec_residual = float(np.max(np.abs(gamma_rec - expected)))
    return DualityReport(
        alpha=float(alpha), duality_residual=worst, reciprocal_residual=rec_residual
    )
