"""Closed-form information geometry of stable ARMA filters.

Coordinates are the poles followed by the zeros, ``xi^1 .. xi^n``, with a
signature ``c_i = -1`` for poles and ``+1`` for zeros, on the constant-gain
submanifold.  The geometry is Kahler: the metric is the mixed Hessian of
the potential

    K = sum_{r>=1} (1/r^2) |sum_i c_i (xi^i)^r|^2,

and every tensor below has a rational closed form in the coordinates:

    g_{i jbar}        = c_i c_j / (1 - xi^i conj(xi^j))
    Gamma^0_{ij,kbar} = c_j c_k delta_ij conj(xi^k) / (1 - xi^j conj(xi^k))^2
    T_{ij,kbar}       = -2 c_i c_j c_k conj(xi^k)
                        / ((1 - xi^i conj(xi^k)) (1 - xi^j conj(xi^k)))
    R^0_{i jbar}      = -1 / (1 - xi^i conj(xi^j))^2

The sign of T here is the one fixed by its defining circle integral
(1/pi i) oint (d_i log h)(d_j log h)(d_k log h)* dz/z; the quadrature module
computes that integral independently and the two must agree.

Index conventions: ``mixed`` arrays put the barred index last; the inverse
metric ``B[i][j] = g^{i jbar}`` satisfies ``sum_j B[i][j] g[k][j] = delta_ik``
and contractions are ``sum_{ij} B[i][j] X[i][j]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .filters import ValidatedFilter

DELTA_COINCIDE = 1e-8
POTENTIAL_TRUNCATION_DEFAULT = 256
WIRTINGER_STEP_DEFAULT = 1e-5


class CoincidentRootsError(ValueError):
    """Raised when coincident coordinates make the metric singular."""

    code = "COINCIDENT_ROOTS"


class CoincidentRootsWarning(UserWarning):
    """Nearly coincident coordinates: closed-form inverse replaced by a solve."""


@dataclass(frozen=True)
class ModelPoint:
    """Point on the constant-gain manifold: root coordinates plus signature."""

    params: tuple[complex, ...]
    signature: tuple[int, ...]

    def __post_init__(self):
        params = tuple(complex(p) for p in self.params)
        signature = tuple(int(c) for c in self.signature)
        if len(params) != len(signature):
            raise ValueError("params and signature must have equal length")
        if any(c not in (-1, 1) for c in signature):
            raise ValueError("signature entries must be -1 (pole) or +1 (zero)")
        if any(abs(p) >= 1.0 for p in params):
            raise ValueError("all coordinates must lie inside the open unit disk")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "signature", signature)

    @classmethod
    def from_filter(cls, f: ValidatedFilter) -> "ModelPoint":
        return cls(params=f.coordinates, signature=f.signature)

    @property
    def n(self) -> int:
        return len(self.params)

    @property
    def min_pairwise_distance(self) -> float:
        if self.n < 2:
            return math.inf
        return min(
            abs(self.params[i] - self.params[j])
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(
            f"{'pole' if c < 0 else 'zero'}{i}" for i, c in enumerate(self.signature)
        )

    def replace_param(self, index: int, value: complex) -> "ModelPoint":
        params = list(self.params)
        params[index] = value
        return ModelPoint(tuple(params), self.signature)


@dataclass(frozen=True)
class HermitianMetric:
    """Fisher metric blocks in complexified coordinates.

    ``mixed[i][j]`` is g_{i jbar}; ``pure[i][j]`` is g_{ij}, which vanishes
    whenever the zeroth cepstrum coefficient is constant in the parameters
    (always the case on the constant-gain submanifold).
    """

    mixed: np.ndarray
    pure: np.ndarray
    labels: tuple[str, ...]
    residual: float = 0.0
    converged: bool = True


@dataclass(frozen=True)
class ConnectionTensors:
    """Connection components and symmetric cubic tensor, barred index last.

    ``gamma_mixed`` holds Gamma^{(alpha)}_{ij,kbar}, ``gamma_pure``
    Gamma^{(alpha)}_{ij,k}, ``gamma_cross`` Gamma^{(alpha)}_{i jbar,k} and
    ``gamma_cross_bar`` Gamma^{(alpha)}_{i jbar,kbar}; ``t_mixed`` and
    ``t_pure`` the corresponding T components.  Parts an operation does not
    compute are None.
    """

    alpha: float
    gamma_mixed: np.ndarray | None = None
    gamma_pure: np.ndarray | None = None
    gamma_cross: np.ndarray | None = None
    gamma_cross_bar: np.ndarray | None = None
    t_mixed: np.ndarray | None = None
    t_pure: np.ndarray | None = None
    residual: float = 0.0
    converged: bool = True


@dataclass(frozen=True)
class CurvatureReport:
    """Ricci block R_{i jbar}, scalar curvature, and metric determinant."""

    alpha: float
    ricci: np.ndarray
    scalar: float
    det_g: float


@dataclass(frozen=True)
class KahlerPotential:
    """Partial sum of the potential series with a rigorous tail bound."""

    value: float
    tail_bound: float
    truncation: int

    def __float__(self) -> float:
        return self.value


def _one_minus_outer(m: ModelPoint) -> np.ndarray:
    xi = np.asarray(m.params, dtype=complex)
    return 1.0 - np.outer(xi, xi.conj())


def _hermitize(a: np.ndarray, real_diag: np.ndarray) -> np.ndarray:
    # rebuild from the upper triangle so conjugate-transpose symmetry is exact
    # (fused complex multiplies are not bit-symmetric under conjugation)
    upper = np.triu(a, 1)
    return upper + upper.conj().T + np.diag(real_diag.astype(complex))


def _symmetrize_first_two(t: np.ndarray) -> np.ndarray:
    upper = np.triu(t.transpose(2, 0, 1), 1)
    diag = t.transpose(2, 0, 1) * np.eye(t.shape[0])[None, :, :]
    sym = upper + upper.transpose(0, 2, 1) + diag
    return sym.transpose(1, 2, 0)


def kahler_potential(m: ModelPoint, trunc: int = POTENTIAL_TRUNCATION_DEFAULT) -> KahlerPotential:
    """Potential partial sum sum_{r<=N} |sum_i c_i xi_i^r|^2 / r^2 with tail bound."""
    if trunc < 1:
        raise ValueError(f"truncation must be >= 1, got {trunc}")
    if m.n == 0:
        return KahlerPotential(0.0, 0.0, trunc)
    r = np.arange(1, trunc + 1, dtype=float)
    xi = np.asarray(m.params, dtype=complex)
    c = np.asarray(m.signature, dtype=float)
    powers = xi[:, None] ** r[None, :]
    s = (c[:, None] * powers).sum(axis=0)
    value = float(np.sum((s * s.conj()).real / r**2))
    rho = max(abs(p) for p in m.params)
    if rho == 0.0:
        tail = 0.0
    else:
        tail = m.n**2 * rho ** (2 * (trunc + 1)) / ((trunc + 1) ** 2 * (1.0 - rho * rho))
    return KahlerPotential(value, tail, trunc)


def metric(m: ModelPoint) -> HermitianMetric:
    """Closed-form metric: mixed block c_i c_j / (1 - xi^i conj(xi^j)), pure block 0."""
    xi = np.asarray(m.params, dtype=complex)
    c = np.asarray(m.signature, dtype=float)
    mixed = _hermitize(
        np.outer(c, c) / _one_minus_outer(m), 1.0 / (1.0 - np.abs(xi) ** 2)
    )
    pure = np.zeros((m.n, m.n), dtype=complex)
    return HermitianMetric(mixed=mixed, pure=pure, labels=m.labels)


def inverse_metric(m: ModelPoint, delta_coincide: float = DELTA_COINCIDE) -> np.ndarray:
    """Inverse metric g^{i jbar} by the Cauchy-matrix product formula.

    The closed form divides by Vandermonde factors and explodes near
    coincident coordinates; below ``delta_coincide`` pairwise distance the
    result falls back to a pivoted linear solve on the closed-form metric
    and a :class:`CoincidentRootsWarning` is attached.  Exactly singular
    metrics raise :class:`CoincidentRootsError`.

    Satisfies ``sum_j B[i][j] mixed[k][j] = delta_ik``.
    """
    if m.n == 0:
        return np.zeros((0, 0), dtype=complex)
    if m.min_pairwise_distance < delta_coincide:
        warnings.warn(
            "coordinates nearly coincide; using a linear solve instead of the "
            "closed-form inverse",
            CoincidentRootsWarning,
            stacklevel=2,
        )
        g = metric(m).mixed
        try:
            return np.linalg.solve(g, np.eye(m.n, dtype=complex)).T
        except np.linalg.LinAlgError as exc:
            raise CoincidentRootsError(
                f"metric is singular at coincident coordinates: {exc}"
            ) from exc

    xi = np.asarray(m.params, dtype=complex)
    c = np.asarray(m.signature, dtype=float)
    a = _one_minus_outer(m)  # a[i][j] = 1 - xi^i conj(xi^j)
    row = np.prod(a, axis=1)  # prod_k (1 - xi^i conj(xi^k))
    col = np.prod(a, axis=0)  # prod_k (1 - xi^k conj(xi^j))
    diffs = xi[None, :] - xi[:, None]  # diffs[i][k] = xi^k - xi^i
    np.fill_diagonal(diffs, 1.0)
    p = np.prod(diffs, axis=1)  # prod_{k != i} (xi^k - xi^i)
    return np.outer(c, c) * (row[:, None] * col[None, :]) / (
        a * (p[:, None] * p.conj()[None, :])
    )


def metric_determinant(m: ModelPoint) -> float:
    """det g = prod_{j<k} |xi^k - xi^j|^2 / prod_{j,k} (1 - xi^j conj(xi^k)).

    Real and positive for pairwise-distinct coordinates, exactly zero at
    coincidences; independent of the pole/zero signature.
    """
    if m.n == 0:
        return 1.0
    xi = np.asarray(m.params, dtype=complex)
    num = 1.0
    for j in range(m.n):
        for k in range(j + 1, m.n):
            num *= abs(xi[k] - xi[j]) ** 2
    den = complex(np.prod(_one_minus_outer(m)))
    return float(num / den.real)


def connection0(m: ModelPoint) -> ConnectionTensors:
    """Levi-Civita connection: Gamma^0_{ij,kbar} = c_j c_k delta_ij conj(xi^k)/(1-xi^j conj(xi^k))^2."""
    n = m.n
    xi = np.asarray(m.params, dtype=complex)
    c = np.asarray(m.signature, dtype=float)
    a = _one_minus_outer(m)
    gamma = np.zeros((n, n, n), dtype=complex)
    for j in range(n):
        gamma[j, j, :] = c[j] * c * xi.conj() / a[j, :] ** 2
    zeros = np.zeros((n, n, n), dtype=complex)
    return ConnectionTensors(
        alpha=0.0,
        gamma_mixed=gamma,
        gamma_pure=zeros,
        gamma_cross=zeros.copy(),
        gamma_cross_bar=zeros.copy(),
    )


def t_tensor(m: ModelPoint) -> ConnectionTensors:
    """Symmetric cubic tensor T_{ij,kbar}; the pure part vanishes at constant gain."""
    n = m.n
    xi = np.asarray(m.params, dtype=complex)
    c = np.asarray(m.signature, dtype=float)
    a = _one_minus_outer(m)
    t = np.empty((n, n, n), dtype=complex)
    for k in range(n):
        t[:, :, k] = -2.0 * c[k] * xi[k].conjugate() * np.outer(c / a[:, k], c / a[:, k])
    t = _symmetrize_first_two(t)
    return ConnectionTensors(
        alpha=0.0,
        t_mixed=t,
        t_pure=np.zeros((n, n, n), dtype=complex),
    )


def alpha_connection(m: ModelPoint, alpha: float) -> ConnectionTensors:
    """Affine family Gamma^{(alpha)} = Gamma^0 - (alpha/2) T.

    The purely mixed-pair components carry only the alpha term:
    Gamma^{(alpha)}_{i jbar,k} = -(alpha/2) T_{ik,jbar} and
    Gamma^{(alpha)}_{i jbar,kbar} = -(alpha/2) conj(T_{jk,ibar}).
    """
    base = connection0(m)
    t = t_tensor(m).t_mixed
    gamma_cross = -0.5 * alpha * np.transpose(t, (0, 2, 1))
    gamma_cross_bar = -0.5 * alpha * np.conj(np.transpose(t, (2, 0, 1)))
    return ConnectionTensors(
        alpha=float(alpha),
        gamma_mixed=base.gamma_mixed - 0.5 * alpha * t,
        gamma_pure=base.gamma_pure,
        gamma_cross=gamma_cross,
        gamma_cross_bar=gamma_cross_bar,
        t_mixed=t,
        t_pure=np.zeros_like(t),
    )


def ricci0(m: ModelPoint) -> CurvatureReport:
    """Ricci block R^0_{i jbar} = -1/(1 - xi^i conj(xi^j))^2 and its scalar.

    The scalar comes from contracting with the inverse metric, so exactly
    coincident coordinates raise :class:`CoincidentRootsError` for the
    scalar even though the Ricci block itself is regular.
    """
    xi = np.asarray(m.params, dtype=complex)
    ricci = _hermitize(
        -1.0 / _one_minus_outer(m) ** 2, -1.0 / (1.0 - np.abs(xi) ** 2) ** 2
    )
    det_g = metric_determinant(m)
    ginv = inverse_metric(m)
    scalar = float(np.sum(ginv * ricci).real)
    return CurvatureReport(alpha=0.0, ricci=ricci, scalar=scalar, det_g=det_g)


def _t_contracted(m: ModelPoint) -> np.ndarray:
    # t_i = g^{k lbar} T_{ik,lbar}, the trace of T against the inverse metric.
    ginv = inverse_metric(m)
    t = t_tensor(m).t_mixed
    return np.einsum("kl,ikl->i", ginv, t)


def alpha_ricci(
    m: ModelPoint, alpha: float, step: float = WIRTINGER_STEP_DEFAULT
) -> CurvatureReport:
    """alpha-corrected Ricci: R^{(alpha)}_{i jbar} = R^0_{i jbar} + (alpha/2) d_jbar T^k_{ik}.

    The contraction T^k_{ik} uses holomorphic indices only; its
    anti-holomorphic derivative is taken by central Wirtinger differences
    (no closed form is available).  The correction is independent of alpha,
    so the family is exactly linear in alpha.
    """
    base = ricci0(m)
    n = m.n
    corr = np.empty((n, n), dtype=complex)
    for j in range(n):
        xi_j = m.params[j]
        tx_p = _t_contracted(m.replace_param(j, xi_j + step))
        tx_m = _t_contracted(m.replace_param(j, xi_j - step))
        ty_p = _t_contracted(m.replace_param(j, xi_j + 1j * step))
        ty_m = _t_contracted(m.replace_param(j, xi_j - 1j * step))
        dx = (tx_p - tx_m) / (2.0 * step)
        dy = (ty_p - ty_m) / (2.0 * step)
        corr[:, j] = 0.5 * (dx + 1j * dy)  # d/d conj(xi^j)
    corr = 0.5 * (corr + corr.conj().T)  # enforce the Hermiticity the geometry guarantees
    ricci = base.ricci + 0.5 * alpha * corr
    ginv = inverse_metric(m)
    scalar = base.scalar + 0.5 * alpha * float(np.sum(ginv * corr).real)
    return CurvatureReport(alpha=float(alpha), ricci=ricci, scalar=scalar, det_g=base.det_g)
