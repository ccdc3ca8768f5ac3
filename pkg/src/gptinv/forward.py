"""Forward maps: from an inclusion to its contracted GPTs.

Two independent routes are provided. :func:`gpt_nystrom` discretizes the
boundary integral definition directly; :func:`gpt_analytic` evaluates the
Grunsky-matrix factorization from the exterior conformal map. They share no
code beyond the data types, so each is an oracle for the other.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .conformal import ConformalMap, GrunskyTables, faber_matrix, grunsky_tables
from .errors import SingularSystemError
from .geometry import BoundaryCurve

log = logging.getLogger(__name__)

ANALYTIC_BUFFER = 10


@dataclass(frozen=True)
class Material:
    """Inclusion and background conductivities and the contrast they define.

    ``sigma_c`` may be ``0`` (insulating, ``lam = -1/2``) or ``inf``
    (perfectly conducting, ``lam = 1/2``).
    """

    sigma_c: float
    sigma_m: float = 1.0

    def __post_init__(self):
        if not (self.sigma_m > 0 and np.isfinite(self.sigma_m)):
            raise ValueError("background conductivity must be positive and finite")
        if self.sigma_c < 0 or np.isnan(self.sigma_c):
            raise ValueError("inclusion conductivity must be non-negative")
        if self.sigma_c == self.sigma_m:
            raise ValueError("inclusion and background conductivities coincide")

    @property
    def lam(self) -> float:
        if np.isinf(self.sigma_c):
            return 0.5
        return (self.sigma_c + self.sigma_m) / (2 * (self.sigma_c - self.sigma_m))

    @classmethod
    def from_lambda(cls, lam: float, sigma_m: float = 1.0) -> Material:
        if abs(lam) < 0.5:
            raise ValueError(f"|lambda| must be at least 1/2, got {lam}")
        return cls(sigma_from_lambda(lam, sigma_m), sigma_m)


def sigma_from_lambda(lam: float, sigma_m: float = 1.0) -> float:
    if lam == 0.5:
        return float("inf")
    return sigma_m * (2 * lam + 1) / (2 * lam - 1)


@dataclass(frozen=True)
class GptSet:
    """Finite sections ``N1[m-1, n-1] = N^(1)_mn`` and ``N2`` of the contracted GPTs."""

    ord: int
    N1: np.ndarray
    N2: np.ndarray
    provenance: str = "nystrom"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("N1", "N2"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (self.ord, self.ord):
                raise ValueError(f"{name} has shape {arr.shape}, expected {(self.ord, self.ord)}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def truncated(self, ord: int) -> GptSet:
        if not 1 <= ord <= self.ord:
            raise ValueError(f"cannot truncate order {self.ord} to {ord}")
        return GptSet(ord, self.N1[:ord, :ord], self.N2[:ord, :ord], self.provenance, dict(self.meta))

    def symmetry_residual(self) -> float:
        """Relative ``max|N1 - N1^T|``."""
        scale = max(np.abs(self.N1).max(), np.finfo(float).tiny)
        return float(np.abs(self.N1 - self.N1.T).max() / scale)

    def hermitian_residual(self) -> float:
        """Relative ``max|N2 - N2^H|``."""
        scale = max(np.abs(self.N2).max(), np.finfo(float).tiny)
        return float(np.abs(self.N2 - self.N2.conj().T).max() / scale)


@dataclass(frozen=True)
class FptSet:
    """Faber polynomial polarization tensors ``F1``, ``F2`` (1-based in the math, 0-based here)."""

    ord: int
    F1: np.ndarray
    F2: np.ndarray


@dataclass(frozen=True)
class NpSystem:
    """Nystrom matrix of the adjoint double-layer (Neumann-Poincare) operator on node values."""

    curve: BoundaryCurve
    K: np.ndarray
    weights: np.ndarray

    def operator(self, lam: float) -> np.ndarray:
        """``lam I - K`` plus the rank-one term ``1 w^T``.

        For mean-zero data the solution has zero mean, so the extra term does
        not change it; it keeps the matrix invertible at ``lam = 1/2``.
        """
        n = self.K.shape[0]
        return lam * np.eye(n) - self.K + np.outer(np.ones(n), self.weights)

    def solve(self, lam: float, rhs: np.ndarray) -> np.ndarray:
        """Solve for the density of ``(lam I - K*)^{-1}[rhs]``; ``rhs`` may be complex."""
        A = self.operator(lam)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                lu = sla.lu_factor(A, check_finite=True)
        except (np.linalg.LinAlgError, sla.LinAlgWarning) as exc:
            raise SingularSystemError(
                f"Nystrom system singular at lambda={lam} on a {len(self.curve)}-node curve"
            ) from exc
        rhs = np.asarray(rhs)
        if np.iscomplexobj(rhs):
            return sla.lu_solve(lu, rhs.real) + 1j * sla.lu_solve(lu, rhs.imag)
        return sla.lu_solve(lu, rhs)


def assemble_np(curve: BoundaryCurve) -> NpSystem:
    """Dense Nystrom discretization of ``K*``.

    Off-diagonal entries sample the kernel ``<x-y, nu_x> / (2 pi |x-y|^2)``
    times the arclength weight of ``y``; the diagonal uses the kernel's
    limit ``curvature / (4 pi)``.
    """
    z = curve.nodes
    nu = curve.normals
    w = curve.arclength_weights
    d = z[:, None] - z[None, :]
    r2 = np.abs(d) ** 2
    np.fill_diagonal(r2, 1.0)
    if np.any(r2 <= (1e-15 * max(curve.diameter, 1.0)) ** 2):
        raise ValueError("curve has coincident nodes")
    K = np.real(d * np.conj(nu)[:, None]) / r2 / (2 * np.pi) * w[None, :]
    np.fill_diagonal(K, curve.curvature * w / (4 * np.pi))
    return NpSystem(curve, K, w)


def _check_lambda(lam: float):
    if abs(lam) < 0.5:
        raise ValueError(f"|lambda| must be at least 1/2, got {lam}")


def gpt_nystrom(
    curve: BoundaryCurve, mat: Material, ord: int, system: NpSystem | None = None
) -> GptSet:
    """Contracted GPTs by direct quadrature of their integral definition."""
    lam = mat.lam
    _check_lambda(lam)
    if ord < 1:
        raise ValueError("order must be positive")
    if ord > len(curve) / 8:
        log.warning("order %d is large for %d nodes", ord, len(curve))
    system = system or assemble_np(curve)
    z = curve.nodes
    m = np.arange(1, ord + 1)
    # d(z^m)/d(nu) = m z^(m-1) nu with nu the complex unit normal
    g = m[None, :] * z[:, None] ** (m - 1)[None, :] * curve.normals[:, None]
    phi = system.solve(lam, np.hstack([g, np.conj(g)]))
    wz = z[:, None] ** m[None, :] * system.weights[:, None]
    N1 = phi[:, :ord].T @ wz
    N2 = phi[:, ord:].T @ wz
    return GptSet(ord, N1, N2, "nystrom", {"lambda": lam, "nodes": len(curve)})


def _diag_n(M):
    return np.arange(1, M + 1, dtype=float)


def common_factor(G: np.ndarray, lam: float) -> np.ndarray:
    """``I + (1 - 4 lam^2)(4 lam^2 I - conj(G) G)^{-1}``."""
    M = G.shape[0]
    A = 4 * lam**2 * np.eye(M) - np.conj(G) @ G
    if np.linalg.cond(A) > 1e12:
        raise SingularSystemError(
            f"4 lambda^2 I - conj(G) G is numerically singular (lambda={lam}, |G|={np.linalg.norm(G, 2):.6f})"
        )
    return np.eye(M) + (1 - 4 * lam**2) * np.linalg.inv(A)


def fpt_factorized(tables: GrunskyTables, mat: Material, ord: int | None = None) -> FptSet:
    """FPTs from the symmetric factorization through ``G``."""
    lam = mat.lam
    _check_lambda(lam)
    M = tables.order
    n = _diag_n(M)
    d = tables.gamma**n * np.sqrt(n)
    X = common_factor(tables.G, lam)
    F1 = 4 * np.pi * d[:, None] * (tables.G @ X) * d[None, :]
    F2 = 8 * np.pi * lam * d[:, None] * X * d[None, :]
    k = M if ord is None else ord
    return FptSet(k, F1[:k, :k], F2[:k, :k])


def fpt_analytic(tables: GrunskyTables, mat: Material, ord: int) -> FptSet:
    """FPTs entrywise from the Grunsky coefficients ``C``."""
    lam = mat.lam
    _check_lambda(lam)
    M = tables.order
    if ord > M:
        raise ValueError(f"order {ord} exceeds the Grunsky table order {M}")
    n = _diag_n(M)
    g2 = tables.gamma ** (-2 * n)
    C = tables.C
    A = 4 * lam**2 * np.eye(M) - (g2[:, None] * np.conj(C) * g2[None, :]) @ C
    if np.linalg.cond(A) > 1e12:
        raise SingularSystemError(f"Grunsky system singular at lambda={lam}")
    Ainv = np.linalg.inv(A)
    F1 = 4 * np.pi * n[None, :] * C + 4 * np.pi * n[None, :] * (1 - 4 * lam**2) * (C @ Ainv)
    gm = tables.gamma ** (2 * n)[:, None]
    F2 = 8 * np.pi * lam * n[None, :] * gm * (np.eye(M) + (1 - 4 * lam**2) * Ainv)
    return FptSet(ord, F1[:ord, :ord], F2[:ord, :ord])


def gpt_analytic(
    cmap: ConformalMap, mat: Material, ord: int, buffer: int = ANALYTIC_BUFFER
) -> GptSet:
    """Contracted GPTs from the Grunsky factorization at working order ``ord + buffer``."""
    lam = mat.lam
    _check_lambda(lam)
    if ord < 1:
        raise ValueError("order must be positive")
    M = ord + buffer
    P = faber_matrix(cmap, M).P
    F = fpt_factorized(grunsky_tables(cmap, M), mat)
    N1 = _unfaber(P, P, F.F1)
    N2 = _unfaber(np.conj(P), P, F.F2)
    return GptSet(
        ord, N1[:ord, :ord], N2[:ord, :ord], "analytic", {"lambda": lam, "working_order": M}
    )


def _unfaber(L: np.ndarray, R: np.ndarray, F: np.ndarray) -> np.ndarray:
    """``L^{-1} F R^{-T}`` for unit lower-triangular ``L`` and ``R``."""
    Y = sla.solve_triangular(L, F, lower=True, unit_diagonal=True)
    return sla.solve_triangular(R, Y.T, lower=True, unit_diagonal=True).T


def fpt_from_gpts(gpts: GptSet, P: np.ndarray) -> FptSet:
    """Change of basis ``F1 = P N1 P^T``, ``F2 = conj(P) N2 P^T`` on the leading block."""
    k = gpts.ord
    P = np.asarray(P)[:k, :k]
    return FptSet(k, P @ gpts.N1 @ P.T, np.conj(P) @ gpts.N2 @ P.T)


def scattered_field(
    curve: BoundaryCurve,
    mat: Material,
    source_degree: int,
    eval_points,
    part: str = "re",
    ord: int = 8,
    system: NpSystem | None = None,
):
    """Field perturbation ``u - H`` for ``H = Re z^m`` (or ``Im z^m``), computed two ways.

    Returns ``(layer, multipole)``: the single-layer potential of the
    Nystrom density, and the truncated multipole series built from the
    order-``ord`` contracted GPTs.
    """
    m = source_degree
    if m < 1 or m > ord:
        raise ValueError("source degree must lie in [1, ord]")
    if part not in ("re", "im"):
        raise ValueError("part must be 're' or 'im'")
    x = np.atleast_1d(np.asarray(eval_points, dtype=complex))
    if np.abs(x).min() <= np.abs(curve.nodes).max():
        raise ValueError("evaluation points must lie outside the circle enclosing the inclusion")
    system = system or assemble_np(curve)
    lam = mat.lam
    c = 1.0 if part == "re" else -1j  # H = Re(c z^m)
    z = curve.nodes
    dH = np.real(c * m * z ** (m - 1) * curve.normals)
    phi = system.solve(lam, dH)
    layer = (np.log(np.abs(x[:, None] - z[None, :])) @ (phi * system.weights)) / (2 * np.pi)

    gpts = gpt_nystrom(curve, mat, ord, system)
    n = np.arange(1, ord + 1)
    coef = c * gpts.N1[m - 1] + np.conj(c) * gpts.N2[m - 1]
    multipole = -np.real((coef[None, :] / n[None, :]) * x[:, None] ** (-n)[None, :]).sum(1) / (4 * np.pi)
    return layer, multipole


def a_combination(F: FptSet, m: int, n: int, variant: int) -> float:
    """One of the eight real combinations ``A^(variant)_mn`` (1-based ``m``, ``n``)."""
    if variant not in (1, -1, 2, -2, 3, -3, 4, -4):
        raise ValueError(f"variant must be one of +-1..+-4, got {variant}")
    if not (1 <= m <= F.ord and 1 <= n <= F.ord):
        raise ValueError("indices out of range")
    i, j = m - 1, n - 1
    F1, F2 = F.F1, F.F2
    kind = abs(variant)
    s = 1 if variant > 0 else -1
    if kind == 1:
        return float(np.real(F1[i, i] + F1[j, j] + F2[i, i] + F2[j, j]) + s * 2 * np.real(F1[i, j] + F2[i, j]))
    if kind == 2:
        return float(np.real(-F1[i, i] - F1[j, j] + F2[i, i] + F2[j, j]) - s * 2 * np.real(F1[i, j] - F2[i, j]))
    if kind == 3:
        return float(np.real(F1[i, i] - F1[j, j] + F2[i, i] + F2[j, j]) - s * 2 * np.imag(F1[i, j] + F2[i, j]))
    return float(np.real(-F1[i, i] + F1[j, j] + F2[i, i] + F2[j, j]) + s * 2 * np.imag(F1[i, j] - F2[i, j]))


def monotone_combination(f: FptSet, g: FptSet, m: int, n: int, variant: int) -> tuple[float, float]:
    """``A^(variant)_mn`` evaluated for both FPT sets."""
    return a_combination(f, m, n, variant), a_combination(g, m, n, variant)
