"""Recovery of the contrast and the exterior conformal map from contracted GPTs.

The contrast is found first, as a fixed point of a scalar function built from
the modified GPTs; the conformal radius and the map coefficients then follow
from explicit formulas.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .conformal import ConformalMap, faber_coefficients
from .errors import ConvergenceError, DataError, SingularSystemError
from .forward import GptSet, Material, gpt_nystrom, sigma_from_lambda
from .geometry import BoundaryCurve

log = logging.getLogger(__name__)

IMAG_WARN = 1e-8
IMAG_FAIL = 1e-3


@dataclass(frozen=True)
class ReconstructionOptions:
    tol: float = 1e-10
    max_iter: int = 200
    sigma_m: float = 1.0
    cond_cap: float = 1e12


def gpt_ratio(gpts: GptSet, cond_cap: float = 1e12) -> tuple[np.ndarray, float]:
    """``N1 N2^{-1}`` and the condition number of the rebalanced ``N2``.

    The diagonal of ``N2`` spans many orders of magnitude, so the solve runs
    on ``D^{-1} N2 D^{-1}`` with ``D = diag(sqrt|N2_nn|)``.
    """
    N1, N2 = gpts.N1, gpts.N2
    d = np.sqrt(np.abs(np.diag(N2)))
    if np.any(d == 0) or not np.all(np.isfinite(d)):
        raise SingularSystemError("N2 has a vanishing or non-finite diagonal entry")
    A = N2 / d[:, None] / d[None, :]
    B = N1 / d[:, None] / d[None, :]
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularSystemError(f"N2 finite section is ill-conditioned (cond={cond:.3e})")
    X = np.linalg.solve(A.T, B.T).T
    return d[:, None] * X / d[None, :], cond


@dataclass(frozen=True)
class ModifiedGpts:
    """Modified GPTs ``tilde1 = Nhalf M(t) N2`` and ``tilde2 = M(t) N2`` at one ``t``."""

    ord: int
    t: float
    nhalf: np.ndarray
    n2: np.ndarray
    tilde1: np.ndarray
    tilde2: np.ndarray
    cond_n2: float

    def M(self, t: float) -> np.ndarray:
        """``(I - conj(Nhalf) Nhalf)(I - 4 t^2 conj(Nhalf) Nhalf)^{-1}``."""
        return _m_of_t(np.conj(self.nhalf) @ self.nhalf, t)

    def at(self, t: float) -> ModifiedGpts:
        Mt = self.M(t)
        return ModifiedGpts(self.ord, t, self.nhalf, self.n2, self.nhalf @ Mt @ self.n2, Mt @ self.n2, self.cond_n2)


def _extreme(t: float) -> bool:
    return 4 * t * t == 1


def _m_of_t(B: np.ndarray, t: float) -> np.ndarray:
    eye = np.eye(B.shape[0])
    if _extreme(t):
        # (I - B)(I - B)^{-1}; exact rather than a roundoff-level solve
        return eye
    R = eye - 4 * t * t * B
    if np.linalg.cond(R) > 1e14:
        raise SingularSystemError(f"I - 4t^2 conj(Nhalf) Nhalf is singular at t={t}")
    return np.linalg.solve(R.T, (eye - B).T).T


def modified_gpts(gpts: GptSet, t: float, cond_cap: float = 1e12) -> ModifiedGpts:
    nhalf, cond = gpt_ratio(gpts, cond_cap)
    if _extreme(t):
        # M = I, so the modified GPTs are the GPTs themselves
        return ModifiedGpts(gpts.ord, float(t), nhalf, np.array(gpts.N2), np.array(gpts.N1), np.array(gpts.N2), cond)
    Mt = _m_of_t(np.conj(nhalf) @ nhalf, t)
    return ModifiedGpts(gpts.ord, float(t), nhalf, np.array(gpts.N2), nhalf @ Mt @ gpts.N2, Mt @ gpts.N2, cond)


def _contrast_formula(T: np.ndarray) -> complex:
    return np.pi * (T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0]) / T[0, 0] ** 3


@dataclass
class LambdaIteration:
    lam: float
    trace: list
    iterates: list
    damped: bool = False
    visited_inner: bool = False
    max_imag: float = 0.0
    cond_n2: float = float("nan")

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def suspect(self) -> bool:
        return abs(self.lam) <= 0.5


def solve_lambda(
    gpts: GptSet, tol: float = 1e-10, max_iter: int = 200, cond_cap: float = 1e12
) -> LambdaIteration:
    """Fixed-point iteration ``lam <- f(lam)`` for the contrast.

    The start value is the contrast formula applied to the unmodified ``N2``.
    The iteration switches to averaging ``(lam + f(lam)) / 2`` once the
    increments have changed sign twice.
    """
    if gpts.ord < 2:
        raise ValueError("contrast recovery needs order >= 2")
    nhalf, cond = gpt_ratio(gpts, cond_cap)
    B = np.conj(nhalf) @ nhalf
    N2 = gpts.N2
    out = LambdaIteration(lam=float("nan"), trace=[], iterates=[], cond_n2=cond)

    def f(t):
        v = _contrast_formula(_m_of_t(B, t) @ N2)
        rel = abs(v.imag) / abs(v)
        out.max_imag = max(out.max_imag, rel)
        if rel > IMAG_WARN:
            log.info("contrast formula has imaginary residue %.2e at t=%.6g", rel, t)
        return v.real

    lam = _contrast_formula(N2)
    out.max_imag = abs(lam.imag) / abs(lam)
    lam = lam.real
    out.iterates.append(lam)
    last_step = 0.0
    sign_changes = 0
    for _ in range(max_iter):
        if abs(lam) < 0.5:
            out.visited_inner = True
        target = f(lam)
        new = 0.5 * (lam + target) if out.damped else target
        step = new - lam
        out.trace.append(abs(step) / abs(lam))
        out.iterates.append(new)
        if last_step * step < 0:
            sign_changes += 1
            if sign_changes >= 2 and not out.damped:
                out.damped = True
                log.info("fixed-point iteration oscillates; switching to averaged steps")
        last_step = step
        lam = new
        if out.trace[-1] < tol:
            out.lam = lam
            if out.suspect:
                log.warning("fixed point lambda=%.6g has |lambda| <= 1/2; data are suspect", lam)
            if out.max_imag > IMAG_WARN:
                log.warning("discarded imaginary residue up to %.2e in the contrast formula", out.max_imag)
            return out
    raise ConvergenceError(f"no convergence in {max_iter} iterations (last lambda={lam:.10g})", out.trace)


def _real_or_fail(v: complex, what: str, diag: dict) -> float:
    rel = abs(v.imag) / max(abs(v), np.finfo(float).tiny)
    diag[f"{what}_imag"] = rel
    if rel > IMAG_FAIL:
        raise DataError(f"{what} has a large imaginary part ({rel:.2e} relative)")
    if rel > IMAG_WARN:
        log.warning("discarding imaginary residue %.2e of %s", rel, what)
    return float(v.real)


def _coefficients(tilde1: np.ndarray, tilde2: np.ndarray, lam: float, diag: dict) -> ConformalMap:
    k = tilde2.shape[0]
    if tilde2[0, 0] == 0:
        raise DataError("modified N2_11 vanishes")
    g2 = _real_or_fail(lam / (2 * np.pi) * tilde2[0, 0], "gamma^2", diag)
    if g2 <= 0:
        raise DataError(f"recovered gamma^2 = {g2:.6g} is not positive; wrong contrast or bad data")
    a = [tilde2[0, 1] / (2 * tilde2[0, 0])]
    for m in range(1, k + 1):
        # row m of the Faber table needs a_0..a_{m-1} only
        Q = faber_coefficients(np.array(a), m)
        a.append(lam**2 / (np.pi * m) * np.dot(Q[m, 1 : m + 1], tilde1[:m, 0]))
    return ConformalMap(np.sqrt(g2), a[0], np.array(a[1:]))


def recover_map(gpts: GptSet, lam: float, cond_cap: float = 1e12) -> ConformalMap:
    """Conformal radius and coefficients ``a_0..a_ord`` for a known contrast."""
    if abs(lam) < 0.5:
        raise ValueError(f"|lambda| must be at least 1/2, got {lam}")
    if gpts.ord < 2:
        raise ValueError("map recovery needs order >= 2")
    mod = modified_gpts(gpts, lam, cond_cap)
    return _coefficients(mod.tilde1, mod.tilde2, lam, {})


def recover_extreme(gpts: GptSet, lam: float) -> ConformalMap:
    """Map recovery for an insulating or perfectly conducting inclusion.

    Uses the GPTs as they are; no matrix inverse is involved.
    """
    if lam not in (0.5, -0.5):
        raise ValueError("extreme recovery needs lambda = +-1/2")
    if gpts.ord < 2:
        raise ValueError("map recovery needs order >= 2")
    return _coefficients(np.asarray(gpts.N1), np.asarray(gpts.N2), lam, {})


@dataclass
class ReconstructionResult:
    lambda_rec: float
    sigma_rec: float
    map_rec: ConformalMap
    iterations: int
    residual_trace: list
    converged: bool = True
    n2_ill_conditioned: bool = False
    n2_condition: float = float("nan")
    damped: bool = False
    visited_inner: bool = False
    suspect: bool = False
    diagnostics: dict = field(default_factory=dict)
    iterates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lambda_rec": self.lambda_rec,
            "sigma_rec": None if np.isinf(self.sigma_rec) else self.sigma_rec,
            "map": self.map_rec.to_dict(),
            "iterations": self.iterations,
            "residual_trace": list(self.residual_trace),
            "iterates": list(self.iterates),
            "flags": {
                "converged": self.converged,
                "n2_ill_conditioned": self.n2_ill_conditioned,
                "damped": self.damped,
                "visited_inner_interval": self.visited_inner,
                "suspect": self.suspect,
            },
            "n2_condition": self.n2_condition,
            "diagnostics": dict(self.diagnostics),
        }


def reconstruct(gpts: GptSet, opts: ReconstructionOptions | None = None) -> ReconstructionResult:
    """Contrast by fixed-point iteration, then the conformal map at that contrast."""
    opts = opts or ReconstructionOptions()
    it = solve_lambda(gpts, opts.tol, opts.max_iter, opts.cond_cap)
    lam = it.lam
    diag = {"contrast_imag": it.max_imag}
    mod = modified_gpts(gpts, lam, opts.cond_cap)
    cmap = _coefficients(mod.tilde1, mod.tilde2, lam, diag)
    return ReconstructionResult(
        lambda_rec=lam,
        sigma_rec=sigma_from_lambda(lam, opts.sigma_m),
        map_rec=cmap,
        iterations=it.iterations,
        residual_trace=it.trace,
        n2_ill_conditioned=it.cond_n2 > 1e-4 * opts.cond_cap,
        n2_condition=it.cond_n2,
        damped=it.damped,
        visited_inner=it.visited_inner,
        suspect=it.suspect,
        diagnostics=diag,
        iterates=it.iterates,
    )


def conformal_map_of(curve: BoundaryCurve, n_coeffs: int = 30) -> ConformalMap:
    """Exterior map coefficients of a curve via insulating-inclusion GPTs.

    The extreme-contrast formulas need only finitely many GPTs, so Nystrom
    GPTs at ``lambda = -1/2`` yield ``gamma, a_0..a_n_coeffs`` directly.
    """
    gpts = gpt_nystrom(curve, Material(0.0), max(2, n_coeffs))
    return recover_extreme(gpts, -0.5)
