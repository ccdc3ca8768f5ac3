"""Exterior conformal maps and the tables derived from them by recursion.

The map is stored as ``Psi(w) = w + a0 + a1/w + a2/w**2 + ...`` on ``|w| > gamma``.
Faber polynomial coefficients (the lower-triangular matrix ``P``), Grunsky
coefficients ``C`` and their symmetrized form ``G`` all follow from the
coefficient list by finite recursions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import ANALYTIC, BoundaryCurve


@dataclass(frozen=True)
class ConformalMap:
    """Exterior map ``Psi(w) = w + a0 + sum_n coeffs[n-1] / w**n``."""

    gamma: float
    a0: complex = 0.0
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=complex))

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"conformal radius must be positive, got {self.gamma}")
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def order(self) -> int:
        return self.coeffs.size

    def a(self, n: int) -> complex:
        """Coefficient of ``w**-n`` (``a(0)`` is the constant term); zero past the list."""
        if n == 0:
            return self.a0
        if 1 <= n <= self.coeffs.size:
            return complex(self.coeffs[n - 1])
        return 0j

    def padded(self, n: int) -> np.ndarray:
        """Array ``[a0, a1, ..., an]`` with zeros beyond the stored coefficients."""
        out = np.zeros(n + 1, dtype=complex)
        out[0] = self.a0
        k = min(n, self.coeffs.size)
        out[1 : k + 1] = self.coeffs[:k]
        return out

    def truncated(self, m: int) -> ConformalMap:
        return ConformalMap(self.gamma, self.a0, self.coeffs[:m])

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = w + self.a0
        # Horner in 1/w
        acc = np.zeros_like(w)
        for c in self.coeffs[::-1]:
            acc = (acc + c) / w
        return out + acc

    def derivative(self, w, order: int = 1):
        """First or second derivative of the map at ``w``."""
        w = np.asarray(w, dtype=complex)
        n = np.arange(1, self.coeffs.size + 1)
        if order == 1:
            return 1.0 + sum(-k * c * w ** (-k - 1) for k, c in zip(n, self.coeffs))
        if order == 2:
            return sum(k * (k + 1) * c * w ** (-k - 2) for k, c in zip(n, self.coeffs)) + 0 * w
        raise ValueError("only first and second derivatives are available")

    def translated(self, v: complex) -> ConformalMap:
        return ConformalMap(self.gamma, self.a0 + v, self.coeffs)

    def scaled(self, s: float) -> ConformalMap:
        """Map of the domain scaled by ``s`` about ``a0``."""
        n = np.arange(1, self.coeffs.size + 1)
        return ConformalMap(s * self.gamma, self.a0, self.coeffs * s ** (n + 1))

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "a0": [self.a0.real, self.a0.imag],
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ConformalMap:
        try:
            a0 = complex(*d.get("a0", [0.0, 0.0]))
            coeffs = [complex(re, im) for re, im in d.get("coeffs", [])]
            return cls(float(d["gamma"]), a0, np.array(coeffs, dtype=complex))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed conformal map record: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> ConformalMap:
        return cls.from_dict(json.loads(Path(path).read_text()))


def joukowski(gamma: float = 1.0, a1: complex = 0.5, a0: complex = 0.0) -> ConformalMap:
    """``w + a0 + a1/w``; an ellipse with semi-axes ``gamma +- |a1|/gamma`` for real ``a1``."""
    return ConformalMap(gamma, a0, np.array([a1], dtype=complex))


def random_map(
    rng: np.random.Generator,
    n_coeffs: int = 4,
    gamma: float = 1.0,
    amplitude: float = 0.3,
    center_scale: float = 0.5,
) -> ConformalMap:
    """Random truncated map with ``|a_n| <= amplitude * gamma**(n+1) / (n+1)**2``.

    With the default amplitude the map is univalent on ``|w| > gamma``
    (``sum n |a_n| / gamma**(n+1) < 1``).
    """
    n = np.arange(1, n_coeffs + 1)
    mod = amplitude * rng.uniform(0.0, 1.0, n_coeffs) * gamma ** (n + 1) / (n + 1) ** 2
    phase = rng.uniform(0.0, 2 * np.pi, n_coeffs)
    a0 = center_scale * complex(rng.normal(), rng.normal())
    return ConformalMap(gamma, a0, mod * np.exp(1j * phase))


@dataclass(frozen=True)
class FaberMatrix:
    """Faber coefficients. ``P[m-1, n-1] = p_mn`` for ``1 <= m, n <= order``.

    ``full`` keeps the constant terms too: ``full[m, n]`` is the coefficient of
    ``z**n`` in ``F_m`` for ``0 <= m, n <= order``.
    """

    order: int
    P: np.ndarray
    full: np.ndarray


def faber_coefficients(a: np.ndarray, M: int) -> np.ndarray:
    """Coefficient table of ``F_0..F_M`` from ``a = [a0, a1, ...]`` (zero padded)."""
    a = np.concatenate([np.asarray(a, dtype=complex), np.zeros(max(0, M + 1 - len(a)), complex)])
    Q = np.zeros((M + 1, M + 1), dtype=complex)
    Q[0, 0] = 1.0
    for m in range(M):
        nxt = np.zeros(M + 1, dtype=complex)
        nxt[1:] = Q[m, :-1]  # z * F_m
        nxt[0] -= m * a[m]
        for n in range(m + 1):
            nxt -= a[n] * Q[m - n]
        Q[m + 1] = nxt
    return Q


def faber_matrix(cmap: ConformalMap, M: int) -> FaberMatrix:
    if M < 1:
        raise ValueError(f"order must be at least 1, got {M}")
    Q = faber_coefficients(cmap.padded(M), M)
    return FaberMatrix(M, Q[1:, 1:].copy(), Q)


@dataclass(frozen=True)
class GrunskyTables:
    """Grunsky coefficients ``C[m-1, n-1] = c_mn`` and ``G = sqrt(n/m) c_mn / gamma**(m+n)``."""

    order: int
    C: np.ndarray
    G: np.ndarray
    gamma: float

    def norm(self) -> float:
        """Largest singular value of the finite section of ``G``."""
        return float(np.linalg.norm(self.G, 2))


def grunsky_coefficients(a: np.ndarray, M: int) -> np.ndarray:
    """``M x M`` Grunsky matrix from ``a = [a0, a1, ...]``.

    The recursion steps from column ``n`` to ``n+1`` through row ``m+1``, so
    the table is built on the triangle ``m + n <= 2M`` and cropped.
    """
    K = 2 * M
    a = np.concatenate([np.asarray(a, dtype=complex), np.zeros(max(0, K + 1 - len(a)), complex)])
    T = np.zeros((K + 1, M + 1), dtype=complex)  # 1-based; T[m, n] = c_mn
    for m in range(1, K + 1):
        T[m, 1] = m * a[m]
    for n in range(1, M):
        for m in range(1, K - n + 1):
            v = T[m + 1, n] - a[m + n]
            for s in range(1, m):
                v += a[m - s] * T[s, n]
            for s in range(1, n):
                v -= a[n - s] * T[m, s]
            T[m, n + 1] = v
    return T[1 : M + 1, 1 : M + 1].copy()


def grunsky_tables(cmap: ConformalMap, M: int) -> GrunskyTables:
    if M < 1:
        raise ValueError(f"order must be at least 1, got {M}")
    C = grunsky_coefficients(cmap.padded(2 * M), M)
    n = np.arange(1, M + 1)
    G = np.sqrt(n[None, :] / n[:, None]) * C / cmap.gamma ** (n[:, None] + n[None, :])
    return GrunskyTables(M, C, G, cmap.gamma)


@dataclass(frozen=True)
class ScalingMatrices:
    """Named diagonal matrices in ``gamma`` and the index ``n = 1..M``."""

    gamma: float
    M: int

    @property
    def _n(self):
        return np.arange(1, self.M + 1, dtype=float)

    def gamma_pow(self, k: float = 1.0) -> np.ndarray:
        """``diag(gamma**(k n))``; ``k = +-1`` and ``+-2`` are the common cases."""
        return np.diag(self.gamma ** (k * self._n))

    def n_pow(self, k: float = 1.0) -> np.ndarray:
        """``diag(n**k)``; ``k = +-1/2`` and ``+-1`` are the common cases."""
        return np.diag(self._n**k)


def scaling_matrices(gamma: float, M: int) -> ScalingMatrices:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if M < 1:
        raise ValueError("order must be at least 1")
    return ScalingMatrices(float(gamma), int(M))


def laurent_grunsky(cmap: ConformalMap, M: int, Q: np.ndarray | None = None) -> np.ndarray:
    """Grunsky coefficients read off the Laurent expansion of ``F_m(Psi(w))``.

    Works only for maps with finitely many coefficients, where the expansion
    is a Laurent polynomial; used as an independent check of the recursion.
    """
    if Q is None:
        Q = faber_coefficients(cmap.padded(M), M)
    K = cmap.order
    # Laurent polynomials stored as arrays indexed by power + offset
    span = M * (K + 1)
    size = M + span + 1
    off = span
    psi = np.zeros(size, dtype=complex)
    psi[off + 1] = 1.0
    psi[off] = cmap.a0
    for k in range(1, K + 1):
        psi[off - k] = cmap.a(k)
    powers = [np.zeros(size, dtype=complex)]
    powers[0][off] = 1.0
    for _ in range(M):
        prod = np.convolve(powers[-1], psi)
        # both factors share the offset, so the product has offset 2*off
        powers.append(prod[off : off + size])
    C = np.zeros((M, M), dtype=complex)
    for m in range(1, M + 1):
        comp = sum(Q[m, n] * powers[n] for n in range(m + 1))
        for n in range(1, M + 1):
            C[m - 1, n - 1] = comp[off - n]
    return C


def map_boundary(cmap: ConformalMap, n_points: int, truncation: int | None = None) -> BoundaryCurve:
    """Image of ``|w| = gamma`` under the map truncated after ``a_truncation``.

    Equispaced in the angle, so the periodic trapezoidal rule applies.
    """
    if n_points < 3:
        raise ValueError(f"need at least 3 points, got {n_points}")
    if truncation is not None:
        if truncation > cmap.order:
            raise ValueError(f"truncation {truncation} exceeds the {cmap.order} stored coefficients")
        cmap = cmap.truncated(truncation)
    theta = 2 * np.pi * np.arange(n_points) / n_points
    w = cmap.gamma * np.exp(1j * theta)
    d1 = cmap.derivative(w, 1)
    d2 = cmap.derivative(w, 2)
    return BoundaryCurve(
        params=theta,
        nodes=cmap(w),
        derivatives=1j * w * d1,
        second=-(w**2) * d2 - w * d1,
        weights=np.full(n_points, 2 * np.pi / n_points),
        smoothness=ANALYTIC,
    )
