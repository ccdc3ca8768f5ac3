"""Discretized boundary curves and geometric utilities.

Points in the plane are complex numbers throughout.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import directed_hausdorff

log = logging.getLogger(__name__)

ANALYTIC = "analytic"
CORNERED = "piecewise-smooth-with-corners"


@dataclass(frozen=True)
class BoundaryCurve:
    """Nodes of a closed counterclockwise curve with their local geometry.

    Attributes
    ----------
    params : parameter value of every node, in ``[0, 2*pi)``
    nodes : ``z(t)`` at the nodes
    derivatives : ``z'(t)`` at the nodes
    second : ``z''(t)`` at the nodes
    weights : quadrature weight in the parameter; the arclength weight of a
        node is ``weights * |z'(t)|`` (see :attr:`arclength_weights`)
    smoothness : ``"analytic"`` or ``"piecewise-smooth-with-corners"``
    corners : parameter values of the corners (empty for smooth curves)
    """

    params: np.ndarray
    nodes: np.ndarray
    derivatives: np.ndarray
    second: np.ndarray
    weights: np.ndarray
    smoothness: str = ANALYTIC
    corners: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("params", "nodes", "derivatives", "second", "weights"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.nodes.size
        if not all(getattr(self, k).size == n for k in ("params", "derivatives", "second", "weights")):
            raise ValueError("all per-node arrays must have the same length")
        if np.any(np.abs(self.derivatives) == 0):
            raise ValueError("curve has a stationary node (z'(t) = 0)")

    def __len__(self):
        return self.nodes.size

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.derivatives)

    @property
    def normals(self) -> np.ndarray:
        """Outward unit normals (tangent rotated by -pi/2)."""
        return -1j * self.derivatives / self.speed

    @property
    def curvature(self) -> np.ndarray:
        return np.imag(np.conj(self.derivatives) * self.second) / self.speed**3

    @property
    def arclength_weights(self) -> np.ndarray:
        return self.weights * self.speed

    @property
    def length(self) -> float:
        return float(self.arclength_weights.sum())

    @property
    def area(self) -> float:
        """Signed enclosed area; positive for counterclockwise curves."""
        return float(0.5 * np.sum(np.imag(np.conj(self.nodes) * self.derivatives) * self.weights))

    @property
    def diameter(self) -> float:
        z = self.nodes
        if z.size > 4096:
            z = z[:: z.size // 2048]
        return float(np.abs(z[:, None] - z[None, :]).max())

    def reversed(self) -> BoundaryCurve:
        """Same curve traversed the other way (``t -> 2*pi - t``)."""
        return BoundaryCurve(
            params=(2 * np.pi - self.params[::-1]) % (2 * np.pi),
            nodes=self.nodes[::-1],
            derivatives=-self.derivatives[::-1],
            second=self.second[::-1],
            weights=self.weights[::-1],
            smoothness=self.smoothness,
            corners=tuple(sorted((2 * np.pi - c) % (2 * np.pi) for c in self.corners)),
        )

    def transformed(self, scale: float = 1.0, shift: complex = 0.0) -> BoundaryCurve:
        """Image under ``z -> scale * z + shift`` with ``scale > 0``."""
        if not scale > 0:
            raise ValueError("scale must be positive")
        return BoundaryCurve(
            self.params,
            scale * self.nodes + shift,
            scale * self.derivatives,
            scale * self.second,
            self.weights,
            self.smoothness,
            self.corners,
        )

    def winding_number(self, p: complex) -> int:
        return int(round(_arg_increments(self.nodes, p).sum() / (2 * np.pi)))

    def to_csv(self, path) -> None:
        """Columns ``t, x, y, nx, ny, weight``; the weight is the arclength weight."""
        nu = self.normals
        w = self.arclength_weights
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["t", "x", "y", "nx", "ny", "weight"])
            for row in zip(self.params, self.nodes.real, self.nodes.imag, nu.real, nu.imag, w):
                out.writerow([repr(float(v)) for v in row])


def oriented(curve: BoundaryCurve) -> BoundaryCurve:
    """Return the curve counterclockwise, reversing (with a warning) if needed."""
    if curve.area < 0:
        log.warning("clockwise curve detected; reversing orientation")
        return curve.reversed()
    return curve


def _arg_increments(z: np.ndarray, p: complex) -> np.ndarray:
    d = z - p
    return np.angle(np.roll(d, -1) / d)


def is_star_shaped(curve: BoundaryCurve, s0: complex) -> bool:
    """Whether ``arg(z(t) - s0)`` increases strictly over one period.

    Raises ``ValueError`` when ``s0`` is not strictly inside the curve.
    """
    s0 = complex(s0)
    dist = np.abs(curve.nodes - s0)
    if dist.min() <= 1e-12 * max(1.0, dist.max()):
        raise ValueError(f"point {s0} lies on the curve")
    inc = _arg_increments(curve.nodes, s0)
    if int(round(inc.sum() / (2 * np.pi))) != 1:
        raise ValueError(f"point {s0} is outside the curve")
    return bool(np.all(inc > 0))


def shape_distance(a, b) -> float:
    """Symmetric discrete Hausdorff distance between two node sets.

    Accepts curves or arrays of complex points.
    """
    za = a.nodes if isinstance(a, BoundaryCurve) else np.asarray(a, dtype=complex)
    zb = b.nodes if isinstance(b, BoundaryCurve) else np.asarray(b, dtype=complex)
    pa = np.column_stack([za.real, za.imag])
    pb = np.column_stack([zb.real, zb.imag])
    return float(max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0]))
