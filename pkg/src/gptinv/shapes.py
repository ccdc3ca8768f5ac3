"""Built-in inclusion shapes and their discretization.

Smooth shapes are sampled at equispaced parameters (periodic trapezoidal
rule). Shapes with corners are split into smooth pieces, each covered by
16-point Gauss-Legendre panels that are refined dyadically toward both ends
of the piece; corners are never quadrature nodes.

Every parameterization is rescaled to ``[0, 2*pi)``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .conformal import ConformalMap, map_boundary
from .geometry import ANALYTIC, CORNERED, BoundaryCurve, oriented

log = logging.getLogger(__name__)

PANEL_ORDER = 16
MAX_DEPTH = 30
SMOOTH = ("kite", "starfish", "disk", "from_conformal")
CORNERED_SHAPES = ("cap", "perturbed_ellipse")
BUILTINS = ("kite", "starfish", "cap", "perturbed_ellipse", "disk", "from_conformal")

# z(t), z'(t), z''(t) evaluated on an array of parameters
Piece = Callable[[np.ndarray], tuple]


@dataclass(frozen=True)
class ShapeSpec:
    """What curve to build and how finely.

    ``nodes`` is the exact node count for smooth shapes. For cornered shapes
    it sets the number of uniform panels per smooth piece; the graded panels
    come on top of that, so the curve has more nodes than requested.
    ``scale`` and ``shift`` apply ``z -> scale*z + shift`` to any shape.
    """

    shape: str = "kite"
    nodes: int = 512
    depth: int | None = None
    center: complex = 0j
    radius: float = 1.0
    cmap: ConformalMap | None = None
    scale: float = 1.0
    shift: complex = 0j

    def __post_init__(self):
        if self.shape not in BUILTINS:
            raise ValueError(f"unknown shape {self.shape!r}; choose from {', '.join(BUILTINS)}")
        if self.nodes < 16:
            raise ValueError(f"node count must be at least 16, got {self.nodes}")
        if self.shape in SMOOTH and self.nodes & (self.nodes - 1):
            raise ValueError(f"node count for smooth shapes must be a power of 2, got {self.nodes}")
        if self.shape == "from_conformal" and self.cmap is None:
            raise ValueError("from_conformal needs a conformal map")
        if self.shape == "disk" and not self.radius > 0:
            raise ValueError("disk radius must be positive")
        if self.depth is not None and not 0 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"refinement depth must lie in [0, {MAX_DEPTH}]")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "shift", complex(self.shift))

    @property
    def has_corners(self) -> bool:
        return self.shape in CORNERED_SHAPES

    def to_dict(self) -> dict:
        d = {"shape": self.shape, "nodes": self.nodes}
        if self.depth is not None:
            d["depth"] = self.depth
        if self.shape == "disk":
            d["center"] = [self.center.real, self.center.imag]
            d["radius"] = self.radius
        if self.cmap is not None:
            d["map"] = self.cmap.to_dict()
        if self.scale != 1.0:
            d["scale"] = self.scale
        if self.shift != 0:
            d["shift"] = [self.shift.real, self.shift.imag]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ShapeSpec:
        kw = {"shape": d.get("shape", "kite")}
        for key in ("nodes", "depth"):
            if d.get(key) is not None:
                kw[key] = int(d[key])
        if "radius" in d:
            kw["radius"] = float(d["radius"])
        if "scale" in d:
            kw["scale"] = float(d["scale"])
        for key in ("center", "shift"):
            if key in d:
                kw[key] = complex(*d[key])
        if "map" in d:
            kw["cmap"] = ConformalMap.from_dict(d["map"])
        return cls(**kw)


# --- parameterizations -----------------------------------------------------


def _kite(t):
    z = np.cos(t) + 0.65 * np.cos(2 * t) + 1.5j * np.sin(t)
    dz = -np.sin(t) - 1.3 * np.sin(2 * t) + 1.5j * np.cos(t)
    d2 = -np.cos(t) - 2.6 * np.cos(2 * t) - 1.5j * np.sin(t)
    return z, dz, d2


def _starfish(t):
    r = 1 + 0.25 * np.cos(5 * t)
    dr = -1.25 * np.sin(5 * t)
    d2r = -6.25 * np.cos(5 * t)
    e = np.exp(1j * t)
    return r * e, (dr + 1j * r) * e, (d2r + 2j * dr - r) * e


def cap_constants() -> dict:
    a = 0.5 - np.arcsin(np.sinh(0.5)) / (2 * np.pi)
    b = (
        a
        - 1 / (4 * np.pi)
        - np.sqrt(2) / 8
        + np.sqrt(2) / (2 * np.pi) * np.arcsin(np.sqrt(2) / 2 * np.cos(2 * np.pi * a))
    )
    c = 9 / 8 - b
    t1 = 1 / (8 * c)
    t2 = t1 + (a - b) / c
    return {"a": a, "b": b, "c": c, "t1": t1, "t2": t2}


def _cap_pieces():
    k = cap_constants()
    a, c, t1, t2 = k["a"], k["c"], k["t1"], k["t2"]
    x_join = -np.sqrt(2) * np.arcsin(np.sqrt(2) / 2 * np.cos(2 * np.pi * a))
    s = 2 * np.pi  # tau in [0, 1) -> t = s * tau

    def arc(t):
        u = 4 * np.pi * c * t / s
        k1 = 4 * np.pi * c / s
        z = -0.5 * np.sin(u) - np.sqrt(2) * np.pi / 4 + 1j * (-0.5 + 0.5 * np.cos(u))
        dz = k1 * (-0.5 * np.cos(u) - 0.5j * np.sin(u))
        d2 = k1**2 * (0.5 * np.sin(u) - 0.5j * np.cos(u))
        return z, dz, d2

    def flat(t):
        tau = t / s
        z = 2 * np.pi * c * (tau - t2) + x_join - 0.5j
        return z, np.full_like(z, 2 * np.pi * c / s), np.zeros_like(z)

    def dome(t):
        u = 2 * np.pi * c * (t / s - t2) + 2 * np.pi * a
        du = 2 * np.pi * c / s
        q = 1 - np.cos(u) ** 2 / 2
        r = 1 + np.sin(u) ** 2
        z = -np.sqrt(2) * np.arcsin(np.sqrt(2) / 2 * np.cos(u)) - 1j * np.arcsinh(np.sin(u))
        dz = np.sin(u) / np.sqrt(q) - 1j * np.cos(u) / np.sqrt(r)
        d2 = (np.cos(u) / np.sqrt(q) - np.sin(u) ** 2 * np.cos(u) / (2 * q**1.5)) + 1j * (
            np.sin(u) / np.sqrt(r) + np.sin(u) * np.cos(u) ** 2 / r**1.5
        )
        return z, du * dz, du**2 * d2

    return [(0.0, s * t1, arc), (s * t1, s * t2, flat), (s * t2, s, dome)]


def perturbed_ellipse_constants() -> dict:
    a, b = 1.0, 7 / 3
    t0 = np.arcsin(1 / (4 * b * np.sqrt(2)))
    c0 = np.sqrt(1 - 1 / (32 * b**2)) + 1 / (4 * np.sqrt(2))
    return {"a": a, "b": b, "t0": t0, "c0": c0}


def _perturbed_ellipse_pieces():
    k = perturbed_ellipse_constants()
    a, b, t0, c0 = k["a"], k["b"], k["t0"], k["c0"]
    v_in = (a * np.cos(t0) - c0) / t0 + 1j * b * np.sin(t0) / t0
    v_out = (a * np.cos(2 * np.pi - t0) - c0) / t0 + 1j * b * np.sin(2 * np.pi - t0) / t0

    def lead(t):
        return c0 + v_in * t, np.full(t.shape, v_in), np.zeros(t.shape, complex)

    def body(t):
        return (
            a * np.cos(t) + 1j * b * np.sin(t),
            -a * np.sin(t) + 1j * b * np.cos(t),
            -a * np.cos(t) - 1j * b * np.sin(t),
        )

    def tail(t):
        return c0 + v_out * (2 * np.pi - t), np.full(t.shape, -v_out), np.zeros(t.shape, complex)

    return [(0.0, t0, lead), (t0, 2 * np.pi - t0, body), (2 * np.pi - t0, 2 * np.pi, tail)]


def _disk(center, radius):
    def f(t):
        e = np.exp(1j * t)
        return center + radius * e, 1j * radius * e, -radius * e

    return f


def _smooth_param(spec: ShapeSpec):
    if spec.shape == "kite":
        return _kite
    if spec.shape == "starfish":
        return _starfish
    if spec.shape == "disk":
        return _disk(spec.center, spec.radius)
    raise AssertionError(spec.shape)


def corner_pieces(shape: str):
    if shape == "cap":
        return _cap_pieces()
    if shape == "perturbed_ellipse":
        return _perturbed_ellipse_pieces()
    raise ValueError(f"{shape!r} has no corners")


# --- discretization ---------------------------------------------------------


def graded_panels(ta: float, tb: float, n_panels: int, depth: int) -> np.ndarray:
    """Panel edges on ``[ta, tb]``: uniform, with the end panels halved ``depth`` times."""
    n_panels = max(2, n_panels)
    edges = np.linspace(ta, tb, n_panels + 1)
    h = edges[1] - edges[0]
    left = ta + h * 2.0 ** -np.arange(depth, 0, -1)
    right = tb - h * 2.0 ** -np.arange(1, depth + 1)
    return np.concatenate([[ta], left, edges[1:-1], right, [tb]])


def _panel_curve(pieces, n_panels: int, depth: int) -> BoundaryCurve:
    x, w = np.polynomial.legendre.leggauss(PANEL_ORDER)
    ts, zs, dzs, d2s, ws = [], [], [], [], []
    for ta, tb, f in pieces:
        e = graded_panels(ta, tb, n_panels, depth)
        mid = 0.5 * (e[:-1] + e[1:])
        half = 0.5 * (e[1:] - e[:-1])
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        z, dz, d2 = f(t)
        ts.append(t)
        zs.append(z)
        dzs.append(dz)
        d2s.append(d2)
        ws.append((half[:, None] * w[None, :]).ravel())
    return BoundaryCurve(
        params=np.concatenate(ts),
        nodes=np.concatenate(zs),
        derivatives=np.concatenate(dzs),
        second=np.concatenate(d2s),
        weights=np.concatenate(ws),
        smoothness=CORNERED,
        corners=tuple(float(p[0]) for p in pieces),
    )


def make_curve(spec: ShapeSpec) -> BoundaryCurve:
    """Discretize the shape described by ``spec``."""
    if spec.shape == "from_conformal":
        if spec.depth:
            warnings.warn("refinement depth ignored for a smooth shape", stacklevel=2)
        curve = map_boundary(spec.cmap, spec.nodes)
    elif spec.has_corners:
        depth = 12 if spec.depth is None else spec.depth
        pieces = corner_pieces(spec.shape)
        n_panels = max(2, round(spec.nodes / (PANEL_ORDER * len(pieces))))
        curve = _panel_curve(pieces, n_panels, depth)
    else:
        if spec.depth:
            warnings.warn("refinement depth ignored for a smooth shape", stacklevel=2)
        n = spec.nodes
        t = 2 * np.pi * np.arange(n) / n
        z, dz, d2 = _smooth_param(spec)(t)
        curve = BoundaryCurve(t, z, dz, d2, np.full(n, 2 * np.pi / n), ANALYTIC)
    if spec.scale != 1.0 or spec.shift != 0:
        curve = curve.transformed(spec.scale, spec.shift)
    return oriented(curve)


def sample_boundary(spec: ShapeSpec, n: int) -> np.ndarray:
    """``n`` boundary points at equispaced parameters, for plotting and distances."""
    t = 2 * np.pi * np.arange(n) / n
    if spec.shape == "from_conformal":
        z = map_boundary(spec.cmap, n).nodes
    elif spec.has_corners:
        z = np.empty(n, dtype=complex)
        for ta, tb, f in corner_pieces(spec.shape):
            sel = (t >= ta) & (t < tb)
            if sel.any():
                z[sel] = f(t[sel])[0]
    else:
        z = _smooth_param(spec)(t)[0]
    return spec.scale * z + spec.shift
