"""Command-line front end: forward GPTs, inversion, order sweeps, shape listing.

Exit codes: 0 on success, 2 for configuration or input errors, 3 for
numerical failures (singular systems, non-convergence, inconsistent data).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import records
from .conformal import ConformalMap, map_boundary, random_map
from .errors import GptError
from .forward import GptSet, Material, gpt_analytic, gpt_nystrom
from .geometry import shape_distance
from .inversion import ReconstructionOptions, conformal_map_of, reconstruct
from .shapes import BUILTINS, CORNERED_SHAPES, ShapeSpec, make_curve, sample_boundary

log = logging.getLogger("gptinv")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
ROUTES = ("nystrom", "analytic")
SHAPES = BUILTINS + ("random",)

SHAPE_NOTES = {
    "kite": "smooth kite (cos t + 0.65 cos 2t, 1.5 sin t)",
    "starfish": "smooth five-armed starfish",
    "cap": "cap with two corners, graded panels",
    "perturbed_ellipse": "ellipse with one small corner, graded panels",
    "disk": "disk with configurable center and radius",
    "from_conformal": "image of |w| = gamma under a given exterior map",
    "random": "random truncated exterior map drawn from --seed",
}


@dataclass
class ExperimentConfig:
    """One experiment: which inclusion, which orders, which forward route.

    ``shape_options`` holds the remaining :class:`ShapeSpec` fields (depth,
    center, radius, map, scale, shift). ``map_coeffs`` is the number of map
    coefficients computed for built-in curves when the analytic route needs a
    map; ``random_coeffs`` is the length of a random map.
    """

    shape: str = "kite"
    nodes: int = 1024
    sigma_c: float = 3.0
    sigma_m: float = 1.0
    ords: list = field(default_factory=lambda: [2, 3, 5, 10])
    route: str = "nystrom"
    tol: float = 1e-10
    max_iter: int = 200
    out: str = "out"
    jobs: int = 1
    seed: int = 0
    svg_points: int = 512
    map_coeffs: int = 30
    random_coeffs: int = 3
    shape_options: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ords = [int(k) for k in np.atleast_1d(self.ords)]
        self.sigma_c = float(self.sigma_c)
        self.sigma_m = float(self.sigma_m)
        if not self.ords:
            raise ValueError("ord list is empty")
        if min(self.ords) < 2:
            raise ValueError(f"every ord must be at least 2, got {self.ords}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}; choose from {', '.join(SHAPES)}")
        if self.route not in ROUTES:
            raise ValueError(f"route must be one of {ROUTES}, got {self.route!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.jobs < 1:
            raise ValueError("max_iter and jobs must be at least 1")
        if self.svg_points < 3:
            raise ValueError("svg_points must be at least 3")
        if self.map_coeffs < 1 or self.random_coeffs < 1:
            raise ValueError("map_coeffs and random_coeffs must be at least 1")
        # validates the conductivities
        self.material()
        self.spec()

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        if np.isinf(self.sigma_c):
            d["sigma_c"] = "inf"
        return d

    def material(self) -> Material:
        return Material(self.sigma_c, self.sigma_m)

    def spec(self) -> ShapeSpec:
        opts = dict(self.shape_options)
        if self.shape == "random":
            rng = np.random.default_rng(self.seed)
            cmap = random_map(rng, self.random_coeffs, center_scale=0.3)
            return ShapeSpec.from_dict({**opts, "shape": "from_conformal", "nodes": self.nodes, "map": cmap.to_dict()})
        return ShapeSpec.from_dict({**opts, "shape": self.shape, "nodes": self.nodes})


def exact_map(spec: ShapeSpec, n_coeffs: int) -> ConformalMap:
    """Exterior map of a shape: exact for disks and map-defined shapes, computed otherwise."""
    if spec.shape == "disk":
        cmap = ConformalMap(spec.radius, spec.center, np.zeros(1))
    elif spec.shape == "from_conformal":
        cmap = spec.cmap
    else:
        return conformal_map_of(make_curve(spec), n_coeffs)
    if spec.scale != 1.0:
        cmap = cmap.scaled(spec.scale).translated(cmap.a0 * (spec.scale - 1))
    return cmap.translated(spec.shift)


def forward_gpts(cfg: ExperimentConfig, ord: int | None = None) -> GptSet:
    spec = cfg.spec()
    mat = cfg.material()
    ord = ord or max(cfg.ords)
    if cfg.route == "analytic":
        gpts = gpt_analytic(exact_map(spec, cfg.map_coeffs), mat, ord)
    else:
        gpts = gpt_nystrom(make_curve(spec), mat, ord)
    meta = {"shape": spec.to_dict(), "sigma_c": cfg.to_dict()["sigma_c"], "sigma_m": cfg.sigma_m, "lambda": mat.lam}
    return GptSet(gpts.ord, gpts.N1, gpts.N2, gpts.provenance, meta)


def _invert_item(args):
    gpts, ord, opts, true_pts, n_svg, svg_path = args
    t0 = time.perf_counter()
    res = reconstruct(gpts.truncated(ord), opts)
    rec_pts = map_boundary(res.map_rec, n_svg).nodes
    dist = shape_distance(true_pts, rec_pts) if true_pts is not None else float("nan")
    if svg_path is not None:
        curves = {"true": true_pts} if true_pts is not None else {}
        curves[f"ord {ord}"] = rec_pts
        records.svg_overlay(curves, svg_path)
    return ord, res, dist, time.perf_counter() - t0


def _options(cfg: ExperimentConfig) -> ReconstructionOptions:
    return ReconstructionOptions(tol=cfg.tol, max_iter=cfg.max_iter, sigma_m=cfg.sigma_m)


def cmd_forward(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    gpts = forward_gpts(cfg)
    cond = float(np.linalg.cond(gpts.N2))
    log.info("N2 condition number %.3e", cond)
    log.info("N1 symmetry residual %.2e, N2 Hermitian residual %.2e", gpts.symmetry_residual(), gpts.hermitian_residual())
    records.save_gpts_json(gpts, out / "gpts.json")
    records.save_gpts_csv(gpts, out / "gpts.csv")
    print(
        f"wrote {out / 'gpts.json'} (ord={gpts.ord}, route={gpts.provenance}, "
        f"lambda={gpts.meta['lambda']:.6g}, hermitian residual {gpts.hermitian_residual():.2e})"
    )
    return EXIT_OK


def cmd_invert(path: str, cfg: ExperimentConfig, ord: int | None, shape_given: bool) -> int:
    out = Path(cfg.out)
    gpts = records.load_gpts(path)
    if ord is not None:
        gpts = gpts.truncated(ord)
    if gpts.ord < 2:
        raise ValueError(f"measurement order {gpts.ord} is below 2")
    true_pts = None
    if shape_given:
        true_pts = sample_boundary(cfg.spec(), cfg.svg_points)
    elif "shape" in gpts.meta:
        true_pts = sample_boundary(ShapeSpec.from_dict(gpts.meta["shape"]), cfg.svg_points)
    out.mkdir(parents=True, exist_ok=True)
    _, res, dist, dt = _invert_item((gpts, gpts.ord, _options(cfg), true_pts, cfg.svg_points, out / "overlay.svg"))
    d = res.to_dict()
    d["ord"] = gpts.ord
    d["shape_distance"] = dist
    records.save_json(d, out / "result.json")
    records.write_trace(res.residual_trace, res.iterates, out / "trace.csv")
    print(f"ord={gpts.ord} lambda_rec={res.lambda_rec:.10g} sigma_rec={res.sigma_rec:.8g} iterations={res.iterations}")
    log.info("inversion took %.3f s; wrote %s", dt, out / "result.json")
    return EXIT_OK


def cmd_roundtrip(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    gpts = forward_gpts(cfg)
    log.info("forward (%s, ord %d) took %.3f s", cfg.route, gpts.ord, time.perf_counter() - t0)
    records.save_gpts_json(gpts, out / "gpts.json")
    true_pts = sample_boundary(cfg.spec(), cfg.svg_points)
    opts = _options(cfg)
    items = [(gpts, k, opts, true_pts, cfg.svg_points, out / f"overlay_ord{k}.svg") for k in sorted(set(cfg.ords))]
    if cfg.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_invert_item, items))
    else:
        results = [_invert_item(it) for it in items]
    lam = cfg.material().lam
    rows = []
    for k, res, dist, dt in results:
        rows.append(
            {
                "ord": k,
                "lambda_true": float(lam),
                "lambda_rec": res.lambda_rec,
                "abs_error": abs(res.lambda_rec - lam),
                "sigma_rec": res.sigma_rec,
                "gamma": res.map_rec.gamma,
                "a0_re": res.map_rec.a0.real,
                "a0_im": res.map_rec.a0.imag,
                "iterations": res.iterations,
                "shape_distance": dist,
                "converged": res.converged,
            }
        )
        records.save_json({"ord": k, **res.to_dict()}, out / f"result_ord{k}.json")
        # runtime goes to the terminal only so the files stay reproducible
        print(f"ord={k:3d} lambda_rec={res.lambda_rec:.6f} |err|={abs(res.lambda_rec - lam):.2e} dist={dist:.4f} time={dt:.3f}s")
    records.write_table(rows, out / "summary.csv")
    return EXIT_OK


def cmd_shapes(cfg: ExperimentConfig, write: bool) -> int:
    for name in SHAPES:
        print(f"{name:18s} {SHAPE_NOTES[name]}")
    if write:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for name in ("kite", "starfish") + CORNERED_SHAPES:
            spec = ShapeSpec(name, nodes=cfg.nodes if name in CORNERED_SHAPES else 512)
            make_curve(spec).to_csv(out / f"{name}.csv")
            records.svg_overlay({name: sample_boundary(spec, cfg.svg_points)}, out / f"{name}.svg")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config; flags override its values")
    common.add_argument("--shape", choices=SHAPES)
    common.add_argument("--sigma-c", type=float, help="inclusion conductivity (0 and inf allowed)")
    common.add_argument("--sigma-m", type=float, help="background conductivity")
    common.add_argument("--ord", type=int, nargs="+", help="GPT truncation order(s)")
    common.add_argument("--nodes", type=int, help="Nystrom node count")
    common.add_argument("--route", choices=ROUTES, help="forward route")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="gptinv", description="GPT forward computation and inclusion recovery")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("forward", parents=[common], help="compute GPTs and write a measurement file")
    inv = sub.add_parser("invert", parents=[common], help="recover contrast and shape from a measurement file")
    inv.add_argument("measurements", help="GPT file (.json or .csv)")
    sub.add_parser("roundtrip", parents=[common], help="forward then invert for each order")
    sh = sub.add_parser("shapes", parents=[common], help="list built-in shapes")
    sh.add_argument("--write", action="store_true", help="also write curve CSV and SVG files to --out")
    return p


_FLAG_KEYS = {
    "shape": "shape",
    "sigma_c": "sigma_c",
    "sigma_m": "sigma_m",
    "ord": "ords",
    "nodes": "nodes",
    "route": "route",
    "tol": "tol",
    "max_iter": "max_iter",
    "out": "out",
    "jobs": "jobs",
    "seed": "seed",
}


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(base, dict):
            raise ValueError("config file must hold a JSON object")
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            base[key] = v
    if args.command == "invert" and "ords" not in base:
        # the order comes from the file unless asked otherwise
        base["ords"] = [2]
    return ExperimentConfig.from_dict(base)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = build_config(args)
        if args.command == "forward":
            return cmd_forward(cfg)
        if args.command == "invert":
            ord = max(args.ord) if args.ord else None
            return cmd_invert(args.measurements, cfg, ord, args.shape is not None)
        if args.command == "roundtrip":
            return cmd_roundtrip(cfg)
        return cmd_shapes(cfg, args.write)
    except GptError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (ValueError, OSError, TypeError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
