"""Acceptance criteria, one test each.

Every test appends a single ``[PASS]``/``[FAIL]`` line to ``conftest.CRITERIA``
(echoed at the end of the pytest run) before asserting. Running this file as
a script prints the same lines without pytest.
"""

import logging
import time

import numpy as np

from gptinv import (
    ConformalMap,
    FptSet,
    Material,
    ShapeSpec,
    fpt_analytic,
    gpt_analytic,
    gpt_nystrom,
    grunsky_tables,
    joukowski,
    make_curve,
    monotone_combination,
    random_map,
    reconstruct,
    scattered_field,
)

import conftest
from conftest import builtin_map, curve

VARIANTS = (1, -1, 2, -2, 3, -3, 4, -4)


def report(k: int, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}"
    conftest.CRITERIA.append(line)
    print(line)
    assert ok, line


def reference_sweep(shape, sigma_c, nodes, ref, tol):
    """Recovered contrast for each order from one Nystrom forward run at the largest order."""
    t0 = time.perf_counter()
    g = gpt_nystrom(make_curve(ShapeSpec(shape, nodes)), Material(sigma_c), max(ref))
    deltas = {k: reconstruct(g.truncated(k)).lambda_rec - v for k, v in ref.items()}
    dt = time.perf_counter() - t0
    ok = all(abs(d) <= tol for d in deltas.values())
    text = ", ".join(f"ord {k}: {ref[k] + d:+.5f} ({d:+.1e})" for k, d in deltas.items())
    return ok, text, dt


def test_criterion_1_kite_reference():
    ref = {2: 1.0751, 3: 1.0246, 5: 1.0036, 10: 1.0000}
    ok, text, dt = reference_sweep("kite", 3.0, 1024, ref, 0.002)
    report(1, ok and dt < 60, f"kite {text}; {dt:.2f} s (tol 0.002, limit 60 s)")


def test_criterion_2_starfish_reference():
    ref = {2: -5.0240, 5: -4.7352, 10: -4.6327, 25: -4.5458}
    ok, text, _ = reference_sweep("starfish", 0.8, 1024, ref, 0.005)
    report(2, ok, f"starfish {text} (tol 0.005)")


def test_criterion_3_cap_reference():
    ref = {2: -1.5107, 5: -1.5095, 10: -1.5062, 20: -1.5039}
    ok, text, _ = reference_sweep("cap", 0.5, 512, ref, 0.005)
    report(3, ok, f"cap {text} (tol 0.005)")


def test_criterion_4_perturbed_ellipse_reference():
    ref = {2: 1.0028, 10: 1.0019, 15: 1.0012, 25: 1.0003}
    ok, text, _ = reference_sweep("perturbed_ellipse", 3.0, 512, ref, 0.005)
    report(4, ok, f"perturbed ellipse {text} (tol 0.005)")


def test_criterion_5_cross_route():
    worst = 0.0
    for cmap in (ConformalMap(1.0), joukowski(1.0, 0.5)):
        c = make_curve(ShapeSpec("from_conformal", 512, cmap=cmap))
        for lam in (1.0, -1.5, 0.55):
            mat = Material.from_lambda(lam)
            for k in range(1, 9):
                a = gpt_analytic(cmap, mat, k)
                b = gpt_nystrom(c, mat, k)
                worst = max(worst, np.abs(a.N1 - b.N1).max(), np.abs(a.N2 - b.N2).max())
    report(5, worst < 1e-7, f"disk and Joukowski, ord 1..8, lambda in (1, -1.5, 0.55): max entry gap {worst:.1e} (tol 1e-7)")


def test_criterion_6_analytic_roundtrip():
    r = np.random.default_rng(6)
    ord = 8
    t0 = time.perf_counter()
    e_lam = e_gam = e_coef = 0.0
    for _ in range(100):
        cmap = random_map(r, int(r.integers(1, 4)), gamma=r.uniform(0.6, 1.6), center_scale=0.3)
        lam = r.choice([-1, 1]) * r.uniform(0.55, 5.0)
        res = reconstruct(gpt_analytic(cmap, Material.from_lambda(lam), ord))
        e_lam = max(e_lam, abs(res.lambda_rec - lam) / abs(lam))
        e_gam = max(e_gam, abs(res.map_rec.gamma - cmap.gamma) / cmap.gamma)
        e_coef = max(e_coef, np.abs(res.map_rec.padded(ord - 2) - cmap.padded(ord - 2)).max())
    dt = time.perf_counter() - t0
    ok = e_lam < 1e-8 and e_gam < 1e-8 and e_coef < 1e-6 and dt < 120
    report(6, ok, f"100 random maps: lambda rel {e_lam:.1e}, gamma rel {e_gam:.1e}, a_0..a_6 abs {e_coef:.1e}; {dt:.2f} s")


def test_criterion_7_structural_invariants():
    shapes = ("kite", "starfish", "cap", "perturbed_ellipse")
    maps = [builtin_map(s) for s in shapes] + [ConformalMap(1.0), joukowski(1.0, 0.5)]
    r = np.random.default_rng(7)
    maps += [random_map(r, 4, gamma=r.uniform(0.6, 1.6)) for _ in range(10)]
    sym = 0.0
    norm = 0.0
    for m in maps:
        T = grunsky_tables(m, 30)
        n = np.arange(1, 31)
        lhs = n[None, :] * T.C
        sym = max(sym, np.abs(lhs - lhs.T).max() / max(np.abs(lhs).max(), 1e-300))
        norm = max(norm, T.norm())
    res_a = max(
        max(g.symmetry_residual(), g.hermitian_residual())
        for g in (gpt_analytic(m, Material.from_lambda(lam), 10) for m in maps for lam in (1.0, -1.5))
    )
    res_n = max(
        max(g.symmetry_residual(), g.hermitian_residual())
        for g in (gpt_nystrom(curve(s), Material.from_lambda(lam), 10) for s in shapes for lam in (1.0, -1.5))
    )
    ext = 0.0
    for m in maps[:6]:
        T = grunsky_tables(m, 10)
        for lam in (0.5, -0.5):
            F = fpt_analytic(T, Material.from_lambda(lam), 10)
            ext = max(ext, np.abs(F.F1[:, 0] - 4 * np.pi * T.C[:, 0]).max(), abs(F.F2[1, 0]))
    ok = sym < 1e-12 and norm <= 1 + 1e-10 and res_a < 1e-9 and res_n < 1e-6 and ext < 1e-9
    report(
        7,
        ok,
        f"Grunsky symmetry {sym:.1e}, max ||G|| {norm:.6f}, residuals analytic {res_a:.1e} / Nystrom {res_n:.1e}, "
        f"extreme identities {ext:.1e}",
    )


def test_criterion_8_multipole():
    c = curve("kite", 512)
    R = 3 * c.diameter
    worst = 0.0
    for scale in (1.0, 2.0):
        x = scale * R * np.exp(1j * np.linspace(0, 2 * np.pi, 12, endpoint=False))
        for m in range(1, 4):
            for part in ("re", "im"):
                layer, multi = scattered_field(c, Material(3.0), m, x, part=part, ord=8)
                worst = max(worst, np.abs(layer - multi).max())
    report(8, worst < 1e-6, f"kite ord 8 at |x| = 3 and 6 diameters: max gap {worst:.1e} (tol 1e-6)")


def monomial_fpts(c, lam, ord=4):
    g = gpt_nystrom(c, Material.from_lambda(lam), ord)
    return FptSet(ord, g.N1, g.N2)


def test_criterion_9_monotonicity():
    cases = [
        ("disk", make_curve(ShapeSpec("disk", 256, radius=1.0)), make_curve(ShapeSpec("disk", 256, radius=0.8))),
        ("kite", curve("kite", 512), make_curve(ShapeSpec("kite", 512, scale=0.9))),
    ]
    fails = []
    margin = np.inf
    for name, big_c, small_c in cases:
        for lam, sign in ((1.0, 1), (-1.0, -1)):
            big, small = monomial_fpts(big_c, lam), monomial_fpts(small_c, lam)
            for pair in ((1, 2), (1, 3), (2, 3), (2, 4)):
                for v in VARIANTS:
                    a, b = monotone_combination(big, small, *pair, v)
                    margin = min(margin, sign * (a - b))
                    if sign * (a - b) <= 0:
                        fails.append((name, lam, pair, v))
    report(9, not fails, f"8 variants x 4 index pairs x 2 contrasts on disk and kite: {len(fails)} violations, min margin {margin:.2e}")


def test_criterion_10_covariance():
    r = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        cmap = random_map(r, 3, gamma=r.uniform(0.6, 1.6), center_scale=0.3)
        mat = Material.from_lambda(r.choice([-1, 1]) * r.uniform(0.55, 5.0))
        v = complex(*r.normal(size=2))
        s = r.uniform(0.5, 2.0)
        a = reconstruct(gpt_analytic(cmap, mat, 6)).map_rec
        b = reconstruct(gpt_analytic(cmap.translated(v), mat, 6)).map_rec
        c = reconstruct(gpt_analytic(cmap.scaled(s), mat, 6)).map_rec
        n = np.arange(1, a.order + 1)
        worst = max(
            worst,
            abs(b.a0 - a.a0 - v),
            abs(b.gamma - a.gamma),
            np.abs(b.coeffs - a.coeffs).max(),
            abs(c.gamma - s * a.gamma),
            abs(c.a0 - a.a0),
            np.abs(c.coeffs - s ** (n + 1) * a.coeffs).max(),
        )
    # the same statements on Nystrom data of the kite
    mat = Material(3.0)
    base = reconstruct(gpt_nystrom(curve("kite", 512), mat, 8)).map_rec
    v, s = 0.7 - 0.4j, 1.3
    moved = reconstruct(gpt_nystrom(make_curve(ShapeSpec("kite", 512, shift=v)), mat, 8)).map_rec
    # scale about the recovered centre so that a_0 stays put
    spec = ShapeSpec("kite", 512, scale=s, shift=base.a0 * (1 - s))
    scaled = reconstruct(gpt_nystrom(make_curve(spec), mat, 8)).map_rec
    n = np.arange(1, 9)
    worst_n = max(
        abs(moved.a0 - base.a0 - v),
        abs(moved.gamma - base.gamma),
        np.abs(moved.coeffs - base.coeffs).max(),
        abs(scaled.gamma - s * base.gamma),
        abs(scaled.a0 - base.a0),
        np.abs(scaled.coeffs - s ** (n + 1) * base.coeffs).max(),
    )
    ok = worst < 1e-8 and worst_n < 1e-8
    report(10, ok, f"translation and scaling: analytic random maps {worst:.1e}, kite Nystrom {worst_n:.1e} (tol 1e-8)")


if __name__ == "__main__":
    # residue diagnostics on cornered shapes are expected; keep the report readable
    logging.getLogger("gptinv").setLevel(logging.ERROR)
    tests = [v for k, v in dict(globals()).items() if k.startswith("test_criterion_")]
    for fn in sorted(tests, key=lambda f: int(f.__name__.split("_")[2])):
        try:
            fn()
        except AssertionError:
            pass
