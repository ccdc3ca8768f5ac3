"""Reading and writing measurement files, results, tables and SVG plots.

Everything written here is a pure function of its inputs, so repeated runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .forward import GptSet

MEASURED = "measured-file"
CSV_HEADER = ["matrix", "m", "n", "re", "im"]

# colours cycle through the overlay curves in insertion order
_COLOURS = ("#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


def _pairs(A: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in A]


def _unpairs(rows, ord: int, name: str) -> np.ndarray:
    try:
        A = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name}: entries must be [re, im] pairs ({exc})") from exc
    if A.shape != (ord, ord):
        raise ValueError(f"{name} has shape {A.shape}, expected {(ord, ord)}")
    return A


def gpts_to_dict(gpts: GptSet) -> dict:
    return {
        "ord": gpts.ord,
        "N1": _pairs(gpts.N1),
        "N2": _pairs(gpts.N2),
        "provenance": gpts.provenance,
        "meta": gpts.meta,
    }


def gpts_from_dict(d: dict) -> GptSet:
    if not isinstance(d, dict):
        raise ValueError("measurement record must be a JSON object")
    try:
        ord = int(d["ord"])
        N1 = _unpairs(d["N1"], ord, "N1")
        N2 = _unpairs(d["N2"], ord, "N2")
    except KeyError as exc:
        raise ValueError(f"measurement record lacks field {exc}") from exc
    except TypeError as exc:
        raise ValueError(f"malformed measurement record: {exc}") from exc
    if ord < 1:
        raise ValueError(f"order must be positive, got {ord}")
    meta = dict(d.get("meta") or {})
    meta.setdefault("source_provenance", d.get("provenance", "unknown"))
    return GptSet(ord, N1, N2, MEASURED, meta)


def save_gpts_json(gpts: GptSet, path) -> None:
    Path(path).write_text(json.dumps(gpts_to_dict(gpts), indent=1) + "\n")


def load_gpts_json(path) -> GptSet:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return gpts_from_dict(d)


def save_gpts_csv(gpts: GptSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for tag, A in (("N1", gpts.N1), ("N2", gpts.N2)):
            for m in range(gpts.ord):
                for n in range(gpts.ord):
                    v = A[m, n]
                    w.writerow([tag, m + 1, n + 1, repr(float(v.real)), repr(float(v.imag))])


def load_gpts_csv(path) -> GptSet:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
    entries = {}
    for k, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 5 or row[0] not in ("N1", "N2"):
            raise ValueError(f"{path}:{k}: malformed row {row}")
        try:
            m, n, re, im = int(row[1]), int(row[2]), float(row[3]), float(row[4])
        except ValueError as exc:
            raise ValueError(f"{path}:{k}: {exc}") from exc
        if m < 1 or n < 1:
            raise ValueError(f"{path}:{k}: indices start at 1")
        entries[(row[0], m, n)] = complex(re, im)
    ord = max((max(m, n) for _, m, n in entries), default=0)
    if ord < 1:
        raise ValueError(f"{path}: no entries")
    N = {tag: np.zeros((ord, ord), dtype=complex) for tag in ("N1", "N2")}
    for tag in N:
        for m in range(1, ord + 1):
            for n in range(1, ord + 1):
                if (tag, m, n) not in entries:
                    raise ValueError(f"{path}: missing {tag} entry ({m},{n})")
                N[tag][m - 1, n - 1] = entries[(tag, m, n)]
    return GptSet(ord, N["N1"], N["N2"], MEASURED, {"source": Path(path).name})


def load_gpts(path) -> GptSet:
    """Measurement file by extension: ``.csv`` or JSON otherwise."""
    if Path(path).suffix.lower() == ".csv":
        return load_gpts_csv(path)
    return load_gpts_json(path)


def _clean(x):
    # JSON has no inf/nan; write them as null
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def save_json(d: dict, path) -> None:
    Path(path).write_text(json.dumps(_clean(d), indent=1) + "\n")


def write_table(rows: list[dict], path, columns: list[str] | None = None) -> None:
    """CSV table with floats written by ``repr`` (round-trippable, deterministic)."""
    columns = columns or (list(rows[0]) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(float(r[c])) if isinstance(r[c], (float, np.floating)) else r[c] for c in columns])


def write_trace(trace, iterates, path) -> None:
    rows = [
        {"k": k, "lambda": float(iterates[k + 1]), "rel_step": float(s)} for k, s in enumerate(trace)
    ]
    write_table(rows, path, ["k", "lambda", "rel_step"])


def svg_overlay(curves: dict, path, size: int = 480, margin: float = 0.08) -> None:
    """Polylines, one per entry of ``curves`` (label -> complex points).

    Each polyline carries exactly the points given; the view box is fitted to
    their union with a relative margin.
    """
    pts = [np.asarray(z, dtype=complex) for z in curves.values()]
    allz = np.concatenate(pts) if pts else np.zeros(1, dtype=complex)
    lo = complex(allz.real.min(), allz.imag.min())
    span = max(allz.real.max() - lo.real, allz.imag.max() - lo.imag, 1e-12)
    s = size * (1 - 2 * margin) / span
    off = size * margin

    def xy(z):
        # flip y so the picture is upright
        return f"{off + s * (z.real - lo.real):.4f},{size - off - s * (z.imag - lo.imag):.4f}"

    root = ET.Element(
        "svg",
        {"xmlns": "http://www.w3.org/2000/svg", "width": str(size), "height": str(size), "viewBox": f"0 0 {size} {size}"},
    )
    for k, (label, z) in enumerate(curves.items()):
        g = ET.SubElement(root, "g", {"id": str(label)})
        ET.SubElement(g, "title").text = str(label)
        ET.SubElement(
            g,
            "polyline",
            {
                "points": " ".join(xy(p) for p in np.asarray(z, dtype=complex)),
                "fill": "none",
                "stroke": _COLOURS[k % len(_COLOURS)],
                "stroke-width": "1.5",
                "stroke-dasharray": "none" if k == 0 else "6,3",
            },
        )
    ET.ElementTree(root).write(path, encoding="unicode", xml_declaration=True)
