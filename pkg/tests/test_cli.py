import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from gptinv import records
from gptinv.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, ExperimentConfig, exact_map, main
from gptinv.shapes import ShapeSpec

SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def polyline_counts(path):
    root = ET.parse(path).getroot()
    return [len(p.get("points").split()) for p in root.iter(SVG + "polyline")]


@pytest.fixture(scope="module")
def kite_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("kite")
    assert main(["forward", "--shape", "kite", "--sigma-c", "3", "--ord", "10", "--nodes", "1024", "--out", str(out)]) == 0
    return out


def test_forward_kite(kite_file):
    g = records.load_gpts(kite_file / "gpts.json")
    assert g.ord == 10
    assert g.hermitian_residual() < 1e-8
    assert g.meta["lambda"] == pytest.approx(1.0)
    c = records.load_gpts(kite_file / "gpts.csv")
    assert np.array_equal(c.N2, g.N2)


def test_forward_disk_closed_form(tmp_path, capsys):
    code, _ = run(capsys, "forward", "--config", write_config(tmp_path, {"shape": "disk", "shape_options": {"radius": 2.0}}),
                  "--ord", 2, "--nodes", 256, "--out", tmp_path)
    assert code == EXIT_OK
    g = records.load_gpts(tmp_path / "gpts.json")
    assert abs(g.N2[0, 0] - 8 * np.pi) < 1e-8


def test_forward_order_one_rejected(tmp_path, capsys, caplog):
    code, err = run(capsys, "forward", "--ord", 1, "--out", tmp_path)
    assert code == EXIT_CONFIG
    assert "at least 2" in caplog.text
    assert not (tmp_path / "gpts.json").exists()


def test_invert_kite(kite_file, tmp_path, capsys):
    code, res = run(capsys, "invert", kite_file / "gpts.json", "--out", tmp_path)
    assert code == EXIT_OK
    lam = float(res.out.split("lambda_rec=")[1].split()[0])
    assert lam == pytest.approx(1.0, abs=2e-3)
    d = json.loads((tmp_path / "result.json").read_text())
    assert d["ord"] == 10 and d["flags"]["converged"]
    assert d["shape_distance"] < 0.05
    assert polyline_counts(tmp_path / "overlay.svg") == [512, 512]
    rows = list(csv.DictReader(open(tmp_path / "trace.csv")))
    assert len(rows) == d["iterations"]
    assert float(rows[-1]["lambda"]) == d["lambda_rec"]


def test_invert_lower_order_from_csv(kite_file, tmp_path, capsys):
    code, res = run(capsys, "invert", kite_file / "gpts.csv", "--ord", 2, "--out", tmp_path)
    assert code == EXIT_OK
    assert "ord=2 " in res.out
    # CSV carries no shape, so only the reconstruction is drawn
    assert polyline_counts(tmp_path / "overlay.svg") == [512]
    assert float(res.out.split("lambda_rec=")[1].split()[0]) == pytest.approx(1.0751, abs=2e-3)


def test_invert_starfish_order_two(tmp_path, capsys):
    assert main(["forward", "--shape", "starfish", "--sigma-c", "0.8", "--ord", "2", "--nodes", "1024", "--out", str(tmp_path)]) == 0
    code, res = run(capsys, "invert", tmp_path / "gpts.json", "--out", tmp_path / "inv")
    assert code == EXIT_OK
    assert float(res.out.split("lambda_rec=")[1].split()[0]) == pytest.approx(-5.0240, abs=5e-3)


def test_invert_corrupted_header(tmp_path, capsys, caplog):
    (tmp_path / "bad.csv").write_text("matrix;m;n;re;im\nN1;1;1;0;0\n")
    code, res = run(capsys, "invert", tmp_path / "bad.csv", "--out", tmp_path)
    assert code == EXIT_CONFIG
    assert "header" in caplog.text


def test_invert_missing_file(tmp_path, capsys):
    code, _ = run(capsys, "invert", tmp_path / "nothing.json", "--out", tmp_path)
    assert code == EXIT_CONFIG


def test_numerical_failure_exit_code(tmp_path, capsys, caplog):
    g = records.GptSet(2, np.zeros((2, 2)), np.ones((2, 2)))
    records.save_gpts_json(g, tmp_path / "sing.json")
    code, res = run(capsys, "invert", tmp_path / "sing.json", "--out", tmp_path)
    assert code == EXIT_NUMERIC
    assert "numerical failure" in caplog.text


def test_roundtrip_cap_sweep(tmp_path, capsys):
    code, res = run(capsys, "roundtrip", "--shape", "cap", "--sigma-c", 0.5, "--ord", 2, 5, 10, 20, "--nodes", 512,
                    "--out", tmp_path, "--jobs", 2)
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert [int(r["ord"]) for r in rows] == [2, 5, 10, 20]
    ref = [-1.5107, -1.5095, -1.5062, -1.5039]
    assert all(abs(float(r["lambda_rec"]) - v) < 5e-3 for r, v in zip(rows, ref))
    for k in (2, 5, 10, 20):
        assert polyline_counts(tmp_path / f"overlay_ord{k}.svg") == [512, 512]
        assert (tmp_path / f"result_ord{k}.json").exists()
    assert "time=" in res.out
    assert "time" not in rows[0]


def test_roundtrip_random_analytic(tmp_path, capsys):
    code, _ = run(capsys, "roundtrip", "--shape", "random", "--route", "analytic", "--seed", 4, "--sigma-c", 7,
                  "--ord", 6, 8, "--out", tmp_path)
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert all(float(r["abs_error"]) < 1e-8 for r in rows)


def test_roundtrip_deterministic_across_jobs(tmp_path, capsys):
    args = ["roundtrip", "--shape", "starfish", "--sigma-c", "0.8", "--ord", "2", "5", "--nodes", "512"]
    assert main(args + ["--out", str(tmp_path / "a"), "--jobs", "1"]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--jobs", "2"]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes(), n


def write_config(tmp_path, d):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(d))
    return p


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = write_config(tmp_path, {"shape": "disk", "sigma_c": 3.0, "ords": [2], "nodes": 128, "out": str(tmp_path / "fromfile")})
    code, _ = run(capsys, "forward", "--config", cfg, "--sigma-c", 0.0, "--out", tmp_path / "flag")
    assert code == EXIT_OK
    g = records.load_gpts(tmp_path / "flag" / "gpts.json")
    assert g.meta["lambda"] == -0.5
    assert not (tmp_path / "fromfile").exists()


def test_config_unknown_key(tmp_path, capsys, caplog):
    code, res = run(capsys, "forward", "--config", write_config(tmp_path, {"colour": "red"}), "--out", tmp_path)
    assert code == EXIT_CONFIG
    assert "unknown config keys" in caplog.text


def test_config_bad_json(tmp_path, capsys):
    (tmp_path / "c.json").write_text("{")
    code, _ = run(capsys, "forward", "--config", tmp_path / "c.json", "--out", tmp_path)
    assert code == EXIT_CONFIG


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(ords=[])
    with pytest.raises(ValueError):
        ExperimentConfig(route="fem")
    with pytest.raises(ValueError):
        ExperimentConfig(sigma_c=1.0)
    cfg = ExperimentConfig(shape="random", seed=3)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert ExperimentConfig(sigma_c=np.inf).to_dict()["sigma_c"] == "inf"


def test_exact_map_of_scaled_disk():
    m = exact_map(ShapeSpec("disk", 64, center=1j, radius=0.5, scale=2.0, shift=1.0), 5)
    assert m.gamma == pytest.approx(1.0)
    assert m.a0 == pytest.approx(1 + 2j)


def test_shapes_listing(tmp_path, capsys):
    code, res = run(capsys, "shapes", "--write", "--out", tmp_path, "--nodes", 256)
    assert code == EXIT_OK
    for name in ("kite", "starfish", "cap", "perturbed_ellipse", "disk", "random"):
        assert name in res.out
    assert (tmp_path / "cap.csv").exists()
    assert polyline_counts(tmp_path / "kite.svg") == [512]


def test_verbose_logging_goes_to_stderr(tmp_path, capsys):
    code, res = run(capsys, "forward", "--shape", "kite", "--ord", 3, "--nodes", 128, "--out", tmp_path, "-v")
    assert code == EXIT_OK
    assert "wrote" in res.out
    assert "condition" not in res.out
