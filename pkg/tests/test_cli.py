from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from finsler_lab.cli import main, parse_config_file
from finsler_lab.errors import ConfigError
from finsler_lab.report import csv_text, dumps_json, format_float


def run(tmp_path, *args, fmt="json", name="out"):
    out = tmp_path / f"{name}.{fmt}"
    code = main([*args, "--format", fmt, "--out", str(out)])
    return code, out


def load_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def load_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))


def test_volume_factor_csv_columns_and_randers_values(tmp_path):
    code, out = run(tmp_path, "volume-factor", "--family", "randers", "--n", "2",
                    "--b-min", "0.1", "--b-max", "0.9", "--b-steps", "9", fmt="csv")
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == "b,f_bh,f_bh_err,f_ht,f_ht_err,clipped,diverged"
    assert "\r" not in text
    rows = load_csv(out)
    assert len(rows) == 9
    for row in rows:
        b = float(row["b"])
        assert float(row["f_bh"]) == pytest.approx((1 - b * b) ** 1.5, abs=1e-8)
        assert float(row["f_ht"]) == pytest.approx(1.0, abs=1e-10)
        assert row["clipped"] == "false" and row["diverged"] == "false"
    meta = load_json(tmp_path / "out.csv.meta.json")
    assert meta["family"] == "randers" and meta["n"] == 2
    assert meta["quadrature"]["nodes"] == 64
    assert meta["config"]["b_steps"] == 9


def test_volume_factor_riemannian_is_one(tmp_path):
    code, out = run(tmp_path, "volume-factor", "--family", "riemannian", "--n", "4")
    assert code == 0
    for rec in load_json(out)["rows"]:
        assert rec["f_bh"] == 1.0 and rec["f_ht"] == 1.0


def test_volume_factor_kropina_ht_diverges(tmp_path, capsys):
    code, out = run(tmp_path, "volume-factor", "--family", "kropina", "--n", "3",
                    "--b-min", "0.3", "--b-max", "0.8", "--b-steps", "3")
    assert code == 0
    doc = load_json(out)
    assert all(rec["diverged"] and rec["f_ht_err"] == "inf" for rec in doc["rows"])
    assert all(rec["f_bh"] == pytest.approx((2 / rec["b"]) ** 3, abs=1e-8) for rec in doc["rows"])
    assert doc["meta"]["warnings"] == 3
    assert doc["meta"]["diverged_measures"] == ["HT"]
    assert "Holmes-Thompson" in doc["meta"]["discrepancies"][0]
    assert "warning" in capsys.readouterr().err


def test_check_killing_examples(tmp_path):
    code, out = run(tmp_path, "check-killing", "--kappa", "0", "--n", "2", "--profile", "constant:0.5", name="a")
    rec = load_json(out)["rows"][0]
    assert code == 0 and rec["constant_killing"] and rec["max_sym"] < 1e-8
    _, out = run(tmp_path, "check-killing", "--kappa", "0", "--n", "2", "--profile", "rotation", name="b")
    rec = load_json(out)["rows"][0]
    assert rec["killing"] and not rec["constant_killing"] and rec["norm_spread"] > 0.1
    _, out = run(tmp_path, "check-killing", "--kappa", "0", "--n", "2", "--profile", "x1dx1", name="c")
    rec = load_json(out)["rows"][0]
    assert not rec["killing"] and rec["max_sym"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "args,verdict",
    [
        (["--family", "kropina", "--kappa", "0", "--profile", "constant:0.5", "--measure", "BH"], "harmonic"),
        (["--family", "randers", "--kappa", "-1", "--profile", "exp:0.5", "--measure", "BH"], "harmonic"),
        (["--family", "square", "--kappa", "0", "--profile", "nonradial:0.3", "--measure", "BH"], "not-harmonic"),
        (["--family", "kropina", "--kappa", "0", "--profile", "constant:0.5", "--measure", "HT"], "inconclusive"),
    ],
)
def test_harmonicity_verdicts(tmp_path, args, verdict):
    code, out = run(tmp_path, "harmonicity", *args)
    assert code == 0
    doc = load_json(out)
    assert doc["meta"]["verdict"] == verdict
    assert len(doc["rows"]) == 4 * 16
    assert set(doc["rows"][0]) == {"r", "direction", "sigma", "ratio"}


def test_mean_curvature_reports(tmp_path):
    code, out = run(tmp_path, "mean-curvature", "--family", "randers", "--measure", "HT", "--kappa", "-1", name="h")
    doc = load_json(out)
    assert code == 0 and doc["meta"]["pi_infinity"] == pytest.approx(2.0, abs=1e-4)
    code, out = run(tmp_path, "mean-curvature", "--family", "riemannian", "--kappa", "0", "--profile", "zero", name="e")
    assert abs(load_json(out)["meta"]["pi_infinity"]) < 1e-6
    code, out = run(tmp_path, "mean-curvature", "--family", "kropina", "--measure", "BH", "--kappa", "0",
                    "--profile", "constant:0.5", fmt="csv", name="k")
    rows = load_csv(out)
    assert list(rows[0]) == ["t", "pi_f", "pi_alpha", "delta"]
    assert max(abs(float(r["delta"])) for r in rows) < 1e-10


def test_mean_curvature_rejects_sphere(tmp_path):
    code, _ = run(tmp_path, "mean-curvature", "--kappa", "1")
    assert code == 2


def test_mean_curvature_divergence_is_numeric_failure(tmp_path):
    code, _ = run(tmp_path, "mean-curvature", "--family", "kropina", "--measure", "HT", "--kappa", "0",
                  "--profile", "constant:0.5")
    assert code == 1


def test_verify_all_default_passes(tmp_path, capsys):
    code, out = run(tmp_path, "verify-all")
    assert code == 0
    doc = load_json(out)
    assert doc["meta"]["all_passed"]
    labels = [r["label"] for r in doc["rows"]]
    for label in ("T3.2", "T3.4", "C3.5", "T3.6", "T3.7-1", "T3.7-2", "T3.7-3"):
        assert label in labels
    neg = [r for r in doc["rows"] if r["check"].startswith("negative control")]
    assert neg and neg[0]["status"] == "correctly-failing"
    assert "T3.6     PASS" in capsys.readouterr().err


def test_verify_all_with_injected_nonradial_beta(tmp_path):
    code, out = run(tmp_path, "verify-all", "--profile", "nonradial:0.3")
    assert code == 0
    t36 = [r for r in load_json(out)["rows"] if r["label"] == "T3.6"]
    assert t36[0]["expected"] == "not-harmonic" and t36[0]["status"] == "correctly-failing"


def test_verify_all_tight_rel_tol_same_verdicts(tmp_path):
    _, a = run(tmp_path, "verify-all", name="a")
    _, b = run(tmp_path, "verify-all", "--rel-tol", "1e-14", name="b")
    va = [(r["label"], r["observed"], r["passed"]) for r in load_json(a)["rows"]]
    vb = [(r["label"], r["observed"], r["passed"]) for r in load_json(b)["rows"]]
    assert va == vb


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nfamily = randers\nn = 3\nb-steps = 2\nb_min=0.2\nb-max = 0.4\n", encoding="utf-8")
    out = tmp_path / "o.json"
    assert main(["volume-factor", "--config", str(cfg), "--n", "2", "--out", str(out)]) == 0
    doc = load_json(out)
    assert doc["meta"]["n"] == 2
    assert [r["b"] for r in doc["rows"]] == [0.2, 0.4]
    assert doc["meta"]["config"]["family"] == "randers"


@pytest.mark.parametrize("text", ["nonsense\n", "colour = red\n", "n = three\n"])
def test_bad_config_file(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)
    assert main(["volume-factor", "--config", str(cfg)]) == 2


@pytest.mark.parametrize(
    "args",
    [
        ["volume-factor", "--family", "finsler"],
        ["volume-factor", "--family", "matsumoto", "--b", "0.7"],
        ["volume-factor", "--n", "1"],
        ["volume-factor", "--measure", "XY"],
        ["volume-factor", "--nodes", "2"],
        ["volume-factor", "--format", "xml"],
        ["harmonicity", "--radii", "1,2"],
        ["harmonicity", "--directions", "4"],
        ["harmonicity", "--profile", "spiral"],
        ["check-killing", "--kappa", "3"],
        ["volume-factor", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_config_errors_exit_2(args, capsys):
    assert main(args) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_byte_identical_reports(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["verify-all", "--out", str(a)]) == 0
    assert main(["verify-all", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_threads_env_does_not_change_output(tmp_path, monkeypatch):
    monkeypatch.setenv("FINSLER_LAB_THREADS", "1")
    _, a = run(tmp_path, "volume-factor", "--family", "square", fmt="csv", name="a")
    monkeypatch.setenv("FINSLER_LAB_THREADS", "4")
    _, b = run(tmp_path, "volume-factor", "--family", "square", fmt="csv", name="b")
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("FINSLER_LAB_THREADS", "many")
    assert main(["volume-factor"]) == 2


def test_stdout_csv_with_meta_on_stderr(capsys):
    assert main(["volume-factor", "--family", "riemannian", "--b", "0.5", "--format", "csv"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("b,f_bh,")
    assert json.loads(captured.err)["command"] == "volume-factor"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "finsler_lab", "volume-factor", "--b", "0.5", "--format", "csv",
                           "--family", "riemannian"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("0.5,1,")


def test_float_formatting():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(1.0) == "1"
    assert format_float(-0.0) == "0"
    assert format_float(math.inf) == "inf"
    assert format_float(math.nan) == "nan"
    assert dumps_json({"x": [1.5, math.inf], "ok": True, "none": None}) == (
        '{\n  "x": [1.5, "inf"],\n  "ok": true,\n  "none": null\n}\n'
    )
    assert csv_text(["a", "b"], [[0.25, False]]) == "a,b\n0.25,false\n"
