import json

import numpy as np
import pytest

from carrollgeo.cli import main

DEFECT_FILE = """
[meta]
name = broken
dim = 2

[charts]
main = box(-1, 1; -1, 1)

[metric]
main = matrix(1, x1; 0, 1)
"""


def test_scenarios_list(capsys):
    assert main(["scenarios", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("flat", "moebius", "schwarzschild", "thakurta"):
        assert name in out


def test_check_schwarzschild_passes(capsys):
    assert main(["check", "schwarzschild", "--param", "GM=0.5", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "OK: schwarzschild" in out
    assert "FAIL" not in out


def test_check_thakurta_flags_conformal(capsys):
    assert main(["check", "thakurta", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "conformal_not_killing" in out


def test_check_defect_file_fails(tmp_path, capsys):
    path = tmp_path / "broken.ini"
    path.write_text(DEFECT_FILE)
    assert main(["check", str(path)]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "symmetry" in out


def test_check_json_report(tmp_path):
    out_path = tmp_path / "report.json"
    assert main(["check", "flat", "--out", str(out_path)]) == 0
    report = json.loads(out_path.read_text())
    assert report["passed"] is True
    assert {c["name"] for c in report["checks"]} >= {"kernel_annihilation", "kk_determinant_identity"}


def test_check_json_report_validates_against_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    from pathlib import Path

    schema = json.loads((Path(__file__).resolve().parents[1] / "docs" / "report_schema.json").read_text())
    out_path = tmp_path / "report.json"
    main(["check", "moebius", "--out", str(out_path)])
    jsonschema.validate(json.loads(out_path.read_text()), schema)


def test_unknown_scenario_is_usage_error(capsys):
    assert main(["check", "not-a-scenario"]) == 2


def test_geodesic_csv_and_determinism(tmp_path, capsys):
    args = [
        "geodesic", "schwarzschild", "--param", "GM=0.5",
        "--state", "pi/2, 0, 1, 0, 1, -1",
        "--lambda-max", "2.0", "--christoffel", "closed", "--seed", "7",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "lambda, x1, x2, t, vx1, vx2, vt, Q, null_residual, base_speed2"
    # the angle column is affine in lambda
    rows = np.loadtxt(str(a), skiprows=1, delimiter=",")
    assert np.max(np.abs(rows[:, 2] - rows[:, 0])) < 1e-6


def test_null_shoot_frozen_single_row(tmp_path, capsys):
    out = tmp_path / "frozen.csv"
    code = main([
        "null-shoot", "schwarzschild", "--point", "pi/2, 0", "--dir", "0, 1",
        "--q", "0", "--t0", "1", "--out", str(out),
    ])
    assert code == 0
    assert "frozen" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 2  # header + single sample


def test_null_shoot_json(tmp_path):
    out = tmp_path / "orbit.json"
    code = main([
        "null-shoot", "schwarzschild", "--point", "pi/2, 0", "--dir", "0, 1",
        "--q", "1", "--t0", "1", "--lambda-max", "1.0", "--christoffel", "closed",
        "--format", "json", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["columns"][0] == "lambda"
    assert payload["meta"]["scenario"].startswith("schwarzschild")


def test_geodesic_svg(tmp_path):
    out = tmp_path / "orbit.svg"
    code = main([
        "geodesic", "flat", "--state", "0, 0, 1, 0.3, 0.1, -1",
        "--lambda-max", "2.0", "--format", "svg", "--out", str(out),
    ])
    assert code == 0
    text = out.read_text()
    assert text.startswith("<svg") and "<polyline" in text


def test_small_gauge_circle_svg(tmp_path, capsys):
    out = tmp_path / "circle.svg"
    code = main([
        "geodesic", "flat", "--small-gauge", "--field", "1.0",
        "--state", "0, 0, 1, 0", "--lambda-max", "6.283185307179586",
        "--out", str(out),
    ])
    assert code == 0
    assert "<polyline" in out.read_text()


def test_christoffel_at_point(capsys):
    code = main(["christoffel", "schwarzschild", "--param", "GM=0.5", "--at", "pi/2, 0, 1"])
    assert code == 0
    out = capsys.readouterr().out
    assert "max closed-vs-numeric deviation" in out
    fiber_rows = [line for line in out.splitlines() if ", t, t, t," in line]
    assert fiber_rows
    numeric = float(fiber_rows[0].split(",")[-2])
    assert numeric == pytest.approx(-1.0, abs=1e-8)


def test_christoffel_flat_only_fiber_symbol(capsys):
    assert main(["christoffel", "flat", "--at", "0.3, 0.4, 2.0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    for line in lines:
        if line.startswith("0.3") and ", t, t, t," not in line:
            _, _, _, a, b, c, closed, numeric, dev = [s.strip() for s in line.split(",")]
            if (a, b, c) != ("t", "t", "t"):
                assert abs(float(numeric)) < 1e-7


def test_christoffel_golden_dump(tmp_path):
    out = tmp_path / "golden.csv"
    code = main([
        "christoffel", "schwarzschild", "--param", "GM=0.5",
        "--at", "pi/2, 0, 1", "--golden", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "theta, phi, t, A, B, C, value"
    table = {}
    for line in lines[1:]:
        cells = [s.strip() for s in line.split(",")]
        table[tuple(cells[3:6])] = float(cells[6])
    assert table[("t", "t", "t")] == pytest.approx(-1.0, abs=1e-8)
    assert table[("theta", "phi", "phi")] == pytest.approx(0.0, abs=1e-8)


def test_christoffel_random_points_deterministic(tmp_path):
    args = ["christoffel", "flat", "--count", "3", "--seed", "11"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_linearize_moebius(capsys):
    assert main(["linearize", "moebius"]) == 0
    out = capsys.readouterr().out
    assert "pair residual" in out and "OK" in out


def test_linearize_synthetic_with_table(tmp_path, capsys):
    out = tmp_path / "cocycle.csv"
    assert main(["linearize", "synthetic", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "to, src, m, c"
    assert len(lines) > 10


def test_linearize_atlas_file(tmp_path):
    atlas = tmp_path / "atlas.ini"
    atlas.write_text(
        "[charts]\na = interval(-2, 2)\nb = interval(0.5, 3)\n\n"
        "[overlap mid]\ncharts = a, b\ninterval = 0.6, 1.9\n"
        "to_a = exp(sin(m)) * r\nto_b = exp(-sin(m)) * r\n\n"
        "[sections]\na = 0\nb = 0\n"
    )
    assert main(["linearize", str(atlas)]) == 0


def test_usage_error_exit_code():
    assert main(["geodesic", "flat", "--state", "1, 2"]) == 2
