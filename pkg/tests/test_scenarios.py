import math

import numpy as np
import pytest

from carrollgeo.errors import ContractViolation
from carrollgeo.geometry import euler_weight
from carrollgeo.scenarios import (
    catalog_names,
    load,
    load_gauge_grid,
    load_metric_grid,
    load_scenario_file,
    verify_scenario,
)
from carrollgeo.suites import run_all


def test_catalog_names():
    assert set(catalog_names()) == {
        "flat", "lightcone", "moebius", "schwarzschild", "sphere_pullback", "thakurta",
    }


@pytest.mark.parametrize("name", catalog_names())
def test_catalog_loads_clean(name):
    scenario = load(name)
    assert scenario.warnings == []


def test_unknown_scenario_raises():
    with pytest.raises(ContractViolation, match="unknown scenario"):
        load("noxistent")


def test_schwarzschild_parameters():
    s = load("schwarzschild", GM=0.5, verify=False)
    p = s.point([math.pi / 2, 0.0], 1.0)
    gm = s.metric.block(p)
    assert gm[1, 1] == pytest.approx(1.0)  # (2 GM)^2 sin^2 at the equator
    assert euler_weight(s.metric, p).factor == pytest.approx(0.0, abs=1e-10)


def test_lightcone_declares_weight_two():
    s = load("lightcone", verify=False)
    p = s.point([1.0, 0.2], 2.0)
    assert s.metric.block(p)[0, 0] == pytest.approx(4.0)
    assert euler_weight(s.metric, p).factor == pytest.approx(2.0, abs=1e-9)


def test_thakurta_conformal_profile():
    s = load("thakurta", GM=0.5, U="t^2", verify=False)
    # factor is -t * Udot = -2 t^2
    p = s.point([1.1, 0.4], 1.3)
    report = euler_weight(s.metric, p)
    assert report.proportional
    assert report.factor == pytest.approx(-2.0 * 1.3**2, rel=1e-6)


def test_moebius_full_suite(rng):
    s = load("moebius")
    results = run_all(s, rng)
    failed = [r.name for r in results if not r.passed]
    assert failed == []


@pytest.mark.parametrize("name", ["schwarzschild", "sphere_pullback", "lightcone"])
def test_sphere_chart_overlap_consistency(name, rng):
    s = load(name, verify=False)
    from carrollgeo.suites import overlap_metric_suite

    for result in overlap_metric_suite(s, rng):
        assert result.passed, result


def test_sample_points_respect_chart(rng):
    s = load("schwarzschild", verify=False)
    pts = s.sample_points(rng, 8, chart="stereo_n")
    assert all(p.chart == "stereo_n" for p in pts)
    assert all(abs(p.x[0]) <= 1.5 for p in pts)


def test_negative_fiber_sampling(rng):
    s = load("flat", verify=False)
    pts = s.sample_points(rng, 40, include_negative_t=True)
    assert any(p.t < 0 for p in pts) and any(p.t > 0 for p in pts)


# -- scenario files ---------------------------------------------------------------

GOOD_FILE = """
[meta]
name = demo
dim = 2

[charts]
main = box(-1, 1; -1, 1)

[metric]
time_dependent = false
main = matrix(1 + x1^2, 0; 0, 1)

[gauge]
main = vector(0, 0)

[expects]
euler_killing = true
"""

DEFECT_FILE = """
[meta]
name = broken
dim = 2

[charts]
main = box(-1, 1; -1, 1)

[metric]
main = matrix(1, x1; 0, 1)
"""


def test_scenario_file_round_trip(tmp_path, rng):
    path = tmp_path / "demo.ini"
    path.write_text(GOOD_FILE)
    s = load(str(path), rng=rng)
    assert s.name == "demo"
    assert s.warnings == []
    p = s.point([0.5, 0.0], 1.0)
    assert s.metric.block(p)[0, 0] == pytest.approx(1.25)
    assert s.gauge.is_zero


def test_defect_file_is_flagged(tmp_path, rng):
    path = tmp_path / "broken.ini"
    path.write_text(DEFECT_FILE)
    s = load(str(path), rng=rng)
    assert any("asymmetry" in w for w in s.warnings)
    results = run_all(s, rng)
    assert not all(r.passed for r in results)


def test_verify_reports_wrong_declaration(tmp_path, rng):
    text = GOOD_FILE.replace("1 + x1^2", "t * (1 + x1^2)")
    path = tmp_path / "wrong.ini"
    path.write_text(text)
    scenario = load_scenario_file(path)
    scenario.metric.time_dependent = True
    warnings = verify_scenario(scenario, rng)
    assert warnings  # declared Killing but the block depends on the fiber


# -- grid-sampled fields ------------------------------------------------------------

def _write_metric_grid(path, fn, axes):
    rows = ["x1, x2, g11, g12, g21, g22"]
    for a in axes[0]:
        for b in axes[1]:
            g = fn(np.array([a, b]))
            rows.append(
                ", ".join(repr(float(v)) for v in (a, b, g[0, 0], g[0, 1], g[1, 0], g[1, 1]))
            )
    path.write_text("\n".join(rows) + "\n")


def test_metric_grid_interpolation(tmp_path):
    # a metric affine in the coordinates is reproduced exactly by
    # multilinear interpolation
    fn = lambda x: np.array([[1.0 + 0.5 * x[0], 0.1 * x[1]], [0.1 * x[1], 2.0]])
    path = tmp_path / "grid.csv"
    axes = (np.linspace(-1, 1, 9), np.linspace(-1, 1, 9))
    _write_metric_grid(path, fn, axes)
    gm = load_metric_grid(path, dim=2, time_dependent=False)
    for x in ([0.33, -0.41], [0.0, 0.9]):
        assert np.allclose(gm(np.array(x), 1.0), fn(np.array(x)), atol=1e-12)


def test_gauge_grid_interpolation(tmp_path):
    rows = ["x1, x2, a1, a2"]
    axes = np.linspace(-1, 1, 5)
    for a in axes:
        for b in axes:
            rows.append(", ".join(repr(float(v)) for v in (a, b, 2.0 * a, -b)))
    path = tmp_path / "gauge.csv"
    path.write_text("\n".join(rows) + "\n")
    a_fn = load_gauge_grid(path, dim=2)
    assert np.allclose(a_fn(np.array([0.25, -0.5])), [0.5, 0.5], atol=1e-12)


def test_grid_scenario_file(tmp_path, rng):
    fn = lambda x: np.array([[1.0 + 0.25 * x[0], 0.0], [0.0, 1.0]])
    grid_path = tmp_path / "block.csv"
    _write_metric_grid(grid_path, fn, (np.linspace(-1, 1, 7), np.linspace(-1, 1, 7)))
    text = GOOD_FILE.replace("matrix(1 + x1^2, 0; 0, 1)", "grid(block.csv)")
    path = tmp_path / "griddemo.ini"
    path.write_text(text)
    s = load(str(path), rng=rng)
    assert s.warnings == []
    p = s.point([0.4, 0.1], 1.0)
    assert s.metric.block(p)[0, 0] == pytest.approx(1.1, abs=1e-12)
