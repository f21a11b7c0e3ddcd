from pathlib import Path

import numpy as np
import pytest

from carrollgeo.cli import main
from carrollgeo.connection import ConnectionOneForm, GaugeField, split
from carrollgeo.errors import DomainError
from carrollgeo.geodesics import GeodesicState, IntegratorConfig, integrate
from carrollgeo.geometry import TangentVector
from carrollgeo.kaluza import regularity_probe

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"


def test_split_spans_tangent_space(flat2, rng):
    # horizontal + vertical parts of a random frame span the full space
    omega = ConnectionOneForm(GaugeField(components={"cartesian": lambda x: np.array([x[1], 0.3])}))
    p = flat2.point([0.2, -0.1], 1.4)
    rows = []
    for _ in range(6):
        X = TangentVector(rng.standard_normal(2), float(rng.standard_normal()), p)
        h, v = split(omega, X)
        rows.extend([h.raw(), v.raw()])
    assert np.linalg.matrix_rank(np.array(rows), tol=1e-10) == 3


def test_trajectory_invariants(schwarzschild):
    state = GeodesicState([np.pi / 2, 0.0], 1.0, [0.0, 1.0], -1.0)
    traj = integrate(state, schwarzschild, IntegratorConfig(lambda_max=2.0, christoffel="closed"))
    assert np.all(np.diff(traj.lam) > 0.0)
    for channel in (traj.charge, traj.null_residual, traj.base_speed2):
        assert channel.size == len(traj)


def test_regularity_probe_rejects_zero_fiber(schwarzschild):
    kk = schwarzschild.kk(+1)
    fn = lambda x, t: np.array([0.0, 0.0, t])
    with pytest.raises(DomainError):
        regularity_probe(kk, fn, fn, [1.0, 0.5], "angular", t_values=[1e-10])


def test_cli_numeric_failure_exit_code(capsys):
    # the conditioning gate trips for a fiber coordinate this small
    assert main(["christoffel", "flat", "--at", "0, 0, 1e-7"]) == 3
    assert "numeric failure" in capsys.readouterr().err


def test_shipped_scenario_example(capsys):
    assert main(["check", str(EXAMPLES / "scenario_demo.ini"), "--seed", "2"]) == 0
    assert "OK: stretched-plane" in capsys.readouterr().out


def test_shipped_atlas_example(capsys):
    assert main(["linearize", str(EXAMPLES / "atlas_twochart.ini")]) == 0
    assert "OK" in capsys.readouterr().out
