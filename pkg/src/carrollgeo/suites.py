"""Invariant check suites driven by the CLI `check` command and the tests.

Each suite returns a list of CheckResult records; a scenario passes when
every record does. The suites re-derive everything from the scenario data,
never from its declared expectations (those are verified, not trusted).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .connection import (
    ConnectionOneForm,
    orthogonality_check,
    overlap_gauge_residual,
    projector_idempotence_check,
)
from .errors import CarrollError
from .geometry import TangentVector, euler, euler_weight, metric_eval
from .kaluza import christoffel_closed, christoffel_numeric
from .scenarios import Scenario


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def as_dict(self) -> dict:
        value = float(self.value)
        if not math.isfinite(value):
            value = 1e308  # keep the report strict JSON
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": value,
            "tol": float(self.tol),
            "detail": self.detail,
        }


def _result(name: str, value: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(value <= tol), value=float(value), tol=tol, detail=detail)


def kernel_suite(scenario: Scenario, rng: np.random.Generator, samples: int = 10) -> list[CheckResult]:
    """Block structure: the Euler direction is annihilated exactly and the
    full degenerate form has zero determinant; the base block is symmetric
    and invertible."""
    results = []
    worst_kernel = 0.0
    worst_det = 0.0
    worst_asym = 0.0
    min_abs_det = float("inf")
    worst_cond = 0.0
    for chart in scenario.atlas.chart_names():
        for p in scenario.sample_points(rng, samples, chart=chart):
            v = TangentVector(rng.standard_normal(p.dim), float(rng.standard_normal()), p)
            worst_kernel = max(worst_kernel, abs(metric_eval(scenario.metric, p, euler(p), v)))
            worst_det = max(worst_det, abs(float(np.linalg.det(scenario.metric.full(p)))))
            gm = scenario.metric.block(p)
            worst_asym = max(worst_asym, float(np.max(np.abs(gm - gm.T), initial=0.0)))
            min_abs_det = min(min_abs_det, abs(float(np.linalg.det(gm))))
            worst_cond = max(worst_cond, float(np.linalg.cond(gm)))
    results.append(_result("kernel_annihilation", worst_kernel, 0.0))
    results.append(_result("degenerate_determinant", worst_det, 0.0))
    results.append(_result("base_block_symmetry", worst_asym, 1e-12))
    results.append(
        CheckResult(
            name="base_block_invertible",
            passed=min_abs_det > 1e-12,
            value=min_abs_det,
            tol=1e-12,
            detail=f"min |det g_M|; condition number up to {worst_cond:.3e}",
        )
    )
    return results


def killing_suite(scenario: Scenario, rng: np.random.Generator, samples: int = 8) -> list[CheckResult]:
    """Euler homogeneity against the declared expectations."""
    results = []
    points = scenario.sample_points(rng, samples)
    reports = [euler_weight(scenario.metric, p) for p in points]
    worst_prop = max(r.residual for r in reports)
    results.append(_result("euler_proportionality", worst_prop, 1e-6))
    expects = scenario.expects
    if expects.get("euler_killing"):
        worst = max(abs(r.factor) for r in reports)
        results.append(_result("euler_killing", worst, 1e-8))
    elif "weight" in expects and expects["weight"] is not None:
        target = float(expects["weight"])
        worst = max(abs(r.factor - target) for r in reports)
        results.append(_result(f"homogeneity_weight_{target:g}", worst, 1e-6))
    elif expects.get("conformal"):
        factors = [r.factor for r in reports]
        spread = max(factors) - min(factors)
        results.append(
            CheckResult(
                name="conformal_not_killing",
                passed=worst_prop <= 1e-6 and spread > 1e-8,
                value=spread,
                tol=1e-8,
                detail="proportional with a non-constant factor",
            )
        )
    return results


def connection_suite(scenario: Scenario, rng: np.random.Generator, samples: int = 6) -> list[CheckResult]:
    results = []
    omega = scenario.connection()
    points = []
    for chart in scenario.atlas.chart_names():
        points.extend(scenario.sample_points(rng, samples, chart=chart))
    worst_euler = max(abs(omega.euler_value(p) - 1.0) for p in points)
    results.append(_result("connection_dual_to_euler", worst_euler, 0.0))
    results.append(
        _result("projector_idempotence", projector_idempotence_check(omega, points, rng), 1e-14)
    )
    results.append(
        _result("horizontal_vertical_orthogonality", orthogonality_check(scenario.metric, omega, points, rng), 0.0)
    )
    if scenario.atlas.transitions:
        results.append(
            _result("gauge_overlap_rule", overlap_gauge_residual(scenario.atlas, omega, rng), 1e-8)
        )
    return results


def determinant_suite(scenario: Scenario, rng: np.random.Generator, samples: int = 10) -> list[CheckResult]:
    """Determinant identity and Lorentzian signature of the assembled metrics."""
    results = []
    worst_det = 0.0
    signature_ok = True
    for sign in (+1, -1):
        kk = scenario.kk(sign)
        for p in scenario.sample_points(rng, samples):
            worst_det = max(worst_det, kk.det_identity_residual(p))
            if sign == -1:
                pos, neg = kk.signature(p)
                signature_ok = signature_ok and (pos, neg) == (scenario.dim, 1)
    results.append(_result("kk_determinant_identity", worst_det, 1e-8))
    results.append(
        CheckResult(
            name="lorentzian_signature",
            passed=signature_ok,
            value=0.0 if signature_ok else 1.0,
            tol=0.0,
            detail=f"eigenvalue signs ({scenario.dim}, 1) for sign -1",
        )
    )
    return results


def christoffel_suite(scenario: Scenario, rng: np.random.Generator, samples: int = 20) -> list[CheckResult]:
    """Closed-form vs finite-difference symbols on the default chart."""
    results = []
    worst = 0.0
    for sign in (+1, -1):
        kk = scenario.kk(sign)
        if not kk.gauge.is_zero:
            continue
        for p in scenario.sample_points(rng, samples):
            delta = christoffel_closed(kk, p) - christoffel_numeric(kk, p)
            worst = max(worst, float(np.max(np.abs(delta))))
    results.append(_result("christoffel_oracle_agreement", worst, 1e-6))
    return results


def overlap_metric_suite(scenario: Scenario, rng: np.random.Generator, samples: int = 8) -> list[CheckResult]:
    """Metric consistency across chart transitions: the scalar g(v, v) must
    agree when the same geometric data is expressed in either chart."""
    if not scenario.atlas.transitions:
        return []
    worst = 0.0
    for tr in scenario.atlas.transitions:
        for x in tr.sample(rng, samples):
            p = scenario.point(x, float(rng.uniform(0.5, 2.0)), tr.src)
            v = TangentVector(rng.standard_normal(p.dim), float(rng.standard_normal()), p)
            v2 = tr.map_tangent(v)
            s1 = metric_eval(scenario.metric, p, v, v)
            s2 = metric_eval(scenario.metric, v2.base, v2, v2)
            worst = max(worst, abs(s1 - s2) / max(1.0, abs(s1)))
    return [_result("metric_overlap_consistency", worst, 1e-8)]


def run_all(scenario: Scenario, rng: np.random.Generator) -> list[CheckResult]:
    results: list[CheckResult] = []
    for name in ("load_warnings",):
        results.append(
            CheckResult(
                name=name,
                passed=not scenario.warnings,
                value=float(len(scenario.warnings)),
                tol=0.0,
                detail="; ".join(scenario.warnings),
            )
        )
    for suite in (
        kernel_suite,
        killing_suite,
        connection_suite,
        determinant_suite,
        christoffel_suite,
        overlap_metric_suite,
    ):
        try:
            results.extend(suite(scenario, rng))
        except CarrollError as exc:
            results.append(
                CheckResult(name=suite.__name__, passed=False, value=math.inf, tol=0.0, detail=str(exc))
            )
    return results
