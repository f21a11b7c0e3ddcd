"""Principal connections on scaling bundles.

The structure group is one-dimensional, so a connection is just a one-form
``omega`` with ``omega(Euler) = 1``: in the adapted frame
``omega(v) = vtb + vx . A(x)`` for a per-chart gauge field ``A``. The
associated projector ``Phi(X) = omega(X) * Euler`` splits every tangent
vector into horizontal and vertical parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _fd
from .errors import ConstructionError, ContractViolation
from .geometry import (
    Atlas,
    DegenerateMetric,
    Point,
    TangentVector,
    euler,
    metric_eval,
)


@dataclass
class GaugeField:
    """Per-chart gauge field x -> A(x), with optional registered curvature forms.

    ``is_zero`` marks a field known to vanish identically; several closed-form
    shortcuts are only valid in that case.
    """

    components: Mapping[str, Callable[[np.ndarray], np.ndarray]]
    curvature_forms: Mapping[str, Callable[[np.ndarray], np.ndarray]] = field(default_factory=dict)
    is_zero: bool = False

    @classmethod
    def trivial(cls, dim: int, charts: Sequence[str]) -> "GaugeField":
        zero = lambda x: np.zeros(dim)
        flat = lambda x: np.zeros((dim, dim))
        return cls(
            components={name: zero for name in charts},
            curvature_forms={name: flat for name in charts},
            is_zero=True,
        )

    def at(self, x: np.ndarray, chart: str) -> np.ndarray:
        try:
            fn = self.components[chart]
        except KeyError:
            raise ContractViolation(f"gauge field has no components for chart {chart!r}") from None
        return np.atleast_1d(np.asarray(fn(np.asarray(x, dtype=float)), dtype=float))

    def is_trivial(self, points: Sequence[Point], tol: float = 0.0) -> bool:
        return all(float(np.max(np.abs(self.at(p.x, p.chart)), initial=0.0)) <= tol for p in points)


@dataclass(frozen=True)
class ConnectionOneForm:
    """omega(v) = vtb + vx . A(x); dual to the Euler field by construction."""

    gauge: GaugeField

    def __call__(self, v: TangentVector) -> float:
        a = self.gauge.at(v.base.x, v.base.chart)
        return float(v.vtb + v.vx @ a)

    def euler_value(self, p: Point) -> float:
        return self(euler(p))


def trivial_connection(dim: int, charts: Sequence[str]) -> ConnectionOneForm:
    return ConnectionOneForm(GaugeField.trivial(dim, charts))


def projector(omega: ConnectionOneForm, X: TangentVector) -> TangentVector:
    """Phi(X): the vertical part omega(X) * Euler."""
    return omega(X) * euler(X.base)


def split(omega: ConnectionOneForm, X: TangentVector) -> tuple[TangentVector, TangentVector]:
    """Horizontal/vertical decomposition; horizontal + vertical == X exactly."""
    vertical = projector(omega, X)
    horizontal = X - vertical
    return horizontal, vertical


def projector_idempotence_check(
    omega: ConnectionOneForm,
    points: Sequence[Point],
    rng: np.random.Generator,
    vectors_per_point: int = 4,
) -> float:
    """Max over random tangent vectors of the idempotence and splitting defects.

    Checks Phi(Phi(X)) = Phi(X), that the image is vertical, and that the
    horizontal part lies in ker(omega).
    """
    worst = 0.0
    for p in points:
        for _ in range(vectors_per_point):
            X = TangentVector(rng.standard_normal(p.dim), float(rng.standard_normal()), p)
            phi_x = projector(omega, X)
            phi_phi_x = projector(omega, phi_x)
            worst = max(worst, float(np.max(np.abs((phi_phi_x - phi_x).raw()), initial=0.0)))
            worst = max(worst, float(np.max(np.abs(phi_x.vx), initial=0.0)))  # image is vertical
            horizontal, _ = split(omega, X)
            worst = max(worst, abs(omega(horizontal)))
    return worst


def orthogonality_check(
    g: DegenerateMetric,
    omega: ConnectionOneForm,
    points: Sequence[Point],
    rng: np.random.Generator,
    vectors_per_point: int = 4,
) -> float:
    """Max |g(horizontal, vertical)| over random pairs; zero by the kernel structure."""
    worst = 0.0
    for p in points:
        for _ in range(vectors_per_point):
            X = TangentVector(rng.standard_normal(p.dim), float(rng.standard_normal()), p)
            Y = TangentVector(rng.standard_normal(p.dim), float(rng.standard_normal()), p)
            xh, _ = split(omega, X)
            _, yv = split(omega, Y)
            worst = max(worst, abs(metric_eval(g, p, xh, yv)))
    return worst


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def curvature_numeric(gauge: GaugeField, x: np.ndarray, chart: str, fd_rel: float = _fd.DEFAULT_REL_STEP) -> np.ndarray:
    """F_ab = d_a A_b - d_b A_a by central differences; antisymmetric exactly."""
    x = np.asarray(x, dtype=float)
    jac = _fd.jacobian(lambda y: gauge.at(y, chart), x, rel=fd_rel)  # jac[b, a] = d_a A_b
    return jac.T - jac


def curvature(gauge: GaugeField, x: np.ndarray, chart: str, fd_rel: float = _fd.DEFAULT_REL_STEP) -> np.ndarray:
    """Curvature of the gauge field, preferring a registered closed form."""
    form = gauge.curvature_forms.get(chart)
    if form is not None:
        f = np.asarray(form(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (f - f.T)
    return curvature_numeric(gauge, x, chart, fd_rel=fd_rel)


# ---------------------------------------------------------------------------
# partitions of unity and the glued connection
# ---------------------------------------------------------------------------

@dataclass
class PartitionOfUnity:
    """Smooth bumps subordinate to an atlas, one per chart, in chart coordinates."""

    bumps: Mapping[str, Callable[[np.ndarray], float]]

    def value(self, chart: str, x: np.ndarray) -> float:
        return float(self.bumps[chart](np.asarray(x, dtype=float)))

    def check_sum(self, atlas: Atlas, rng: np.random.Generator, samples_per_chart: int = 16, tol: float = 1e-12) -> float:
        """Max |sum_i rho_i - 1| over sampled points, evaluating foreign bumps
        through the atlas transitions."""
        worst = 0.0
        for name, chart in atlas.charts.items():
            for x in chart.sample(rng, samples_per_chart):
                total = self.value(name, x)
                if total < -tol:
                    raise ConstructionError("partition bump is negative")
                for tr in atlas.transitions_from(name):
                    if tr.contains(x):
                        total += self.value(tr.dst, np.asarray(tr.base_map(x), dtype=float))
                worst = max(worst, abs(total - 1.0))
        if worst > tol:
            raise ConstructionError(f"partition of unity sums to 1 +/- {worst:.3e} (tol {tol:.0e})")
        return worst


def connection_from_partition(
    atlas: Atlas,
    partition: PartitionOfUnity,
    rng: np.random.Generator | None = None,
    fd_rel: float = 1e-6,
) -> ConnectionOneForm:
    """Glue the per-chart trivial forms with a partition of unity.

    On chart j the result evaluates as vtb + vx . A_j with
    A_j(x) = sum_{i != j} rho_i(x) * grad(log|phi_ij|)(x), the sum running
    over overlapping charts (phi_ij is the fiber factor of the j -> i
    transition). Locally constant factors, like a pure sign flip, contribute
    nothing.
    """
    if rng is not None:
        partition.check_sum(atlas, rng)

    def make_component(chart_j: str):
        transitions = atlas.transitions_from(chart_j)

        def a_of(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            total = np.zeros(x.size)
            for tr in transitions:
                if not tr.contains(x):
                    continue
                rho = partition.value(tr.dst, np.asarray(tr.base_map(x), dtype=float))
                if abs(rho) < 1e-14:
                    continue
                grad_log = _fd.gradient(
                    lambda y: float(np.log(abs(tr.fiber_factor(y)))), x, rel=fd_rel
                )
                total += rho * grad_log
            return total

        return a_of

    comps = {name: make_component(name) for name in atlas.chart_names()}
    return ConnectionOneForm(GaugeField(components=comps))


def overlap_gauge_residual(
    atlas: Atlas,
    omega: ConnectionOneForm,
    rng: np.random.Generator,
    samples_per_overlap: int = 8,
    vectors_per_point: int = 3,
) -> float:
    """Max |omega_i(v_i) - omega_j(v_j)| over overlap samples.

    Evaluates the connection on the same geometric tangent vector expressed
    in both charts of every transition; agreement is the coordinate-free
    statement of the inhomogeneous gauge transformation rule.
    """
    worst = 0.0
    for tr in atlas.transitions:
        for x in tr.sample(rng, samples_per_overlap):
            p = Point(x, float(rng.uniform(0.5, 2.0)), tr.src)
            for _ in range(vectors_per_point):
                v = TangentVector(rng.standard_normal(p.dim), float(rng.standard_normal()), p)
                v_other = tr.map_tangent(v)
                worst = max(worst, abs(omega(v) - omega(v_other)))
    return worst
