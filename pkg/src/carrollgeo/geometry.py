"""Adapted-frame calculus on scaling bundles with a degenerate metric.

A point carries base coordinates ``x``, a nonzero fiber coordinate ``t`` and
a chart label. Tangent vectors are stored in the adapted frame: ``vx`` on the
base directions and ``vtb`` on the Euler field (the generator of fiber
rescaling, locally ``t * d/dt``), so ``vtb`` is the raw fiber velocity
divided by ``t``. This keeps the degenerate block structure of the metric
exact: the full velocity-quadratic form is ``[[g_M, 0], [0, 0]]`` and the
Euler direction spans its kernel by construction.

Raw ``(x, t)`` components, needed by every finite-difference routine, are
obtained from the adapted ones through the diagonal frame factor
``diag(1, ..., 1, t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _fd
from .errors import ConstructionError, ContractViolation, DomainError

FIBER_CUTOFF = 1e-9


# ---------------------------------------------------------------------------
# points and tangent vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    """Bundle point: base coordinates, nonzero fiber coordinate, chart label."""

    x: np.ndarray
    t: float
    chart: str = "main"

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))
        if x.ndim != 1 or x.size < 1:
            raise ContractViolation("base coordinates must be a 1d array with n >= 1")
        if not np.all(np.isfinite(x)) or not np.isfinite(self.t):
            raise DomainError("non-finite coordinates")
        if abs(self.t) < FIBER_CUTOFF:
            raise DomainError(f"fiber coordinate too close to zero: t = {self.t:.3e}")

    @property
    def dim(self) -> int:
        return self.x.size

    def raw(self) -> np.ndarray:
        return np.append(self.x, self.t)

    def same_place(self, other: "Point") -> bool:
        return (
            self.chart == other.chart
            and self.t == other.t
            and self.x.shape == other.x.shape
            and bool(np.all(self.x == other.x))
        )


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector in the adapted frame: ``vx`` on d/dx, ``vtb`` on the Euler field."""

    vx: np.ndarray
    vtb: float
    base: Point

    def __post_init__(self):
        vx = np.atleast_1d(np.asarray(self.vx, dtype=float))
        object.__setattr__(self, "vx", vx)
        object.__setattr__(self, "vtb", float(self.vtb))
        if vx.size != self.base.dim:
            raise ContractViolation(
                f"vector has {vx.size} base components, point has dimension {self.base.dim}"
            )

    @classmethod
    def from_raw(cls, vx: np.ndarray, vt: float, base: Point) -> "TangentVector":
        return cls(np.asarray(vx, dtype=float), float(vt) / base.t, base)

    @property
    def vt(self) -> float:
        """Raw fiber velocity dt/dlambda."""
        return self.vtb * self.base.t

    def raw(self) -> np.ndarray:
        return np.append(self.vx, self.vt)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        if not self.base.same_place(other.base):
            raise ContractViolation("cannot add vectors at different points")
        return TangentVector(self.vx + other.vx, self.vtb + other.vtb, self.base)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        if not self.base.same_place(other.base):
            raise ContractViolation("cannot subtract vectors at different points")
        return TangentVector(self.vx - other.vx, self.vtb - other.vtb, self.base)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(self.vx * c, self.vtb * c, self.base)

    __rmul__ = __mul__


def euler(base: Point) -> TangentVector:
    """The Euler field at ``base``: components (0, ..., 0, 1) in the adapted frame."""
    return TangentVector(np.zeros(base.dim), 1.0, base)


def basis_vector(base: Point, axis: int) -> TangentVector:
    vx = np.zeros(base.dim)
    vx[axis] = 1.0
    return TangentVector(vx, 0.0, base)


@dataclass(frozen=True)
class VectorField:
    """Vector field given by its adapted components at every point."""

    components: Callable[[Point], TangentVector]
    weight: float | None = None

    def at(self, p: Point) -> TangentVector:
        v = self.components(p)
        if not v.base.same_place(p):
            raise ContractViolation("vector field returned a vector at the wrong base point")
        return v

    def raw_at(self, p: Point) -> np.ndarray:
        return self.at(p).raw()

    def is_vertical(self, points: Sequence[Point], tol: float = 0.0) -> bool:
        return all(float(np.max(np.abs(self.at(p).vx), initial=0.0)) <= tol for p in points)


def euler_field() -> VectorField:
    return VectorField(lambda p: euler(p), weight=0.0)


# ---------------------------------------------------------------------------
# charts and atlases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """Sampling box plus an optional hard domain predicate."""

    name: str
    coords: tuple[str, ...]
    box: tuple[tuple[float, float], ...]
    domain: Callable[[np.ndarray], bool] | None = None

    @property
    def dim(self) -> int:
        return len(self.coords)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return rng.uniform(lo, hi, size=(count, self.dim))

    def inside(self, x: np.ndarray) -> bool:
        if self.domain is None:
            return True
        return bool(self.domain(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class ChartTransition:
    """One overlap component: base map, fiber factor ``t_dst = phi(x_src) * t_src``."""

    src: str
    dst: str
    base_map: Callable[[np.ndarray], np.ndarray]
    fiber_factor: Callable[[np.ndarray], float]
    overlap_box: tuple[tuple[float, float], ...]
    label: str = ""

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo = np.array([b[0] for b in self.overlap_box])
        hi = np.array([b[1] for b in self.overlap_box])
        return rng.uniform(lo, hi, size=(count, lo.size))

    def contains(self, x: np.ndarray) -> bool:
        return all(lo <= xi <= hi for xi, (lo, hi) in zip(np.atleast_1d(x), self.overlap_box))

    def map_point(self, p: Point) -> Point:
        if p.chart != self.src:
            raise ContractViolation(f"point is in chart {p.chart!r}, transition expects {self.src!r}")
        phi = float(self.fiber_factor(p.x))
        if abs(phi) < FIBER_CUTOFF:
            raise ConstructionError("fiber transition factor vanishes")
        return Point(np.asarray(self.base_map(p.x), dtype=float), phi * p.t, self.dst)

    def map_tangent(self, v: TangentVector, fd_rel: float = 1e-6) -> TangentVector:
        """Push a tangent vector through the transition.

        The adapted fiber velocity shifts by the logarithmic derivative of the
        fiber factor: vtb' = vtb + vx . grad(log|phi|).
        """
        p = v.base
        jac = _fd.jacobian(lambda x: np.asarray(self.base_map(x), dtype=float), p.x, rel=fd_rel)
        grad_log_phi = _fd.gradient(lambda x: float(np.log(abs(self.fiber_factor(x)))), p.x, rel=fd_rel)
        new_vx = jac @ v.vx
        new_vtb = v.vtb + float(v.vx @ grad_log_phi)
        return TangentVector(new_vx, new_vtb, self.map_point(p))


class Atlas:
    """Chart collection with explicit overlap transitions."""

    def __init__(self, charts: Sequence[Chart], transitions: Sequence[ChartTransition] = ()):
        self.charts: dict[str, Chart] = {c.name: c for c in charts}
        if len(self.charts) != len(charts):
            raise ConstructionError("duplicate chart names")
        self.transitions: list[ChartTransition] = list(transitions)
        for tr in self.transitions:
            if tr.src not in self.charts or tr.dst not in self.charts:
                raise ConstructionError(f"transition {tr.src}->{tr.dst} references unknown chart")

    def chart(self, name: str) -> Chart:
        try:
            return self.charts[name]
        except KeyError:
            raise ContractViolation(f"unknown chart {name!r}") from None

    def chart_names(self) -> list[str]:
        return list(self.charts)

    def transitions_from(self, src: str) -> list[ChartTransition]:
        return [tr for tr in self.transitions if tr.src == src]


# ---------------------------------------------------------------------------
# degenerate metric
# ---------------------------------------------------------------------------

@dataclass
class DegenerateMetric:
    """Velocity-quadratic form with block structure [[g_M(x, t), 0], [0, 0]].

    ``blocks`` maps a chart name to the base block g_M as a function of
    (x, t). The kernel direction (the Euler field) is built into the block
    structure and never sampled.
    """

    blocks: Mapping[str, Callable[[np.ndarray, float], np.ndarray]]
    time_dependent: bool = False
    weight_hint: float | None = None

    def block(self, p: Point) -> np.ndarray:
        try:
            fn = self.blocks[p.chart]
        except KeyError:
            raise ContractViolation(f"metric has no block for chart {p.chart!r}") from None
        g = np.asarray(fn(p.x, p.t), dtype=float)
        if g.shape != (p.dim, p.dim):
            raise ContractViolation(f"metric block has shape {g.shape}, expected {(p.dim, p.dim)}")
        return g

    def full(self, p: Point) -> np.ndarray:
        """Full (n+1) x (n+1) adapted-frame matrix (identical in raw coordinates)."""
        g = self.block(p)
        n = p.dim
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = g
        return out

    def raw_field(self, chart: str) -> Callable[[np.ndarray], np.ndarray]:
        """The padded metric as a function of raw (x..., t) coordinates."""
        fn = self.blocks[chart]

        def field_fn(raw: np.ndarray) -> np.ndarray:
            raw = np.asarray(raw, dtype=float)
            x, t = raw[:-1], float(raw[-1])
            g = np.asarray(fn(x, t), dtype=float)
            n = x.size
            out = np.zeros((n + 1, n + 1))
            out[:n, :n] = g
            return out

        return field_fn


def metric_eval(g: DegenerateMetric, p: Point, v: TangentVector, w: TangentVector) -> float:
    """Evaluate the degenerate form on two vectors at ``p``.

    Only the base block enters, so any vector proportional to the Euler field
    is annihilated exactly.
    """
    if not (v.base.same_place(p) and w.base.same_place(p)):
        raise ContractViolation("vectors must be based at the evaluation point")
    return float(v.vx @ g.block(p) @ w.vx)


# ---------------------------------------------------------------------------
# lifts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerticalLift:
    """Interior product with a vector field, acting on velocity-quadratic forms.

    Contracting once gives a one-form; contracting that with a second vector
    recovers the metric pairing.
    """

    source: VectorField

    def contract(self, g: DegenerateMetric, p: Point) -> Callable[[TangentVector], float]:
        v = self.source.at(p)

        def one_form(w: TangentVector) -> float:
            return metric_eval(g, p, v, w)

        return one_form


def vertical_lift(X: VectorField) -> VerticalLift:
    return VerticalLift(X)


def lie_derivative_metric(
    X: VectorField,
    metric,
    p: Point,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> np.ndarray:
    """(L_X G)_AB in raw (x, t) coordinates by central differences.

    ``metric`` is either a :class:`DegenerateMetric` (zero-padded) or any
    object exposing ``raw_field(chart)`` returning raw components as a
    function of the raw coordinate vector.
    """
    field_fn = metric.raw_field(p.chart)
    raw_p = p.raw()
    n1 = raw_p.size
    t_axis = n1 - 1

    def x_raw(raw: np.ndarray) -> np.ndarray:
        q = Point(raw[:-1], raw[-1], p.chart)
        return X.raw_at(q)

    g = field_fn(raw_p)
    dg = _fd.partials(field_fn, raw_p, rel=fd_rel, keep_sign=(t_axis,))  # dg[C, A, B] = d_C G_AB
    dx = _fd.partials(x_raw, raw_p, rel=fd_rel, keep_sign=(t_axis,))  # dx[C, A] = d_C X^A
    xc = x_raw(raw_p)
    transport = np.einsum("c,cab->ab", xc, dg)
    frame = np.einsum("ac,cb->ab", dx, g) + np.einsum("bc,ac->ab", dx, g)
    return transport + frame


@dataclass(frozen=True)
class TangentLift:
    """First-order operator implementing the Lie derivative on metric functions."""

    source: VectorField

    def derive_metric(self, metric, p: Point, fd_rel: float = _fd.DEFAULT_REL_STEP) -> np.ndarray:
        return lie_derivative_metric(self.source, metric, p, fd_rel=fd_rel)


def tangent_lift(X: VectorField) -> TangentLift:
    return TangentLift(X)


# ---------------------------------------------------------------------------
# homogeneity and Killing diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EulerWeight:
    """Pointwise homogeneity report for the degenerate metric."""

    proportional: bool
    factor: float
    residual: float
    lie_block: np.ndarray

    @property
    def weight(self) -> float | None:
        return self.factor if self.proportional else None


def euler_weight(
    g: DegenerateMetric,
    p: Point,
    rel_tol: float = 1e-6,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> EulerWeight:
    """Evaluate (L_Euler g)(p) = t dg_M/dt and test proportionality to g(p)."""
    fn = g.blocks[p.chart]

    def block_of_t(arr: np.ndarray) -> np.ndarray:
        return np.asarray(fn(p.x, float(arr[0])), dtype=float)

    dgdt = _fd.partial(block_of_t, np.array([p.t]), 0, rel=fd_rel, keep_sign=(0,))
    lie = p.t * dgdt
    gm = g.block(p)
    denom = float(np.sum(gm * gm))
    if denom == 0.0:
        raise ContractViolation("degenerate base block: cannot test homogeneity")
    k = float(np.sum(lie * gm)) / denom
    residual = float(np.linalg.norm(lie - k * gm)) / max(float(np.linalg.norm(gm)), 1e-300)
    return EulerWeight(proportional=residual <= rel_tol, factor=k, residual=residual, lie_block=lie)


@dataclass(frozen=True)
class KillingReport:
    residual: float
    projectable: bool
    bracket_residual: float


def euler_bracket(X: VectorField, p: Point, fd_rel: float = _fd.DEFAULT_REL_STEP) -> np.ndarray:
    """Raw components of [Euler, X] at p, by finite differences.

    With Euler = (0, ..., 0, t) in raw coordinates this is
    t * d_t X^A - delta^A_t X^t.
    """
    raw_p = p.raw()
    t_axis = raw_p.size - 1

    def x_raw(raw: np.ndarray) -> np.ndarray:
        return X.raw_at(Point(raw[:-1], raw[-1], p.chart))

    dt_x = _fd.partial(x_raw, raw_p, t_axis, rel=fd_rel, keep_sign=(t_axis,))
    bracket = p.t * dt_x
    bracket[t_axis] -= x_raw(raw_p)[t_axis]
    return bracket


def killing_residual(
    X: VectorField,
    metric,
    points: Sequence[Point],
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> KillingReport:
    """Max Frobenius norm of L_X metric over the samples, plus projectability.

    A field is projectable (weight zero) when its bracket with the Euler
    field vanishes; the bracket is evaluated by finite differences at the
    same samples.
    """
    if not points:
        raise ContractViolation("need at least one sample point")
    res = 0.0
    brk = 0.0
    for p in points:
        res = max(res, float(np.linalg.norm(lie_derivative_metric(X, metric, p, fd_rel=fd_rel))))
        brk = max(brk, float(np.linalg.norm(euler_bracket(X, p, fd_rel=fd_rel))))
    return KillingReport(residual=res, projectable=brk <= 1e-7, bracket_residual=brk)


# ---------------------------------------------------------------------------
# admissible fiber rescaling t' = phi(x) t
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiberRescaling:
    """Admissible coordinate change fixing the base: t' = phi(x) t.

    Adapted velocities shift by vtb' = vtb + vx . grad(log|phi|); the base
    block of the metric is re-expressed at the same geometric point and a
    gauge field picks up the inhomogeneous term -grad(phi)/phi.
    """

    phi: Callable[[np.ndarray], float]
    fd_rel: float = 1e-6

    def point(self, p: Point) -> Point:
        return Point(p.x, float(self.phi(p.x)) * p.t, p.chart)

    def tangent(self, v: TangentVector) -> TangentVector:
        grad_log = _fd.gradient(lambda x: float(np.log(abs(self.phi(x)))), v.base.x, rel=self.fd_rel)
        return TangentVector(v.vx.copy(), v.vtb + float(v.vx @ grad_log), self.point(v.base))

    def metric(self, g: DegenerateMetric) -> DegenerateMetric:
        phi = self.phi

        def transform(fn):
            return lambda x, t: fn(x, t / float(phi(x)))

        return DegenerateMetric(
            blocks={name: transform(fn) for name, fn in g.blocks.items()},
            time_dependent=g.time_dependent,
            weight_hint=g.weight_hint,
        )

    def gauge_shift(self, x: np.ndarray) -> np.ndarray:
        """The inhomogeneous term: grad(phi)/phi at x."""
        return _fd.gradient(lambda y: float(np.log(abs(self.phi(y)))), np.asarray(x, float), rel=self.fd_rel)
