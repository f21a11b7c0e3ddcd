"""Geodesic flow of the Lorentzian (sign -1) assembled metric.

State: raw coordinates (x, t) and raw velocities (dx/dl, dt/dl) along an
affine parameter. The second-order system x''^A + Gamma^A_BC x'^B x'^C = 0
is integrated with an embedded Fehlberg 4(5) pair (adaptive, the default)
or a fixed-step classical RK4 for convergence studies. The symbols come
from the finite-difference oracle by default; the closed-form variant is
selectable for scenarios with a vanishing gauge field.

Monitors recorded at every accepted step: the conserved fiber charge
q = -(vt/t + vx . A), the null residual <vx, vx>_gM - (vt/t + vx . A)^2,
and the squared base speed. Integration stops with an event record when the
fiber coordinate approaches zero (the bundle excludes t = 0), when the
state leaves a hard chart domain, or when a step underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _fd
from .connection import GaugeField, curvature
from .errors import ContractViolation, DomainError, NumericError
from .geometry import Point
from .kaluza import KKMetric, base_symbols_at, christoffel_closed, christoffel_numeric
from .scenarios import Scenario


# ---------------------------------------------------------------------------
# states, configuration, trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicState:
    x: np.ndarray
    t: float
    vx: np.ndarray
    vt: float
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "vx", np.atleast_1d(np.asarray(self.vx, dtype=float)))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "vt", float(self.vt))
        if self.x.size != self.vx.size:
            raise ContractViolation("position and velocity dimensions differ")
        if self.t == 0.0:
            raise DomainError("fiber coordinate must be nonzero")

    @property
    def dim(self) -> int:
        return self.x.size

    @property
    def vtb(self) -> float:
        return self.vt / self.t

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, [self.t], self.vx, [self.vt]])

    @classmethod
    def from_vector(cls, y: np.ndarray, lam: float) -> "GeodesicState":
        n = (y.size - 2) // 2
        return cls(y[:n], y[n], y[n + 1 : 2 * n + 1], y[2 * n + 1], lam)


@dataclass
class IntegratorConfig:
    method: str = "rk45"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    initial_step: float = 1e-3
    max_step: float = 0.1
    min_step: float = 1e-14
    lambda_max: float = 10.0
    t_guard_factor: float = 1e-6
    max_steps: int = 500_000
    christoffel: str = "numeric"  # or "closed"
    fd_rel: float = _fd.DEFAULT_REL_STEP
    rk4_step: float = 0.01


@dataclass
class Trajectory:
    lam: np.ndarray
    x: np.ndarray  # (m, n)
    t: np.ndarray
    vx: np.ndarray  # (m, n)
    vt: np.ndarray
    charge: np.ndarray
    null_residual: np.ndarray
    base_speed2: np.ndarray
    events: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.lam.size

    def state(self, i: int) -> GeodesicState:
        return GeodesicState(self.x[i], self.t[i], self.vx[i], self.vt[i], self.lam[i])

    @property
    def final(self) -> GeodesicState:
        return self.state(len(self) - 1)

    def max_charge_drift(self) -> float:
        q0 = self.charge[0]
        return float(np.max(np.abs(self.charge - q0))) / max(1.0, abs(q0))

    def max_null_drift(self) -> float:
        return float(np.max(np.abs(self.null_residual - self.null_residual[0])))


# ---------------------------------------------------------------------------
# monitors
# ---------------------------------------------------------------------------

def carroll_charge(state: GeodesicState, gauge: GaugeField, chart: str) -> float:
    """Conserved charge -(vt/t + vx . A(x)); minus the connection one-form on
    the velocity."""
    a = gauge.at(state.x, chart)
    return -(state.vt / state.t + float(state.vx @ a))


def null_residual(state: GeodesicState, scenario: Scenario, gauge: GaugeField | None = None,
                  chart: str | None = None) -> float:
    """<vx, vx>_gM - (vt/t + vx . A)^2; vanishes exactly on null states."""
    chart = chart or scenario.default_chart
    gauge = gauge if gauge is not None else scenario.gauge
    gm = np.asarray(scenario.metric.blocks[chart](state.x, state.t), dtype=float)
    a = gauge.at(state.x, chart)
    omega_v = state.vt / state.t + float(state.vx @ a)
    return float(state.vx @ gm @ state.vx) - omega_v**2


def base_speed2(state: GeodesicState, scenario: Scenario, chart: str) -> float:
    gm = np.asarray(scenario.metric.blocks[chart](state.x, state.t), dtype=float)
    return float(state.vx @ gm @ state.vx)


# ---------------------------------------------------------------------------
# null shooting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NullShootSpec:
    """Initial data for a null geodesic: base point, unit direction, charge.

    ``q`` is the signed conserved charge. ``eps`` flips the spatial
    direction; ``delta`` (the sign of the fiber exponent for a trivial
    connection) is determined by -sign(q) and may be passed only as a
    consistency check.
    """

    x0: np.ndarray
    u: np.ndarray
    q: float
    t0: float
    eps: int = +1
    delta: int | None = None
    chart: str | None = None


def unit_direction(scenario: Scenario, x: np.ndarray, u: np.ndarray, t: float,
                   chart: str | None = None) -> np.ndarray:
    """Normalize a base direction to unit length in g_M(x, t)."""
    chart = chart or scenario.default_chart
    gm = np.asarray(scenario.metric.blocks[chart](np.asarray(x, float), t), dtype=float)
    u = np.asarray(u, dtype=float)
    norm = math.sqrt(float(u @ gm @ u))
    if norm == 0.0:
        raise ContractViolation("cannot normalize a zero direction")
    return u / norm


def shoot_null(spec: NullShootSpec, scenario: Scenario, gauge: GaugeField | None = None) -> GeodesicState:
    """Build the null initial state: vx = eps |q| u, vt = -t0 (q + vx . A).

    The returned state satisfies the null condition and carries charge q by
    construction; q = 0 gives the frozen state.
    """
    chart = spec.chart or scenario.default_chart
    gauge = gauge if gauge is not None else scenario.gauge
    x0 = np.asarray(spec.x0, dtype=float)
    t0 = float(spec.t0)
    if t0 == 0.0:
        raise DomainError("t0 must be nonzero")
    if spec.eps not in (+1, -1):
        raise ContractViolation("eps must be +1 or -1")
    q = float(spec.q)
    if spec.delta is not None and q != 0.0 and spec.delta != -int(math.copysign(1.0, q)):
        raise ContractViolation("delta contradicts the sign of q (delta = -sign(q))")
    if q == 0.0:
        return GeodesicState(x0, t0, np.zeros(x0.size), 0.0)
    gm = np.asarray(scenario.metric.blocks[chart](x0, t0), dtype=float)
    u = np.asarray(spec.u, dtype=float)
    norm = math.sqrt(float(u @ gm @ u))
    if abs(norm - 1.0) > 1e-10:
        raise ContractViolation(f"direction is not unit in g_M (|u| = {norm:.12f})")
    vx = spec.eps * abs(q) * u
    a = gauge.at(x0, chart)
    vt = -t0 * (q + float(vx @ a))
    return GeodesicState(x0, t0, vx, vt)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def _gamma_provider(kk: KKMetric, chart: str, cfg: IntegratorConfig) -> Callable[[np.ndarray, float], np.ndarray]:
    if cfg.christoffel == "closed":
        if not kk.gauge.is_zero and kk.sign != +1:
            raise NumericError("closed-form symbols need a vanishing gauge field for sign -1")
        fn = lambda x, t: christoffel_closed(kk, Point(x, t, chart), fd_rel=cfg.fd_rel)
    elif cfg.christoffel == "numeric":
        # the fiber guard owns the t -> 0 boundary, so no conditioning gate here
        fn = lambda x, t: christoffel_numeric(kk, Point(x, t, chart), fd_rel=cfg.fd_rel, cond_limit=None)
    else:
        raise ContractViolation(f"unknown christoffel provider {cfg.christoffel!r}")
    return fn


def geodesic_rhs(kk: KKMetric, chart: str, cfg: IntegratorConfig) -> Callable[[np.ndarray], np.ndarray]:
    gamma_at = _gamma_provider(kk, chart, cfg)
    n = None

    def rhs(y: np.ndarray) -> np.ndarray:
        nonlocal n
        if n is None:
            n = (y.size - 2) // 2
        vel = y[n + 1 :]
        if not np.any(vel):
            # frozen states are exact fixed points; skip the symbol evaluation
            return np.concatenate([vel, np.zeros(n + 1)])
        gamma = gamma_at(y[:n], float(y[n]))
        acc = -np.einsum("abc,b,c->a", gamma, vel, vel)
        return np.concatenate([vel, acc])

    return rhs


def printed_spatial_acceleration(
    state: GeodesicState,
    scenario: Scenario,
    gauge: GaugeField | None = None,
    chart: str | None = None,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> np.ndarray:
    """Transcription of the first-published spatial equation, kept as a
    secondary right-hand side.

    Built from the base symbols, the gauge field and its curvature instead
    of the assembled-metric symbols. For a vanishing gauge field it agrees
    with the generic route; with a gauge field its disagreement with the
    finite-difference oracle is reported by the tests, never asserted away.
    Assumes a fiber-independent base metric.
    """
    chart = chart or scenario.default_chart
    gauge = gauge if gauge is not None else scenario.gauge
    if scenario.metric.time_dependent:
        raise ContractViolation("reference accelerations assume a fiber-independent base metric")
    p = Point(state.x, state.t, chart)
    gminv = np.linalg.inv(scenario.metric.block(p))
    kk = scenario.kk(-1, scenario.connection(gauge))
    base = base_symbols_at(kk, p, fd_rel)
    a = gauge.at(state.x, chart)
    f = curvature(gauge, state.x, chart, fd_rel=fd_rel)
    vx = state.vx
    omega_v = state.vt / state.t + float(vx @ a)
    gf_v = gminv @ f @ vx  # g^{ab} F_bc x'^c

    d2x = -np.einsum("abc,b,c->a", base, vx, vx)
    d2x -= omega_v * gf_v
    # published quadratic force; the F_cd x'^c x'^d piece vanishes identically
    d2x -= float(a @ vx) * gf_v
    return d2x


def printed_temporal_acceleration(
    state: GeodesicState,
    acc_x: np.ndarray,
    gauge: GaugeField,
    chart: str,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> float:
    """Second-order fiber equation evaluated on a given spatial acceleration:

        t'' = -t ( (1/2) x' . (dA + dA^T) . x' + A . x'' ) + t'^2 / t
    """
    jac_a = _fd.jacobian(lambda y: gauge.at(y, chart), state.x, rel=fd_rel)
    sym = jac_a + jac_a.T
    a = gauge.at(state.x, chart)
    return float(
        -state.t * (0.5 * float(state.vx @ sym @ state.vx) + float(a @ np.asarray(acc_x)))
        + state.vt**2 / state.t
    )


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

# Fehlberg 4(5) tableau; the fifth-order solution is propagated.
_FB_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_FB_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_FB_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_FB_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)


def _rkf45_step(rhs, y: np.ndarray, h: float):
    k = [rhs(y)]
    for i in range(1, 6):
        yi = y + h * sum(a * ki for a, ki in zip(_FB_A[i], k))
        k.append(rhs(yi))
    y5 = y + h * sum(b * ki for b, ki in zip(_FB_B5, k))
    y4 = y + h * sum(b * ki for b, ki in zip(_FB_B4, k))
    return y5, y5 - y4


def _rk4_step(rhs, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def integrate(
    state0: GeodesicState,
    scenario: Scenario,
    cfg: IntegratorConfig | None = None,
    gauge: GaugeField | None = None,
    chart: str | None = None,
) -> Trajectory:
    """Integrate the geodesic flow of the sign -1 assembled metric.

    Returns the sampled trajectory with per-step monitors. Integration halts
    early with an event record if |t| falls below the guard, the state goes
    non-finite, the state leaves a hard chart domain, or the adaptive step
    underflows; the partial trajectory is returned in every case.
    """
    cfg = cfg or IntegratorConfig()
    chart = chart or scenario.default_chart
    gauge = gauge if gauge is not None else scenario.gauge
    kk = scenario.kk(-1, scenario.connection(gauge))
    rhs = geodesic_rhs(kk, chart, cfg)
    chart_obj = scenario.atlas.chart(chart)

    n = state0.dim
    t_guard = cfg.t_guard_factor * abs(state0.t)
    lam = 0.0
    y = state0.as_vector()

    lams = [lam]
    ys = [y.copy()]
    events: list[dict] = []

    def guard(y_new: np.ndarray, lam_new: float) -> str | None:
        if not np.all(np.isfinite(y_new)):
            return "non_finite"
        if abs(y_new[n]) < t_guard:
            return "t_guard"
        if not chart_obj.inside(y_new[:n]):
            return "left_chart"
        return None

    if cfg.method == "rk4":
        h = cfg.rk4_step
        steps = int(round(cfg.lambda_max / h))
        for _ in range(steps):
            y_new = _rk4_step(rhs, y, h)
            lam_new = lam + h
            reason = guard(y_new, lam_new)
            if reason is not None:
                events.append({"kind": reason, "lambda": lam_new})
                if reason != "non_finite":
                    lams.append(lam_new)
                    ys.append(y_new)
                break
            y, lam = y_new, lam_new
            lams.append(lam)
            ys.append(y.copy())
    elif cfg.method == "rk45":
        h = min(cfg.initial_step, cfg.max_step, cfg.lambda_max)
        steps = 0
        while lam < cfg.lambda_max and steps < cfg.max_steps:
            steps += 1
            h = min(h, cfg.lambda_max - lam)
            y_new, err = _rkf45_step(rhs, y, h)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
            if err_norm <= 1.0:
                lam_new = lam + h
                reason = guard(y_new, lam_new)
                if reason is not None:
                    events.append({"kind": reason, "lambda": lam_new})
                    if reason != "non_finite":
                        lams.append(lam_new)
                        ys.append(y_new)
                    break
                y, lam = y_new, lam_new
                lams.append(lam)
                ys.append(y.copy())
            factor = 0.9 * err_norm ** -0.2 if err_norm > 0.0 else 5.0
            h *= min(5.0, max(0.2, factor))
            h = min(h, cfg.max_step)
            if h < cfg.min_step:
                events.append({"kind": "step_underflow", "lambda": lam})
                break
        if steps >= cfg.max_steps:
            events.append({"kind": "max_steps", "lambda": lam})
    else:
        raise ContractViolation(f"unknown integrator method {cfg.method!r}")

    arr = np.array(ys)
    lam_arr = np.array(lams)
    xs = arr[:, :n]
    ts = arr[:, n]
    vxs = arr[:, n + 1 : 2 * n + 1]
    vts = arr[:, 2 * n + 1]

    charges = np.empty(lam_arr.size)
    nulls = np.empty(lam_arr.size)
    speeds = np.empty(lam_arr.size)
    for i in range(lam_arr.size):
        s = GeodesicState(xs[i], ts[i], vxs[i], vts[i], lam_arr[i])
        charges[i] = carroll_charge(s, gauge, chart)
        nulls[i] = null_residual(s, scenario, gauge, chart)
        speeds[i] = base_speed2(s, scenario, chart)

    return Trajectory(
        lam=lam_arr,
        x=xs,
        t=ts,
        vx=vxs,
        vt=vts,
        charge=charges,
        null_residual=nulls,
        base_speed2=speeds,
        events=events,
        meta={
            "scenario": scenario.name,
            "chart": chart,
            "method": cfg.method,
            "christoffel": cfg.christoffel,
            "rel_tol": cfg.rel_tol,
            "abs_tol": cfg.abs_tol,
        },
    )


# ---------------------------------------------------------------------------
# reparametrizations and reductions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogTimeSeries:
    u: np.ndarray
    x: np.ndarray
    lam: np.ndarray

    def slope(self, column: int) -> float:
        """Least-squares d x[column] / d u over the whole series."""
        du = self.u - self.u.mean()
        denom = float(du @ du)
        if denom == 0.0:
            raise NumericError("log-time series has no spread")
        return float(du @ (self.x[:, column] - self.x[:, column].mean())) / denom


def log_time(traj: Trajectory) -> LogTimeSeries:
    """Reparametrize by u = log|t|; requires strictly monotone u."""
    u = np.log(np.abs(traj.t))
    du = np.diff(u)
    if u.size < 2 or not (np.all(du > 0.0) or np.all(du < 0.0)):
        raise ContractViolation("fiber coordinate is not strictly monotone; log-time undefined")
    return LogTimeSeries(u=u, x=traj.x.copy(), lam=traj.lam.copy())


@dataclass
class BaseTrajectory:
    u: np.ndarray
    x: np.ndarray
    vx: np.ndarray
    speed2: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.u.size


def integrate_small_gauge(
    x0: np.ndarray,
    v0: np.ndarray,
    scenario: Scenario,
    sign_q: int,
    cfg: IntegratorConfig | None = None,
    gauge: GaugeField | None = None,
    curvature_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    chart: str | None = None,
    u_max: float = 2.0 * math.pi,
) -> BaseTrajectory:
    """Base-only reduction in log-time u for a weak gauge field:

        d2x/du2 + Gamma_base(dx/du, dx/du) = sign_q * g_M^{-1} F dx/du.

    ``v0`` must be unit in g_M (the constraint fixes the speed; in log-time
    it is 1). The curvature enters directly; pass ``curvature_fn`` to bypass
    the gauge field, e.g. for a constant synthetic field strength.
    """
    cfg = cfg or IntegratorConfig()
    chart = chart or scenario.default_chart
    if sign_q not in (+1, -1):
        raise ContractViolation("sign_q must be +1 or -1")
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    gm0 = np.asarray(scenario.metric.blocks[chart](x0, 1.0), dtype=float)
    speed = math.sqrt(float(v0 @ gm0 @ v0))
    if abs(speed - 1.0) > 1e-10:
        raise ContractViolation(f"initial base speed must be 1 in g_M (got {speed:.12f})")
    if scenario.metric.time_dependent:
        raise ContractViolation("the reduction assumes a fiber-independent base metric")

    if curvature_fn is None:
        g = gauge if gauge is not None else scenario.gauge
        curvature_fn = lambda x: curvature(g, x, chart, fd_rel=cfg.fd_rel)

    kk = scenario.kk(-1)
    n = x0.size

    def rhs(y: np.ndarray) -> np.ndarray:
        x, v = y[:n], y[n:]
        p = Point(x, 1.0, chart)
        base = base_symbols_at(kk, p, cfg.fd_rel)
        gminv = np.linalg.inv(scenario.metric.block(p))
        f = np.asarray(curvature_fn(x), dtype=float)
        acc = -np.einsum("abc,b,c->a", base, v, v) + sign_q * (gminv @ f @ v)
        return np.concatenate([v, acc])

    y = np.concatenate([x0, v0])
    u = 0.0
    us = [u]
    ys = [y.copy()]
    h = min(cfg.initial_step, cfg.max_step)
    steps = 0
    while u < u_max and steps < cfg.max_steps:
        steps += 1
        h = min(h, u_max - u)
        y_new, err = _rkf45_step(rhs, y, h)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if err_norm <= 1.0:
            u += h
            y = y_new
            us.append(u)
            ys.append(y.copy())
        factor = 0.9 * err_norm ** -0.2 if err_norm > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
        h = min(h, cfg.max_step)
        if h < cfg.min_step:
            break

    arr = np.array(ys)
    xs, vs = arr[:, :n], arr[:, n:]
    speeds = np.empty(len(us))
    for i in range(len(us)):
        gm = np.asarray(scenario.metric.blocks[chart](xs[i], 1.0), dtype=float)
        speeds[i] = float(vs[i] @ gm @ vs[i])
    return BaseTrajectory(
        u=np.array(us), x=xs, vx=vs, speed2=speeds,
        meta={"scenario": scenario.name, "chart": chart, "sign_q": sign_q},
    )


def formal_temporal_solution(
    traj: Trajectory,
    gauge: GaugeField,
    q: float,
    t0: float,
    chart: str,
) -> tuple[np.ndarray, float]:
    """Quadrature solution of the first-order fiber equation,

        t(l) = t0 * exp(-q l) * exp(-integral of x' . A dl),

    by the trapezoid rule along the sampled base path. Returns the series
    and its max deviation from the integrated fiber channel.
    """
    integrand = np.array(
        [float(traj.vx[i] @ gauge.at(traj.x[i], chart)) for i in range(len(traj))]
    )
    accumulated = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(traj.lam))]
    )
    series = t0 * np.exp(-q * traj.lam - accumulated)
    deviation = float(np.max(np.abs(series - traj.t)))
    return series, deviation
