"""Non-degenerate metrics built from a degenerate metric and a connection.

With ``omega = vtb + vx . A`` the combination ``g + sign * omega^2`` is
non-degenerate; sign +1 gives a Riemannian metric, sign -1 a Lorentzian one.
Adapted-frame components are

    [[g_M + s A A^T, s A], [s A^T, s]],        s = sign,

and raw (x, t) components follow from the frame factor diag(1, ..., 1, 1/t):
the mixed block is s A / t and the fiber entry s / t^2, so
det(raw) * t^2 = s * det(g_M).

Two Christoffel routes are provided. ``christoffel_numeric`` differentiates
the raw metric components directly (the brute-force oracle and the default
everywhere). ``christoffel_closed`` assembles the symbols from base data;
it is validated against the oracle only when the gauge field vanishes, and
with a nonzero gauge field its output is something to compare, not to trust
(see ``closed_form_deviation``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _fd
from .connection import ConnectionOneForm, GaugeField, curvature
from .errors import ContractViolation, DomainError, NumericError
from .geometry import DegenerateMetric, Point, TangentVector

BaseSymbols = Callable[[np.ndarray, float, str], np.ndarray]
BlockDerivative = Callable[[np.ndarray, float, str], np.ndarray]


@dataclass
class KKMetric:
    """Assembled non-degenerate metric with optional registered base data."""

    sign: int
    metric: DegenerateMetric
    gauge: GaugeField
    base_symbols: BaseSymbols | None = None
    metric_t_derivative: BlockDerivative | None = None

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ContractViolation("sign must be +1 or -1")

    # -- components ---------------------------------------------------------

    def adapted(self, p: Point) -> np.ndarray:
        gm = self.metric.block(p)
        a = self.gauge.at(p.x, p.chart)
        n = p.dim
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = gm + self.sign * np.outer(a, a)
        out[:n, n] = self.sign * a
        out[n, :n] = self.sign * a
        out[n, n] = self.sign
        return out

    def raw(self, p: Point) -> np.ndarray:
        return self._raw_components(p.x, p.t, p.chart)

    def _raw_components(self, x: np.ndarray, t: float, chart: str) -> np.ndarray:
        gm = np.asarray(self.metric.blocks[chart](x, t), dtype=float)
        a = self.gauge.at(x, chart)
        n = x.size
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = gm + self.sign * np.outer(a, a)
        out[:n, n] = self.sign * a / t
        out[n, :n] = self.sign * a / t
        out[n, n] = self.sign / t**2
        return out

    def raw_field(self, chart: str) -> Callable[[np.ndarray], np.ndarray]:
        def field_fn(raw: np.ndarray) -> np.ndarray:
            raw = np.asarray(raw, dtype=float)
            return self._raw_components(raw[:-1], float(raw[-1]), chart)

        return field_fn

    def eval(self, p: Point, v: TangentVector, w: TangentVector) -> float:
        if not (v.base.same_place(p) and w.base.same_place(p)):
            raise ContractViolation("vectors must be based at the evaluation point")
        vv = np.append(v.vx, v.vtb)
        ww = np.append(w.vx, w.vtb)
        return float(vv @ self.adapted(p) @ ww)

    # -- invariant helpers ----------------------------------------------------

    def det_identity_residual(self, p: Point) -> float:
        """Relative defect of det(raw) * t^2 = sign * det(g_M)."""
        det_raw = float(np.linalg.det(self.raw(p)))
        det_gm = float(np.linalg.det(self.metric.block(p)))
        return abs(det_raw * p.t**2 - self.sign * det_gm) / max(abs(det_gm), 1e-300)

    def signature(self, p: Point) -> tuple[int, int]:
        """(positive, negative) eigenvalue counts of the raw components."""
        vals = np.linalg.eigvalsh(self.raw(p))
        return int(np.sum(vals > 0)), int(np.sum(vals < 0))


def build_kk(
    metric: DegenerateMetric,
    connection: ConnectionOneForm | GaugeField,
    sign: int,
    base_symbols: BaseSymbols | None = None,
    metric_t_derivative: BlockDerivative | None = None,
) -> KKMetric:
    """Assemble the non-degenerate metric for a metric/connection pair."""
    gauge = connection.gauge if isinstance(connection, ConnectionOneForm) else connection
    return KKMetric(
        sign=int(sign),
        metric=metric,
        gauge=gauge,
        base_symbols=base_symbols,
        metric_t_derivative=metric_t_derivative,
    )


# ---------------------------------------------------------------------------
# Christoffel symbols
# ---------------------------------------------------------------------------

def christoffel_numeric(
    kk: KKMetric,
    p: Point,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
    cond_limit: float | None = 1e12,
) -> np.ndarray:
    """Levi-Civita symbols of the raw metric by central differences.

    Returns Gamma[A, B, C] with the upper index first, symmetrized in the
    lower pair (the raw formula is symmetric up to roundoff).
    """
    field_fn = kk.raw_field(p.chart)
    raw_p = p.raw()
    t_axis = raw_p.size - 1
    g = field_fn(raw_p)
    if cond_limit is not None:
        cond = float(np.linalg.cond(g))
        if not np.isfinite(cond) or cond > cond_limit:
            raise NumericError(f"metric condition number {cond:.3e} exceeds {cond_limit:.0e}")
    ginv = np.linalg.inv(g)
    dg = _fd.partials(field_fn, raw_p, rel=fd_rel, keep_sign=(t_axis,))  # dg[C, A, B]
    lowered = (
        np.transpose(dg, (1, 0, 2))  # [d, b, c] = d_b G_dc
        + np.transpose(dg, (1, 2, 0))  # [d, b, c] = d_c G_db
        - dg  # [d, b, c] = d_d G_bc
    )
    gamma = 0.5 * np.einsum("ad,dbc->abc", ginv, lowered)
    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def christoffel_numeric_batch(
    kk: KKMetric, points: Sequence[Point], fd_rel: float = _fd.DEFAULT_REL_STEP
) -> list[np.ndarray]:
    """Batch variant; evaluations at distinct points are independent and may
    be farmed out by the caller."""
    return [christoffel_numeric(kk, p, fd_rel=fd_rel) for p in points]


def _base_symbols_numeric(kk: KKMetric, x: np.ndarray, t: float, chart: str, fd_rel: float) -> np.ndarray:
    """Levi-Civita symbols of the base block at frozen t."""
    fn = kk.metric.blocks[chart]

    def gm_of_x(y: np.ndarray) -> np.ndarray:
        return np.asarray(fn(y, t), dtype=float)

    g = gm_of_x(x)
    ginv = np.linalg.inv(g)
    dg = _fd.partials(gm_of_x, np.asarray(x, dtype=float), rel=fd_rel)
    lowered = np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg
    gamma = 0.5 * np.einsum("ad,dbc->abc", ginv, lowered)
    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def base_symbols_at(kk: KKMetric, p: Point, fd_rel: float = _fd.DEFAULT_REL_STEP) -> np.ndarray:
    if kk.base_symbols is not None:
        return np.asarray(kk.base_symbols(p.x, p.t, p.chart), dtype=float)
    return _base_symbols_numeric(kk, p.x, p.t, p.chart, fd_rel)


def _block_t_derivative(kk: KKMetric, p: Point, fd_rel: float) -> np.ndarray:
    if kk.metric_t_derivative is not None:
        return np.asarray(kk.metric_t_derivative(p.x, p.t, p.chart), dtype=float)
    if not kk.metric.time_dependent:
        return np.zeros((p.dim, p.dim))
    fn = kk.metric.blocks[p.chart]

    def block_of_t(arr: np.ndarray) -> np.ndarray:
        return np.asarray(fn(p.x, float(arr[0])), dtype=float)

    return _fd.partial(block_of_t, np.array([p.t]), 0, rel=fd_rel, keep_sign=(0,))


def christoffel_closed(
    kk: KKMetric,
    p: Point,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> np.ndarray:
    """Closed-form symbols assembled from base data.

    For a vanishing gauge field (both signs) the output agrees with the
    finite-difference oracle and is the validated regime:

        Gamma^c_ab = base symbols,  Gamma^c_at = (1/2) g^{cd} dg_ad/dt,
        Gamma^t_ab = -sign * (t^2/2) dg_ab/dt,  Gamma^t_tt = -1/t.

    With a nonzero gauge field only sign +1 is available; the gauge-dependent
    terms are evaluated exactly as published for that case, and their
    disagreement with the oracle is reported by ``closed_form_deviation``
    rather than asserted away.
    """
    n = p.dim
    t = p.t
    s = kk.sign
    gm = kk.metric.block(p)
    gminv = np.linalg.inv(gm)
    a = kk.gauge.at(p.x, p.chart)
    base = base_symbols_at(kk, p, fd_rel)
    dgdt = _block_t_derivative(kk, p, fd_rel)

    gamma = np.zeros((n + 1, n + 1, n + 1))
    gamma[:n, :n, :n] = base
    gamma[:n, :n, n] = 0.5 * np.einsum("cd,ad->ca", gminv, dgdt)
    gamma[:n, n, :n] = gamma[:n, :n, n]
    gamma[n, :n, :n] = -s * (t**2 / 2.0) * dgdt
    gamma[n, n, n] = -1.0 / t

    if not kk.gauge.is_zero:
        if s != +1:
            raise NumericError(
                "closed-form symbols with a nonzero gauge field are only defined for sign +1; "
                "use the finite-difference oracle"
            )
        f = curvature(kk.gauge, p.x, p.chart, fd_rel=fd_rel)
        jac_a = _fd.jacobian(lambda y: kk.gauge.at(y, p.chart), p.x, rel=fd_rel)  # jac[b, a] = d_a A_b
        sym_da = jac_a + jac_a.T  # d_a A_b + d_b A_a
        ag = gminv @ a  # (g_M)^{cd} A_d

        # spatial block: (1/2) g^{cd} (A_b F_ad + A_a F_bd) + (1/2) g^{cd} A_d t dg_ab/dt
        gamma[:n, :n, :n] += 0.5 * (
            np.einsum("cd,b,ad->cab", gminv, a, f) + np.einsum("cd,a,bd->cab", gminv, a, f)
        )
        gamma[:n, :n, :n] += 0.5 * t * np.einsum("c,ab->cab", ag, dgdt)
        # mixed block gains the published (1/t) F term
        gamma[:n, :n, n] += 0.5 / t * np.einsum("cd,da->ca", gminv, f)
        gamma[:n, n, :n] = gamma[:n, :n, n]
        # fiber-spatial-spatial
        gamma[n, :n, :n] += -t * np.einsum("c,cab->ab", a, base)
        gamma[n, :n, :n] += -(t / 2.0) * (
            np.einsum("c,b,ac->ab", ag, a, f) + np.einsum("c,a,bc->ab", ag, a, f)
        )
        gamma[n, :n, :n] += (t / 2.0) * sym_da
        gamma[n, :n, :n] += -(t**2 / 2.0) * float(a @ gminv @ a) * dgdt
        # fiber-spatial-fiber, as published; the trailing contraction carries
        # no free base index, so the same value is added for every a
        scalar = -(t / 2.0) * float(np.einsum("cd,d,cd->", gminv, a, dgdt))
        mixed_f = -0.5 * np.einsum("cd,d,ca->a", gminv, a, f)
        gamma[n, :n, n] = mixed_f + scalar
        gamma[n, n, :n] = gamma[n, :n, n]

    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def closed_form_deviation(
    kk: KKMetric, points: Sequence[Point], fd_rel: float = _fd.DEFAULT_REL_STEP
) -> float:
    """Max componentwise |closed - numeric| over the sample points."""
    worst = 0.0
    for p in points:
        delta = christoffel_closed(kk, p, fd_rel) - christoffel_numeric(kk, p, fd_rel)
        worst = max(worst, float(np.max(np.abs(delta))))
    return worst


# ---------------------------------------------------------------------------
# compatibility, volume, divergence
# ---------------------------------------------------------------------------

def covariant_metric_derivative(
    gamma: np.ndarray,
    metric,
    p: Point,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> np.ndarray:
    """nabla_C G_AB = d_C G_AB - Gamma^D_CA G_DB - Gamma^D_CB G_AD.

    ``metric`` is anything exposing ``raw_field(chart)``; pass the original
    degenerate metric to witness non-metricity, or the assembled metric
    itself to confirm the Levi-Civita property.
    """
    field_fn = metric.raw_field(p.chart)
    raw_p = p.raw()
    t_axis = raw_p.size - 1
    g = field_fn(raw_p)
    dg = _fd.partials(field_fn, raw_p, rel=fd_rel, keep_sign=(t_axis,))
    corr1 = np.einsum("dca,db->cab", gamma, g)
    corr2 = np.einsum("dcb,ad->cab", gamma, g)
    return dg - corr1 - corr2


def volume_density(metric: DegenerateMetric, p: Point) -> float:
    """sqrt(|det g_M(x, t)|) / |t|, the density of the canonical volume."""
    det_gm = float(np.linalg.det(metric.block(p)))
    if det_gm == 0.0:
        raise DomainError("base block is singular; volume density undefined")
    return float(np.sqrt(abs(det_gm)) / abs(p.t))


def _density_field(metric: DegenerateMetric, chart: str) -> Callable[[np.ndarray], float]:
    fn = metric.blocks[chart]

    def rho(raw: np.ndarray) -> float:
        x, t = raw[:-1], float(raw[-1])
        return float(np.sqrt(abs(np.linalg.det(np.asarray(fn(x, t), dtype=float)))) / abs(t))

    return rho


def divergence(X, metric: DegenerateMetric, p: Point, fd_rel: float = _fd.DEFAULT_REL_STEP) -> float:
    """Div(X) = rho^{-1} sum_A d_A(rho X^A) in raw coordinates.

    Independent of any connection; differentiates the product directly.
    """
    rho = _density_field(metric, p.chart)
    raw_p = p.raw()
    t_axis = raw_p.size - 1

    def product(raw: np.ndarray) -> np.ndarray:
        q = Point(raw[:-1], raw[-1], p.chart)
        return rho(raw) * X.raw_at(q)

    d = _fd.partials(product, raw_p, rel=fd_rel, keep_sign=(t_axis,))
    return float(np.trace(d)) / rho(raw_p)


def divergence_expanded(X, metric: DegenerateMetric, p: Point, fd_rel: float = _fd.DEFAULT_REL_STEP) -> float:
    """Product-rule route rho^{-1}(d_A rho) X^A + d_A X^A, kept as an
    independent cross-check of :func:`divergence`."""
    rho = _density_field(metric, p.chart)
    raw_p = p.raw()
    t_axis = raw_p.size - 1
    grad_rho = _fd.partials(lambda raw: np.array(rho(raw)), raw_p, rel=fd_rel, keep_sign=(t_axis,))

    def x_raw(raw: np.ndarray) -> np.ndarray:
        return X.raw_at(Point(raw[:-1], raw[-1], p.chart))

    dx = _fd.partials(x_raw, raw_p, rel=fd_rel, keep_sign=(t_axis,))
    return float(grad_rho.ravel() @ x_raw(raw_p)) / rho(raw_p) + float(np.trace(dx))


# ---------------------------------------------------------------------------
# regularity probe near the zero section
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityReport:
    """Boundedness of (nabla_X Y)^A along a fiber sequence t -> 0.

    ``bounded[A]`` is a growth test: the last three samples may not exceed
    ten times the scale set at the first (largest-t) sample. A component
    diverging like 1/t grows three orders of magnitude over the window and
    is flagged; decaying or constant components pass.
    """

    t_values: np.ndarray
    components: np.ndarray  # shape (len(t_values), n + 1)
    bounded: np.ndarray  # shape (n + 1,), bool

    @property
    def all_bounded(self) -> bool:
        return bool(np.all(self.bounded))


def regularity_probe(
    kk: KKMetric,
    X: Callable[[np.ndarray, float], np.ndarray],
    Y: Callable[[np.ndarray, float], np.ndarray],
    x0: np.ndarray,
    chart: str,
    t_values: Sequence[float] | None = None,
    fd_rel: float = _fd.DEFAULT_REL_STEP,
) -> RegularityReport:
    """Evaluate (nabla_X Y)^A = X^B d_B Y^A + Gamma^A_BC X^B Y^C along t -> 0.

    ``X`` and ``Y`` give raw components (x, t) -> (n+1,) that are smooth at
    t = 0 on the associated line bundle; the probe samples t strictly away
    from 0 and reports whether each component sequence stays bounded.
    """
    if t_values is None:
        t_values = np.logspace(-1, -6, 6)
    x0 = np.asarray(x0, dtype=float)
    rows = []
    for t in t_values:
        p = Point(x0, float(t), chart)
        raw_p = p.raw()
        t_axis = raw_p.size - 1

        def y_raw(raw: np.ndarray) -> np.ndarray:
            return np.asarray(Y(raw[:-1], float(raw[-1])), dtype=float)

        dy = _fd.partials(y_raw, raw_p, rel=fd_rel, keep_sign=(t_axis,))  # dy[B, A]
        gamma = christoffel_numeric(kk, p, fd_rel=fd_rel, cond_limit=None)
        xv = np.asarray(X(x0, float(t)), dtype=float)
        yv = y_raw(raw_p)
        rows.append(xv @ dy + np.einsum("abc,b,c->a", gamma, xv, yv))
    components = np.array(rows)
    scale = np.maximum(np.abs(components[0]), 1e-8)
    tail = np.max(np.abs(components[-3:]), axis=0)
    bounded = tail <= 10.0 * scale
    return RegularityReport(np.asarray(t_values, dtype=float), components, bounded)
