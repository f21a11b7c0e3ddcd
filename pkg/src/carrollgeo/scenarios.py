"""Built-in scenario catalog and scenario-file ingestion.

A scenario bundles an atlas, a degenerate metric, a default gauge field,
registered closed-form data (base Christoffel symbols, fiber derivative of
the metric block) and the properties it is expected to satisfy. Declared
expectations are re-verified at load time, never trusted.

Catalog: flat(n), lightcone, sphere_pullback, moebius, schwarzschild(GM),
thakurta(GM, U). Sphere scenarios carry an angular chart (kept inside a
guard band away from the poles, for the closed-form equatorial runs) plus
two stereographic charts that cover the poles.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import _fd
from .connection import ConnectionOneForm, GaugeField
from .errors import ConstructionError, ContractViolation
from .expressions import compile_expression, parse_number
from .geometry import (
    Atlas,
    Chart,
    ChartTransition,
    DegenerateMetric,
    Point,
    euler_weight,
)
from .kaluza import KKMetric, build_kk


# ---------------------------------------------------------------------------
# scenario container
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    name: str
    dim: int
    atlas: Atlas
    metric: DegenerateMetric
    gauge: GaugeField
    default_chart: str
    params: dict = field(default_factory=dict)
    expects: dict = field(default_factory=dict)
    base_symbols: Callable[[np.ndarray, float, str], np.ndarray] | None = None
    metric_t_derivative: Callable[[np.ndarray, float, str], np.ndarray] | None = None
    description: str = ""
    warnings: list[str] = field(default_factory=list)

    def point(self, x, t: float, chart: str | None = None) -> Point:
        return Point(np.asarray(x, dtype=float), t, chart or self.default_chart)

    def connection(self, gauge: GaugeField | None = None) -> ConnectionOneForm:
        if gauge is None:
            return ConnectionOneForm(self.gauge)
        return ConnectionOneForm(gauge)

    def kk(self, sign: int, connection: ConnectionOneForm | GaugeField | None = None) -> KKMetric:
        conn = connection if connection is not None else self.connection()
        return build_kk(
            self.metric,
            conn,
            sign,
            base_symbols=self.base_symbols,
            metric_t_derivative=self.metric_t_derivative,
        )

    def sample_points(
        self,
        rng: np.random.Generator,
        count: int,
        chart: str | None = None,
        t_range: tuple[float, float] = (0.5, 2.0),
        include_negative_t: bool = False,
    ) -> list[Point]:
        name = chart or self.default_chart
        c = self.atlas.chart(name)
        xs = c.sample(rng, count)
        ts = rng.uniform(t_range[0], t_range[1], size=count)
        if include_negative_t:
            ts *= rng.choice([-1.0, 1.0], size=count)
        return [Point(x, float(t), name) for x, t in zip(xs, ts)]


# ---------------------------------------------------------------------------
# round-sphere building blocks
# ---------------------------------------------------------------------------

def _angular_block(radius2: float) -> Callable[[np.ndarray, float], np.ndarray]:
    def gm(x: np.ndarray, t: float) -> np.ndarray:
        theta = x[0]
        return radius2 * np.array([[1.0, 0.0], [0.0, math.sin(theta) ** 2]])

    return gm


def _angular_symbols(x: np.ndarray) -> np.ndarray:
    theta = x[0]
    out = np.zeros((2, 2, 2))
    out[0, 1, 1] = -math.sin(theta) * math.cos(theta)
    cot = math.cos(theta) / math.sin(theta)
    out[1, 0, 1] = cot
    out[1, 1, 0] = cot
    return out


def _stereo_block(radius2: float) -> Callable[[np.ndarray, float], np.ndarray]:
    def gm(x: np.ndarray, t: float) -> np.ndarray:
        rho2 = float(x @ x)
        return (4.0 * radius2 / (1.0 + rho2) ** 2) * np.eye(2)

    return gm


def _stereo_symbols(x: np.ndarray) -> np.ndarray:
    # conformally flat metric exp(2 f) * delta with f = const - log(1 + |x|^2)
    rho2 = float(x @ x)
    grad_f = -2.0 * x / (1.0 + rho2)
    n = x.size
    out = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                val = 0.0
                if a == b:
                    val += grad_f[c]
                if a == c:
                    val += grad_f[b]
                if b == c:
                    val -= grad_f[a]
                out[a, b, c] = val
    return out


def _angular_to_stereo(x: np.ndarray) -> np.ndarray:
    theta, phi = x
    rho = 1.0 / math.tan(theta / 2.0)
    return np.array([rho * math.cos(phi), rho * math.sin(phi)])


def _stereo_inversion(x: np.ndarray) -> np.ndarray:
    rho2 = float(x @ x)
    return np.array([x[0], -x[1]]) / rho2


_POLE_GUARD = 0.02


def sphere_atlas() -> Atlas:
    angular = Chart(
        name="angular",
        coords=("theta", "phi"),
        box=((0.4, math.pi - 0.4), (-3.0, 3.0)),
        domain=lambda x: _POLE_GUARD < x[0] < math.pi - _POLE_GUARD,
    )
    stereo_n = Chart(name="stereo_n", coords=("X", "Y"), box=((-1.5, 1.5), (-1.5, 1.5)))
    stereo_s = Chart(name="stereo_s", coords=("X", "Y"), box=((-1.5, 1.5), (-1.5, 1.5)))
    one = lambda x: 1.0
    transitions = [
        ChartTransition(
            src="angular",
            dst="stereo_n",
            base_map=_angular_to_stereo,
            fiber_factor=one,
            overlap_box=((0.5, math.pi - 0.5), (-3.0, 3.0)),
            label="band",
        ),
        ChartTransition(
            src="stereo_n",
            dst="stereo_s",
            base_map=_stereo_inversion,
            fiber_factor=one,
            overlap_box=((0.3, 1.4), (0.3, 1.4)),
            label="quadrant",
        ),
        ChartTransition(
            src="stereo_s",
            dst="stereo_n",
            base_map=_stereo_inversion,
            fiber_factor=one,
            overlap_box=((0.3, 1.4), (0.3, 1.4)),
            label="quadrant",
        ),
    ]
    return Atlas([angular, stereo_n, stereo_s], transitions)


def _sphere_charts_metric(radius2: float, scale: Callable[[float], float] | None = None):
    """Per-chart blocks for (scale factor)(t) * radius^2 * round metric."""
    s = scale or (lambda t: 1.0)
    angular = _angular_block(radius2)
    stereo = _stereo_block(radius2)
    return {
        "angular": lambda x, t: s(t) * angular(x, t),
        "stereo_n": lambda x, t: s(t) * stereo(x, t),
        "stereo_s": lambda x, t: s(t) * stereo(x, t),
    }


def _sphere_base_symbols(x: np.ndarray, t: float, chart: str) -> np.ndarray:
    # symbols of a round metric are unchanged by any t-dependent overall factor
    if chart == "angular":
        return _angular_symbols(x)
    return _stereo_symbols(x)


# ---------------------------------------------------------------------------
# circle atlases
# ---------------------------------------------------------------------------

_ARC_HALF_WIDTH = 2.2


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.fmod(theta + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def smoothstep(u: float) -> float:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    a = math.exp(-1.0 / u)
    b = math.exp(-1.0 / (1.0 - u))
    return a / (a + b)


def circle_partition(a: float = _ARC_HALF_WIDTH):
    """Bumps for the two-arc circle cover (east around 0, west around pi)."""
    core = math.pi - a

    def rho_east(x: np.ndarray) -> float:
        th = abs(wrap_angle(float(np.atleast_1d(x)[0])))
        if th <= core:
            return 1.0
        if th >= a:
            return 0.0
        return smoothstep((a - th) / (a - core))

    def rho_west(x: np.ndarray) -> float:
        return 1.0 - rho_east(x)

    return rho_east, rho_west


def circle_atlas(fiber_upper: Callable[[float], float], fiber_lower: Callable[[float], float]) -> Atlas:
    """Two-arc cover of the circle with prescribed fiber transition factors.

    ``fiber_upper`` acts on the overlap near +pi/2, ``fiber_lower`` near
    -pi/2; both are functions of the east-chart angle. West-chart angles run
    in (pi - a, pi + a) so the lower overlap sits at east angle theta - 2 pi.
    """
    a = _ARC_HALF_WIDTH
    east = Chart(name="east", coords=("theta",), box=((-a + 0.05, a - 0.05),))
    west = Chart(name="west", coords=("theta",), box=((math.pi - a + 0.05, math.pi + a - 0.05),))

    upper = (math.pi - a, a)
    lower_east = (-a, -(math.pi - a))
    lower_west = (2.0 * math.pi - a, math.pi + a)

    transitions = [
        ChartTransition(
            src="east", dst="west",
            base_map=lambda x: np.array([x[0]]),
            fiber_factor=lambda x: fiber_upper(float(x[0])),
            overlap_box=(upper,), label="upper",
        ),
        ChartTransition(
            src="west", dst="east",
            base_map=lambda x: np.array([x[0]]),
            fiber_factor=lambda x: 1.0 / fiber_upper(float(x[0])),
            overlap_box=((upper[0], upper[1]),), label="upper",
        ),
        ChartTransition(
            src="east", dst="west",
            base_map=lambda x: np.array([x[0] + 2.0 * math.pi]),
            fiber_factor=lambda x: fiber_lower(float(x[0])),
            overlap_box=(lower_east,), label="lower",
        ),
        ChartTransition(
            src="west", dst="east",
            base_map=lambda x: np.array([x[0] - 2.0 * math.pi]),
            fiber_factor=lambda x: 1.0 / fiber_lower(float(x[0]) - 2.0 * math.pi),
            overlap_box=(lower_west,), label="lower",
        ),
    ]
    return Atlas([east, west], transitions)


# ---------------------------------------------------------------------------
# catalog builders
# ---------------------------------------------------------------------------

def _build_flat(params: Mapping) -> Scenario:
    n = int(params.get("n", 2))
    if n < 1:
        raise ContractViolation("flat scenario needs n >= 1")
    chart = Chart(name="cartesian", coords=tuple(f"x{i + 1}" for i in range(n)), box=((-2.0, 2.0),) * n)
    atlas = Atlas([chart])
    metric = DegenerateMetric(
        blocks={"cartesian": lambda x, t: np.eye(n)},
        time_dependent=False,
        weight_hint=0.0,
    )
    return Scenario(
        name=f"flat({n})",
        dim=n,
        atlas=atlas,
        metric=metric,
        gauge=GaugeField.trivial(n, ["cartesian"]),
        default_chart="cartesian",
        params={"n": n},
        expects={"euler_killing": True, "weight": 0.0},
        base_symbols=lambda x, t, chart_name: np.zeros((n, n, n)),
        metric_t_derivative=lambda x, t, chart_name: np.zeros((n, n)),
        description="Euclidean base metric on a trivial bundle",
    )


def _build_sphere_like(name, radius2, scale, dgdt_factor, expects, description, weight_hint):
    """Common assembly for the sphere-based scenarios.

    ``scale(t)`` multiplies the round block; ``dgdt_factor(t)`` is its exact
    t-derivative divided by scale, i.e. d(scale)/dt = dgdt_factor * scale.
    """
    blocks = _sphere_charts_metric(radius2, scale)
    time_dependent = dgdt_factor is not None

    def metric_t_derivative(x, t, chart_name):
        if dgdt_factor is None:
            return np.zeros((2, 2))
        return dgdt_factor(t) * np.asarray(blocks[chart_name](x, t), dtype=float)

    return Scenario(
        name=name,
        dim=2,
        atlas=sphere_atlas(),
        metric=DegenerateMetric(blocks=blocks, time_dependent=time_dependent, weight_hint=weight_hint),
        gauge=GaugeField.trivial(2, ["angular", "stereo_n", "stereo_s"]),
        default_chart="angular",
        params={},
        expects=expects,
        base_symbols=_sphere_base_symbols,
        metric_t_derivative=metric_t_derivative,
        description=description,
    )


def _build_sphere_pullback(params: Mapping) -> Scenario:
    return _build_sphere_like(
        "sphere_pullback",
        radius2=1.0,
        scale=None,
        dgdt_factor=None,
        expects={"euler_killing": True, "weight": 0.0},
        description="unit round sphere pulled back to a trivial bundle",
        weight_hint=0.0,
    )


def _build_schwarzschild(params: Mapping) -> Scenario:
    gm_param = float(params.get("GM", 0.5))
    radius = 2.0 * gm_param
    sc = _build_sphere_like(
        f"schwarzschild(GM={gm_param:g})",
        radius2=radius**2,
        scale=None,
        dgdt_factor=None,
        expects={"euler_killing": True, "weight": 0.0},
        description="horizon sphere of radius 2*GM with a fiber-independent metric",
        weight_hint=0.0,
    )
    sc.params = {"GM": gm_param, "radius": radius}
    return sc


def _build_lightcone(params: Mapping) -> Scenario:
    sc = _build_sphere_like(
        "lightcone",
        radius2=1.0,
        scale=lambda t: t**2,
        dgdt_factor=lambda t: 2.0 / t,
        expects={"euler_killing": False, "weight": 2.0},
        description="round sphere scaled by t^2 (degree-two homogeneous)",
        weight_hint=2.0,
    )
    return sc


def _build_thakurta(params: Mapping) -> Scenario:
    gm_param = float(params.get("GM", 0.5))
    radius = 2.0 * gm_param
    u_text = str(params.get("U", "t"))
    u_fn = compile_expression(u_text, ("t",))

    def scale(t: float) -> float:
        return math.exp(-u_fn(t))

    def dgdt_factor(t: float) -> float:
        return -_fd.scalar_derivative(u_fn, t)

    sc = _build_sphere_like(
        f"thakurta(GM={gm_param:g}, U={u_text})",
        radius2=radius**2,
        scale=scale,
        dgdt_factor=dgdt_factor,
        expects={"euler_killing": False, "conformal": True},
        description="horizon sphere with a fiber-dependent conformal factor exp(-U(t))",
        weight_hint=None,
    )
    sc.params = {"GM": gm_param, "radius": radius, "U": u_text}
    return sc


def _build_moebius(params: Mapping) -> Scenario:
    atlas = circle_atlas(fiber_upper=lambda th: 1.0, fiber_lower=lambda th: -1.0)
    metric = DegenerateMetric(
        blocks={"east": lambda x, t: np.eye(1), "west": lambda x, t: np.eye(1)},
        time_dependent=False,
        weight_hint=0.0,
    )
    return Scenario(
        name="moebius",
        dim=1,
        atlas=atlas,
        metric=metric,
        gauge=GaugeField.trivial(1, ["east", "west"]),
        default_chart="east",
        params={},
        expects={"euler_killing": True, "weight": 0.0},
        base_symbols=lambda x, t, chart_name: np.zeros((1, 1, 1)),
        metric_t_derivative=lambda x, t, chart_name: np.zeros((1, 1)),
        description="flat circle metric on the twisted two-chart bundle",
    )


_CATALOG: dict[str, Callable[[Mapping], Scenario]] = {
    "flat": _build_flat,
    "lightcone": _build_lightcone,
    "sphere_pullback": _build_sphere_pullback,
    "moebius": _build_moebius,
    "schwarzschild": _build_schwarzschild,
    "thakurta": _build_thakurta,
}


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


# ---------------------------------------------------------------------------
# load-time verification
# ---------------------------------------------------------------------------

def verify_scenario(scenario: Scenario, rng: np.random.Generator, samples: int = 12) -> list[str]:
    """Re-check declared properties on random samples; returns warning strings."""
    warnings: list[str] = []
    for chart_name in scenario.atlas.chart_names():
        points = scenario.sample_points(rng, samples, chart=chart_name)
        for p in points:
            gm = scenario.metric.block(p)
            asym = float(np.max(np.abs(gm - gm.T), initial=0.0))
            if asym > 1e-12:
                warnings.append(f"{chart_name}: base block asymmetry {asym:.3e}")
                break
        for p in points:
            det = float(np.linalg.det(scenario.metric.block(p)))
            if abs(det) <= 1e-12:
                warnings.append(f"{chart_name}: base block nearly singular (det {det:.3e})")
                break

    points = scenario.sample_points(rng, samples)
    factors = []
    for p in points:
        report = euler_weight(scenario.metric, p)
        factors.append(report.factor)
        if not report.proportional:
            warnings.append(f"Euler derivative not proportional to the metric (residual {report.residual:.3e})")
            break
    expects = scenario.expects
    if not warnings and expects.get("euler_killing"):
        worst = max(abs(f) for f in factors)
        if worst > 1e-8:
            warnings.append(f"declared Euler-Killing but weight factor reaches {worst:.3e}")
    if not warnings and "weight" in expects and expects["weight"] is not None:
        target = float(expects["weight"])
        worst = max(abs(f - target) for f in factors)
        if worst > 1e-6:
            warnings.append(f"declared weight {target} but factors deviate by {worst:.3e}")
    return warnings


# ---------------------------------------------------------------------------
# grid-sampled fields (CSV, multilinear interpolation)
# ---------------------------------------------------------------------------

def _load_grid_table(path: Path, n_values: int):
    from scipy.interpolate import RegularGridInterpolator

    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = [h.strip() for h in next(reader)]
        rows = np.array([[float(v) for v in row] for row in reader if row])
    n_coords = len(header) - n_values
    if n_coords < 1:
        raise ConstructionError(f"grid file {path} has too few columns")
    coords = rows[:, :n_coords]
    values = rows[:, n_coords:]
    axes = [np.unique(coords[:, i]) for i in range(n_coords)]
    expected = int(np.prod([len(a) for a in axes]))
    if rows.shape[0] != expected:
        raise ConstructionError(
            f"grid file {path} is not a full tensor grid ({rows.shape[0]} rows, expected {expected})"
        )
    order = np.lexsort(tuple(coords[:, i] for i in reversed(range(n_coords))))
    shaped = values[order].reshape(*(len(a) for a in axes), n_values)
    interp = RegularGridInterpolator(axes, shaped, method="linear", bounds_error=False, fill_value=None)
    return interp, n_coords


def load_metric_grid(path: str | Path, dim: int, time_dependent: bool) -> Callable[[np.ndarray, float], np.ndarray]:
    """Metric block from a CSV grid: coordinate columns, then row-major entries."""
    interp, n_coords = _load_grid_table(Path(path), dim * dim)
    expect = dim + (1 if time_dependent else 0)
    if n_coords != expect:
        raise ConstructionError(f"grid has {n_coords} coordinate columns, expected {expect}")

    def gm(x: np.ndarray, t: float) -> np.ndarray:
        q = np.append(x, t) if time_dependent else np.asarray(x, dtype=float)
        flat = np.asarray(interp(q), dtype=float).reshape(dim, dim)
        return 0.5 * (flat + flat.T)

    return gm


def load_gauge_grid(path: str | Path, dim: int) -> Callable[[np.ndarray], np.ndarray]:
    """Gauge field from a CSV grid with the same column convention."""
    interp, n_coords = _load_grid_table(Path(path), dim)
    if n_coords != dim:
        raise ConstructionError(f"grid has {n_coords} coordinate columns, expected {dim}")

    def a_fn(x: np.ndarray) -> np.ndarray:
        return np.asarray(interp(np.asarray(x, dtype=float)), dtype=float).reshape(dim)

    return a_fn


# ---------------------------------------------------------------------------
# scenario files
# ---------------------------------------------------------------------------

def _parse_box(text: str) -> tuple[tuple[float, float], ...]:
    inner = text.strip()
    if not (inner.startswith("box(") and inner.endswith(")")):
        raise ConstructionError(f"expected box(lo, hi; ...), got {text!r}")
    spans = inner[4:-1].split(";")
    out = []
    for span in spans:
        lo, hi = (parse_number(s) for s in span.split(","))
        out.append((lo, hi))
    return tuple(out)


def _parse_matrix(text: str, dim: int):
    body = text.strip()
    if body.startswith("grid(") and body.endswith(")"):
        return None, body[5:-1].strip()
    if not (body.startswith("matrix(") and body.endswith(")")):
        raise ConstructionError(f"expected matrix(...) or grid(...), got {text!r}")
    rows = body[7:-1].split(";")
    if len(rows) != dim:
        raise ConstructionError(f"matrix has {len(rows)} rows, expected {dim}")
    variables = tuple(f"x{i + 1}" for i in range(dim)) + ("t",)
    entries = []
    for row in rows:
        cols = row.split(",")
        if len(cols) != dim:
            raise ConstructionError(f"matrix row has {len(cols)} entries, expected {dim}")
        entries.append([compile_expression(c, variables) for c in cols])

    def gm(x: np.ndarray, t: float) -> np.ndarray:
        args = tuple(float(v) for v in x) + (float(t),)
        return np.array([[fn(*args) for fn in row] for row in entries])

    return gm, None


def _parse_vector(text: str, dim: int):
    body = text.strip()
    if body.startswith("grid(") and body.endswith(")"):
        return None, body[5:-1].strip()
    if not (body.startswith("vector(") and body.endswith(")")):
        raise ConstructionError(f"expected vector(...) or grid(...), got {text!r}")
    variables = tuple(f"x{i + 1}" for i in range(dim))
    comps = [compile_expression(c, variables) for c in body[7:-1].split(",")]
    if len(comps) != dim:
        raise ConstructionError(f"vector has {len(comps)} entries, expected {dim}")
    is_zero = all(fn.source.strip() in {"0", "0.0"} for fn in comps)  # type: ignore[attr-defined]

    def a_fn(x: np.ndarray) -> np.ndarray:
        args = tuple(float(v) for v in x)
        return np.array([fn(*args) for fn in comps])

    return (a_fn, is_zero), None


def load_scenario_file(path: str | Path) -> Scenario:
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep chart names case-sensitive
    read = parser.read(path)
    if not read:
        raise ConstructionError(f"cannot read scenario file {path}")
    if "meta" not in parser or "charts" not in parser or "metric" not in parser:
        raise ConstructionError("scenario file needs [meta], [charts] and [metric] sections")

    meta = parser["meta"]
    dim = int(meta.get("dim", "0"))
    if dim < 1:
        raise ConstructionError("[meta] dim must be a positive integer")
    name = meta.get("name", path.stem)

    charts = []
    for chart_name, spec in parser["charts"].items():
        box = _parse_box(spec)
        if len(box) != dim:
            raise ConstructionError(f"chart {chart_name} box has {len(box)} spans, expected {dim}")
        charts.append(Chart(name=chart_name, coords=tuple(f"x{i + 1}" for i in range(dim)), box=box))
    atlas = Atlas(charts)
    default_chart = meta.get("default_chart", charts[0].name)

    metric_section = parser["metric"]
    time_dependent = metric_section.getboolean("time_dependent", fallback=False)
    blocks = {}
    for chart in charts:
        if chart.name not in metric_section:
            raise ConstructionError(f"[metric] is missing chart {chart.name}")
        gm, grid_path = _parse_matrix(metric_section[chart.name], dim)
        if grid_path is not None:
            gm = load_metric_grid(path.parent / grid_path, dim, time_dependent)
        blocks[chart.name] = gm
    metric = DegenerateMetric(blocks=blocks, time_dependent=time_dependent)

    gauge_comps = {}
    all_zero = True
    if "gauge" in parser:
        for chart in charts:
            if chart.name not in parser["gauge"]:
                raise ConstructionError(f"[gauge] is missing chart {chart.name}")
            parsed, grid_path = _parse_vector(parser["gauge"][chart.name], dim)
            if grid_path is not None:
                gauge_comps[chart.name] = load_gauge_grid(path.parent / grid_path, dim)
                all_zero = False
            else:
                a_fn, is_zero = parsed
                gauge_comps[chart.name] = a_fn
                all_zero = all_zero and is_zero
        gauge = GaugeField(components=gauge_comps, is_zero=all_zero)
    else:
        gauge = GaugeField.trivial(dim, [c.name for c in charts])

    expects: dict = {}
    if "expects" in parser:
        section = parser["expects"]
        if "euler_killing" in section:
            expects["euler_killing"] = section.getboolean("euler_killing")
        if "weight" in section:
            expects["weight"] = float(section["weight"])
        if "conformal" in section:
            expects["conformal"] = section.getboolean("conformal")

    return Scenario(
        name=name,
        dim=dim,
        atlas=atlas,
        metric=metric,
        gauge=gauge,
        default_chart=default_chart,
        params={},
        expects=expects,
        description=f"scenario file {path.name}",
    )


def load(
    name_or_path: str,
    rng: np.random.Generator | None = None,
    verify: bool = True,
    **params,
) -> Scenario:
    """Load a catalog scenario by name, or a scenario file by path.

    The load-time verification pass runs unless disabled; failures are
    recorded as warnings on the returned scenario rather than raised.
    """
    key = name_or_path.strip()
    if key in _CATALOG:
        scenario = _CATALOG[key](params)
    else:
        p = Path(key)
        if not p.exists():
            raise ContractViolation(
                f"unknown scenario {name_or_path!r}; catalog: {', '.join(catalog_names())}"
            )
        scenario = load_scenario_file(p)
    if verify:
        scenario.warnings = verify_scenario(scenario, rng or np.random.default_rng(0))
    return scenario
