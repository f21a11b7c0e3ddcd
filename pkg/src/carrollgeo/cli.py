"""Command-line front end.

Commands: check, geodesic, null-shoot, christoffel, linearize, scenarios.
Exit codes: 0 ok, 1 check failure, 2 usage error, 3 numeric failure.
Outputs are deterministic under a fixed --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import scenarios as scen
from .errors import CarrollError, ConstructionError, ContractViolation, NumericError
from .expressions import parse_number, parse_tuple
from .geodesics import (
    GeodesicState,
    IntegratorConfig,
    NullShootSpec,
    integrate,
    integrate_small_gauge,
    shoot_null,
    unit_direction,
)
from .kaluza import christoffel_closed, christoffel_numeric
from .linearize import (
    linearize,
    load_atlas_file,
    moebius_transition_atlas,
    shift_transitions,
    synthetic_circle_atlas,
)
from .outputs import (
    polyline_svg,
    write_christoffel_csv,
    write_report_json,
    write_trajectory_csv,
    write_trajectory_json,
    write_trajectory_svg,
)
from .suites import run_all


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise ContractViolation(f"--param expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        try:
            params[key.strip()] = parse_number(value)
        except ConstructionError:
            params[key.strip()] = value.strip()
    return params


def _load_scenario(args) -> scen.Scenario:
    name = getattr(args, "scenario_pos", None) or args.scenario
    if name is None:
        raise ContractViolation("a scenario name or file is required (positional or --scenario)")
    rng = np.random.default_rng(args.seed)
    return scen.load(name, rng=rng, **_parse_params(args.param))


def _add_common(sub: argparse.ArgumentParser, scenario_positional: bool = True) -> None:
    if scenario_positional:
        sub.add_argument("scenario_pos", nargs="?", default=None, metavar="scenario",
                         help="catalog name or scenario file")
    sub.add_argument("--scenario", default=None, help="catalog name or scenario file")
    sub.add_argument("--param", action="append", default=[], metavar="K=V",
                     help="scenario parameter (repeatable), e.g. GM=0.5 or U=t")
    sub.add_argument("--seed", type=int, default=0, help="seed for random sampling")
    sub.add_argument("--tol", type=float, default=None, help="override the command tolerance")
    sub.add_argument("--out", default=None, help="output path (default: stdout summary only)")
    sub.add_argument("--format", default=None, choices=["csv", "json", "svg", "text"],
                     help="output format")


def _integrator_config(args) -> IntegratorConfig:
    cfg = IntegratorConfig()
    if args.tol is not None:
        cfg.rel_tol = args.tol
        cfg.abs_tol = args.tol
    cfg.lambda_max = args.lambda_max
    cfg.method = args.method
    cfg.christoffel = args.christoffel
    if args.rk4_step is not None:
        cfg.rk4_step = args.rk4_step
    return cfg


def _write_trajectory(traj, args, default_format: str = "csv") -> None:
    fmt = args.format or default_format
    if args.out is None:
        print(f"samples: {len(traj)}")
        print(f"max charge drift: {traj.max_charge_drift():.3e}")
        print(f"max null drift:   {traj.max_null_drift():.3e}")
        for event in traj.events:
            print(f"event: {event}")
        return
    out = Path(args.out)
    if fmt == "csv":
        write_trajectory_csv(traj, out)
    elif fmt == "json":
        write_trajectory_json(traj, out)
    elif fmt == "svg":
        write_trajectory_svg(traj, out, mode=args.svg_mode)
    else:
        raise ContractViolation(f"unsupported trajectory format {fmt!r}")
    print(f"wrote {out}")
    print(f"max charge drift: {traj.max_charge_drift():.3e}")
    print(f"max null drift:   {traj.max_null_drift():.3e}")
    for event in traj.events:
        print(f"event: {event}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    scenario = _load_scenario(args)
    rng = np.random.default_rng(args.seed)
    results = run_all(scenario, rng)
    passed = all(r.passed for r in results)
    report = {
        "scenario": scenario.name,
        "seed": args.seed,
        "passed": passed,
        "checks": [r.as_dict() for r in results],
    }
    if args.format == "json" and args.out is None:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            detail = f"  [{r.detail}]" if r.detail and not r.passed else ""
            print(f"{mark}  {r.name:32s} value={r.value:.3e} tol={r.tol:.0e}{detail}")
        print(f"{'OK' if passed else 'FAILED'}: {scenario.name}")
    if args.out is not None:
        write_report_json(report, args.out)
        print(f"wrote {args.out}")
    return 0 if passed else 1


def cmd_geodesic(args) -> int:
    scenario = _load_scenario(args)
    chart = args.chart or scenario.default_chart
    cfg = _integrator_config(args)
    if args.small_gauge:
        values = parse_tuple(args.state)
        n = scenario.dim
        if len(values) != 2 * n:
            raise ContractViolation(f"--state for the reduced flow needs {2 * n} values: x..., v...")
        x0, v0 = np.array(values[:n]), np.array(values[n:])
        v0 = unit_direction(scenario, x0, v0, 1.0, chart)
        field_strength = None
        if args.field is not None:
            b = args.field
            field_strength = lambda x: np.array([[0.0, b], [-b, 0.0]])
        base = integrate_small_gauge(
            x0, v0, scenario, args.sign_q, cfg, curvature_fn=field_strength,
            chart=chart, u_max=args.lambda_max,
        )
        if args.out is not None:
            Path(args.out).write_text(polyline_svg([base.x[:, :2]], labels=["reduced base path"]))
            print(f"wrote {args.out}")
        print(f"samples: {len(base)}; final speed^2 drift {abs(base.speed2[-1] - base.speed2[0]):.3e}")
        return 0
    values = parse_tuple(args.state)
    n = scenario.dim
    if len(values) != 2 * n + 2:
        raise ContractViolation(f"--state needs {2 * n + 2} values: x..., t, vx..., vt")
    state = GeodesicState(np.array(values[:n]), values[n], np.array(values[n + 1 : 2 * n + 1]), values[2 * n + 1])
    traj = integrate(state, scenario, cfg, chart=chart)
    _write_trajectory(traj, args)
    return 3 if any(e["kind"] == "non_finite" for e in traj.events) else 0


def cmd_null_shoot(args) -> int:
    scenario = _load_scenario(args)
    chart = args.chart or scenario.default_chart
    x0 = np.array(parse_tuple(args.point))
    u = np.array(parse_tuple(args.dir))
    u = unit_direction(scenario, x0, u, args.t0, chart)
    spec = NullShootSpec(x0=x0, u=u, q=args.q, t0=args.t0, eps=args.eps, chart=chart)
    state = shoot_null(spec, scenario)
    cfg = _integrator_config(args)
    if args.q == 0.0:
        # frozen: a single-sample trajectory is the whole story
        cfg.lambda_max = 0.0
        traj = integrate(state, scenario, cfg, chart=chart)
        traj.meta["note"] = "zero charge: state is frozen for every affine parameter"
        _write_trajectory(traj, args)
        print("note: frozen state (zero charge)")
        return 0
    traj = integrate(state, scenario, cfg, chart=chart)
    _write_trajectory(traj, args)
    return 3 if any(e["kind"] == "non_finite" for e in traj.events) else 0


def cmd_christoffel(args) -> int:
    scenario = _load_scenario(args)
    chart = args.chart or scenario.default_chart
    coord_names = list(scenario.atlas.chart(chart).coords) + ["t"]
    labels = coord_names
    kk = scenario.kk(args.sign)
    points = []
    if args.at is not None:
        values = parse_tuple(args.at)
        if len(values) != scenario.dim + 1:
            raise ContractViolation(f"--at needs {scenario.dim + 1} values: coords..., t")
        points.append(scenario.point(values[:-1], values[-1], chart))
    else:
        rng = np.random.default_rng(args.seed)
        points.extend(scenario.sample_points(rng, args.count, chart=chart))

    rows = []
    worst = 0.0
    for p in points:
        numeric = christoffel_numeric(kk, p)
        closed = christoffel_closed(kk, p) if kk.gauge.is_zero or kk.sign == +1 else None
        n1 = scenario.dim + 1
        for a in range(n1):
            for b in range(n1):
                for c in range(b, n1):
                    cv = float(closed[a, b, c]) if closed is not None else float("nan")
                    nv = float(numeric[a, b, c])
                    dev = abs(cv - nv) if closed is not None else float("nan")
                    if closed is not None:
                        worst = max(worst, dev)
                    if args.golden:
                        rows.append((*p.x, p.t, labels[a], labels[b], labels[c], nv))
                    else:
                        rows.append((*p.x, p.t, labels[a], labels[b], labels[c], cv, nv, dev))
    if args.out is not None:
        write_christoffel_csv(args.out, coord_names, rows, compare=not args.golden)
        print(f"wrote {args.out}")
    else:
        for row in rows:
            cells = [v if isinstance(v, str) else f"{v:.10g}" for v in row]
            print(", ".join(cells))
    print(f"max closed-vs-numeric deviation: {worst:.3e}")
    return 0


def cmd_linearize(args) -> int:
    name = getattr(args, "scenario_pos", None) or args.scenario or args.atlas
    if name is None:
        raise ContractViolation("linearize needs an atlas: moebius, synthetic, or a file path")
    if name == "moebius":
        atlas = moebius_transition_atlas()
    elif name == "synthetic":
        atlas = synthetic_circle_atlas()
    else:
        atlas = load_atlas_file(name)
    shifted = shift_transitions(atlas)
    cocycle = linearize(shifted)
    tol = args.tol if args.tol is not None else 1e-8
    rows = []
    for sample in cocycle.sampled:
        i, j = sample.charts
        for m, c in zip(sample.m, sample.c):
            rows.append({"to": i, "src": j, "m": float(m), "c": float(c)})
    summary = {
        "pair_residual": cocycle.pair_residual,
        "triple_residual": cocycle.triple_residual,
        "cocycle": rows,
    }
    if args.out is not None:
        if (args.format or "csv") == "json":
            write_report_json(summary, args.out)
        else:
            lines = ["to, src, m, c"]
            for row in rows:
                lines.append(f"{row['to']}, {row['src']}, {row['m']!r}, {row['c']!r}")
            Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    print(f"pair residual:   {cocycle.pair_residual:.3e}")
    print(f"triple residual: {cocycle.triple_residual:.3e}")
    ok = cocycle.pair_residual <= tol and cocycle.triple_residual <= tol
    print("OK" if ok else "FAILED")
    return 0 if ok else 1


def cmd_scenarios(args) -> int:
    if args.action != "list":
        raise ContractViolation("supported action: list")
    for name in scen.catalog_names():
        built = scen.load(name, verify=False)
        print(f"{name:16s} {built.description}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carrollgeo",
        description="degenerate-metric bundles: invariant checks, geodesics, symbol tables, linearization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run the invariant suites on a scenario")
    _add_common(p_check)
    p_check.set_defaults(fn=cmd_check)

    p_geo = sub.add_parser("geodesic", help="integrate a geodesic from a raw initial state")
    _add_common(p_geo)
    p_geo.add_argument("--state", required=True, help="comma list: x..., t, vx..., vt (pi allowed)")
    p_geo.add_argument("--chart", default=None)
    p_geo.add_argument("--lambda-max", type=float, default=10.0, dest="lambda_max")
    p_geo.add_argument("--method", default="rk45", choices=["rk45", "rk4"])
    p_geo.add_argument("--rk4-step", type=float, default=None, dest="rk4_step")
    p_geo.add_argument("--christoffel", default="numeric", choices=["numeric", "closed"])
    p_geo.add_argument("--svg-mode", default="xy", choices=["xy", "ulog"], dest="svg_mode")
    p_geo.add_argument("--small-gauge", action="store_true", dest="small_gauge",
                       help="integrate the reduced base flow in log-time")
    p_geo.add_argument("--sign-q", type=int, default=+1, dest="sign_q", choices=[-1, 1])
    p_geo.add_argument("--field", type=float, default=None,
                       help="constant field strength F_12 for the reduced flow (2d)")
    p_geo.set_defaults(fn=cmd_geodesic)

    p_shoot = sub.add_parser("null-shoot", help="build a null initial state and integrate it")
    _add_common(p_shoot)
    p_shoot.add_argument("--point", required=True, help="base coordinates, e.g. 'pi/2, 0'")
    p_shoot.add_argument("--dir", required=True, help="base direction (normalized internally)")
    p_shoot.add_argument("--q", type=float, required=True, help="signed conserved charge")
    p_shoot.add_argument("--t0", type=float, default=1.0)
    p_shoot.add_argument("--eps", type=int, default=+1, choices=[-1, 1])
    p_shoot.add_argument("--chart", default=None)
    p_shoot.add_argument("--lambda-max", type=float, default=5.0, dest="lambda_max")
    p_shoot.add_argument("--method", default="rk45", choices=["rk45", "rk4"])
    p_shoot.add_argument("--rk4-step", type=float, default=None, dest="rk4_step")
    p_shoot.add_argument("--christoffel", default="numeric", choices=["numeric", "closed"])
    p_shoot.add_argument("--svg-mode", default="xy", choices=["xy", "ulog"], dest="svg_mode")
    p_shoot.set_defaults(fn=cmd_null_shoot)

    p_chr = sub.add_parser("christoffel", help="dump symbol tables (closed form vs oracle)")
    _add_common(p_chr)
    p_chr.add_argument("--at", default=None, help="evaluation point: coords..., t")
    p_chr.add_argument("--count", type=int, default=5, help="random points when --at is absent")
    p_chr.add_argument("--chart", default=None)
    p_chr.add_argument("--sign", type=int, default=+1, choices=[-1, 1])
    p_chr.add_argument("--golden", action="store_true", help="single-value golden-file format")
    p_chr.set_defaults(fn=cmd_christoffel)

    p_lin = sub.add_parser("linearize", help="shift transitions by the section and extract the cocycle")
    _add_common(p_lin)
    p_lin.add_argument("--atlas", default=None, help="atlas file (or use a built-in name)")
    p_lin.set_defaults(fn=cmd_linearize)

    p_scen = sub.add_parser("scenarios", help="catalog utilities")
    p_scen.add_argument("action", choices=["list"])
    p_scen.set_defaults(fn=cmd_scenarios)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ContractViolation, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except CarrollError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
