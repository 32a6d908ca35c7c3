"""Command-line front end.

Subcommands: simulate (scenario JSON -> trajectory/metrics CSV), reproduce
(canned scenarios -> plot-ready CSV + PNG), strategy (points CSV -> solution
JSON), metrics (points CSV -> polarization report).

Exit codes: 0 success, 2 config error, 3 numerical guard violation, 4 I/O
error.  Seed priority: --seed flag > config field > POLARIZE_SEED env var.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from . import scenarios, strategies
from .dynamics import ExplicitSchedule, FixedSchedule
from .errors import ConfigError, GuardError
from .export import (
    metrics_header,
    metrics_row,
    read_points_csv,
    write_csv,
    write_json,
)

ENV_SEED = "POLARIZE_SEED"


def _env_seed() -> int | None:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_SEED} must be an integer, got {raw!r}") from None


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")], dtype=np.float64)
    except ValueError:
        raise ConfigError(f"expected comma-separated floats, got {text!r}") from None


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [float(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


def cmd_simulate(args) -> int:
    config = scenarios.load_scenario(
        args.config,
        seed_override=args.seed,
        env_seed=_env_seed(),
        stride_override=args.stride,
    )
    if args.schedule_file:
        with open(args.schedule_file) as fh:
            try:
                solution = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.schedule_file}: {exc.msg}") from exc
        block = solution.get("schedule", {})
        try:
            if block.get("variant") == "fixed":
                # a single intervention applied for config.steps (or --steps)
                vector = np.asarray(block.get("vector"), dtype=np.float64)
                if vector.ndim != 1 or vector.shape[0] != config.dimension:
                    raise ConfigError(
                        f"{args.schedule_file}: vector must have length {config.dimension}"
                    )
                config.schedule = FixedSchedule(vector)
                if args.steps is not None:
                    config.steps = args.steps
            else:
                seq = block.get("vectors")
                if seq is None:
                    seq = solution.get("intervention_sequence")
                if seq is None:
                    raise ConfigError(
                        f"{args.schedule_file}: no schedule block or intervention_sequence"
                    )
                vectors = np.asarray(seq, dtype=np.float64)
                if vectors.ndim != 2 or vectors.shape[1] != config.dimension:
                    raise ConfigError(
                        f"{args.schedule_file}: sequence must be rows of "
                        f"length {config.dimension}"
                    )
                config.schedule = ExplicitSchedule(vectors)
                config.steps = args.steps if args.steps is not None else vectors.shape[0]
        except GuardError as exc:
            raise ConfigError(str(exc)) from exc
    elif args.steps is not None:
        config.steps = args.steps
    traj_path, metr_path, _ = scenarios.simulate_to_files(config, args.out_dir)
    _say(args, f"wrote {traj_path}")
    _say(args, f"wrote {metr_path}")
    return 0


def cmd_reproduce(args) -> int:
    produced = scenarios.reproduce(
        args.figure, args.out_dir, seed=args.seed, render=not args.no_render,
        stride=args.stride,
    )
    for name, path in produced.items():
        _say(args, f"wrote {path} ({name})")
    return 0


def cmd_metrics(args) -> int:
    points = read_points_csv(args.points)
    report = metrics_mod.polarization_report(points)
    out_dir = Path(args.out_dir)
    json_path = out_dir / "metrics.json"
    write_json(json_path, {
        "rho_total": report.rho_total,
        "rho_per_topic": [float(x) for x in report.rho_per_topic],
        "best_cut": [int(i + 1) for i in np.flatnonzero(report.best_cut)],
        "max_pair_disagreement": report.max_pair_disagreement,
        "cluster_size_a": report.cluster_sizes[0],
        "cluster_size_b": report.cluster_sizes[1],
        "exact": report.exact,
    })
    csv_path = out_dir / "metrics.csv"
    write_csv(csv_path, metrics_header(points.shape[1]), [metrics_row(1, points)])
    _say(args, f"wrote {json_path}")
    _say(args, f"wrote {csv_path}")
    return 0


def _solution_with_schedule(payload: dict, vectors) -> dict:
    payload["schedule"] = {
        "variant": "explicit",
        "vectors": [[float(x) for x in v] for v in vectors],
    }
    return payload


def cmd_strategy(args) -> int:
    out_path = Path(args.out_dir) / args.out
    kind = args.strategy_kind
    if kind == "hemisphere-exact":
        points = read_points_csv(args.points)
        hemi, count = strategies.densest_hemisphere_exact(points)
        payload = {
            "kind": kind,
            "axis": _jsonable(hemi.axis),
            "count": count,
            "exact": True,
            "schedule": {"variant": "fixed", "vector": _jsonable(hemi.axis)},
        }
    elif kind == "hemisphere-heuristic":
        points = read_points_csv(args.points)
        hemi, count = strategies.densest_hemisphere_heuristic(
            points, restarts=args.restarts, seed=args.seed or 0
        )
        payload = {
            "kind": kind,
            "axis": _jsonable(hemi.axis),
            "count": count,
            "exact": False,
            "schedule": {"variant": "fixed", "vector": _jsonable(hemi.axis)},
        }
    elif kind == "cap":
        points = read_points_csv(args.points)
        result = strategies.spherical_cap_intervention(
            points, args.threshold, restarts=args.restarts, seed=args.seed or 0
        )
        payload = _solution_with_schedule({
            "kind": kind,
            "threshold": args.threshold,
            "intervention": _jsonable(result.intervention),
            "cap_axis": _jsonable(result.cap.axis),
            "c": result.cap.threshold,
            "count": result.count,
            "exact": result.exact,
        }, [result.intervention])
    elif kind == "plan":
        points = read_points_csv(args.points)
        target = _parse_vector(args.target)
        plan = strategies.plan_convergence(
            points, target, eta=args.eta, epsilon=args.epsilon
        )
        sequence = plan.expand()
        payload = _solution_with_schedule({
            "kind": kind,
            "axis": _jsonable(plan.phase1[0]),
            "phase1_repeats": plan.phase1[1],
            "phase2": [
                {"waypoint": _jsonable(w), "repeats": k} for w, k in plan.phase2
            ],
            "epsilon": plan.epsilon,
            "covered_agents": [int(i + 1) for i in plan.covered],
            "count": int(plan.covered.size),
            "total_steps": plan.total_steps,
        }, sequence)
    elif kind == "two-agent":
        result = strategies.two_agent_intervention(args.correlation)
        u1, u2, v = strategies.two_agent_vectors(args.correlation)
        payload = _solution_with_schedule({
            "kind": kind,
            "correlation": args.correlation,
            "cos_sq_tilt": result.cos_sq_tilt,
            "achieved_value": result.achieved,
            "correlation_after": result.correlation_after,
            "polarization_cost": strategies.polarization_cost(args.correlation),
            "agents": [_jsonable(u1), _jsonable(u2)],
            "intervention": _jsonable(v),
        }, [v])
    elif kind == "one-agent":
        points = read_points_csv(args.points)
        v, achieved = strategies.one_agent_intervention(points[0])
        payload = _solution_with_schedule({
            "kind": kind,
            "agent": _jsonable(points[0]),
            "intervention": _jsonable(v),
            "achieved_value": achieved,
        }, [v])
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown strategy {kind!r}")
    write_json(out_path, payload)
    _say(args, f"wrote {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarize",
        description="Geometric opinion-dynamics simulator and influencer toolkit",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the seed (highest priority)")
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--stride", type=int, default=None,
                        help="snapshot stride override (simulation-backed commands)")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="run a scenario JSON and export CSVs")
    p_sim.add_argument("config", help="scenario JSON path")
    p_sim.add_argument("--steps", type=int, default=None, help="steps override")
    p_sim.add_argument("--schedule-file", default=None,
                       help="replace the schedule with a strategy solution JSON")
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("reproduce", parents=[common],
                           help="rebuild a canned scenario's data and figure")
    p_rep.add_argument("figure", choices=scenarios.FIGURE_IDS)
    p_rep.add_argument("--no-render", action="store_true",
                       help="skip the PNG, write CSV only")
    p_rep.set_defaults(func=cmd_reproduce)

    p_met = sub.add_parser("metrics", parents=[common],
                           help="polarization report for a points CSV")
    p_met.add_argument("--points", required=True, help="points CSV (coord_1..coord_d)")
    p_met.set_defaults(func=cmd_metrics)

    p_str = sub.add_parser("strategy", parents=[common],
                           help="compute an influencer strategy")
    str_sub = p_str.add_subparsers(dest="strategy_kind", required=True)

    def strat(name, **extra_args):
        sp = str_sub.add_parser(name, parents=[common])
        sp.set_defaults(func=cmd_strategy)
        sp.add_argument("--out", default="solution.json", help="solution file name")
        for flag, kwargs in extra_args.items():
            sp.add_argument(flag, **kwargs)
        return sp

    strat("hemisphere-exact", **{"--points": {"required": True}})
    strat("hemisphere-heuristic", **{
        "--points": {"required": True},
        "--restarts": {"type": int, "default": 32},
    })
    strat("cap", **{
        "--points": {"required": True},
        "--threshold": {"type": float, "required": True},
        "--restarts": {"type": int, "default": 32},
    })
    strat("plan", **{
        "--points": {"required": True},
        "--target": {"required": True, "help": "comma-separated target vector"},
        "--epsilon": {"type": float, "default": 1e-3},
        "--eta": {"type": float, "default": 1.0},
    })
    strat("two-agent", **{
        "--correlation": {"type": float, "required": True},
    })
    strat("one-agent", **{"--points": {"required": True}})
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
