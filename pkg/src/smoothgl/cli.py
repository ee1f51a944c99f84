"""Command-line interface: estimate, simulate, benchmark, analyze.

Every command writes a ``manifest.json`` holding the full effective
configuration, so a run can be replayed with ``--from-manifest``. Exit codes:
0 success, 1 usage or input error, 2 completed with warnings (solver did not
converge, or some benchmark replicates failed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from . import __version__
from .baselines import BaselineConfig  # noqa: F401  (re-exported surface)
from .benchmark import METHOD_NAMES, run_benchmark
from .data import (EDGE_TOLERANCE, load_csv, precision_to_graphs,
                   read_precision_sequence, write_csv,
                   write_precision_sequence)
from .kernels import KernelSpec, estimate_covariances
from .metrics import betweenness_change
from .pipeline import auto_fit
from .presets import PRESET_NAMES, preset
from .simgen import SimScenario, simulate
from .solver import DEFAULT_EPS, DEFAULT_MAX_ITER, SolverConfig, solve
from .tuning import DEFAULT_LAMBDA_GRID, TuningGrid

SCHEMA_VERSION = 1


class CliError(Exception):
    """Usage or input problem: message printed to stderr, exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _resolve_seed(cli_seed):
    env = os.environ.get("SINGLE_SEED")
    if env is not None and env.strip() != "":
        try:
            return int(env)
        except ValueError:
            raise CliError(f"SINGLE_SEED must be an integer, got {env!r}")
    return cli_seed


def _parse_float_list(text: str, flag: str) -> list:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise CliError(f"{flag} expects comma-separated numbers, got {text!r}")
    if not values:
        raise CliError(f"{flag} expects at least one value")
    return values


def _dump_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _load_json(path: str, what: str):
    if not os.path.exists(path):
        raise CliError(f"{what} not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{what} {path} is not valid JSON: {exc}")


def _write_manifest(outdir: str, command: str, config: dict,
                    result_info: dict | None = None) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "command": command,
        "config": config,
    }
    if result_info is not None:
        manifest["result"] = result_info
    _dump_json(manifest, os.path.join(outdir, "manifest.json"))


def _load_manifest(path: str, command: str) -> dict:
    payload = _load_json(path, "manifest")
    found = payload.get("command")
    if found != command:
        raise CliError(
            f"manifest {path} was written by {found!r}, expected {command!r}")
    config = payload.get("config")
    if not isinstance(config, dict):
        raise CliError(f"manifest {path} has no config section")
    return config


def _outdir(args) -> str:
    os.makedirs(args.output, exist_ok=True)
    return args.output


def _build_grid(T: int, h_grid, lambda_grid) -> TuningGrid:
    lam = tuple(sorted(lambda_grid)) if lambda_grid else DEFAULT_LAMBDA_GRID
    if h_grid:
        return TuningGrid(tuple(sorted(h_grid)), lam, lam)
    return TuningGrid.default(T, lam, lam)


# ---------------------------------------------------------------- estimate

def cmd_estimate(args) -> int:
    outdir = _outdir(args)
    if args.from_manifest:
        cfg = _load_manifest(args.from_manifest, "estimate")
    else:
        if not args.input:
            raise CliError("--input is required")
        if not args.auto_tune:
            missing = [flag for flag, val in (("--h", args.h),
                                              ("--lambda1", args.lambda1),
                                              ("--lambda2", args.lambda2))
                       if val is None]
            if missing:
                raise CliError(f"{', '.join(missing)} required unless "
                               "--auto-tune is given")
        cfg = {
            "input": args.input,
            "has_header": bool(args.header),
            "kernel": args.kernel,
            "auto_tune": bool(args.auto_tune),
            "h": args.h,
            "lambda1": args.lambda1,
            "lambda2": args.lambda2,
            "h_grid": (_parse_float_list(args.h_grid, "--h-grid")
                       if args.h_grid else None),
            "lambda_grid": (_parse_float_list(args.lambda_grid, "--lambda-grid")
                            if args.lambda_grid else None),
            "gamma": args.gamma,
            "eps1": args.eps1,
            "eps2": args.eps2,
            "max_iter": args.max_iter,
            "penalize_diagonal": not args.no_penalize_diagonal,
            "tolerance": args.tolerance,
        }
    return _run_estimate(cfg, outdir)


def _run_estimate(cfg: dict, outdir: str) -> int:
    path = cfg["input"]
    if not os.path.exists(path):
        raise CliError(f"input file not found: {path}")
    try:
        ts = load_csv(path, has_header=cfg.get("has_header", False))
    except ValueError as exc:
        raise CliError(f"failed to read {path}: {exc}")

    tuning_json = None
    if cfg["auto_tune"]:
        grid = _build_grid(ts.T, cfg.get("h_grid"), cfg.get("lambda_grid"))
        af = auto_fit(ts, grid, kernel_kind=cfg["kernel"], gamma=cfg["gamma"],
                      eps1=cfg["eps1"], eps2=cfg["eps2"],
                      max_iter=cfg["max_iter"],
                      penalize_diagonal=cfg["penalize_diagonal"])
        result = af.result
        chosen = {"h": af.report.chosen_h,
                  "lambda1": af.report.chosen_lambda1,
                  "lambda2": af.report.chosen_lambda2}
        tuning_json = af.report.to_json()
    else:
        kernel = KernelSpec(cfg["kernel"], float(cfg["h"]))
        config = SolverConfig(lambda1=float(cfg["lambda1"]),
                              lambda2=float(cfg["lambda2"]),
                              gamma=cfg["gamma"], eps1=cfg["eps1"],
                              eps2=cfg["eps2"], max_iter=cfg["max_iter"],
                              penalize_diagonal=cfg["penalize_diagonal"])
        covs = estimate_covariances(ts, kernel)
        result = solve(covs, config)
        chosen = {"h": float(cfg["h"]), "lambda1": float(cfg["lambda1"]),
                  "lambda2": float(cfg["lambda2"])}

    write_precision_sequence(result.precisions,
                             os.path.join(outdir, "precisions.json"))
    graphs = precision_to_graphs(result.precisions, cfg["tolerance"])
    _dump_json({
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "p": ts.p,
        "T": ts.T,
        "labels": list(ts.node_labels) if ts.node_labels else None,
        "tolerance": cfg["tolerance"],
        "edges": [sorted([a, b] for a, b in g) for g in graphs],
    }, os.path.join(outdir, "edges.json"))
    _write_manifest(outdir, "estimate", cfg, {
        "converged": bool(result.converged),
        "iterations": int(result.iterations_used),
        "objective": float(result.objective),
        "chosen": chosen,
        "tuning": tuning_json,
    })
    if not result.converged:
        print("warning: solver did not converge within "
              f"{cfg['max_iter']} iterations", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------- simulate

def _scenario_from_cfg(cfg: dict) -> SimScenario:
    name = cfg["scenario"]
    seed = cfg.get("seed")
    seglen = cfg.get("seglen")
    if name in PRESET_NAMES:
        try:
            return preset(name, seed=0 if seed is None else int(seed),
                          seglen=seglen)
        except ValueError as exc:
            raise CliError(str(exc))
    if os.path.exists(name):
        payload = _load_json(name, "scenario config")
        if seglen is not None:
            raise CliError("--seglen applies only to sim3a/sim3b presets")
        try:
            scenario = SimScenario.from_json(payload)
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(f"invalid scenario config {name}: {exc}")
        if seed is not None:
            scenario = replace(scenario, seed=int(seed))
        return scenario
    raise CliError(f"unknown scenario preset {name!r}; available presets: "
                   f"{', '.join(PRESET_NAMES)}")


def cmd_simulate(args) -> int:
    outdir = _outdir(args)
    if args.from_manifest:
        cfg = _load_manifest(args.from_manifest, "simulate")
    else:
        if not args.scenario:
            raise CliError("--scenario is required")
        cfg = {
            "scenario": args.scenario,
            "seed": _resolve_seed(args.seed),
            "seglen": args.seglen,
            "header": bool(args.header),
        }
    return _run_simulate(cfg, outdir)


def _run_simulate(cfg: dict, outdir: str) -> int:
    scenario = _scenario_from_cfg(cfg)
    cfg = dict(cfg)
    cfg["seed"] = scenario.seed
    ts, truth = simulate(scenario)
    write_csv(ts, os.path.join(outdir, "data.csv"),
              header=cfg.get("header", False))
    truth.dump(os.path.join(outdir, "truth.json"))
    _write_manifest(outdir, "simulate", cfg, {
        "T": ts.T,
        "p": ts.p,
        "change_points": [int(c) for c in truth.change_points],
    })
    return 0


# ---------------------------------------------------------------- benchmark

def cmd_benchmark(args) -> int:
    outdir = _outdir(args)
    if args.from_manifest:
        cfg = _load_manifest(args.from_manifest, "benchmark")
    else:
        if not args.scenario:
            raise CliError("--scenario is required")
        if args.reps is None:
            raise CliError("--reps is required")
        methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
        cfg = {
            "scenario": args.scenario,
            "seed": _resolve_seed(args.seed),
            "seglen": args.seglen,
            "reps": args.reps,
            "methods": methods,
            "jobs": args.jobs if args.jobs is not None else (os.cpu_count() or 1),
            "h_grid": (_parse_float_list(args.h_grid, "--h-grid")
                       if args.h_grid else None),
            "lambda_grid": (_parse_float_list(args.lambda_grid, "--lambda-grid")
                            if args.lambda_grid else None),
            "tolerance": args.tolerance,
        }
    return _run_benchmark(cfg, outdir)


def _run_benchmark(cfg: dict, outdir: str) -> int:
    scenario = _scenario_from_cfg(cfg)
    cfg = dict(cfg)
    cfg["seed"] = scenario.seed
    for m in cfg["methods"]:
        if m not in METHOD_NAMES:
            raise CliError(f"unknown method {m!r}; choose from "
                           f"{', '.join(METHOD_NAMES)}")
    if int(cfg["reps"]) < 1:
        raise CliError("--reps must be >= 1")
    grid = None
    if cfg.get("h_grid") or cfg.get("lambda_grid"):
        grid = _build_grid(scenario.T, cfg.get("h_grid"), cfg.get("lambda_grid"))
    report = run_benchmark(scenario, int(cfg["reps"]),
                           methods=tuple(cfg["methods"]),
                           jobs=int(cfg["jobs"]), grid=grid,
                           tolerance=cfg["tolerance"])
    report.dump(os.path.join(outdir, "benchmark.json"))
    report.curves_csv(os.path.join(outdir, "curves.csv"))
    _write_manifest(outdir, "benchmark", cfg, {
        "failures": len(report.failures),
    })
    if report.failures:
        print(f"warning: {len(report.failures)} replicate run(s) failed; "
              "see benchmark.json", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------- analyze

def _load_schedule(path: str) -> list:
    payload = _load_json(path, "schedule file")
    if not isinstance(payload, list) or not payload:
        raise CliError(
            "schedule must be a nonempty JSON list of [start, end, label]")
    intervals = []
    for item in payload:
        if not isinstance(item, list) or len(item) != 3:
            raise CliError(f"schedule entry {item!r} is not [start, end, label]")
        start, end, label = item
        if isinstance(start, bool) or isinstance(end, bool) or \
                not isinstance(start, int) or not isinstance(end, int):
            raise CliError(f"schedule bounds must be integers: {item!r}")
        if not isinstance(label, str):
            raise CliError(f"schedule label must be a string: {item!r}")
        if start < 0 or end <= start:
            raise CliError(f"invalid schedule interval [{start}, {end})")
        intervals.append((start, end, label))
    intervals.sort(key=lambda iv: (iv[0], iv[1]))
    return intervals


def _check_coverage(intervals: list, T: int) -> None:
    cursor = 0
    for start, end, _label in intervals:
        if start > cursor:
            raise CliError(
                f"schedule gap: time points [{cursor}, {start}) are not covered")
        if start < cursor:
            raise CliError(f"schedule intervals overlap at time point {start}")
        cursor = end
    if cursor < T:
        raise CliError(
            f"schedule gap: time points [{cursor}, {T}) are not covered")
    if cursor > T:
        raise CliError(f"schedule covers time points up to {cursor}, but the "
                       f"series has only T={T}")


def cmd_analyze(args) -> int:
    outdir = _outdir(args)
    if args.from_manifest:
        cfg = _load_manifest(args.from_manifest, "analyze")
    else:
        if not args.subjects:
            raise CliError("--subjects is required")
        if not args.schedule:
            raise CliError("--schedule is required")
        cfg = {
            "subjects": list(args.subjects),
            "schedule": args.schedule,
            "on_label": args.on_label,
            "off_label": args.off_label,
            "alpha": args.alpha,
            "tolerance": args.tolerance,
        }
    return _run_analyze(cfg, outdir)


def _run_analyze(cfg: dict, outdir: str) -> int:
    intervals = _load_schedule(cfg["schedule"])
    sequences = []
    for path in cfg["subjects"]:
        if not os.path.exists(path):
            raise CliError(f"subject file not found: {path}")
        try:
            sequences.append(read_precision_sequence(path))
        except (ValueError, KeyError) as exc:
            raise CliError(f"failed to read {path}: {exc}")
    first = sequences[0]
    for path, seq in zip(cfg["subjects"], sequences):
        if (seq.T, seq.p) != (first.T, first.p):
            raise CliError(
                f"subject {path} has shape (T={seq.T}, p={seq.p}); expected "
                f"(T={first.T}, p={first.p}) as in {cfg['subjects'][0]}")
    _check_coverage(intervals, first.T)

    on_times = [t for s, e, lab in intervals if lab == cfg["on_label"]
                for t in range(s, e)]
    off_times = [t for s, e, lab in intervals if lab == cfg["off_label"]
                 for t in range(s, e)]
    for label, times in ((cfg["on_label"], on_times),
                         (cfg["off_label"], off_times)):
        if not times:
            raise CliError(f"schedule has no intervals labeled {label!r}")

    on_groups, off_groups = [], []
    for seq in sequences:
        graphs = precision_to_graphs(seq, cfg["tolerance"])
        on_groups.append([graphs[t] for t in on_times])
        off_groups.append([graphs[t] for t in off_times])
    change = betweenness_change(on_groups, off_groups, first.p)
    nodes = change.nodes_json(cfg["alpha"])
    _dump_json({
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "alpha": cfg["alpha"],
        "on_label": cfg["on_label"],
        "off_label": cfg["off_label"],
        "n_subjects": len(sequences),
        "n_on_times": len(on_times),
        "n_off_times": len(off_times),
        "nodes": nodes,
    }, os.path.join(outdir, "analysis.json"))
    _write_manifest(outdir, "analyze", cfg, {
        "n_subjects": len(sequences),
        "significant_nodes": [n["id"] for n in nodes if n["significant"]],
    })
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smoothgl",
                     description="Time-varying sparse precision estimation "
                                 "with temporal smoothing.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", default=".",
                        help="output directory (created if missing)")
    common.add_argument("--from-manifest", default=None, metavar="PATH",
                        help="replay the configuration recorded in a manifest")

    est = sub.add_parser("estimate", parents=[common],
                         help="estimate time-indexed precision matrices "
                              "from a CSV time series")
    est.add_argument("--input", help="input CSV, one row per time point")
    est.add_argument("--header", action="store_true",
                     help="treat the first CSV row as variable names")
    est.add_argument("--kernel", choices=("gaussian", "uniform"),
                     default="gaussian")
    est.add_argument("--h", type=float, default=None, help="kernel width")
    est.add_argument("--lambda1", type=float, default=None,
                     help="sparsity penalty")
    est.add_argument("--lambda2", type=float, default=None,
                     help="temporal fusion penalty")
    est.add_argument("--auto-tune", action="store_true",
                     help="choose h by leave-one-out CV and penalties by AIC")
    est.add_argument("--h-grid", default=None,
                     help="comma-separated h candidates for --auto-tune")
    est.add_argument("--lambda-grid", default=None,
                     help="comma-separated penalty candidates for --auto-tune")
    est.add_argument("--gamma", type=float, default=1.0)
    est.add_argument("--eps1", type=float, default=DEFAULT_EPS)
    est.add_argument("--eps2", type=float, default=DEFAULT_EPS)
    est.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    est.add_argument("--no-penalize-diagonal", action="store_true")
    est.add_argument("--tolerance", type=float, default=EDGE_TOLERANCE,
                     help="absolute threshold for reporting an edge")
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser("simulate", parents=[common],
                         help="generate a synthetic series with known "
                              "network structure")
    sim.add_argument("--scenario",
                     help=f"preset ({', '.join(PRESET_NAMES)}) or a JSON "
                          "scenario file")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--seglen", type=int, default=None,
                     help="segment length for sim3a/sim3b")
    sim.add_argument("--header", action="store_true",
                     help="write a header row in data.csv")
    sim.set_defaults(func=cmd_simulate)

    ben = sub.add_parser("benchmark", parents=[common],
                         help="replicate method comparisons on a scenario")
    ben.add_argument("--scenario",
                     help=f"preset ({', '.join(PRESET_NAMES)}) or a JSON "
                          "scenario file")
    ben.add_argument("--reps", type=int, default=None)
    ben.add_argument("--methods", default=",".join(METHOD_NAMES),
                     help="comma-separated subset of "
                          f"{{{', '.join(METHOD_NAMES)}}}")
    ben.add_argument("--seed", type=int, default=None)
    ben.add_argument("--seglen", type=int, default=None)
    ben.add_argument("--jobs", type=int, default=None,
                     help="parallel workers (default: logical cores)")
    ben.add_argument("--h-grid", default=None)
    ben.add_argument("--lambda-grid", default=None)
    ben.add_argument("--tolerance", type=float, default=EDGE_TOLERANCE)
    ben.set_defaults(func=cmd_benchmark)

    ana = sub.add_parser("analyze", parents=[common],
                         help="compare betweenness centrality between "
                              "task-on and task-off time points")
    ana.add_argument("--subjects", nargs="+",
                     help="per-subject precisions.json files")
    ana.add_argument("--schedule",
                     help="JSON list of [start, end, label] half-open "
                          "intervals covering all time points")
    ana.add_argument("--on-label", default="on")
    ana.add_argument("--off-label", default="off")
    ana.add_argument("--alpha", type=float, default=0.05)
    ana.add_argument("--tolerance", type=float, default=EDGE_TOLERANCE)
    ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
