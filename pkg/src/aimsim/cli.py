"""Command-line interface: ``aimsim {solve,scan,sweep,bifurcation}``.

Settings are resolved in three layers: built-in defaults, then a flat
``key = value`` config file (``--config``), then command-line flags.
Results go to stdout or ``--out``; progress and errors go to stderr.
Exit codes: 0 success, 1 I/O or parse failure, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .dynamics import DEFAULT_GAMMA, DEFAULT_ITERATIONS, FeedbackMode, SimParams, run, trajectory
from .metrics import aoo
from .problem import (ParseError, attach_optimum, benchmark_names, energy_to_cut, load_benchmark,
                      maxcut_to_ising, read_maxcut, read_optima, cut_value)
from .scan import (DEFAULT_GAMMA_VALUES, DEFAULT_H_VALUES, DEFAULT_ITERATION_VALUES, GridSpec,
                   alpha_range, bifurcation_scan, grid_scan, h_sweep, noise_sweep,
                   runtime_sweep, sweep_csv)

EXIT_IO = 1
EXIT_USAGE = 2

SWEEPS = {
    "h": (h_sweep, DEFAULT_H_VALUES, float),
    "noise": (noise_sweep, DEFAULT_GAMMA_VALUES, float),
    "runtime": (runtime_sweep, DEFAULT_ITERATION_VALUES, int),
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind, self.code = kind, code


def _usage(message):
    return CliError("invalid-argument", message, EXIT_USAGE)


# ---------------------------------------------------------------------------
# argument parsing


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys may use ``-``
    or ``_``."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("config line must be 'key = value'", lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _common(p: argparse.ArgumentParser, *, alpha=0.9, beta=0.1, gamma=DEFAULT_GAMMA, h=1.0,
            iterations=DEFAULT_ITERATIONS, problem=True):
    if problem:
        p.add_argument("--problem", help="instance file (n m / i j w) or shipped benchmark name")
        p.add_argument("--optima", help="best-known cut sidecar ('name value' per line); "
                       "shipped benchmarks default to the bundled table")
    p.add_argument("--alpha", type=float, default=alpha, help="gain (default: %(default)s)")
    p.add_argument("--beta", type=float, default=beta, help="coupling strength (default: %(default)s)")
    p.add_argument("--gamma", type=float, default=gamma, help="noise amplitude (default: %(default)s)")
    p.add_argument("--h", type=float, default=h, help="Euler step in (0, 1] (default: %(default)s)")
    p.add_argument("--iterations", type=int, default=iterations,
                   help="iterations per run (default: %(default)s)")
    p.add_argument("--feedback", choices=[m.value for m in FeedbackMode],
                   default=FeedbackMode.AMPLITUDE.value, help="coupling feedback (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: %(default)s)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--quiet", action="store_true", help="suppress progress on stderr")


def _grid(p: argparse.ArgumentParser):
    g = p.add_argument_group("grid")
    g.add_argument("--alpha-min", type=float, default=0.5, help="(default: %(default)s)")
    g.add_argument("--alpha-max", type=float, default=1.0, help="(default: %(default)s)")
    g.add_argument("--beta-min", type=float, default=0.0, help="(default: %(default)s)")
    g.add_argument("--beta-max", type=float, default=0.5, help="(default: %(default)s)")
    g.add_argument("--alpha-steps", type=int, default=21, help="(default: %(default)s)")
    g.add_argument("--beta-steps", type=int, default=21, help="(default: %(default)s)")
    g.add_argument("--runs", type=int, default=250, help="runs per cell (default: %(default)s)")
    g.add_argument("--workers", type=int, default=1,
                   help="worker processes; output is identical for any value (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aimsim", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"aimsim {__version__}")
    parser.add_argument("--config", help="key = value file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="single run; report best energy and cut")
    _common(p)
    p.add_argument("--trace", help="write per-iteration energy and amplitudes to this CSV")

    p = sub.add_parser("scan", help="(alpha, beta) grid scan of the TSR; prints the AOO")
    _common(p)
    _grid(p)

    p = sub.add_parser("sweep", help="AOO as a function of h, noise or runtime")
    p.add_argument("kind", choices=sorted(SWEEPS), help="swept quantity")
    p.add_argument("--values", help="comma-separated values (default: the standard set per kind)")
    _common(p)
    _grid(p)

    p = sub.add_parser("bifurcation", help="uncoupled-spin gain scan; detects the pitchfork")
    _common(p, beta=0.0, gamma=0.001, h=0.01, iterations=500, problem=False)
    p.add_argument("--alpha-start", type=float, default=0.5, help="(default: %(default)s)")
    p.add_argument("--alpha-stop", type=float, default=1.5, help="(default: %(default)s)")
    p.add_argument("--alpha-step", type=float, default=0.05, help="(default: %(default)s)")
    p.add_argument("--samples", type=int, default=80, help="spins per gain (default: %(default)s)")
    p.add_argument("--floor", type=float, default=None,
                   help="detection floor on the median |x| (default: 10 * gamma)")
    p.add_argument("--init-amplitude", type=float, default=None,
                   help="starting |x| of every spin (default: the detection floor)")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            config = read_config(known.config)
        except (OSError, ParseError) as exc:
            raise CliError("io", f"cannot read config {known.config}: {exc}", EXIT_IO) from exc
        # find the chosen sub-command and push the file values in as its defaults
        args0 = parser.parse_args(argv)
        subparser = parser._subparsers._group_actions[0].choices[args0.command]
        dests = {a.dest: a for a in subparser._actions}
        coerced = {}
        for key, raw in config.items():
            if key not in dests or key in ("help", "kind"):
                raise _usage(f"unknown config key {key!r} for '{args0.command}'")
            action = dests[key]
            if isinstance(action, argparse._StoreTrueAction):
                coerced[key] = raw.lower() in ("1", "true", "yes", "on")
                continue
            try:
                coerced[key] = action.type(raw) if action.type else raw
            except ValueError:
                raise _usage(f"config key {key!r}: invalid value {raw!r}") from None
            if action.choices is not None and coerced[key] not in action.choices:
                raise _usage(f"config key {key!r}: {raw!r} not one of {sorted(action.choices)}")
        subparser.set_defaults(**coerced)
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# helpers


def _load_problem(args):
    """``(instance, ising problem with target if known)``."""
    if not args.problem:
        raise _usage("--problem is required")
    path = Path(args.problem)
    try:
        if not path.exists() and args.problem in benchmark_names():
            inst, problem = load_benchmark(args.problem)
        else:
            inst = read_maxcut(path)
            problem = maxcut_to_ising(inst)
        if args.optima:
            problem = attach_optimum(inst, read_optima(args.optima))
    except OSError as exc:
        raise CliError("io", f"{exc.strerror or exc}: {exc.filename or args.problem}", EXIT_IO) from exc
    except ParseError as exc:
        raise CliError("parse", f"{args.problem}: {exc}", EXIT_IO) from exc
    return inst, problem


def _params(args) -> SimParams:
    try:
        return SimParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma, h=args.h,
                         iterations=args.iterations, feedback_mode=args.feedback, seed=args.seed)
    except ValueError as exc:
        raise _usage(str(exc)) from exc


def _grid_spec(args) -> GridSpec:
    if args.workers < 1:
        raise _usage("--workers must be at least 1")
    try:
        return GridSpec(args.alpha_min, args.alpha_max, args.beta_min, args.beta_max,
                        args.alpha_steps, args.beta_steps, args.runs, _params(args))
    except ValueError as exc:
        raise _usage(str(exc)) from exc


def _require_target(problem):
    if problem.known_optimum is None:
        raise _usage(f"no best-known cut for {problem.name!r}; pass --optima")


def _progress(args, label):
    if args.quiet:
        return None

    def report(done, total):
        if done == total or done % max(1, total // 20) == 0:
            print(f"{label}: {done}/{total} cells", file=sys.stderr, flush=True)
    return report


def _emit(args, text: str):
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError("io", f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from exc
    else:
        sys.stdout.write(text)


def _summary(args, line: str):
    # stdout is reserved for the CSV when no --out is given
    print(line, file=sys.stdout if args.out else sys.stderr)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    inst, problem = _load_problem(args)
    params = _params(args)
    has_target = problem.known_optimum is not None
    record = run(problem, params, evaluate_success=has_target)
    best_cut = energy_to_cut(inst, record.best_energy)
    print(f"problem: {problem.name or args.problem}")
    print(f"best_energy: {record.best_energy:g}")
    print(f"best_cut: {best_cut:g}")
    if has_target:
        print(f"target_energy: {problem.known_optimum:g}")
        print(f"success: {str(record.success).lower()}")
        first = record.first_success_iteration
        print(f"first_success_iteration: {first if first is not None else 'none'}")
    else:
        print("success: n/a (no best-known cut)")
    print(f"final_cut: {cut_value(inst, record.final_config):g}")
    if args.trace:
        energies, amplitudes = trajectory(problem, params)
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["iteration", "energy", "cut"] + [f"x{i}" for i in range(problem.n)])
        for k, (e, xs) in enumerate(zip(energies, amplitudes), start=1):
            w.writerow([k, repr(float(e)), repr(energy_to_cut(inst, e))]
                       + [repr(float(x)) for x in xs])
        try:
            with open(args.trace, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise CliError("io", f"cannot write {args.trace}: {exc.strerror}", EXIT_IO) from exc
    return 0


def cmd_scan(args) -> int:
    _, problem = _load_problem(args)
    grid = _grid_spec(args)
    _require_target(problem)
    result = grid_scan(problem, grid, args.seed, args.workers, _progress(args, "scan"))
    _emit(args, result.to_csv())
    a = aoo(result)
    _summary(args, f"AOO: {a.percent:.2f}% ({a.nonzero_cells}/{a.total_cells} cells) "
                   f"alpha=[{grid.alpha_min}, {grid.alpha_max}] beta=[{grid.beta_min}, {grid.beta_max}] "
                   f"h={grid.base_params.h}")
    return 0


def cmd_sweep(args) -> int:
    fn, defaults, kind_type = SWEEPS[args.kind]
    if args.values is None:
        values = list(defaults)
    else:
        try:
            values = [kind_type(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise _usage(f"--values: cannot parse {args.values!r}") from None
    if not values:
        raise _usage("--values is empty")
    _, problem = _load_problem(args)
    grid = _grid_spec(args)
    _require_target(problem)
    try:
        rows = fn(problem, grid, values, args.seed, args.workers, _progress(args, f"sweep {args.kind}"))
    except ValueError as exc:
        raise _usage(str(exc)) from exc
    _emit(args, sweep_csv(rows))
    for r in rows:
        _summary(args, f"{r.param}={r.value}: AOO {r.aoo.percent:.2f}%")
    return 0


def cmd_bifurcation(args) -> int:
    if args.beta != 0:
        raise _usage("bifurcation scans are uncoupled; --beta must be 0")
    params = _params(args)
    if args.samples < 1:
        raise _usage("--samples must be at least 1")
    try:
        alphas = alpha_range(args.alpha_start, args.alpha_stop, args.alpha_step)
    except ValueError as exc:
        raise _usage(str(exc)) from exc
    result = bifurcation_scan(alphas, args.samples, params, args.floor, args.init_amplitude)
    _emit(args, result.to_csv())
    thr = result.detected_threshold
    _summary(args, "detected_threshold: " + ("not detected" if thr is None else f"{thr:g}"))
    return 0


COMMANDS = {"solve": cmd_solve, "scan": cmd_scan, "sweep": cmd_sweep, "bifurcation": cmd_bifurcation}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(json.dumps({"error": exc.kind, "message": str(exc)}), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
