"""Command-line interface: ``fracplanar <subcommand> ...``.

Exit codes: 0 success (``stability``: asymptotically stable), 1 invalid input
or failure, 2 not asymptotically stable, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import basin_estimate, decay_exponent, ml_stability_check, weighted_norm
from .charfun import trig_consts
from .core import PaperExample, PlanarSystem, Status, Trajectory, load_system_spec, paper_example
from .exceptions import FracPlanarError
from .solver import StepperConfig, solve_nonlinear_picard, solve_pi_trapezoidal
from .specfun import SpecFunKind, get_evaluator, linear_voc_solution, uniform_grid
from .stability import stability_verdict

__all__ = ["main", "build_parser", "reproduce_example"]

EXIT_OK, EXIT_ERROR, EXIT_UNSTABLE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
_FMT = "%.17g"


class CliError(Exception):
    pass


def _threads() -> int:
    try:
        n = int(os.environ.get("FRACPLANAR_THREADS", "0"))
    except ValueError:
        n = 0
    cpu = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
    return max(1, min(n, cpu)) if n > 0 else cpu


def _load(args) -> tuple[PlanarSystem, PaperExample | None]:
    if getattr(args, "example", None) is not None:
        ex = paper_example(args.example)
        return ex.system, ex
    if not args.spec:
        raise CliError("a system spec path or --example N is required")
    return load_system_spec(Path(args.spec)), None


def _parse_x0(text):
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"--x0 expects 'a,b', got {text!r}") from None
    if len(parts) != 2:
        raise CliError(f"--x0 expects two comma-separated numbers, got {text!r}")
    return np.array(parts)


def _parse_times(text):
    """``a..b`` gives the powers of two in [a, b]; otherwise a comma-separated list."""
    try:
        if ".." in text:
            lo, hi = (float(v) for v in text.split(".."))
            if not 0 < lo <= hi:
                raise ValueError
            k = np.arange(np.ceil(np.log2(lo) - 1e-12), np.floor(np.log2(hi) + 1e-12) + 1)
            t = 2.0 ** k
        else:
            t = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise CliError(f"--t expects 'a..b' or a comma-separated list, got {text!r}") from None
    if len(t) == 0 or np.any(t <= 0):
        raise CliError("times must be positive")
    return t


def _write_csv(path, header, columns):
    data = np.column_stack(columns)
    target = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        target.write(",".join(header) + "\n")
        for row in data:
            target.write(",".join(_FMT % v for v in row) + "\n")
    finally:
        if target is not sys.stdout:
            target.close()


# ---------------------------------------------------------------------------

def cmd_stability(args) -> int:
    system, _ = _load(args)
    verdict = stability_verdict(system)
    info = verdict.to_dict()
    try:
        tc = trig_consts(system.orders)
        info["constants"] = tc._asdict()
    except FracPlanarError:
        info["constants"] = None
    if args.json:
        print(json.dumps(info, indent=2, default=float))
    else:
        print(f"verdict: {verdict.status.value}")
        print(f"criteria hit: {', '.join(verdict.criteria_hit) or 'none'}")
        print(f"winding count: {verdict.winding_count}")
        print(f"imaginary axis zero-free: {verdict.imaginary_zero_free}")
        if info["constants"]:
            print("constants: " + ", ".join(f"{k}={v:.10g}" for k, v in info["constants"].items()))
        if verdict.diagnostics:
            print(f"diagnostics: {verdict.diagnostics}")
    return {Status.ASYMPTOTICALLY_STABLE: EXIT_OK,
            Status.NOT_ASYMPTOTICALLY_STABLE: EXIT_UNSTABLE}.get(verdict.status, EXIT_INCONCLUSIVE)


def _solve(system, x0, method, h, t_end) -> Trajectory:
    if method == "pi":
        return solve_pi_trapezoidal(system, x0, StepperConfig(t_end, h=h))
    grid = uniform_grid(h, t_end)
    if method == "voc":
        if not system.is_linear:
            raise CliError("--method voc needs a linear system")
        return linear_voc_solution(system, x0, grid)
    return solve_nonlinear_picard(system, x0, grid)


def cmd_solve(args) -> int:
    system, ex = _load(args)
    if args.x0 is not None:
        x0 = _parse_x0(args.x0)
    elif ex is not None:
        x0 = np.array(ex.x0)
    else:
        raise CliError("--x0 is required for a spec file")
    traj = _solve(system, x0, args.method, args.h, args.t_end)
    _write_csv(args.out, ["t", "x1", "x2"], [traj.t, traj.samples[:, 0], traj.samples[:, 1]])
    return EXIT_OK


def cmd_specfun(args) -> int:
    system, _ = _load(args)
    kind = SpecFunKind(args.family, args.index)
    t = _parse_times(args.t)
    values = get_evaluator(system.triple, system.orders).evaluate(kind, t)
    target = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        target.write("t,value,family,index\n")
        for ti, v in zip(t, values):
            target.write(f"{_FMT % ti},{_FMT % v},{args.family},{args.index}\n")
    finally:
        if target is not sys.stdout:
            target.close()
    return EXIT_OK


def _read_trajectory(path) -> Trajectory:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read trajectory CSV {path}: {exc}") from None
    if data.shape[1] < 3 or len(data) < 2:
        raise CliError("trajectory CSV needs columns t,x1,x2 and at least two rows")
    t = data[:, 0]
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-6, atol=1e-12):
        raise CliError("trajectory CSV must use a uniform time grid")
    return Trajectory(float(t[0]), float(h), data[:, 1:3], "external")


def cmd_analyze(args) -> int:
    traj = _read_trajectory(args.csv)
    window = tuple(float(v) for v in args.window.split(","))
    report = decay_exponent(traj, args.nu, window)
    delta = None
    if args.spec or args.example is not None:
        system, _ = _load(args)
        if not system.is_linear:
            delta = basin_estimate(system, args.epsilon)
    out = {"fitted_mu": report.fitted_mu, "tail_sup": report.tail_sup,
           "verdict": report.verdict.value, "weighted_norm": weighted_norm(traj, args.nu),
           "delta": delta}
    print(json.dumps(out, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------

def _runs(n: int):
    ex = paper_example(n)
    yield f"example_{n}", ex, ex.x0
    for extra in ex.initial_conditions[1:]:
        tag = "_".join(f"{v:g}" for v in extra)
        yield f"example_{n}_x0_{tag}", ex, tuple(extra)


def reproduce_example(n: int, out_dir, t_end: float = 100.0, h: float = 1.0 / 200) -> list[dict]:
    """Solve example ``n`` with the stepping method and write CSV and JSON files.

    Returns one report per initial condition.
    """
    out_dir = Path(out_dir)
    reports = []
    for name, ex, x0 in _runs(n):
        target = out_dir / name
        target.mkdir(parents=True, exist_ok=True)
        system = ex.system
        traj = solve_pi_trapezoidal(system, x0, StepperConfig(t_end, h=h))
        t, x = traj.t, traj.samples
        _write_csv(target / "solution.csv", ["t", "x1", "x2"], [t, x[:, 0], x[:, 1]])
        scale = t ** ex.nu
        _write_csv(target / "scaled.csv", ["t", "s1", "s2"],
                   [t, scale * x[:, 0], scale * x[:, 1]])
        window = (t_end / 2, t_end)
        decay = decay_exponent(traj, ex.nu, window)
        verdict = stability_verdict(system)
        report = {"example": n, "x0": list(x0), "nu": ex.nu, "h": h, "t_end": t_end,
                  "lemma": ex.lemma, "stability": verdict.to_dict(),
                  "verdict": decay.verdict.value, "decay": decay.to_dict(),
                  "weighted_norm": weighted_norm(traj, ex.nu)}
        if not system.is_linear:
            report["ml_stable"] = ml_stability_check(traj, ex.nu, 10.0)
        with open(target / "report.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")
        reports.append(report)
    return reports


def cmd_reproduce(args) -> int:
    if args.example == "all":
        ids = list(range(1, 9))
    else:
        try:
            ids = [int(args.example)]
        except ValueError:
            raise CliError(f"example must be 1..8 or 'all', got {args.example!r}") from None
        if ids[0] not in range(1, 9):
            raise CliError(f"example must be 1..8, got {ids[0]}")
    workers = min(_threads(), len(ids))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(reproduce_example, ids, [args.out] * len(ids),
                                    [args.t_end] * len(ids)))
    else:
        results = [reproduce_example(i, args.out, args.t_end) for i in ids]
    for reps in results:
        for r in reps:
            print(f"example {r['example']} x0={tuple(r['x0'])}: {r['verdict']} "
                  f"(fitted mu {r['decay']['fitted_mu']:.4g}, nu {r['nu']:.4g})")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracplanar",
                                description="Stability and asymptotics of planar "
                                            "multi-order fractional systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_system(sp, required=True):
        sp.add_argument("spec", nargs="?", help="system spec JSON file")
        sp.add_argument("--example", type=int, choices=range(1, 9),
                        help="use a built-in example system instead of a spec file")

    sp = sub.add_parser("stability", help="stability verdict for a system")
    add_system(sp)
    sp.add_argument("--json", action="store_true", help="machine-readable output")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("solve", help="solve a system and print t,x1,x2 as CSV")
    add_system(sp)
    sp.add_argument("--method", choices=("pi", "voc", "picard"), default="pi")
    sp.add_argument("--h", type=float, default=1.0 / 200)
    sp.add_argument("--t-end", type=float, default=10.0)
    sp.add_argument("--x0", help="initial value 'a,b'")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("specfun", help="tabulate an R or S kernel")
    add_system(sp)
    sp.add_argument("--family", choices=("R", "S"), required=True)
    sp.add_argument("--index", choices=("0", "a1", "a2", "l", "alpha1", "alpha2"), required=True)
    sp.add_argument("--t", default="1..128", help="'a..b' (powers of two) or a list")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_specfun)

    sp = sub.add_parser("analyze", help="decay analysis of a trajectory CSV")
    sp.add_argument("csv", help="CSV with columns t,x1,x2")
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--window", default="50,100")
    sp.add_argument("--spec", help="system spec, enables the basin estimate")
    sp.add_argument("--example", type=int, choices=range(1, 9))
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("reproduce", help="reproduce a built-in example")
    sp.add_argument("example", help="1..8 or 'all'")
    sp.add_argument("--out", default="reproduce_out")
    sp.add_argument("--t-end", type=float, default=100.0)
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (CliError, FracPlanarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
