"""Command-line front end: ``mems-pullin <subcommand> [flags]``.

Subcommands
-----------
pullin    fold location and pull-in load for one or more alpha
diagram   branch sweep in t = 1/s as CSV (t,s,a,b,sigma,lambda)
solve     all steady states at a given load, with sampled profiles (JSON)
simulate  time-dependent run; CSV time series plus JSON summary
verify    full verification battery; exit 0 iff every check passes

Exit status: 0 success, 1 solver or I/O failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .errors import MemsError

FLOAT_FMT = ".17g"
FAULT_DELTA = 1e-3

log = logging.getLogger("mems_pullin")


def fmt(x) -> str:
    return format(float(x), FLOAT_FMT)


def write_csv(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])


@contextlib.contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        with p.open("w", encoding="utf-8", newline="") as fh:
            yield fh


def _dump_json(obj, path=None, stream=None):
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is not None and str(path) != "-":
        with _open_out(path) as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


# ---------------------------------------------------------------------------
# subcommands

def run_pullin(args) -> int:
    from .pull_in import find_s_star

    alphas = args.alpha_list if args.alpha_list is not None else [args.alpha]
    sols = [find_s_star(a, args.tol) for a in alphas]
    if args.format == "json":
        payload = [s.as_dict() for s in sols]
        _dump_json(payload if args.alpha_list is not None else payload[0], args.out)
    else:
        with _open_out(args.out) as fh:
            write_csv(fh, ["alpha", "s_star", "lambda_star", "p_residual", "iterations"],
                      [(s.alpha, s.s_star, s.lambda_star, s.p_residual, s.iterations)
                       for s in sols])
    return 0


def _alpha_tag(alpha: float) -> str:
    return format(alpha, "g")


def run_diagram(args) -> int:
    from .pull_in import DiagramTable, diagram_sweep

    if args.alpha_list is None:
        tab = diagram_sweep(args.alpha, args.t_min, args.t_max, args.n)
        with _open_out(args.out) as fh:
            write_csv(fh, DiagramTable.COLUMNS, tab.rows())
        return 0
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for alpha in args.alpha_list:
        tab = diagram_sweep(alpha, args.t_min, args.t_max, args.n)
        path = out_dir / f"diagram_alpha_{_alpha_tag(alpha)}.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            write_csv(fh, DiagramTable.COLUMNS, tab.rows())
        log.info("wrote %s", path)
    return 0


def run_solve(args) -> int:
    from .branch_core import reconstruct_profile
    from .pull_in import solve_for_lambda

    res = solve_for_lambda(args.lam, args.alpha, args.tol)
    roots, profiles = [], []
    for pt in res.points:
        roots.append({"s": pt.s, "a": pt.a, "b": pt.b, "sigma": pt.sigma})
        prof = reconstruct_profile(pt, args.n)
        profiles.append({"xs": prof.xs.tolist(), "ws": prof.ws.tolist(),
                         "us": prof.us.tolist()})
    _dump_json({"alpha": res.alpha, "lambda": res.lam,
                "lambda_star": res.pull_in.lambda_star,
                "classification": res.classification,
                "roots": roots, "profiles": profiles}, args.out)
    return 0


def run_simulate(args) -> int:
    from .dynamics import simulate

    out = simulate(args.lam, args.alpha, args.nx, args.t_end, record_dt=args.record_dt)
    with _open_out(args.out) as fh:
        write_csv(fh, ["t", "max_u", "u_mid", "nonlocal_integral"],
                  (tuple(float(v) for v in row) for row in out.history))
    _dump_json(out.summary(), args.summary, stream=sys.stderr)
    return 0


def run_verify(args) -> int:
    from .branch_core import perturbed_A
    from .verify import run_checks

    ctx = perturbed_A(FAULT_DELTA) if args.inject_fault else contextlib.nullcontext()
    with ctx:
        results = run_checks(include_dynamics=not args.skip_dynamics)
    all_ok = all(r.passed for r in results)
    if args.json:
        _dump_json({"passed": all_ok, "fault_injected": bool(args.inject_fault),
                    "checks": [r.as_dict() for r in results]}, args.out)
    else:
        with _open_out(args.out) as fh:
            width = max(len(r.name) for r in results)
            for r in results:
                fh.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  "
                         f"{r.seconds:7.2f}s  {r.detail}\n")
            fh.write(f"{'ALL PASS' if all_ok else 'FAILED'}\n")
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument handling

def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mems-pullin", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=0.0, help="capacitance ratio (>= 0)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    sp = sub.add_parser("pullin", parents=[common], help="pull-in load lambda*(alpha)")
    sp.add_argument("--alpha-list", type=_float_list, default=None, metavar="A1,A2,...")
    sp.add_argument("--tol", type=float, default=1e-12, help="relative bracket width")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=run_pullin)

    sp = sub.add_parser("diagram", parents=[common], help="branch sweep as CSV")
    sp.add_argument("--alpha-list", type=_float_list, default=None, metavar="A1,A2,...",
                    help="one CSV per alpha, written to --out-dir")
    sp.add_argument("--out-dir", default=None)
    sp.add_argument("--t-min", type=float, default=0.001)
    sp.add_argument("--t-max", type=float, default=0.999)
    sp.add_argument("--n", type=int, default=1000, help="number of rows")
    sp.set_defaults(func=run_diagram)

    sp = sub.add_parser("solve", parents=[common], help="steady states at fixed lambda (JSON)")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--n", type=int, default=201, help="profile grid size (odd)")
    sp.set_defaults(func=run_solve)

    sp = sub.add_parser("simulate", parents=[common], help="time-dependent run")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--nx", type=int, default=401, help="grid nodes (odd, >= 51)")
    sp.add_argument("--t-end", type=float, default=100.0)
    sp.add_argument("--record-dt", type=float, default=None,
                    help="time between CSV rows (default t_end/1000)")
    sp.add_argument("--summary", default=None, help="JSON summary file (default: stderr)")
    sp.set_defaults(func=run_simulate)

    sp = sub.add_parser("verify", help="run the verification battery")
    sp.add_argument("--json", action="store_true", help="machine-readable results")
    sp.add_argument("--out", default=None)
    sp.add_argument("--skip-dynamics", action="store_true",
                    help="leave out the time-dependent runs (about 20 s)")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=run_verify)
    return p


def _finite(x):
    return x is not None and math.isfinite(x)


def validate(parser, args):
    sub = args.subcommand
    if hasattr(args, "alpha") and not (_finite(args.alpha) and args.alpha >= 0):
        parser.error(f"--alpha must be finite and >= 0, got {args.alpha}")
    for a in getattr(args, "alpha_list", None) or []:
        if not (_finite(a) and a >= 0):
            parser.error(f"--alpha-list entries must be finite and >= 0, got {a}")
    if getattr(args, "alpha_list", None) is not None and not args.alpha_list:
        parser.error("--alpha-list is empty")
    if hasattr(args, "tol") and not (_finite(args.tol) and args.tol > 0):
        parser.error(f"--tol must be positive, got {args.tol}")
    if hasattr(args, "lam") and not (_finite(args.lam) and args.lam > 0):
        parser.error(f"--lambda must be finite and > 0, got {args.lam}")
    if sub == "diagram":
        if not (_finite(args.t_min) and _finite(args.t_max) and 0 < args.t_min < args.t_max < 1):
            parser.error("need 0 < --t-min < --t-max < 1")
        if args.n < 2:
            parser.error("--n must be >= 2")
        if args.alpha_list is not None and not args.out_dir:
            parser.error("--alpha-list needs --out-dir")
    if sub == "solve" and (args.n < 3 or args.n % 2 == 0):
        parser.error("--n must be odd and >= 3")
    if sub == "simulate":
        if args.nx < 51 or args.nx % 2 == 0:
            parser.error("--nx must be odd and >= 51")
        if not (_finite(args.t_end) and args.t_end > 0):
            parser.error("--t-end must be positive")
        if args.record_dt is not None and not (_finite(args.record_dt) and args.record_dt > 0):
            parser.error("--record-dt must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    validate(parser, args)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MemsError as exc:
        print(f"mems-pullin {args.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"mems-pullin {args.subcommand}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
