"""Command-line entry point.

Exit codes: 0 success (or a passing verdict), 1 failing verdict, 2 usage or
input error, 3 size cap or other resource limit.  Errors go to stderr as a
JSON object ``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .errors import SizeCapExceeded, SumsetLabError
from .scalars import MIN_PRECISION, format_scalar, parse_scalar, to_mpf
from .sets import (
    EXACT, FLOAT, SignedSumSpec, consecutive_differences, convexity_order, default_size_cap,
    read_set, sumset,
)

MIN_CAP = 10**4
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Everything that determines a run; recorded verbatim in the report."""

    subcommand: str
    inputs: list = field(default_factory=list)
    functions: list = field(default_factory=list)
    k: int | None = None
    n: int | None = None
    precision_bits: int = 128
    tolerance: str | None = None
    cap: int = 0
    seed: int = 0
    out: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise UsageError(f"--precision must be at least {MIN_PRECISION}")
        if self.cap < MIN_CAP:
            raise UsageError(f"--cap must be at least {MIN_CAP}")

    def to_dict(self) -> dict:
        return asdict(self)


# -- argument parsing ------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--precision", type=int, default=128, metavar="BITS",
                   help="working precision for float mode (default 128)")
    p.add_argument("--tol", default=None, help="dedup / comparison tolerance")
    p.add_argument("--cap", type=int, default=None,
                   help="size cap in enumerated tuples (default from SUMSETLAB_SIZE_CAP or 1e8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report path; '-' writes JSON to stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv writes plot data (growth only)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="sumsetlab", description="Sumsets of convex sets and their growth.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sumset", parents=[common], help="cardinality of sA - tB")
    p.add_argument("--set", required=True, dest="set_path")
    p.add_argument("--set2", default=None, help="B (defaults to A)")
    p.add_argument("--spec", default="2,1", help="s,t (default 2,1)")
    p.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    p.add_argument("--elements", action="store_true", help="list elements in the report")

    p = sub.add_parser("convexity", parents=[common], help="convexity order of a set")
    p.add_argument("--set", required=True, dest="set_path")
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--orientation", choices=("convex", "concave"), default="convex")

    p = sub.add_parser("independence", parents=[common], help="linear independence tests")
    p.add_argument("--function", "-f", action="append", default=[], dest="functions",
                   help="family member (repeatable)")
    p.add_argument("-k", type=int, default=0, help="test the k-th derivatives")
    p.add_argument("--interval", default="-1,1", help="lo,hi")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--shifts", default=None,
                   help="δ_1,...,δ_n: test {Δ_δ f} for the single --function f")
    p.add_argument("--polynomial", default=None,
                   help="c_0,...,c_m: exact test of {Δ_δ f'} (needs --shifts)")

    p = sub.add_parser("squeeze", parents=[common], help="witnessed squeezed elements")
    p.add_argument("--set", required=True, dest="set_path")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--witnesses", action="store_true", help="include every witness")

    p = sub.add_parser("growth", help="growth exponent experiments")
    gsub = p.add_subparsers(dest="growth_command", required=True, parser_class=_Parser)
    g = gsub.add_parser("verify", parents=[common], help="fit the exponent of a growth bound")
    g.add_argument("--theorem", required=True,
                   choices=("T1_1", "T1_3", "T1_5", "T1_6", "T1_7", "T1_8", "C1_9"))
    g.add_argument("-k", type=int, default=1)
    g.add_argument("-n", type=int, default=None)
    g.add_argument("--family", default=None)
    g.add_argument("--sizes", required=True, help="comma-separated set sizes")
    g.add_argument("--function", "-f", action="append", default=[], dest="functions")
    g.add_argument("--slack", type=float, default=0.2)
    g.add_argument("--plot-data", default=None, help="also write CSV plot data here")

    p = sub.add_parser("angles", parents=[common], help="pinned angles of A x A")
    p.add_argument("--set", required=True, dest="set_path")
    p.add_argument("--spec", default="1,1", help="signed sumset of the angle set")

    p = sub.add_parser("sequences", parents=[common], help="φ(n), p(j), q(k)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--phi", type=int, metavar="N")
    group.add_argument("--p", type=int, metavar="J")
    group.add_argument("--q", type=int, metavar="K")
    group.add_argument("--table", type=int, metavar="N", help="rows n = 1..N")
    return parser


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _scalars(text: str, what: str) -> list:
    try:
        return [parse_scalar(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _config(args, inputs=(), functions=(), k=None, n=None, **options) -> RunConfig:
    cap = args.cap if args.cap is not None else default_size_cap()
    return RunConfig(args.command, list(inputs), list(functions), k, n, args.precision,
                     args.tol, cap, args.seed, args.out, args.format, options)


def _tolerance(cfg: RunConfig):
    if cfg.tolerance is None:
        return None
    try:
        return to_mpf(parse_scalar(cfg.tolerance, exact=False), cfg.precision_bits)
    except ValueError:
        raise UsageError(f"--tol: not a number: {cfg.tolerance!r}") from None


# -- subcommands ---------------------------------------------------------------------------
# each returns (config, payload, summary line, exit code)

def _cmd_sumset(args):
    spec = SignedSumSpec.parse(args.spec)
    inputs = [args.set_path] + ([args.set2] if args.set2 else [])
    cfg = _config(args, inputs, spec=str(spec), mode=args.mode, elements=args.elements)
    tol = _tolerance(cfg)
    a = read_set(args.set_path, args.mode, cfg.precision_bits, tol)
    b = read_set(args.set2, args.mode, cfg.precision_bits, tol) if args.set2 else None
    s = sumset(a, b, spec, cfg.cap)
    payload = {"cardinality": len(s), "spec": str(spec), "sizes": [len(a), len(b or a)],
               "min": format_scalar(s.min()), "max": format_scalar(s.max())}
    if args.elements:
        payload["elements"] = [format_scalar(v) for v in s]
    return cfg, payload, f"|{spec.plus_count}A-{spec.minus_count}B| = {len(s)}", EXIT_OK


def _cmd_convexity(args):
    cfg = _config(args, [args.set_path], k_max=args.k_max, orientation=args.orientation)
    a = read_set(args.set_path, EXACT)
    order = convexity_order(a, args.k_max, args.orientation)
    payload = {"order": order, "size": len(a), "k_max": args.k_max,
               "orientation": args.orientation,
               "differences": [format_scalar(d) for d in consecutive_differences(a)]}
    return cfg, payload, f"convexity order {order}", EXIT_OK


def _cmd_independence(args):
    from .funcdsl import Interval, parse
    from .independence import (
        DeltaFamilySpec, FunctionFamily, delta_family_independence, is_k_independent,
        polynomial_delta_independence,
    )

    if args.polynomial is not None:
        if not args.shifts:
            raise UsageError("--polynomial needs --shifts")
        coeffs = _scalars(args.polynomial, "--polynomial")
        shifts = _scalars(args.shifts, "--shifts")
        cfg = _config(args, polynomial=args.polynomial, shifts=args.shifts)
        verdict = polynomial_delta_independence(coeffs, shifts)
    else:
        if not args.functions:
            raise UsageError("give at least one --function (or --polynomial)")
        interval = Interval.parse(args.interval)
        cfg = _config(args, functions=args.functions, k=args.k, interval=args.interval,
                      samples=args.samples, shifts=args.shifts)
        exprs = [parse(f) for f in args.functions]
        if args.shifts:
            if len(exprs) != 1:
                raise UsageError("--shifts takes exactly one --function")
            spec = DeltaFamilySpec(exprs[0], tuple(_scalars(args.shifts, "--shifts")))
            verdict = delta_family_independence(spec, interval, args.samples, cfg.precision_bits)
        else:
            verdict = is_k_independent(FunctionFamily(exprs, interval), args.k, args.samples,
                                       cfg.precision_bits)
    word = {True: "independent", False: "dependent", None: "inconclusive"}[verdict.independent]
    code = EXIT_OK if verdict.independent else EXIT_FAIL
    return cfg, {"verdict": verdict.to_dict()}, f"{word} ({verdict.method})", code


def _cmd_squeeze(args):
    from .squeeze import squeeze_iterated

    cfg = _config(args, [args.set_path], k=args.k, witnesses=args.witnesses)
    a = read_set(args.set_path, EXACT)
    count, elements = squeeze_iterated(a, args.k, cfg.cap)
    payload = {"count": count, "size": len(a), "verified": True,
               "expected_k1": len(a) * (len(a) - 1) // 2 if args.k == 1 else None}
    if args.witnesses:
        payload["elements"] = [e.to_dict() for e in elements]
    else:
        payload["values"] = [format_scalar(e.value) for e in elements]
    return cfg, payload, f"{count} squeezed elements of {2**args.k}A-{2**args.k - 1}A", EXIT_OK


def _cmd_growth(args):
    from .growth import FAIL, verify_theorem
    from .reports import emit_plot_data

    sizes = _ints(args.sizes, "--sizes")
    cfg = _config(args, functions=args.functions, k=args.k, n=args.n, theorem=args.theorem,
                  family=args.family, sizes=sizes, slack=args.slack,
                  plot_data=args.plot_data)
    cfg.subcommand = "growth verify"
    report = verify_theorem(args.theorem, sizes, family=args.family, k=args.k, n=args.n,
                            functions=args.functions or None, seed=cfg.seed, slack=args.slack,
                            cap=cfg.cap, precision_bits=cfg.precision_bits)
    if args.plot_data:
        emit_plot_data(report, args.plot_data)
    payload = report.to_dict()
    payload["report"] = report
    summary = (f"{args.theorem}: fitted {report.fitted:.4f} vs target {float(report.target):.4f}"
               f" - {report.slack} -> {report.verdict}")
    return cfg, payload, summary, EXIT_FAIL if report.verdict == FAIL else EXIT_OK


def _cmd_angles(args):
    from .angles import angle_growth_report, angle_reduction_check, pinned_angles

    spec = SignedSumSpec.parse(args.spec)
    cfg = _config(args, [args.set_path], spec=str(spec))
    tol = _tolerance(cfg)
    a = read_set(args.set_path, EXACT)
    pinned = pinned_angles(a, cfg.precision_bits, tol)
    record = angle_growth_report(a, spec, cfg.precision_bits, tol, cfg.cap)
    check = angle_reduction_check(a, cfg.precision_bits, tol) if len(a) >= 2 else None
    payload = {"pinned": pinned.to_dict(), "growth": record.to_dict(), "reduction_check": check}
    summary = (f"{len(pinned.angles)} angles from {pinned.direction_count} directions; "
               f"|{spec.plus_count}X-{spec.minus_count}X| = {record.count}")
    return cfg, payload, summary, EXIT_OK if check is not False else EXIT_FAIL


def _cmd_sequences(args):
    from .growth import p_seq, phi, q_seq

    cfg = _config(args, phi=args.phi, p=args.p, q=args.q, table=args.table)
    for name, value in (("--phi", args.phi), ("--table", args.table)):
        if value is not None and value < 1:
            raise UsageError(f"{name} must be at least 1")
    for name, value in (("--p", args.p), ("--q", args.q)):
        if value is not None and value < 0:
            raise UsageError(f"{name} must be non-negative")
    if args.phi is not None:
        value = phi(args.phi)
        return cfg, {"phi": {str(args.phi): str(value)}}, str(value), EXIT_OK
    if args.p is not None:
        value = p_seq(args.p)
        return cfg, {"p": {str(args.p): value}}, str(value), EXIT_OK
    if args.q is not None:
        value = q_seq(args.q)
        return cfg, {"q": {str(args.q): value}}, str(value), EXIT_OK
    rows = [{"n": i, "phi": str(phi(i)), "p": p_seq(i), "q": q_seq(i)}
            for i in range(1, args.table + 1)]
    lines = " ".join(f"{r['n']}:{r['phi']}" for r in rows)
    return cfg, {"table": rows}, lines, EXIT_OK


COMMANDS = {
    "sumset": _cmd_sumset, "convexity": _cmd_convexity, "independence": _cmd_independence,
    "squeeze": _cmd_squeeze, "growth": _cmd_growth, "angles": _cmd_angles,
    "sequences": _cmd_sequences,
}


# -- driver ------------------------------------------------------------------------------

def _error(code: str, message: str, exit_code: int, stream) -> int:
    print(json.dumps({"error": {"code": code, "message": message}}, sort_keys=True),
          file=stream)
    return exit_code


def _emit(cfg: RunConfig, payload: dict, summary: str, stdout) -> None:
    from .reports import atomic_write, dumps, envelope, plot_csv

    report = payload.pop("report", None)
    if cfg.format == "csv":
        if report is None:
            raise UsageError("--format csv is only available for growth reports")
        text = plot_csv(report)
    else:
        text = dumps(envelope(cfg.subcommand, cfg.to_dict(), payload))
    if cfg.out == "-":
        stdout.write(text)
        return
    if cfg.out:
        atomic_write(cfg.out, text)
    print(summary, file=stdout)


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        cfg, payload, summary, code = COMMANDS[args.command](args)
        _emit(cfg, payload, summary, stdout)
        return code
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE, stderr)
    except SizeCapExceeded as exc:
        return _error(exc.code, str(exc), EXIT_RESOURCE, stderr)
    except SumsetLabError as exc:
        return _error(exc.code, str(exc), exc.exit_code, stderr)
    except MemoryError:
        return _error("out_of_memory", "out of memory", EXIT_RESOURCE, stderr)
    except OSError as exc:
        return _error("io_error", str(exc), EXIT_USAGE, stderr)
    except (ValueError, ZeroDivisionError) as exc:
        return _error("bad_input", str(exc), EXIT_USAGE, stderr)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except Exception as exc:  # keep the JSON error contract even for bugs
        return _error("internal_error", f"{type(exc).__name__}: {exc}", EXIT_USAGE, stderr)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
