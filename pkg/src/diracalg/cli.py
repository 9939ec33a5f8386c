"""Command-line front end: ``diracalg <command> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional

from .bivariate import Axis, BivDist
from .boundary import (
    apply_greens,
    check_regular,
    check_uniqueness,
    extract_greens_fn,
    format_matrix,
    greens_operator,
    verify_distributional,
)
from .distribution import Dist
from .errors import DiracAlgError, UnsupportedOperationError
from .ground import Poly
from .operators import act, act_axis, act_dist, act_pw, format_op
from .piecewise import Piecewise
from .scalars import format_rational, parse_rational
from .syntax import (
    ProblemFile,
    format_value,
    lower_value,
    parse_op,
    parse_piecewise,
    parse_problem,
    parse_value,
    value_to_json,
)

PRECISION_ENV = "DIRACALG_PRECISION"
DEFAULT_PRECISION = 12


class CommandError(DiracAlgError):
    pass


def _lower(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, BivDist):
        return lower_value(v)
    return lower_value(BivDist.lift(v, Axis.X))


def _axis(args) -> Axis:
    return Axis.parse(args.axis)


def _univariate(v, what: str):
    if isinstance(v, BivDist):
        raise CommandError(f"{what} of a bivariate element needs --axis")
    return v if isinstance(v, Dist) else Dist(v)


# ---------------------------------------------------------------------------
# expression commands

def cmd_simplify(args):
    return parse_value(args.expr)


def cmd_diff(args):
    v = parse_value(args.expr)
    if args.axis or isinstance(v, BivDist):
        return BivDist.lift(v).derive(_axis(args))
    if args.piecewise:
        if isinstance(v, Dist):
            raise CommandError("--piecewise needs an element without Dirac terms")
        return Piecewise(v).derive() if isinstance(v, Poly) else v.derive()
    return Dist(v).derive() if not isinstance(v, Dist) else v.derive()


def cmd_integrate(args):
    v = parse_value(args.expr)
    if args.axis or isinstance(v, BivDist):
        axis = _axis(args)
        out = BivDist.lift(v).integrate(axis)
        if args.from_ is not None:
            out = out - out.evaluate(axis, parse_rational(args.from_))
        return out
    d = _univariate(v, "integrate")
    if args.from_ is not None:
        return d.integrate_from(parse_rational(args.from_))
    return d.integrate()


def cmd_shift(args):
    v = parse_value(args.expr)
    c = parse_rational(args.by)
    if args.axis or isinstance(v, BivDist):
        return BivDist.lift(v).shift(_axis(args), c)
    return v.shift(c)


def cmd_eval(args):
    v = parse_value(args.expr)
    c = parse_rational(args.at)
    if args.axis or isinstance(v, BivDist):
        return BivDist.lift(v).evaluate(_axis(args), c)
    return v.evaluate(c)


def cmd_op_apply(args):
    op = parse_op(args.op)
    v = parse_value(args.expr)
    if args.axis or isinstance(v, BivDist):
        return act_axis(op, BivDist.lift(v), _axis(args))
    if isinstance(v, Poly):
        return act(op, v)
    if isinstance(v, Piecewise) and op.is_integral_only():
        return act_pw(op, v)
    return act_dist(op, v if isinstance(v, Dist) else Dist(v))


# ---------------------------------------------------------------------------
# problem commands

def _load(path: str) -> ProblemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text, path)


def _interval_text(interval) -> str:
    return f"[{format_rational(interval[0])},{format_rational(interval[1])}]"


def _green(pfile: ProblemFile):
    bp = pfile.problem
    em = check_regular(bp)
    G = greens_operator(bp)
    gf = extract_greens_fn(G, pfile.interval)
    g = gf.g.reduce_interval(*pfile.interval)
    report = verify_distributional(bp, gf)
    return em, G, g, gf, report


def _report_json(report) -> dict:
    return {
        "ok": report.ok,
        "differential": report.differential_ok,
        "residual": str(report.residual),
        "conditions": [{"condition": name, "ok": ok, "value": str(v)} for name, ok, v in report.conditions],
    }


def run_problem(path: str, mode: str, force_src: Optional[str] = None) -> tuple[str, dict, list[str]]:
    """Process one problem file. Returns (text output, JSON record, diagnostics)."""
    pfile = _load(path)
    if force_src is not None:
        pfile.force = parse_piecewise(force_src)
    em, G, g, gf, report = _green(pfile)
    iv = _interval_text(pfile.interval)
    lines: list[str] = []
    diags: list[str] = []
    record: dict = {
        "problem": path,
        "interval": [format_rational(a) for a in pfile.interval],
        "evaluation_matrix": [[format_rational(c) for c in row] for row in em.entries],
        "operator": format_op(G),
        "green_function": value_to_json(g),
    }
    if mode in ("solve", "green", "verify"):
        if mode == "solve":
            lines.append(f"problem: {path}")
            lines.append("evaluation matrix: " + format_matrix(em.entries))
        lines.append(f"G = {format_op(G)}")
        lines.append(f"g(x,xi) = {g}")
    if mode in ("solve", "verify"):
        lines.extend(report.lines())
    if report.ok:
        lines.append(f"verified: T_x g = delta(x-xi) on {iv}")
    else:
        diags.append(f"{path}: verification failed")
        if mode == "green":
            diags.extend(report.lines())
    record["verification"] = _report_json(report)
    if mode in ("solve", "verify"):
        unique = check_uniqueness(act_axis(pfile.problem.T, gf.g, Axis.X), pfile.interval)
        record["unique"] = unique
        lines.append(f"uniqueness probe: {'passed' if unique else 'FAILED'}")
        if not unique:
            diags.append(f"{path}: uniqueness probe failed")
    if mode == "apply" and pfile.force is None:
        raise CommandError(f"{path}: no 'force:' line and no --force given")
    if pfile.force is not None and mode in ("solve", "apply"):
        sol = apply_greens(pfile.problem, pfile.force, pfile.interval, G=G)
        record["solution"] = value_to_json(_lower(sol.u))
        record["routes_agree"] = sol.agree
        lines.append(f"u = {_lower(sol.u)}")
        lines.append(f"operator and kernel routes agree on {iv}: {'yes' if sol.agree else 'NO'}")
        if not sol.agree:
            diags.append(f"{path}: operator and kernel routes disagree")
    return "\n".join(lines), record, diags


def _run_problem_safe(path: str, mode: str, force_src: Optional[str] = None):
    try:
        return run_problem(path, mode, force_src)
    except DiracAlgError as exc:
        return "", {"problem": path, "error": str(exc)}, [f"{path}: {exc}"]


def cmd_problems(args, mode: str) -> int:
    paths = args.files if mode == "solve" else [args.file]
    force = getattr(args, "force", None)
    if mode == "solve" and args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_problem_safe, paths, [mode] * len(paths)))
    else:
        results = [_run_problem_safe(p, mode, force) for p in paths]
    status = 0
    records = []
    for text, record, diags in results:
        records.append(record)
        if text and not args.json:
            print(text)
            if mode == "solve" and len(paths) > 1:
                print()
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        if diags:
            status = 1
    if args.json:
        out = {"results": records} if mode == "solve" else records[0]
        print(json.dumps(out, indent=2))
    return status


# ---------------------------------------------------------------------------
# sampling

def _precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        digits = int(raw)
    except ValueError:
        raise CommandError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None
    if digits < 0:
        raise CommandError(f"{PRECISION_ENV} must be nonnegative")
    return digits


def decimal_text(q: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 40
        d = Decimal(q.numerator) / Decimal(q.denominator)
        text = f"{d:.{digits}f}"
    if text.startswith("-") and set(text[1:]) <= {"0", "."}:
        text = text[1:]
    return text


def sample_points(v, n: int, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    if isinstance(v, (Dist, BivDist)):
        raise CommandError("sample needs a piecewise function of x (no Dirac terms, no xi)")
    pw = v if isinstance(v, Piecewise) else Piecewise(v)
    if n < 1:
        raise CommandError("--points must be positive")
    if n == 1:
        ts = [lo]
    else:
        ts = [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]
    return [(t, pw.eval_at(t)) for t in ts]


def cmd_sample(args) -> int:
    v = parse_value(args.expr)
    lo, hi = parse_rational(args.from_), parse_rational(args.to)
    if lo > hi:
        raise CommandError("--from must not exceed --to")
    rows = sample_points(v, args.points, lo, hi)
    digits = _precision()
    if args.json:
        data = {"expression": str(v), "points": [
            {"t": format_rational(t), "value": format_rational(y)} for t, y in rows]}
        print(json.dumps(data, indent=2))
    else:
        print("t\tvalue")
        for t, y in rows:
            print(f"{decimal_text(t, digits)}\t{decimal_text(y, digits)}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

EXPR_COMMANDS = {
    "simplify": cmd_simplify,
    "diff": cmd_diff,
    "integrate": cmd_integrate,
    "shift": cmd_shift,
    "eval": cmd_eval,
    "op-apply": cmd_op_apply,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    axis = argparse.ArgumentParser(add_help=False)
    axis.add_argument("--axis", choices=["x", "xi"], help="variable to act on (bivariate elements)")

    parser = argparse.ArgumentParser(prog="diracalg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify", parents=[common], help="print the canonical form")
    p.add_argument("expr")
    p = sub.add_parser("diff", parents=[common, axis], help="derivative")
    p.add_argument("expr")
    p.add_argument("--piecewise", action="store_true",
                   help="differentiate in the piecewise ring, where steps are constants")
    p = sub.add_parser("integrate", parents=[common, axis], help="antiderivative")
    p.add_argument("expr")
    p.add_argument("--from", dest="from_", metavar="A", help="lower limit (default: the origin)")
    p = sub.add_parser("shift", parents=[common, axis], help="substitute x -> x + c")
    p.add_argument("expr")
    p.add_argument("--by", required=True, metavar="C")
    p = sub.add_parser("eval", parents=[common, axis], help="evaluate at a point")
    p.add_argument("expr")
    p.add_argument("--at", required=True, metavar="C")
    p = sub.add_parser("op-apply", parents=[common, axis], help="apply an integro-differential operator")
    p.add_argument("expr")
    p.add_argument("--op", required=True)

    p = sub.add_parser("solve", parents=[common], help="full pipeline on problem files")
    p.add_argument("files", nargs="+")
    p.add_argument("--jobs", type=int, default=1, help="process files in parallel")
    p = sub.add_parser("green", parents=[common], help="Green's operator and function")
    p.add_argument("file")
    p = sub.add_parser("verify", parents=[common], help="distributional verification report")
    p.add_argument("file")
    p = sub.add_parser("apply", parents=[common], help="solve with the piecewise forcing term")
    p.add_argument("file")
    p.add_argument("--force", help="override the file's forcing term")

    p = sub.add_parser("sample", parents=[common], help="TSV dump of (t, value) rows")
    p.add_argument("expr")
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--from", dest="from_", default="0", metavar="A")
    p.add_argument("--to", default="1", metavar="B")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in EXPR_COMMANDS:
            result = _lower(EXPR_COMMANDS[args.command](args))
            if args.json:
                print(json.dumps(value_to_json(result), indent=2))
            else:
                print(format_value(result))
            return 0
        if args.command == "sample":
            return cmd_sample(args)
        return cmd_problems(args, args.command)
    except (DiracAlgError, ValueError, UnsupportedOperationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
