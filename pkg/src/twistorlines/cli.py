"""Command-line interface: JSON in, JSON out.

Exit codes: 0 success, 1 malformed input or bad flags, 2 domain error,
3 non-convergence (and ``verify-paper`` with a failing check exits 2).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import battery
from . import connectivity as cn
from . import grassmann as gr
from . import linalg as la
from . import periods as pd
from .errors import NotConverged, OutOfReach, StepTooLarge, TwistorError
from .lines import TwistorLine, line_from_rep, sample_points
from .reps import classify_nilpotent_rep, classify_pair, span_signature, standard_rep
from .serialize import (
    MalformedInput,
    line_to_json,
    matrix_from_json,
    matrix_to_json,
    path_to_json,
    point_to_json,
    rep_from_json,
    rep_to_json,
    scalar_to_json,
)

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3
ANGLE_GRID = (10.0, 100.0, 1000.0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedInput(message)


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc


def _emit(payload, out):
    out.write(json.dumps(payload, sort_keys=True) + "\n")


def _rep(args):
    """The representation named by a file argument or by --epsilon/--n/--k."""
    if getattr(args, "rep", None):
        rep = rep_from_json(_load(args.rep))
        if args.scalar == "float":
            rep = rep.to_float()
        return rep
    if args.epsilon is None or args.n is None:
        raise MalformedInput("give a representation file or --epsilon and --n")
    k = args.k
    if args.epsilon == 0 and k is None:
        k = args.n
    return standard_rep(args.epsilon, args.n, k, exact_domain=args.scalar == "exact")


def _line(args) -> TwistorLine:
    return line_from_rep(_rep(args), args.tol)


def _nilpotent_rank(rep):
    if rep.k is not None:
        return rep.k
    return classify_nilpotent_rep(rep.I, rep.B)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_gen_rep(args, out):
    rep = _rep(args)
    _emit(rep_to_json(rep), out)
    return EXIT_OK


def cmd_classify_pair(args, out):
    j1 = matrix_from_json(_load(args.first))
    j2 = matrix_from_json(_load(args.second))
    if args.scalar == "float":
        j1, j2 = la.to_float(j1), la.to_float(j2)
    pc = classify_pair(j1, j2, args.tol)
    rep = pc.to_rep()
    _emit(
        {
            "alpha": scalar_to_json(pc.alpha) if la.is_exact(j1) else str(pc.alpha),
            "epsilon": pc.epsilon,
            "c": scalar_to_json(pc.c),
            "rep": rep_to_json(rep),
        },
        out,
    )
    return EXIT_OK


def cmd_line(args, out):
    line = _line(args)
    rng = np.random.default_rng(args.seed)
    pts = sample_points(line, args.samples, rng=rng if args.seed is not None else None)
    _emit(
        {
            "line": line_to_json(line),
            "c": scalar_to_json(line.c),
            "signature": list(span_signature(line.rep, args.tol)),
            "points": [point_to_json(p) for p in pts],
        },
        out,
    )
    return EXIT_OK


def _hdg_payload(line, args):
    space = pd.hdg_space(line, args.mode, args.tol)
    k = _nilpotent_rank(line.rep) if line.epsilon == 0 else None
    formula = pd.hdg_dim_formula(line.epsilon, line.n, k)
    return space, {
        "line": line.type,
        "hdg_dim": space.dim,
        "formula_dim": formula,
        "match": space.dim == formula,
    }


def cmd_hdg(args, out):
    _, payload = _hdg_payload(_line(args), args)
    _emit(payload, out)
    return EXIT_OK


def cmd_kahler(args, out):
    line = _line(args)
    _, payload = _hdg_payload(line, args)
    cert = pd.kahler_certificate(line, samples=args.samples)
    payload["kahler"] = {
        "status": cert.status,
        "reason": cert.reason,
        "component": cert.component,
        "witness": None if cert.witness is None else matrix_to_json(cert.witness),
        "checks": {k: v for k, v in sorted(cert.checks.items())},
    }
    _emit(payload, out)
    return EXIT_OK


def _angle_rows(line):
    flt = TwistorLine(line.rep.to_float()) if line.exact else line
    if line.epsilon == 1:
        rays = [{"sheet": "+", "angle": 0.0}, {"sheet": "-", "angle": 0.0}]
    else:
        rays = [{"sheet": "+", "alpha": 1.0, "beta": 0.0}, {"sheet": "-", "alpha": 1.0, "beta": 0.0}]
    rows = []
    for ray in rays:
        for t, angle in gr.limit_convergence(flt, ray, ANGLE_GRID):
            rows.append((ray["sheet"], t, angle))
    return rows


def cmd_infinity(args, out):
    line = _line(args)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sheet", "t", "max_principal_angle"])
        for sheet, t, angle in _angle_rows(line):
            writer.writerow([sheet, f"{t:g}", f"{angle:.6e}"])
        out.write(buf.getvalue())
        return EXIT_OK
    report = gr.infinity_tangent_report(line, args.tol)
    payload = {"line": line.type, "tangent_report": report.to_dict()}
    if line.epsilon == 0:
        pts = gr.infinity_points(line, args.tol)
        payload["limit_points"] = {
            sheet: {"real_dim": gr.in_LR(p)[1], "basis": matrix_to_json(np.column_stack(p.basis))}
            for sheet, p in zip("+-", pts)
        }
    _emit(payload, out)
    return EXIT_OK


def cmd_connect(args, out):
    a = la.to_float(matrix_from_json(_load(args.first)))
    b = la.to_float(matrix_from_json(_load(args.second)))
    if args.epsilon is None:
        raise MalformedInput("connect needs --epsilon")
    if args.n is not None and a.shape != (4 * args.n, 4 * args.n):
        raise MalformedInput(f"--n {args.n} expects {4 * args.n} x {4 * args.n} matrices")
    if a.shape != b.shape:
        raise MalformedInput("endpoints must have the same size")
    rng = np.random.default_rng(0 if args.seed is None else args.seed)
    path = cn.connect(a, b, args.epsilon, step=args.step, rng=rng)
    report = cn.validate_path(path)
    payload = path_to_json(path)
    payload["iterations"] = list(path.iterations)
    payload["validation"] = report.to_dict()
    _emit(payload, out)
    return EXIT_OK


def cmd_verify_paper(args, out):
    if not 1 <= args.n_max <= 4:
        raise MalformedInput("--n-max must be between 1 and 4")
    report = battery.run_battery(
        n_max=args.n_max,
        seed=0 if args.seed is None else args.seed,
        scalar=args.scalar,
        samples=args.samples,
    )
    _emit(report, out)
    return EXIT_OK if report["passed"] else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _epsilon(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v not in (-1, 0, 1):
        raise argparse.ArgumentTypeError("epsilon must be -1, 0 or 1")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scalar", choices=("exact", "float"), default="exact")
    common.add_argument("--tol", type=_positive_float, default=la.TOL)
    common.add_argument("--n", type=_positive_int)
    common.add_argument("--k", type=_positive_int)
    common.add_argument("--epsilon", type=_epsilon)
    common.add_argument("--samples", type=_positive_int, default=5)
    common.add_argument("--seed", type=int)

    parser = _Parser(prog="twistorlines", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-rep", parents=[common], help="standard representation")
    p.set_defaults(func=cmd_gen_rep)

    p = sub.add_parser("classify-pair", parents=[common], help="classify two complex structures")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_classify_pair)

    for name, func, help_ in (
        ("line", cmd_line, "line type, signature and sample points"),
        ("hdg", cmd_hdg, "dimension of the invariant (1,1)-forms"),
        ("kahler", cmd_kahler, "Kahler certificate"),
        ("infinity", cmd_infinity, "points and tangent cones at infinity"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("rep", nargs="?", help="representation JSON file")
        if name in ("hdg", "kahler"):
            p.add_argument("--mode", choices=("closed-form", "generic-sampling"), default="closed-form")
        if name == "infinity":
            p.add_argument("--csv", action="store_true", help="print the angle-decay table as CSV")
        p.set_defaults(func=func)

    p = sub.add_parser("connect", parents=[common], help="chain of lines joining two periods")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--step", type=_positive_float, default=1.0)
    p.set_defaults(func=cmd_connect)

    p = sub.add_parser("verify-paper", parents=[common], help="run the verification battery")
    p.add_argument("--n-max", type=int, default=2)
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if args.epsilon is not None and args.epsilon != 0 and args.k is not None:
            raise MalformedInput("--k applies only to --epsilon 0")
        return args.func(args, out)
    except MalformedInput as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (NotConverged, OutOfReach, StepTooLarge) as exc:
        err.write(f"not converged: {exc}\n")
        return EXIT_CONVERGENCE
    except TwistorError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
