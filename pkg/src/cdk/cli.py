"""Command-line front end.

Maps are written in the text syntax of :mod:`cdk.syntax`.  Exit status is 0 on
success, 1 when a law suite fails (the report is still printed) and 2 on
usage or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import harness
from .diffop import D, D_partial
from .errors import CdkError, ParseError
from .expr import as_fraction
from .kleisli import SimpleSlice
from .maps import SmoothMap, compose, evaluate
from .monads import SHIPPED, get_monad
from .report import CheckReport
from .shapes import Prod
from .syntax import format_expr, format_map, format_params, parse_map_named
from .vfields import GenVectorField, vf_compose, vf_compose_terms

CHECK_TARGETS = ("cdc", "monad", "kleisli", "abstract", "kd", "em", "all")
_TARGET_STAGES = {
    "monad": ("monad_laws", "k_linear", "cdm"),
    "kleisli": ("monad_laws", "k_linear", "cdm", "kl_category", "kl_cd"),
    "abstract": ("monad_laws", "cdm", "abstract"),
    "kd": ("monad_laws", "cdm", "kd"),
    "em": ("monad_laws", "cdm", "em"),
    "all": harness.STAGES,
}


class UsageError(Exception):
    pass


def _primed(names: Sequence[str]) -> List[str]:
    return [n + "'" for n in names]


def _parse(text: str):
    return parse_map_named(text)


def _parse_point(text: str, dim: int) -> List[Fraction]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != dim:
        raise UsageError(f"point {text!r} has {len(parts)} coordinates, domain needs {dim}")
    try:
        return [as_fraction(Fraction(p)) for p in parts]
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad coordinate in {text!r}: {e}") from None


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def cmd_diff(args) -> int:
    f, names = _parse(args.map)
    print(format_map(D(f), names + _primed(names)))
    return 0


def cmd_partial_diff(args) -> int:
    f, names = _parse(args.map)
    if not isinstance(f.dom, Prod):
        raise UsageError("partial-diff needs at least two parameter groups (context first)")
    c = f.dom.left
    ctx, rest = names[:c.dim], names[c.dim:]
    print(format_map(D_partial(c, f), ctx + rest + _primed(rest)))
    return 0


def cmd_slice_diff(args) -> int:
    """Derivative in the simple slice over the first parameter group of the first map;
    with a second map, differentiate the slice composite (second after first)."""
    f, names = _parse(args.map)
    if not isinstance(f.dom, Prod):
        raise UsageError("slice-diff needs a context parameter group")
    sl = SimpleSlice(f.dom.left)
    if args.then is not None:
        g, _ = _parse(args.then)
        f = sl.compose(g, f)
    c = f.dom.left.dim
    ctx, rest = names[:c], names[c:]
    print(format_map(sl.D(f), ctx + rest + _primed(rest)))
    return 0


def cmd_compose(args) -> int:
    f, names = _parse(args.first)
    g, _ = _parse(args.second)
    print(format_map(compose(g, f).normalized(), names))
    return 0


def cmd_eval(args) -> int:
    f, _ = _parse(args.map)
    p = _parse_point(args.point, f.dom.dim)
    vals = evaluate(f, p, exact=args.exact)
    print("(" + ", ".join(_fmt_value(v) for v in vals) + ")")
    return 0


def _termwise(comps: Sequence[SmoothMap], names) -> str:
    pieces = []
    for term in comps:
        for e in term.comps:
            s = format_expr(e, names)
            if s == "0":
                continue
            pieces.append(s)
    out = " + ".join(pieces) or "0"
    return out.replace("+ -", "- ")


def cmd_vf_compose(args) -> int:
    v, names = _parse(args.first)
    w, _ = _parse(args.second)
    fv, fw = GenVectorField.from_carrier(v), GenVectorField.from_carrier(w)
    out = vf_compose(fw, fv)
    if args.normal_form or out.cod.dim != 1:
        print(format_map(out.carrier.normalized(), names))
        return 0
    first = format_expr(out.f1.normalized().comps[0], names)
    second = _termwise(vf_compose_terms(fw, fv), names)
    print(f"map {format_params(out.dom, names)} -> ({first}, {second})")
    return 0


def run_check(target: str, monad: str, seed: int, trials: Optional[int],
              exact: bool, tol: Optional[float]) -> CheckReport:
    cfg = harness.PipelineConfig.seeded(seed, trials, exact, tol)
    if target == "cdc":
        full = harness.CDSuiteConfig()
        n = trials or full.trials
        cd = harness.CDSuiteConfig(full.generator.replace(seed=seed), n,
                                   0 if exact else (full.sampled_trials if trials is None else max(1, n // 2)),
                                   cfg.cd.sampled_policy)
        return harness.run_cd_suite(harness.SmoothCategory(), cd)
    return harness.run_full_pipeline(get_monad(monad), cfg, stages=_TARGET_STAGES[target])


def cmd_check(args) -> int:
    rep = run_check(args.target, args.monad, args.seed, args.trials, args.exact, args.tol)
    print(rep.to_json() if args.json else rep.summary())
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--monad", choices=sorted(SHIPPED), default="tangent")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive_int, default=None)
    common.add_argument("--exact", action="store_true",
                        help="exact arithmetic only (no sampled transcendental pass)")
    common.add_argument("--json", action="store_true")
    common.add_argument("--tol", type=_positive_float, default=None,
                        help="absolute and relative tolerance for sampled equality")

    p = argparse.ArgumentParser(prog="cdk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("diff", parents=[common], help="total derivative D[f]")
    s.add_argument("map")
    s.set_defaults(func=cmd_diff)

    s = sub.add_parser("partial-diff", parents=[common],
                       help="derivative in all but the first parameter group")
    s.add_argument("map")
    s.set_defaults(func=cmd_partial_diff)

    s = sub.add_parser("slice-diff", parents=[common], help="derivative in the simple slice")
    s.add_argument("map")
    s.add_argument("then", nargs="?")
    s.set_defaults(func=cmd_slice_diff)

    s = sub.add_parser("compose", parents=[common], help="second after first")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("eval", parents=[common], help="evaluate at a comma separated point")
    s.add_argument("map")
    s.add_argument("point")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("vf-compose", parents=[common],
                       help="compose generalized vector fields, second after first")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--normal-form", action="store_true",
                   help="merge the second component into one normal form")
    s.set_defaults(func=cmd_vf_compose)

    s = sub.add_parser("check", parents=[common], help="run law suites")
    s.add_argument("target", choices=CHECK_TARGETS)
    s.set_defaults(func=cmd_check)
    return p


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except (UsageError, CdkError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
