"""Command line front end: ``sumsetlab <experiment> [flags]``.

Every subcommand prints (or writes with ``--out``) one JSON report.  Exit
codes: 0 pass, 2 threshold not met, 3 bad input, 4 coverage or overflow.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import experiments as ex
from .errors import CoverageError, InputError, LabError, PolyOverflowError
from .poly import Poly

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_RANGE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _poly(text: str) -> Poly:
    try:
        return Poly.parse(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


SQRT2_M1 = repr(math.sqrt(2) - 1)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sumsetlab", description="Finite experiments on polynomial sumset hits.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        return p

    p = add("gen", "generate a set window, optionally saving it in BW1 format")
    p.add_argument("--spec", required=True)
    p.add_argument("--lo", type=int, default=0)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--save", help="BW1 output path")

    p = add("stats", "density, window-min density and gaps of a set")
    p.add_argument("--spec")
    p.add_argument("--input", help="BW1 file instead of --spec")
    p.add_argument("--lo", type=int, default=0)
    p.add_argument("--hi", type=int, default=10**5)
    p.add_argument("--L", type=int, default=100)
    p.add_argument("--N", type=int)
    p.add_argument("--max-gap", type=int)

    p = add("norms", "averaged-shift norms and autocorrelations of a normalized set")
    p.add_argument("--op", choices=ex.NORM_OPS, default="backward")
    p.add_argument("--A", default=f"weyl2:{SQRT2_M1},0,0.3")
    p.add_argument("--poly", type=_poly, action="append", default=[])
    p.add_argument("--q", type=_poly)
    p.add_argument("--N", type=int, default=2000)
    p.add_argument("--J", type=_ints, default=[200], help="comma-separated sweep")
    p.add_argument("--d", help="analytic (default), measured, a float, or p/q")
    p.add_argument("--exact", action="store_true", help="rational arithmetic throughout")
    p.add_argument("--h", type=_ints, default=[])
    p.add_argument("--H", type=int, default=200)
    p.add_argument("--direction", choices=("forward", "backward"), default="backward")
    p.add_argument("--hi", type=int, help="window end (default: just enough to avoid edges)")
    p.add_argument("--max-value", type=float)
    p.add_argument("--min-value", type=float)

    p = add("vdc", "van der Corput checker over random bounded families")
    p.add_argument("--families", type=int, default=1000)
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--J", type=int, default=4096)
    p.add_argument("--I", type=int, default=64)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)

    p = add("obstruction", "residue image of a polynomial modulo a prime")
    p.add_argument("--poly", type=_poly, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--nmax", type=int, default=1000, help="also scan R_p up to here (0 skips)")

    for name, help_ in (("theorem1", "syndeticity of R_p"), ("theorem2", "lower Banach density of R_p")):
        p = add(name, help_)
        p.add_argument("--A", default=f"rot:{SQRT2_M1},0,0.3" if name == "theorem1" else f"weyl2:{SQRT2_M1},0,0.3")
        p.add_argument("--B", default="mod:2,0")
        p.add_argument("--poly", type=_poly, default=Poly([0, 0, 1]))
        p.add_argument("--nmax", type=int, default=10**4)
        p.add_argument("--from", dest="start", type=int, default=100)
        if name == "theorem1":
            p.add_argument("--max-gap", type=int, default=20)
        else:
            p.add_argument("--minfrac", type=float, default=0.999)
            p.add_argument("--L", type=int, default=500)
            p.add_argument("--min-window", type=float, default=0.99)

    p = add("theorem3", "common-b hits for a polynomial family")
    p.add_argument("--A", default="bern:0.5,3")
    p.add_argument("--B", default="mod:2,1")
    p.add_argument("--poly", type=_poly, action="append", default=[])
    p.add_argument("--nmax", type=int, default=3000)
    p.add_argument("--from", dest="start", type=int, default=100)
    p.add_argument("--minfrac", type=float, default=0.99)

    p = add("counterexample", "clear blocking intervals and verify no n solves the system")
    p.add_argument("--A", default="bern:0.5,4")
    p.add_argument("--plo", type=_poly, default=Poly([0, 1]))
    p.add_argument("--phi", type=_poly, default=Poly([0, 0, 0, 1]))
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--lo", type=int, default=0)
    p.add_argument("--hi", type=int, default=10**6)
    p.add_argument("--max-removed", type=float, default=0.1)
    return ap


def run(args) -> ex.ExperimentReport:
    c = args.cmd
    if c == "gen":
        return ex.run_gen(args.spec, args.lo, args.hi, args.save)
    if c == "stats":
        return ex.run_stats(args.spec, args.lo, args.hi, args.L, args.N, args.input, args.max_gap)
    if c == "norms":
        return ex.run_norms(args.op, args.A, args.poly, args.q, args.N, args.J, args.d, args.exact,
                            args.h, args.H, args.direction, args.hi, args.max_value, args.min_value)
    if c == "vdc":
        return ex.run_vdc(args.families, args.N, args.J, args.I, args.eps, args.seed)
    if c == "obstruction":
        return ex.run_obstruction(args.poly, args.prime, args.nmax)
    if c == "theorem1":
        return ex.run_theorem1(args.A, args.B, args.poly, args.nmax, args.start, args.max_gap)
    if c == "theorem2":
        return ex.run_theorem2(args.A, args.B, args.poly, args.nmax, args.start, args.minfrac,
                               args.L, args.min_window)
    if c == "theorem3":
        polys = args.poly or [Poly([0, 1, 1]), Poly([0, 0, 1])]
        return ex.run_theorem3(args.A, args.B, polys, args.nmax, args.start, args.minfrac)
    return ex.run_counterexample(args.A, args.plo, args.phi, args.nmax, args.lo, args.hi, args.max_removed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except (CoverageError, PolyOverflowError) as exc:
        print(f"sumsetlab: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (InputError, LabError) as exc:
        print(f"sumsetlab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        report.write(args.out)
    else:
        print(report.dumps())
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
