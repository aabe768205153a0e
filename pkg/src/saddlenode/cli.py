"""Command-line entry point.

Exit codes: 0 success, 2 parse error, 3 precondition error.
"""

from __future__ import annotations

import argparse
import sys

from . import report as R
from .config import load_config
from .dsl import parse_bindings
from .errors import ParseError, SaddleNodeError

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_PARSE", "EXIT_PRECONDITION"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3


def _common(p: argparse.ArgumentParser, with_field=True):
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--trunc", type=int, default=None, help="truncation order N")
    p.add_argument("--config", default=None, help="INI config file ([saddlenode] section)")
    if with_field:
        p.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE",
                       help="exact scalar binding, e.g. m=1/3 or c=1+2i")


def _field_arg(p):
    p.add_argument("field", help="field expression, or @path to read it from a file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="saddlenode", description="Normal forms of planar vector-field singularities.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="eigendata, class, formal invariants, named form, CS indices")
    _field_arg(p)
    _common(p)
    p.add_argument("--steps", type=int, default=None, help="also run a blow-up cascade of this length")

    p = sub.add_parser("prenormalize", help="Dulac prenormal form of a saddle-node")
    _field_arg(p)
    _common(p)

    p = sub.add_parser("blowup", help="blow-up cascade of an Ecalle2-form saddle-node")
    _field_arg(p)
    _common(p)
    p.add_argument("--steps", type=int, default=None)

    p = sub.add_parser("holonomy", help="numerical holonomy jet around x = 0 along y = 0")
    _field_arg(p)
    _common(p)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--jet", type=int, default=None)

    p = sub.add_parser("omega", help="ω invariant of X = dx + y f dy and Y = X + y^k g dy")
    p.add_argument("field_x")
    p.add_argument("field_y")
    _common(p)
    p.add_argument("--x0", default="0")
    p.add_argument("--x1", default=None, help="also integrate ω from x0 to x1")
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser("elizarov", help="derivative of the modular map at a formal model")
    _common(p, with_field=False)
    p.add_argument("--mu", default="0")
    p.add_argument("--coef", action="append", default=[], metavar="M,N=VALUE")
    p.add_argument("--dps", type=int, default=40)

    p = sub.add_parser("brjuno", help="budgeted Brjuno sum")
    p.add_argument("value", help="golden | liouville[:base] | sqrt(D) | surd:a,b,D")
    _common(p, with_field=False)
    return ap


def _read_field(text: str) -> str:
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return fh.read().strip()
    return text


def run(args) -> dict:
    cfg = load_config(args.config, trunc=args.trunc, steps=getattr(args, "steps", None),
                      radius=getattr(args, "radius", None), jet=getattr(args, "jet", None))
    cmd = args.command
    if cmd == "elizarov":
        return R.elizarov_report(args.mu, args.coef, cfg, dps=args.dps)
    if cmd == "brjuno":
        return R.brjuno_text_report(args.value, cfg)
    bindings = parse_bindings(args.bind)
    if cmd == "omega":
        return R.omega_report(_read_field(args.field_x), _read_field(args.field_y), bindings, cfg,
                              x0=args.x0, x1=args.x1, k=args.k)
    text = _read_field(args.field)
    builder = {
        "classify": R.classify_report,
        "prenormalize": R.prenormalize_report,
        "blowup": R.blowup_report,
        "holonomy": R.holonomy_report,
    }[cmd]
    return builder(text, bindings, cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SaddleNodeError as exc:
        module = getattr(exc, "module", None)
        where = f" [{module}]" if module else ""
        print(f"precondition error{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(R.emit(rep, args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
