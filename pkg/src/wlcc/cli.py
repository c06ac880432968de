"""Command-line interface: ``wlcc <subcommand> ...``.

Verdicts go to stdout with the verdict token first; diagnostics go to
stderr.  Exit codes: 0 ok, 1 usage, 2 invalid input, 3 internal error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .core import (
    ColoredSquareMatrix,
    InternalError,
    InvalidInput,
    PreconditionError,
    dumps_ccm,
    loads_ccm,
    verify_coherence,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InvalidInput(f"cannot read {path}: {e.strerror}") from None


def _read_matrix(path: str) -> ColoredSquareMatrix:
    return loads_ccm(_read_text(path))


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _pts(p) -> str:
    return "{" + ",".join(map(str, p)) + "}"


# -- subcommands ---------------------------------------------------------------------

def cmd_close(a) -> int:
    from .closure import coherent_closure
    from .core import normalize_transpose

    m = _read_matrix(a.input)
    res = coherent_closure(normalize_transpose(m))
    cfg = res.config
    print(f"rounds {res.rounds}")
    print(f"classes {cfg.k}")
    print("fibers " + " ".join(str(cfg.fiber_size(x)) for x in range(cfg.nfibers)))
    if a.output:
        _emit(dumps_ccm(cfg), a.output)
    return EXIT_OK


def cmd_classify(a) -> int:
    from .structure import classify_cell, classify_interspace

    cfg = verify_coherence(_read_matrix(a.input))
    print("kind\tfibers\tsizes\ttag\tmatching")
    for x in range(cfg.nfibers):
        print(f"cell\t{x}\t{cfg.fiber_size(x)}\t{classify_cell(cfg, x).value}\t-")
    for x in range(cfg.nfibers):
        for y in range(x + 1, cfg.nfibers):
            ic = classify_interspace(cfg, x, y)
            print(f"interspace\t{x},{y}\t{cfg.fiber_size(x)}x{cfg.fiber_size(y)}\t{ic.tag.value}\t"
                  f"{'yes' if ic.contains_matching else 'no'}")
    return EXIT_OK


def cmd_separable(a) -> int:
    from .reduction import decide_separable, format_step

    cfg = verify_coherence(_read_matrix(a.input))
    v = decide_separable(cfg)
    if v.separable:
        print("SEPARABLE")
    else:
        print(f"NON-SEPARABLE fiber {_pts(v.fiber)} hyperedge " + " ".join(_pts(f) for f in v.hyperedge))
    for st in v.trace:
        print("  " + format_step(st))
    return EXIT_OK


def cmd_amenable(a) -> int:
    from .reduction import decide_amenable

    m = _read_matrix(a.input)
    v = decide_amenable(m)
    if v.amenable:
        print("AMENABLE")
        if a.companion:
            print("no companion: graph is amenable", file=sys.stderr)
    else:
        sep = v.separability
        print(f"NON-AMENABLE fiber {_pts(sep.fiber)} hyperedge " + " ".join(_pts(f) for f in sep.hyperedge))
        if a.companion:
            _emit(dumps_ccm(v.companion), a.companion)
    return EXIT_OK


def cmd_equiv(a) -> int:
    from .closure import wl2_equivalent

    g, h = _read_matrix(a.a), _read_matrix(a.b)
    print("EQUIVALENT" if wl2_equivalent(g, h) is not None else "NOT-EQUIVALENT")
    return EXIT_OK


def cmd_iso(a) -> int:
    from .oracle import graph_iso

    g, h = _read_matrix(a.a), _read_matrix(a.b)
    phi = graph_iso(g, h, respect_colors=not a.ignore_vertex_colors)
    if phi is None:
        print("NON-ISOMORPHIC")
    else:
        print("ISOMORPHIC " + " ".join(map(str, phi.forward)))
    return EXIT_OK


def cmd_gen(a) -> int:
    from . import generators as gen

    fam = a.family
    args = a.args

    def need(k):
        if len(args) != k:
            raise UsageError(f"gen {fam} takes {k} argument(s)")

    if fam == "shrikhande-rook":
        need(0)
        return _gen_shrikhande_rook(a.output)
    if fam == "cfi":
        need(1)
        n, edges = gen.loads_edge_list(_read_text(args[0]))
        probs = gen.graph_problems(n, edges)
        if probs:
            raise InvalidInput("; ".join(probs))
        cfg = gen.skew_config(n, edges)
    elif fam == "cyclic":
        need(1)
        try:
            n = int(args[0])
        except ValueError:
            raise UsageError("gen cyclic takes an integer") from None
        cfg = gen.pls_to_config(gen.cyclic_pls(n))
    elif fam == "pls":
        need(1)
        cfg = gen.pls_to_config(gen.loads_pls(_read_text(args[0])))
    else:
        need(0)
        table = {
            "fano": lambda: gen.pls_to_config(gen.fano()),
            "mk": lambda: gen.pls_to_config(gen.mobius_kantor()),
            "pappus": lambda: gen.pls_to_config(gen.pappus()),
            "t16": gen.t16,
        }
        if fam not in table:
            raise UsageError(f"unknown family {fam!r}")
        cfg = table[fam]()
    _emit(dumps_ccm(cfg), a.output)
    return EXIT_OK


def _gen_shrikhande_rook(out: Optional[str]) -> int:
    from .census import shrikhande_rook_pair

    s, r = shrikhande_rook_pair()
    if out is None or out == "-":
        raise UsageError("gen shrikhande-rook writes two files; give -o <dir>")
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "shrikhande.ccm").write_text(dumps_ccm(s))
    (d / "rook.ccm").write_text(dumps_ccm(r))
    print(f"wrote {d / 'shrikhande.ccm'} {d / 'rook.ccm'}", file=sys.stderr)
    return EXIT_OK


def cmd_census16(a) -> int:
    from .census import census16

    rep = census16(a.out, with_amenability=a.amenability)
    print(f"classes {rep.classes} graphs {rep.graphs} all-ok {str(rep.all_ok).lower()}")
    return EXIT_OK if rep.all_ok else EXIT_INTERNAL


def cmd_selftest(a) -> int:
    from .acceptance import run_all

    results = run_all(lambda line: print(line, flush=True))
    failed = [r.number for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} criterion(s) failed: {failed}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


# -- wiring ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wlcc", description="Separability and WL2-amenability of coherent configurations.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("close", help="coherent closure of a colored graph")
    s.add_argument("input")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_close)

    s = sub.add_parser("classify", help="cell and interspace taxonomy")
    s.add_argument("input")
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("separable", help="separability of a coherent configuration")
    s.add_argument("input")
    s.set_defaults(fn=cmd_separable)

    s = sub.add_parser("amenable", help="WL2-amenability of a colored graph")
    s.add_argument("input")
    s.add_argument("--companion", metavar="OUT")
    s.set_defaults(fn=cmd_amenable)

    s = sub.add_parser("equiv", help="WL2-equivalence of two graphs")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("iso", help="isomorphism of two graphs (at most 40 vertices)")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--ignore-vertex-colors", action="store_true")
    s.set_defaults(fn=cmd_iso)

    s = sub.add_parser("gen", help="generate an instance")
    s.add_argument("family", help="cfi, cyclic, fano, mk, pappus, t16, pls, shrikhande-rook")
    s.add_argument("args", nargs="*")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("census16", help="all 16-vertex non-amenable pairs")
    s.add_argument("--out", required=True)
    s.add_argument("--amenability", action="store_true", help="also run the amenability decision on each graph")
    s.set_defaults(fn=cmd_census16)

    s = sub.add_parser("selftest", help="run the acceptance checks")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if getattr(a, "fn", None) is None:
            raise UsageError("missing subcommand")
        return a.fn(a)
    except UsageError as e:
        print(f"wlcc: usage error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (InvalidInput, PreconditionError) as e:
        print(f"wlcc: invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InternalError, AssertionError) as e:
        print(f"wlcc: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
