"""``pcalab``: batch front end for evaluation, embedding certificates and law suites.

Exit codes: 0 pass, 1 refutation, 2 inconclusive (or a position without a
value), 3 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import List, Optional

from .bmodel import BModel, b_check_strong_inclusion
from .foundations import PartialReal, Value, eval_at, parse_real, render
from .kleene import KleeneK2, kleene_samples
from .machine import asm, default_machine
from .pca import (
    FAIL, INCONCLUSIVE, PASS, TableError, PcaTable, check_barendregt, check_k_law,
    check_s_law, hnf_dissimilarity, hnf_injectivity, machine_samples, merge_status,
)
from .embed import certify_embedding

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
USAGE_ERROR = 3
MODELS = ("k2m", "k2k", "b")


class TermError(ValueError):
    pass


def make_model(name: str):
    if name == "k2m":
        return default_machine()
    if name == "k2k":
        return KleeneK2()
    if name == "b":
        return BModel()
    raise TermError(f"unknown model {name!r}")


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def tokenize(text: str) -> List[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermError(f"cannot read term at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_term(text: str, model) -> PartialReal:
    """Left-associated application over ``k``, ``s`` and real literals."""
    tokens = tokenize(text)
    i = 0

    def atom() -> PartialReal:
        nonlocal i
        tok = tokens[i]
        i += 1
        if tok == "(":
            x = term()
            if i >= len(tokens) or tokens[i] != ")":
                raise TermError("missing ')'")
            i += 1
            return x
        if tok == ")":
            raise TermError("unexpected ')'")
        if tok in ("k", "s"):
            return getattr(model, tok)
        try:
            return parse_real(tok)
        except ValueError as e:
            raise TermError(str(e)) from None

    def term() -> PartialReal:
        if i >= len(tokens) or tokens[i] == ")":
            raise TermError("empty term")
        x = atom()
        while i < len(tokens) and tokens[i] != ")":
            x = model.apply(x, atom())
        return x

    x = term()
    if i != len(tokens):
        raise TermError("unbalanced ')'")
    return x


# -- commands ---------------------------------------------------------------

def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, default=str)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_eval(args) -> int:
    if args.term is None:
        raise TermError("--term is required")
    model = make_model(args.model)
    x = parse_term(args.term, model)
    verdicts = [eval_at(x, n, args.fuel) for n in range(args.depth)]
    print(" ".join(render(v) for v in verdicts))
    return 0 if all(isinstance(v, Value) for v in verdicts) else 2


def cmd_embed(args) -> int:
    if args.table is None:
        raise TermError("--table is required")
    table = PcaTable.load(args.table)
    cert = certify_embedding(table, args.depth, args.fuel, seed=args.seed)
    _emit(cert.to_dict(), args.out)
    if args.out:
        print(f"embed: {cert.status}")
    return EXIT[cert.status]


def cmd_laws(args) -> int:
    model = make_model(args.model)
    rng = random.Random(args.seed)
    depth, fuel, trials = args.depth, args.fuel, args.trials
    if args.model == "b":
        rep = b_check_strong_inclusion(depth, fuel, trials, args.seed)
        print(f"k: {rep.k_law['status']}\ns: {rep.s_law['status']}\n"
              f"inclusion: {rep.agreement['status']}")
        if args.out:
            _emit(rep.to_dict(), args.out)
        return EXIT[rep.status]
    if args.model == "k2m":
        gen = lambda n, law: machine_samples(rng, n, law, model=model)  # noqa: E731
    else:
        gen = lambda n, law: kleene_samples(rng, n, law, model=model)  # noqa: E731
    reports = [check_k_law(model, gen(trials, "k"), depth, fuel),
               check_s_law(model, gen(trials, "s"), depth, fuel),
               check_barendregt(model, gen(trials, "pair") if args.model == "k2m" else [], depth, fuel)]
    for r in reports:
        print(f"{r.law}: {r.status}")
    if args.out:
        _emit({"model": args.model, "seed": args.seed, "reports": [r.to_dict() for r in reports]},
              args.out)
    return EXIT[merge_status(r.status for r in reports if r.status in EXIT)]


def cmd_hnf(args) -> int:
    if args.model != "k2m":
        raise TermError("hnf witnesses are only defined for the machine coding (k2m)")
    m = default_machine()
    rng = random.Random(args.seed)
    a, b = machine_samples(rng, 1, "pair", literals_only=True)[0]
    rep = hnf_dissimilarity(m, a, b, args.depth, args.fuel)
    for p in rep.pairs:
        print(f"{p['left']} {p['right']} {p['position'] if p['position'] is not None else '-'}")
    if args.out:
        quads = []
        for _ in range(args.trials):
            (a1, b1), (a2, b2) = machine_samples(rng, 2, "pair", literals_only=True)
            quads.append((a1, a2, b1, b2))
        report = rep.to_dict()
        report["tags"] = {k: str(v) for k, v in m.tags.items()}
        report["injectivity"] = hnf_injectivity(m, quads, args.depth, args.fuel)
        _emit(report, args.out)
    return EXIT[rep.status]


def cmd_asm(args) -> int:
    if args.term is None:
        raise TermError("--term is required")
    try:
        print(asm(args.term))
    except ValueError as e:
        raise TermError(str(e)) from None
    return 0


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_ERROR)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pcalab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, depth=16, fuel=100_000):
        sp.add_argument("--model", choices=MODELS, default="k2m")
        sp.add_argument("--depth", type=int, default=depth)
        sp.add_argument("--fuel", type=int, default=fuel)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=50)
        sp.add_argument("--out")

    sp = sub.add_parser("eval", help="print a prefix of an applicative term")
    common(sp)
    sp.add_argument("--term")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("embed", help="certify the embedding of a finite table")
    common(sp, depth=128, fuel=1000)
    sp.add_argument("--table")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("laws", help="run the k, s and extraction law suites")
    common(sp)
    sp.set_defaults(func=cmd_laws)

    sp = sub.add_parser("hnf", help="separating positions between head normal forms")
    common(sp, depth=64)
    sp.set_defaults(func=cmd_hnf)

    sp = sub.add_parser("asm", help="print the number of a program in s-expression syntax")
    sp.add_argument("--term")
    sp.set_defaults(func=cmd_asm)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("depth", "fuel", "trials"):
        v = getattr(args, name, None)
        if v is not None and (v < 0 or (name == "depth" and v < 1)):
            print(f"pcalab: error: --{name} out of range", file=sys.stderr)
            return USAGE_ERROR
    try:
        return args.func(args)
    except (TermError, TableError, OSError) as e:
        print(f"pcalab: error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
