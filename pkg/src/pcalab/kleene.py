"""Kleene's original coding of K2: a real is read as a table of verdicts on prefixes.

``F_alpha(beta)`` scans ``m = 0, 1, 2, ...`` and returns ``alpha(<beta|m>) - 1`` at
the first nonzero probe; ``(alpha . beta)(n) = F_alpha(n ^ beta)``.

Continuous functionals are written as *strategies*: deterministic procedures
that learn about their argument only through a reader.  A prefix reader
raises :class:`NeedMore` past its end, which makes every strategy monotone
by construction.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Tuple

from .foundations import (
    Budget, Divergence, Diverged, EventuallyConstant, FuelOut, OutOfFuel, PartialReal, Real,
    Value, Verdict, to_int,
)
from .seqcode import Position, SeqPos, as_seq, code_of, extend, position_mod

Reader = Callable[[Position, Budget], int]

EMPTY = code_of(())


class NeedMore(Exception):
    def __init__(self, source):
        super().__init__()
        self.source = source


@dataclass(frozen=True)
class Output:
    value: int


@dataclass(frozen=True)
class NeedMoreVerdict:
    pass


NEED_MORE = NeedMoreVerdict()


class PrefixReader:
    """Reader over a finite initial segment; anything past it needs more."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[int]):
        self.values = tuple(values)

    def __call__(self, pos: Position, budget: Budget) -> int:
        if isinstance(pos, SeqPos) or pos >= len(self.values):
            raise NeedMore(self)
        return self.values[pos]


class TableReader:
    """Reader over a finite partial assignment of positions."""

    __slots__ = ("table",)

    def __init__(self, table: Mapping[Position, int]):
        self.table = table

    def __call__(self, pos: Position, budget: Budget) -> int:
        try:
            return self.table[pos]
        except KeyError:
            raise NeedMore(self) from None


# -- the scan ---------------------------------------------------------------

def scan(read_f: Reader, head: Optional[Position], read_x: Reader, budget: Budget,
         pace: Optional[Reader] = None) -> Tuple[int, int]:
    """``F_f(head ^ x)`` (or ``F_f(x)`` when ``head`` is None).

    Returns ``(value, m)`` with ``m`` the index of the deciding probe.  Each
    probe costs one step. ``pace(m)`` is read before probe ``m`` when given.
    """
    code = EMPTY
    i = 0  # next index of x to read
    m = 0
    while True:
        if pace is not None:
            pace(m, budget)
        budget.spend(1)
        v = read_f(code, budget)
        if v:
            return v - 1, m
        if head is not None and m == 0:
            code = extend(code, head)
        else:
            code = extend(code, read_x(i, budget))
            i += 1
        m += 1


def F_scan(alpha: PartialReal, beta: PartialReal, budget: Budget) -> Tuple[int, int]:
    return scan(alpha.at, None, beta.at, budget)


def F_apply(alpha: PartialReal, beta: PartialReal, fuel: int) -> Verdict:
    """``F_alpha(beta)`` within ``fuel`` steps."""
    budget = Budget(fuel)
    try:
        return Value(F_scan(alpha, beta, budget)[0])
    except OutOfFuel:
        return FuelOut()
    except Divergence:
        return Diverged()


def finite_F_verdict(alpha_table: Mapping[Position, int], beta_table: Mapping[int, int],
                     n: int):
    """``(alpha . beta)(n)`` decided from finite information only.

    Probes outside either table give ``NEED_MORE``. The scan reads beta in
    order, so it stops after at most ``len(beta prefix) + 2`` probes.
    """
    ra, rb = TableReader(alpha_table), TableReader(beta_table)
    try:
        # generous budget: the scan is bounded by the beta table, not by fuel
        return Output(scan(ra, n, rb, Budget(len(beta_table) + 3))[0])
    except NeedMore as e:
        if e.source is ra or e.source is rb:
            return NEED_MORE
        raise


# -- strategies and reification --------------------------------------------

class Strategy:
    """A continuous functional ``(n, beta) -> value`` accessed through a reader."""

    def decide(self, n: Position, read: Reader, budget: Budget) -> int:
        raise NotImplementedError

    def on_prefix(self, n: Position, answers: Sequence[int]):
        """Verdict from a finite list of answers: ``Output(v)`` or ``NEED_MORE``."""
        reader = PrefixReader(answers)
        try:
            return Output(self.decide(n, reader, Budget(10**9)))
        except NeedMore as e:
            if e.source is reader:
                return NEED_MORE
            raise

    def apply_to(self, beta: PartialReal) -> PartialReal:
        """The real ``reify(self) . beta``; positions are decided directly."""

        def rule(pos, budget):
            return self.decide(pos, beta.at, budget)

        return Real(rule, cost=1, label=f"({self.label()} {beta.label})")

    def label(self) -> str:
        return type(self).__name__


class FunctionStrategy(Strategy):
    """Wrap ``fn(n, read)``; ``read(i)`` returns the i-th answer."""

    def __init__(self, fn: Callable[[Position, Callable[[int], int]], int], name: str = "S"):
        self.fn = fn
        self.name = name

    def decide(self, n, read, budget):
        return self.fn(n, lambda i: read(i, budget))

    def label(self) -> str:
        return self.name


class PrefixRuleStrategy(Strategy):
    """Wrap a monotone ``rule(n, answers) -> int | None`` over finite answer lists."""

    def __init__(self, rule: Callable[[Position, Tuple[int, ...]], Optional[int]],
                 name: str = "S"):
        self.rule = rule
        self.name = name

    def decide(self, n, read, budget):
        answers: list = []
        while True:
            v = self.rule(n, tuple(answers))
            if v is not None:
                return v
            budget.spend(1)
            answers.append(read(len(answers), budget))

    def label(self) -> str:
        return self.name


def reify_value(strategy: Strategy, pos: Position, budget: Budget) -> int:
    """Table entry of the code of ``strategy`` at ``pos``.

    ``<(n, b0..bk-1)>`` holds ``v+1`` when the strategy outputs ``v`` on
    question ``n`` from answers ``b``, else 0; positions not coding a
    nonempty sequence hold 0.
    """
    seq = as_seq(pos)
    if not seq:
        return 0
    reader = PrefixReader(tuple(to_int(x) for x in seq[1:]))
    try:
        return strategy.decide(seq[0], reader, budget) + 1
    except NeedMore as e:
        if e.source is reader:
            return 0
        raise


class Functional(Real):
    """A real that also knows the strategy it codes, for direct application."""

    def __init__(self, rule, strategy: Strategy, label: str = ""):
        super().__init__(rule, cost=1, label=label)
        self.strategy = strategy


class Reified(Functional):
    def __init__(self, strategy: Strategy):
        super().__init__(lambda pos, budget: reify_value(strategy, pos, budget),
                         strategy, label=f"reify({strategy.label()})")


def reify(strategy: Strategy) -> Reified:
    return Reified(strategy)


# -- application ------------------------------------------------------------

def scan_apply(alpha: PartialReal, beta: PartialReal) -> PartialReal:
    """Application by the literal scan ``(alpha . beta)(n) = F_alpha(n ^ beta)``."""

    def rule(pos, budget):
        return scan(alpha.at, pos, beta.at, budget)[0]

    cls = Real if (alpha.total and beta.total) else PartialReal
    return cls(rule, cost=1, label=f"({alpha.label} {beta.label})")


def k2k_apply(alpha: PartialReal, beta: PartialReal) -> PartialReal:
    """Application; reals that carry their strategy are applied directly.

    The shortcut is exact: a strategy reading only through its reader decides
    at the first prefix that covers every position it reads, which is where
    the scan's first nonzero probe sits.
    """
    if isinstance(alpha, Functional):
        return alpha.strategy.apply_to(beta)
    return scan_apply(alpha, beta)


def application_scan_index(alpha: PartialReal, beta: PartialReal, n: Position,
                           fuel: int) -> Tuple[Verdict, Optional[int]]:
    """``(alpha . beta)(n)`` by the literal scan, with the index of the deciding probe."""
    budget = Budget(fuel)
    try:
        v, m = scan(alpha.at, n, beta.at, budget)
        return Value(v), m
    except OutOfFuel:
        return FuelOut(), None
    except Divergence:
        return Diverged(), None


# -- k ----------------------------------------------------------------------

class _KStrategy(Strategy):
    """``q -> a(n) + 1`` if ``q = <(n)>``, else 0."""

    def decide(self, q, read, budget):
        seq = as_seq(q)
        if len(seq) == 1:
            return read(seq[0], budget) + 1
        return 0

    def apply_to(self, a):
        def rule(q, budget):
            return self.decide(q, a.at, budget)

        return Functional(rule, _ConstStrategy(a), label=f"(k {a.label})")

    def label(self):
        return "k"


class _ConstStrategy(Strategy):
    """``n -> a(n)``, ignoring the argument."""

    def __init__(self, a: PartialReal):
        self.a = a

    def decide(self, n, read, budget):
        return self.a.at(n, budget)

    def label(self):
        return f"k {self.a.label}"


def _k_table(pos: Position, budget: Budget) -> int:
    seq = as_seq(pos)
    if not seq:
        return 0
    q, rest = seq[0], seq[1:]
    qs = as_seq(q)
    if len(qs) == 1:
        n = qs[0]
        if isinstance(n, int) and len(rest) >= n + 1:
            return to_int(rest[n]) + 2
        return 0
    return 1 if not rest else 0


def k2k_k() -> Functional:
    """The k combinator as the closed-form table; applies via its strategy."""
    return Functional(_k_table, _KStrategy(), label="k")


# -- s ----------------------------------------------------------------------

def sxyz(n: Position, read_a: Reader, read_b: Reader, read_c: Reader, budget: Budget) -> int:
    """``(a c (b c))(n)`` through readers.

    The outer scan reads ``c(m)`` before probe ``m``; under a prefix reader
    this bounds it by the prefix length, and on full reals it is harmless.
    """

    def ac(q, bud):
        return scan(read_a, q, read_c, bud)[0]

    def bc(i, bud):
        return scan(read_b, i, read_c, bud)[0]

    return scan(ac, n, bc, budget, pace=read_c)[0]


class _SabStrategy(Strategy):
    def __init__(self, read_a: Reader, read_b: Reader, label: str = "s a b"):
        self.read_a, self.read_b, self._label = read_a, read_b, label

    def decide(self, n, read_c, budget):
        return sxyz(n, self.read_a, self.read_b, read_c, budget)

    def label(self):
        return self._label


class _SaStrategy(Strategy):
    def __init__(self, read_a: Reader, label: str = "s a"):
        self.read_a, self._label = read_a, label

    def decide(self, p, read_b, budget):
        return reify_value(_SabStrategy(self.read_a, read_b), p, budget)

    def apply_to(self, b):
        return Reified(_SabStrategy(self.read_a, b.at, f"{self._label} {b.label}"))

    def label(self):
        return self._label


class _SStrategy(Strategy):
    def decide(self, p, read_a, budget):
        return reify_value(_SaStrategy(read_a), p, budget)

    def apply_to(self, a):
        return Reified(_SaStrategy(a.at, f"s {a.label}"))

    def label(self):
        return "s"


def k2k_s() -> Reified:
    """The s combinator: three nested reifications of the finite simulation of ``a c (b c)``."""
    r = Reified(_SStrategy())
    r.label = "s"
    return r


# -- sample strategies -------------------------------------------------------
#
# Expressions: ("n", M) question mod M, ("c", v), ("x", j) / ("y", j) answer j
# of the first / second argument, ("x_at", e) reads answer ``e mod 4``,
# ("add", e, e), ("if0", e, e, e).

def eval_expr(expr, n: Position, read_x: Callable[[int], int],
              read_y: Optional[Callable[[int], int]] = None) -> int:
    def ev(e):
        op = e[0]
        if op == "n":
            return position_mod(n, e[1])
        if op == "c":
            return e[1]
        if op == "x":
            return read_x(e[1])
        if op == "y":
            return read_y(e[1])
        if op == "x_at":
            return read_x(ev(e[1]) % 4)
        if op == "add":
            return ev(e[1]) + ev(e[2])
        if op == "if0":
            return ev(e[2]) if ev(e[1]) == 0 else ev(e[3])
        raise ValueError(f"unknown expression {e!r}")

    return ev(expr)


def expr_text(expr) -> str:
    if expr[0] in ("n", "c", "x", "y"):
        return f"{expr[0]}{expr[1]}"
    return "(" + " ".join([expr[0]] + [expr_text(e) for e in expr[1:]]) + ")"


def random_expr(rng: random.Random, depth: int = 2, binary: bool = False):
    if depth <= 0 or rng.random() < 0.35:
        r = rng.randrange(4 if binary else 3)
        if r == 0:
            return ("n", rng.randint(1, 7))
        if r == 1:
            return ("c", rng.randint(0, 9))
        return ("x" if r == 2 else "y", rng.randint(0, 3))
    op = rng.choice(["add", "if0", "x_at"])
    sub = lambda: random_expr(rng, depth - 1, binary)  # noqa: E731
    if op == "x_at":
        return ("x_at", sub())
    if op == "add":
        return ("add", sub(), sub())
    return ("if0", sub(), sub(), sub())


class ExprStrategy(Strategy):
    """A unary strategy given by an expression; reads at most answers 0..3."""

    def __init__(self, expr):
        self.expr = expr

    def decide(self, n, read, budget):
        return eval_expr(self.expr, n, lambda i: read(i, budget))

    def label(self):
        return expr_text(self.expr)


class _BoundExpr(Strategy):
    def __init__(self, expr, read_x: Reader, label: str):
        self.expr, self.read_x, self._label = expr, read_x, label

    def decide(self, n, read_y, budget):
        return eval_expr(self.expr, n, lambda i: self.read_x(i, budget),
                         lambda i: read_y(i, budget))

    def label(self):
        return self._label


class CurriedExprStrategy(Strategy):
    """A two-argument expression ``(x, y) -> value``, coded so that ``r x y`` runs it."""

    def __init__(self, expr):
        self.expr = expr

    def decide(self, p, read_x, budget):
        return reify_value(_BoundExpr(self.expr, read_x, ""), p, budget)

    def apply_to(self, x):
        return Reified(_BoundExpr(self.expr, x.at, f"{self.label()} {x.label}"))

    def label(self):
        return "xy." + expr_text(self.expr)


def random_strategy(rng: random.Random, depth: int = 2) -> ExprStrategy:
    return ExprStrategy(random_expr(rng, depth))


def random_binary_strategy(rng: random.Random, depth: int = 2) -> CurriedExprStrategy:
    return CurriedExprStrategy(random_expr(rng, depth, binary=True))


def kleene_samples(rng: random.Random, n: int, law: str, model: Optional["KleeneK2"] = None,
                   literals_only: bool = False) -> list:
    """Seeded sample tuples with small moduli for ``law`` in ``{"k", "s", "pair"}``.

    Every application the s-law forms converges quickly: first arguments are
    curried two-argument strategies or combinators, second arguments give
    total applications, so scans never run on an all-zero table.
    """
    model = model or KleeneK2()

    def literal(lo=0):
        vals = [rng.randint(lo, 9) for _ in range(rng.randint(0, 4))]
        return EventuallyConstant(vals, rng.randint(max(lo, 1), 9))

    def unary():
        return reify(random_strategy(rng))

    def total():
        r = rng.randrange(4)
        if r == 0:
            return literal()
        if r == 1:
            return unary()
        if r == 2:
            return model.apply(model.k, literal())
        return model.k

    def first():
        r = rng.randrange(6)
        if r < 3:
            return reify(random_binary_strategy(rng))
        if r == 3:
            return model.k
        if r == 4:
            return model.apply(model.s, model.k)
        return literal(lo=2)

    def second():
        r = rng.randrange(4)
        if r == 0:
            return literal(lo=1)
        if r == 1:
            return unary()
        if r == 2:
            return model.k
        return model.apply(model.k, total())

    out = []
    for _ in range(n):
        if literals_only:
            out.append(tuple(literal() for _ in range(3 if law == "s" else 2)))
        elif law == "s":
            out.append((first(), second(), total()))
        else:
            out.append((total(), total()))
    return out


class KleeneK2:
    name = "k2k"

    def __init__(self):
        self.k = k2k_k()
        self.s = k2k_s()

    def apply(self, a, b):
        return k2k_apply(a, b)


__all__ = [
    "NeedMore", "Output", "NEED_MORE", "PrefixReader", "TableReader", "scan", "F_scan",
    "F_apply", "finite_F_verdict", "Strategy", "FunctionStrategy", "PrefixRuleStrategy",
    "reify", "reify_value", "Functional", "Reified", "scan_apply", "k2k_apply",
    "application_scan_index", "k2k_k", "k2k_s", "sxyz", "KleeneK2", "ExprStrategy",
    "CurriedExprStrategy", "eval_expr", "expr_text", "random_expr", "random_strategy",
    "random_binary_strategy", "kleene_samples",
]
