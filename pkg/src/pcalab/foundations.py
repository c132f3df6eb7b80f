"""Lazy reals over omega, the fuel discipline, and the real-literal formats."""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Tuple, Union

from .seqcode import Position, SeqPos, is_big, to_int as _to_int


class OutOfFuel(Exception):
    """Raised internally when a budget is exhausted."""


class Divergence(Exception):
    """Raised internally when divergence is provable (bad code, undefined slot)."""


class Budget:
    """Mutable step counter shared by one evaluation and everything it calls."""

    __slots__ = ("remaining",)

    def __init__(self, steps: int):
        if steps < 0:
            raise ValueError("fuel must be nonnegative")
        self.remaining = steps

    def spend(self, n: int = 1) -> None:
        if self.remaining < n:
            self.remaining = 0
            raise OutOfFuel
        self.remaining -= n


@dataclass(frozen=True)
class Value:
    value: int


@dataclass(frozen=True)
class FuelOut:
    pass


@dataclass(frozen=True)
class Diverged:
    pass


Verdict = Union[Value, FuelOut, Diverged]

_DIV = 0
_VAL = 1


def to_int(pos: Position) -> int:
    # a position whose code cannot even be written down is out of reach
    try:
        return _to_int(pos)
    except OverflowError:
        raise OutOfFuel from None


class PartialReal:
    """A partial function omega -> omega given by a pure rule.

    ``rule(pos, budget)`` returns an int, or raises :class:`Divergence` /
    :class:`OutOfFuel`.  Results are memoized together with the fuel they
    consumed, and a cache hit charges that same amount again, so a memo hit is
    indistinguishable from recomputation.
    """

    total = False

    def __init__(self, rule: Callable[[Position, Budget], int], cost: int = 1, label: str = ""):
        self._rule = rule
        self._cost = cost
        self.label = label
        self._memo: Dict[Position, Tuple[int, int, int]] = {}
        self._short: Dict[Position, int] = {}
        self._lock = threading.Lock()

    def at(self, pos: Position, budget: Budget) -> int:
        with self._lock:
            hit = self._memo.get(pos)
            short = self._short.get(pos)
        if hit is not None:
            kind, v, c = hit
            budget.spend(c)
            if kind == _DIV:
                raise Divergence
            return v
        start = budget.remaining
        if short is not None and start <= short:
            budget.remaining = 0
            raise OutOfFuel
        try:
            budget.spend(self._cost)
            v = self._rule(pos, budget)
        except OutOfFuel:
            with self._lock:
                if start > self._short.get(pos, -1):
                    self._short[pos] = start
            raise
        except Divergence:
            with self._lock:
                self._memo[pos] = (_DIV, 0, start - budget.remaining)
            raise
        with self._lock:
            self._memo[pos] = (_VAL, v, start - budget.remaining)
        return v

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label or '...'})"


class Real(PartialReal):
    """A real: intended total (derived applications may still fail to converge)."""

    total = True


def eval_at(x: PartialReal, n: Position, fuel: int) -> Verdict:
    budget = Budget(fuel)
    try:
        return Value(x.at(n, budget))
    except OutOfFuel:
        return FuelOut()
    except Divergence:
        return Diverged()


def prefix(x: PartialReal, depth: int, fuel: int) -> list:
    """Verdicts at positions ``0..depth-1``, each with a fresh budget."""
    return [eval_at(x, n, fuel) for n in range(depth)]


# -- literals ---------------------------------------------------------------

def _short(v: int) -> str:
    return str(v) if v.bit_length() < 64 else f"<{v.bit_length()} bits>"


class EventuallyConstant(Real):
    def __init__(self, values: Iterable[int], tail: int):
        self.values = tuple(values)
        self.tail = tail
        if any(v < 0 for v in self.values) or tail < 0:
            raise ValueError("literal values must be natural numbers")
        vals, t = self.values, tail

        def rule(pos, budget):
            if is_big(pos) or pos >= len(vals):
                return t
            return vals[pos]

        super().__init__(rule, cost=0, label=self.text())

    def text(self) -> str:
        return "ec:" + ",".join(map(_short, self.values)) + ";" + _short(self.tail)


class FiniteGraph(PartialReal):
    """Partial literal ``pc:``: defined exactly on the listed positions."""

    def __init__(self, graph: Dict[int, int]):
        self.graph = dict(graph)
        g = self.graph

        def rule(pos, budget):
            if isinstance(pos, SeqPos) or pos not in g:
                raise Divergence
            return g[pos]

        super().__init__(rule, cost=0, label=self.text())

    def text(self) -> str:
        return "pc:" + ",".join(f"{k}={v}" for k, v in sorted(self.graph.items()))


class Holed(PartialReal):
    """``base`` with the given positions made undefined."""

    def __init__(self, base: PartialReal, holes: Iterable[int]):
        self.base = base
        self.holes = frozenset(holes)
        h = self.holes

        def rule(pos, budget):
            if pos in h:
                raise Divergence
            return base.at(pos, budget)

        super().__init__(rule, cost=0, label=f"{base.label} minus {sorted(h)}")


def zeros() -> Real:
    return EventuallyConstant((), 0)


def program_real(code: int) -> Real:
    """``code`` followed by zeros: how a bare program is presented as a real."""
    return EventuallyConstant((code,), 0)


_EC = re.compile(r"^ec:((?:\d+(?:,\d+)*)?);(\d+)$")
_PRG = re.compile(r"^prg:(\d+)$")
_PC = re.compile(r"^pc:((?:\d+=\d+(?:,\d+=\d+)*)?)$")


def parse_real(text: str) -> PartialReal:
    """Parse ``ec:v0,...,vk;c``, ``prg:e`` or ``pc:i=v,...``."""
    text = text.strip()
    m = _EC.match(text)
    if m:
        vals = [int(v) for v in m.group(1).split(",")] if m.group(1) else []
        return EventuallyConstant(vals, int(m.group(2)))
    m = _PRG.match(text)
    if m:
        return program_real(int(m.group(1)))
    m = _PC.match(text)
    if m:
        graph: Dict[int, int] = {}
        if m.group(1):
            for item in m.group(1).split(","):
                k, v = item.split("=")
                if int(k) in graph:
                    raise ValueError(f"duplicate position {k} in {text!r}")
                graph[int(k)] = int(v)
        return FiniteGraph(graph)
    raise ValueError(f"not a real literal: {text!r}")


# -- stream combinators -----------------------------------------------------

def cons(n: int, x: PartialReal) -> PartialReal:
    """The stream ``n`` followed by ``x``."""

    def rule(pos, budget):
        if pos == 0:
            return n
        return x.at(to_int(pos) - 1, budget)

    cls = Real if x.total else PartialReal
    return cls(rule, cost=0, label=f"{n}^{x.label}")


def join(x: PartialReal, y: PartialReal) -> PartialReal:
    """Interleave: even slots from ``x``, odd slots from ``y``."""

    def rule(pos, budget):
        q, r = divmod(to_int(pos), 2)
        return (y if r else x).at(q, budget)

    cls = Real if (x.total and y.total) else PartialReal
    return cls(rule, cost=0, label=f"({x.label} (+) {y.label})")


# -- finite-prefix comparison -----------------------------------------------

@dataclass(frozen=True)
class Eq:
    pass


@dataclass(frozen=True)
class Diff:
    position: int
    left: int
    right: int


@dataclass(frozen=True)
class Inconclusive:
    position: int


def prefix_eq(x: PartialReal, y: PartialReal, depth: int, fuel: int):
    """Compare the first ``depth`` positions.

    Stops at the first position that is a clash (``Diff``) or that fails to
    produce a value on either side (``Inconclusive``).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    for n in range(depth):
        vx, vy = eval_at(x, n, fuel), eval_at(y, n, fuel)
        if isinstance(vx, Value) and isinstance(vy, Value):
            if vx.value != vy.value:
                return Diff(n, vx.value, vy.value)
            continue
        return Inconclusive(n)
    return Eq()


def render(v: Verdict) -> str:
    if isinstance(v, Value):
        return str(v.value)
    return "fuel" if isinstance(v, FuelOut) else "div"


def real_from_function(fn: Callable[[int], int], label: str = "") -> Real:
    """Wrap a cheap total Python function as a literal-like real (no fuel cost)."""
    return Real(lambda pos, budget: fn(to_int(pos)), cost=0, label=label)


def as_real(x: Union[PartialReal, str]) -> PartialReal:
    return parse_real(x) if isinstance(x, str) else x


__all__ = [
    "Budget", "OutOfFuel", "Divergence", "Value", "FuelOut", "Diverged", "Verdict",
    "PartialReal", "Real", "EventuallyConstant", "FiniteGraph", "Holed",
    "zeros", "program_real", "parse_real", "cons", "join", "eval_at", "prefix",
    "prefix_eq", "Eq", "Diff", "Inconclusive", "render", "real_from_function",
    "as_real",
]
