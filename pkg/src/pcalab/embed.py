"""Embedding a finite partial magma into the Kleene coding of K2, with a certifier.

Each element ``a`` becomes a real ``f(a)``:

* ``f(a)(0)`` is the least code of ``a``;
* at a position ``q`` of the set L (below) of level at least one, ``f(a)``
  holds the value of the application chain that ``q`` describes;
* everywhere else it holds the sentinel ``t(q)``, which makes ``f(a) f(b)``
  answer at once outside L.

L is the least set containing 0 and closed under ``m -> <(m, z)>``.  For
``q = <(m_1, z_0)>``, ``m_1 = <(m_2, z_1)>``, ..., ``m_i = 0`` the chain is
``w_0 = code(a)``, ``w_j = code(gamma(w_{j-1}) . gamma(z_{j-1}))``; the value is
``w_i + i`` when every step is defined and ``j - 1`` when step ``j`` is the
first undefined one.

The literal mode writes 0 off L and on every undefined chain instead; the
certifier shows that this leaves required applications undefined.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from .foundations import Real, Value, eval_at, render
from .kleene import application_scan_index, k2k_apply
from .pca import (
    FAIL, PASS, PcaTable, Undefined, check_weak_embedding, merge_status,
    table_apply,
)
from .seqcode import Position, as_seq, code_of, position_mod

REPAIRED, LITERAL = "repaired", "literal"


class Numbering:
    """``gamma(n) = elements[n mod size]``; ``mincode(a)`` is the index of ``a``."""

    def __init__(self, elements):
        if not elements:
            raise ValueError("cannot number an empty carrier")
        self.elements = list(elements)
        self._index = {a: i for i, a in enumerate(self.elements)}

    def gamma(self, n: Position) -> str:
        return self.elements[position_mod(n, len(self.elements))]

    def mincode(self, a: str) -> int:
        return self._index[a]


# -- the set L --------------------------------------------------------------

def level(n: Position) -> Optional[int]:
    """Level of ``n`` in L, or None when ``n`` is not in L."""
    i = 0
    while n != 0:
        seq = as_seq(n)
        if len(seq) != 2:
            return None
        n = seq[0]
        i += 1
    return i


def in_L(n: Position) -> bool:
    return level(n) is not None


def chain_zs(q: Position) -> List[Position]:
    """``z_0, z_1, ...`` of an L-position, outermost first."""
    zs = []
    while q != 0:
        inner, z = as_seq(q)
        zs.append(z)
        q = inner
    return zs


def l_position(zs) -> Position:
    """The L-position whose chain reads ``zs`` (outermost first)."""
    q: Position = 0
    for z in reversed(list(zs)):
        q = code_of((q, z))
    return q


def t_value(n: Position) -> int:
    """The sentinel off L: ``t(<(m)>) = 0`` if ``m`` in L else ``t(m) + 1``; 0 elsewhere."""
    if in_L(n):
        raise ValueError("t is only defined off L")
    depth = 0
    while True:
        seq = as_seq(n)
        if len(seq) != 1 or in_L(seq[0]):
            return depth
        depth += 1
        n = seq[0]


# -- chains -----------------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    codes: Tuple[int, ...]  # w_0, w_1, ... up to the last defined step
    failed_at: Optional[int]  # first undefined step j, or None

    @property
    def length(self) -> int:
        return len(self.codes) - 1 + (self.failed_at is not None)


def chain(table: PcaTable, num: Numbering, a: str, q: Position) -> Chain:
    w = [num.mincode(a)]
    for j, z in enumerate(chain_zs(q), start=1):
        c = table_apply(table, num.gamma(w[-1]), num.gamma(z))
        if c is Undefined:
            return Chain(tuple(w), j)
        w.append(num.mincode(c))
    return Chain(tuple(w), None)


def chain_value(table: PcaTable, num: Numbering, a: str, q: Position,
                mode: str = REPAIRED) -> int:
    """Value of ``f(a)`` at an L-position of level at least one."""
    ch = chain(table, num, a, q)
    if ch.failed_at is None:
        return ch.codes[-1] + len(ch.codes) - 1
    return ch.failed_at - 1 if mode == REPAIRED else 0


def embed_value(table: PcaTable, num: Numbering, a: str, q: Position,
                mode: str = REPAIRED) -> int:
    if q == 0:
        return num.mincode(a)
    if in_L(q):
        return chain_value(table, num, a, q, mode)
    return t_value(q) if mode == REPAIRED else 0


def embed_real(table: PcaTable, num: Numbering, a: str, mode: str = REPAIRED) -> Real:
    """``f(a)`` as a lazily evaluated real."""
    if mode not in (REPAIRED, LITERAL):
        raise ValueError(f"unknown mode {mode!r}")
    if a not in table.elements:
        raise ValueError(f"unknown element {a!r}")
    return Real(lambda pos, budget: embed_value(table, num, a, pos, mode), cost=1,
                label=f"f({a})")


def embedding(table: PcaTable, mode: str = REPAIRED) -> Dict[str, Real]:
    num = Numbering(table.elements)
    return {a: embed_real(table, num, a, mode) for a in table.elements}


def prepend_law_holds(table: PcaTable, num: Numbering, a: str, b: str, q: Position) -> bool:
    """For defined ``ab = c`` and ``q`` in L: ``f(a)`` one layer out is ``f(c)(q) + 1``."""
    c = table_apply(table, a, b)
    if c is Undefined:
        raise ValueError(f"{a}.{b} is undefined")
    outer = code_of((q, num.mincode(b)))
    return chain_value(table, num, a, outer) == embed_value(table, num, c, q) + 1


def random_l_position(rng: random.Random, max_level: int = 4, max_z: int = 12) -> Position:
    return l_position([rng.randint(0, max_z) for _ in range(rng.randint(0, max_level))])


# -- certificate ------------------------------------------------------------

def expected_scan_index(n: Position) -> int:
    """Probe that resolves ``(f(a) f(b))(n)``: 1 off L, 2 on L."""
    return 2 if in_L(n) else 1


def _literal_divergence_proof(n: int) -> str:
    # Off L the first three probes read 4 = <()>, <(n)> and <(n, b0)>, none in L;
    # later probes code sequences of length >= 3 that start with n != 0, so
    # never 0 and never in L, where the literal f is 0.
    return "every probe lands off L and away from 0, where the literal table is 0"


@dataclass
class Certificate:
    status: str
    mode: str
    injectivity: dict
    triples: List[dict] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    witnesses: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def certify_embedding(table: PcaTable, depth: int = 128, fuel: int = 1000,
                      mode: str = REPAIRED, seed: Optional[int] = None) -> Certificate:
    """Check that ``f`` is injective and ``f(a) f(b)`` is total and equals ``f(ab)``.

    Positions below ``depth`` are checked for every defined triple; each must
    be resolved by the probe :func:`expected_scan_index` predicts.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    num = Numbering(table.elements)
    f = {a: embed_real(table, num, a, mode) for a in table.elements}

    heads = {a: eval_at(f[a], 0, fuel) for a in table.elements}
    values = [v.value for v in heads.values() if isinstance(v, Value)]
    inj_ok = len(values) == len(heads) and len(set(values)) == len(values)
    injectivity = {"status": PASS if inj_ok else FAIL,
                   "codes": {a: render(v) for a, v in heads.items()}}

    weak = check_weak_embedding(table, f, _K2K, depth, fuel, strict=True)
    statuses = [injectivity["status"], weak.status]
    triples, witnesses = [], []
    for i, (a, b, c) in enumerate(table.triples()):
        probes: List[Optional[int]] = []
        bad: List[int] = []
        for n in range(depth):
            verdict, m = application_scan_index(f[a], f[b], n, fuel)
            probes.append(m)
            want = eval_at(f[c], n, fuel)
            ok = (isinstance(verdict, Value) and verdict == want
                  and m is not None and m <= expected_scan_index(n))
            if not ok:
                bad.append(n)
                if len(witnesses) < 20:
                    w = {"a": a, "b": b, "c": c, "position": n, "in_L": in_L(n),
                         "verdict": render(verdict), "expected": render(want), "probe": m}
                    if mode == LITERAL and not isinstance(verdict, Value) and not in_L(n):
                        w["divergence"] = _literal_divergence_proof(n)
                    witnesses.append(w)
        st = weak.triples[i]["status"] if not bad else FAIL
        statuses.append(st)
        triples.append({"a": a, "b": b, "c": c, "status": st, "positions_checked": depth,
                        "probe_indices": probes, "failed_positions": bad[:20]})
    return Certificate(merge_status(statuses), mode, injectivity, triples,
                       {"depth": depth, "fuel": fuel, "seed": seed, "mode": mode},
                       witnesses)


class _K2KApply:
    name = "k2k"

    @staticmethod
    def apply(a, b):
        return k2k_apply(a, b)


_K2K = _K2KApply()


# -- tables for testing -----------------------------------------------------

def self_application_table() -> PcaTable:
    return PcaTable(["x", "y"], {("x", "x"): "y"})


def constant_table(size: int = 3) -> PcaTable:
    names = [f"e{i}" for i in range(size)]
    return PcaTable(names, {(a, b): names[0] for a in names for b in names})


def empty_table(size: int = 4) -> PcaTable:
    return PcaTable([f"e{i}" for i in range(size)], {})


__all__ = [
    "REPAIRED", "LITERAL", "Numbering", "level", "in_L", "chain_zs", "l_position",
    "t_value", "Chain", "chain", "chain_value", "embed_value", "embed_real", "embedding",
    "prepend_law_holds", "random_l_position", "expected_scan_index", "Certificate",
    "certify_embedding", "self_application_table", "constant_table", "empty_table",
]
