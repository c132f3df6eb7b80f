"""Applicative structures: finite tables, and the law / embedding / hnf checkers.

Checkers are three-valued.  A position fails only on two clashing values or a
value against proven divergence; a value against exhausted fuel is
inconclusive; two non-values are consistent but undetermined.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Protocol, Sequence, Tuple

from .foundations import (
    Diverged, EventuallyConstant, PartialReal, Value, Verdict, eval_at, render,
)
from .machine import (
    If0, In, Lit, Node, Pair, Pred, Qry, Snd, Fst, Succ, encode_program,
)

PASS, FAIL, INCONCLUSIVE, UNSUPPORTED = "pass", "fail", "inconclusive", "unsupported"


def merge_status(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


class ApplicativeModel(Protocol):
    name: str
    k: PartialReal
    s: PartialReal

    def apply(self, a: PartialReal, b: PartialReal) -> PartialReal: ...


def requires_total(model) -> bool:
    """K2 demands ``ka``/``sab`` be defined; B is a total algebra and does not."""
    return getattr(model, "total_results", True)


# -- finite tables ----------------------------------------------------------

class TableError(ValueError):
    """Malformed table or unknown element name."""


class _Undefined:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Undefined"


Undefined = _Undefined()


@dataclass
class PcaTable:
    """A finite partial magma on named elements."""

    elements: List[str]
    graph: Dict[Tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise TableError("duplicate element names")
        known = set(self.elements)
        for (a, b), c in self.graph.items():
            for name in (a, b, c):
                if name not in known:
                    raise TableError(f"unknown element {name!r}")

    @classmethod
    def from_dict(cls, data) -> "PcaTable":
        if not isinstance(data, dict) or "elements" not in data:
            raise TableError("expected an object with 'elements' and 'table'")
        elements = data["elements"]
        if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
            raise TableError("'elements' must be a list of names")
        graph: Dict[Tuple[str, str], str] = {}
        for row in data.get("table", []):
            if not (isinstance(row, list) and len(row) == 3 and all(isinstance(x, str) for x in row)):
                raise TableError(f"bad triple {row!r}")
            a, b, c = row
            if (a, b) in graph:
                raise TableError(f"duplicate entry for {a}.{b}")
            graph[(a, b)] = c
        return cls(list(elements), graph)

    @classmethod
    def from_json(cls, text: str) -> "PcaTable":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise TableError(f"invalid JSON: {e}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "PcaTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_dict(self) -> dict:
        return {"elements": list(self.elements),
                "table": [[a, b, c] for (a, b), c in self.graph.items()]}

    def triples(self) -> List[Tuple[str, str, str]]:
        return [(a, b, c) for (a, b), c in self.graph.items()]

    def apply(self, a: str, b: str):
        return table_apply(self, a, b)


def table_apply(t: PcaTable, a: str, b: str):
    """``a . b`` in ``t``, or :data:`Undefined`."""
    for name in (a, b):
        if name not in t.elements:
            raise TableError(f"unknown element {name!r}")
    return t.graph.get((a, b), Undefined)


def random_table(rng: random.Random, max_size: int = 6, density: float = 0.5) -> PcaTable:
    """A random partial magma with 1..max_size elements."""
    n = rng.randint(1, max_size)
    names = [f"e{i}" for i in range(n)]
    graph = {(a, b): rng.choice(names) for a in names for b in names if rng.random() < density}
    return PcaTable(names, graph)


# -- per-position comparison ------------------------------------------------

@dataclass
class Issue:
    kind: str  # diff | conflict | undefined | inconclusive | extraction | injectivity
    sample: int
    position: int
    left: str = ""
    right: str = ""
    note: str = ""


@dataclass
class LawReport:
    law: str
    model: str
    status: str
    samples: int
    depth: int
    fuel: int
    positions_checked: int = 0
    inconclusive_positions: int = 0
    undetermined_positions: int = 0
    issues: List[Issue] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def compare(lhs: Verdict, rhs: Verdict) -> str:
    """``agree``, ``diff``, ``conflict``, ``inconclusive`` or ``undetermined``."""
    lv, rv = isinstance(lhs, Value), isinstance(rhs, Value)
    if lv and rv:
        return "agree" if lhs.value == rhs.value else "diff"
    if lv or rv:
        other = rhs if lv else lhs
        return "conflict" if isinstance(other, Diverged) else "inconclusive"
    return "undetermined"


class _Tally:
    def __init__(self, report: LawReport, max_issues: int = 50):
        self.r = report
        self.max_issues = max_issues
        self.failed = False
        self.inconclusive = False

    def issue(self, issue: Issue):
        if len(self.r.issues) < self.max_issues:
            self.r.issues.append(issue)

    def definedness(self, x: PartialReal, sample: int, what: str):
        """Require a value at every position of ``x`` (a K2 definedness claim)."""
        r = self.r
        for n in range(r.depth):
            v = eval_at(x, n, r.fuel)
            if isinstance(v, Value):
                continue
            if isinstance(v, Diverged):
                self.failed = True
                self.issue(Issue("undefined", sample, n, render(v), note=f"{what} undefined"))
            else:
                self.inconclusive = True
                r.inconclusive_positions += 1
                self.issue(Issue("inconclusive", sample, n, render(v), note=f"{what} out of fuel"))
            return

    def positions(self, lhs: PartialReal, rhs: PartialReal, sample: int):
        r = self.r
        for n in range(r.depth):
            lv, rv = eval_at(lhs, n, r.fuel), eval_at(rhs, n, r.fuel)
            r.positions_checked += 1
            c = compare(lv, rv)
            if c == "agree":
                continue
            if c == "undetermined":
                r.undetermined_positions += 1
                continue
            if c == "inconclusive":
                r.inconclusive_positions += 1
                self.inconclusive = True
            else:
                self.failed = True
            self.issue(Issue(c, sample, n, render(lv), render(rv)))

    def finish(self) -> LawReport:
        self.r.status = FAIL if self.failed else INCONCLUSIVE if self.inconclusive else PASS
        return self.r


# -- laws -------------------------------------------------------------------

def check_k_law(m, samples: Sequence[Tuple[PartialReal, PartialReal]], depth: int,
                fuel: int) -> LawReport:
    """``ka`` is defined and ``kab = a``, positionwise up to ``depth``."""
    t = _Tally(LawReport("k", m.name, PASS, len(samples), depth, fuel))
    for i, (a, b) in enumerate(samples):
        ka = m.apply(m.k, a)
        if requires_total(m):
            t.definedness(ka, i, "ka")
        t.positions(m.apply(ka, b), a, i)
    return t.finish()


def check_s_law(m, samples: Sequence[Tuple[PartialReal, PartialReal, PartialReal]],
                depth: int, fuel: int) -> LawReport:
    """``sab`` is defined and ``sabc`` agrees with ``ac(bc)`` wherever either has a value."""
    t = _Tally(LawReport("s", m.name, PASS, len(samples), depth, fuel))
    for i, (a, b, c) in enumerate(samples):
        sab = m.apply(m.apply(m.s, a), b)
        if requires_total(m):
            t.definedness(sab, i, "sab")
        rhs = m.apply(m.apply(a, c), m.apply(b, c))
        t.positions(m.apply(sab, c), rhs, i)
    return t.finish()


def check_barendregt(m, samples: Sequence[Tuple[PartialReal, PartialReal]], depth: int,
                     fuel: int = 10_000) -> LawReport:
    """``extract_sab(s a b)`` gives back ``a`` and ``b``."""
    report = LawReport("barendregt", m.name, PASS, len(samples), depth, fuel)
    extract = getattr(m, "extract_sab", None)
    if extract is None:
        report.status = UNSUPPORTED
        return report
    t = _Tally(report)
    for i, (a, b) in enumerate(samples):
        sab = m.apply(m.apply(m.s, a), b)
        try:
            a2, b2 = extract(sab)
        except ValueError as e:
            t.failed = True
            t.issue(Issue("extraction", i, 0, note=str(e)))
            continue
        t.positions(a2, a, i)
        t.positions(b2, b, i)
    return t.finish()


# -- weak embeddings --------------------------------------------------------

@dataclass
class EmbeddingReport:
    status: str
    depth: int
    fuel: int
    injective: str
    injectivity: List[dict] = field(default_factory=list)
    triples: List[dict] = field(default_factory=list)
    issues: List[Issue] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def first_difference(x: PartialReal, y: PartialReal, depth: int, fuel: int):
    """``(position, vx, vy)`` of the first clash, ``None`` if none, ``"?"`` if undecided first."""
    for n in range(depth):
        vx, vy = eval_at(x, n, fuel), eval_at(y, n, fuel)
        c = compare(vx, vy)
        if c == "diff":
            return n, vx.value, vy.value
        if c != "agree":
            return "?"
    return None


def check_weak_embedding(src: PcaTable, f: Mapping[str, PartialReal], tgt, depth: int,
                         fuel: int, strict: bool = False) -> EmbeddingReport:
    """``f(a) f(b)`` is defined and equals ``f(ab)`` for every defined ``ab`` of ``src``.

    With ``strict`` the application is guaranteed to converge, so a position
    that runs out of fuel counts as a failure rather than as inconclusive.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    rep = EmbeddingReport(PASS, depth, fuel, PASS)
    inj_status = []
    for a, b in combinations(src.elements, 2):
        d = first_difference(f[a], f[b], depth, fuel)
        if d is None:
            inj_status.append(FAIL)
            rep.injectivity.append({"left": a, "right": b, "separated_at": None})
        elif d == "?":
            inj_status.append(INCONCLUSIVE)
            rep.injectivity.append({"left": a, "right": b, "separated_at": "?"})
        else:
            rep.injectivity.append({"left": a, "right": b, "separated_at": d[0]})
    rep.injective = merge_status(inj_status)
    statuses = [rep.injective]
    for i, (a, b, c) in enumerate(src.triples()):
        prod = tgt.apply(f[a], f[b])
        st = PASS
        bad: List[int] = []
        for n in range(depth):
            v, w = eval_at(prod, n, fuel), eval_at(f[c], n, fuel)
            if isinstance(v, Value):
                cmp = compare(v, w)
                if cmp == "agree":
                    continue
                kind = "diff" if cmp == "diff" else ("conflict" if cmp == "conflict" else "inconclusive")
            elif isinstance(v, Diverged) or strict:
                kind = "undefined"
            else:
                kind = "inconclusive"
            st = merge_status([st, INCONCLUSIVE if kind == "inconclusive" else FAIL])
            bad.append(n)
            if len(rep.issues) < 50:
                rep.issues.append(Issue(kind, i, n, render(v), render(w), note=f"{a}.{b}={c}"))
        rep.triples.append({"a": a, "b": b, "c": c, "status": st, "bad_positions": bad[:20]})
        statuses.append(st)
    rep.status = merge_status(statuses)
    return rep


# -- head normal forms ------------------------------------------------------

KINDS = ("K", "S", "KA", "SA", "SAB")


@dataclass(frozen=True)
class Hnf:
    """A head normal form; ``kind`` is recorded when built, never inferred."""

    kind: str
    args: Tuple[str, ...]
    real: PartialReal


def build_hnfs(m, a: PartialReal, b: PartialReal, names=("a", "b")) -> List[Hnf]:
    sa = m.apply(m.s, a)
    return [
        Hnf("K", (), m.k),
        Hnf("S", (), m.s),
        Hnf("KA", (names[0],), m.apply(m.k, a)),
        Hnf("SA", (names[0],), sa),
        Hnf("SAB", names, m.apply(sa, b)),
    ]


@dataclass
class HnfReport:
    model: str
    status: str
    depth: int
    pairs: List[dict] = field(default_factory=list)
    injectivity: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _hnf_name(h: Hnf) -> str:
    return h.kind.lower()


def hnf_dissimilarity(m, a: PartialReal, b: PartialReal, depth: int = 64,
                      fuel: int = 100_000) -> HnfReport:
    """A separating position for each of the ten cross-kind pairs of hnfs."""
    rep = HnfReport(m.name, PASS, depth)
    statuses = []
    for x, y in combinations(build_hnfs(m, a, b), 2):
        d = first_difference(x.real, y.real, depth, fuel)
        entry = {"left": _hnf_name(x), "right": _hnf_name(y)}
        if d is None or d == "?":
            entry["position"] = None
            statuses.append(FAIL if d is None else INCONCLUSIVE)
        else:
            entry.update(position=d[0], left_value=d[1], right_value=d[2])
        rep.pairs.append(entry)
    rep.status = merge_status(statuses)
    return rep


def hnf_injectivity(m, pairs: Sequence[Tuple[PartialReal, PartialReal, PartialReal, PartialReal]],
                    depth: int = 64, fuel: int = 100_000) -> List[dict]:
    """For ``(a, a', b, b')`` with ``a != a'`` or ``b != b'``: where ``ka``, ``sa``, ``sab`` separate.

    ``ka``/``sa`` are only compared when ``a`` and ``a'`` differ within depth.
    """
    out = []
    for i, (a, a2, b, b2) in enumerate(pairs):
        row = {"sample": i}
        a_differ = first_difference(a, a2, depth, fuel)
        ab_differ = a_differ if a_differ is not None else first_difference(b, b2, depth, fuel)
        if a_differ not in (None, "?"):
            for kind, head in (("ka", m.k), ("sa", m.s)):
                d = first_difference(m.apply(head, a), m.apply(head, a2), depth, fuel)
                row[kind] = d[0] if d not in (None, "?") else d
        if ab_differ not in (None, "?"):
            x = m.apply(m.apply(m.s, a), b)
            y = m.apply(m.apply(m.s, a2), b2)
            d = first_difference(x, y, depth, fuel)
            row["sab"] = d[0] if d not in (None, "?") else d
        out.append(row)
    return out


# -- sample generators ------------------------------------------------------

def random_ec(rng: random.Random, max_len: int = 4, max_val: int = 9,
              nonzero_tail: bool = False) -> EventuallyConstant:
    vals = [rng.randint(0, max_val) for _ in range(rng.randint(0, max_len))]
    tail = rng.randint(1 if nonzero_tail else 0, max_val)
    return EventuallyConstant(vals, tail)


def random_program(rng: random.Random, depth: int = 3) -> Node:
    """A small always-terminating program (no Mu, no Run)."""
    if depth <= 0 or rng.random() < 0.3:
        return In() if rng.random() < 0.5 else Lit(rng.randint(0, 5))
    op = rng.choice(["succ", "pred", "qry", "if0", "pair", "fst", "snd"])
    sub = lambda: random_program(rng, depth - 1)  # noqa: E731
    if op == "succ":
        return Succ(sub())
    if op == "pred":
        return Pred(sub())
    if op == "qry":
        # keep queries near the front so samples stay cheap
        return Qry(If0(sub(), In(), Lit(rng.randint(0, 7))))
    if op == "if0":
        return If0(sub(), sub(), sub())
    if op == "pair":
        return Pair(sub(), sub())
    return (Fst if op == "fst" else Snd)(sub())


def random_program_real(rng: random.Random, depth: int = 3) -> EventuallyConstant:
    """A program followed by a short random tail, presented as a real."""
    code = encode_program(random_program(rng, depth))
    rest = [rng.randint(0, 9) for _ in range(rng.randint(0, 3))]
    return EventuallyConstant([code] + rest, rng.randint(0, 9))


def headed_program_real(rng: random.Random, depth: int = 3) -> EventuallyConstant:
    """A program whose applications answer another program's number at position 0.

    Applying such a real yields something that can itself be applied, so
    nested applications in the s-law do real work instead of diverging.
    """
    inner = encode_program(random_program(rng, depth))
    body = If0(In(), Lit(inner), random_program(rng, depth))
    return EventuallyConstant([encode_program(body)], rng.randint(0, 9))


def machine_samples(rng: random.Random, n: int, law: str, model=None,
                    literals_only: bool = False) -> List[tuple]:
    """Seeded sample tuples for ``law`` in ``{"k", "s", "pair"}``.

    For the s-law, first arguments are headed programs or combinator terms
    and second arguments are programs, so ``ac(bc)`` usually computes
    something; literals appear as the third argument.
    """

    def literal():
        return random_ec(rng)

    def any_real():
        r = rng.random()
        if r < 0.4:
            return literal()
        if r < 0.7:
            return random_program_real(rng)
        return headed_program_real(rng)

    def applicable():
        if model is not None and rng.random() < 0.3:
            return combinator_term(model, rng, headed_program_real(rng))
        return headed_program_real(rng)

    out = []
    for _ in range(n):
        if literals_only:
            out.append(tuple(literal() for _ in range(3 if law == "s" else 2)))
        elif law == "s":
            b = random_program_real(rng) if rng.random() < 0.5 else applicable()
            out.append((applicable(), b, any_real()))
        else:
            out.append((any_real(), any_real()))
    return out


def combinator_term(m, rng: random.Random, x: PartialReal) -> PartialReal:
    """One of ``k``, ``s``, ``kx``, ``sk``, ``skk``, ``sx``."""
    choice = rng.randrange(6)
    if choice == 0:
        return m.k
    if choice == 1:
        return m.s
    if choice == 2:
        return m.apply(m.k, x)
    if choice == 3:
        return m.apply(m.s, m.k)
    if choice == 4:
        return m.apply(m.apply(m.s, m.k), m.k)
    return m.apply(m.s, x)


__all__ = [
    "PASS", "FAIL", "INCONCLUSIVE", "UNSUPPORTED", "merge_status", "ApplicativeModel",
    "TableError", "Undefined", "PcaTable", "table_apply", "random_table", "Issue",
    "LawReport", "compare", "check_k_law", "check_s_law", "check_barendregt",
    "EmbeddingReport", "first_difference", "check_weak_embedding", "KINDS", "Hnf",
    "build_hnfs", "HnfReport", "hnf_dissimilarity", "hnf_injectivity", "random_ec",
    "random_program", "random_program_real", "headed_program_real", "machine_samples",
    "combinator_term",
]
