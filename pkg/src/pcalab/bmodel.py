"""The partial-function model B: the machine coding run over partial reals.

Application is :func:`machine_apply` unchanged; a query to an undefined
oracle position diverges.  Total reals are elements of B, and on them the
application is literally the K2 one, so K2 sits inside B by inclusion.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import List, Sequence, Tuple

from .foundations import Holed, PartialReal, Value, eval_at, render
from .machine import default_machine, machine_apply
from .pca import (
    FAIL, PASS, Issue, LawReport, check_k_law, check_s_law, compare, machine_samples,
    merge_status,
)


def b_apply(alpha: PartialReal, beta: PartialReal) -> PartialReal:
    """``alpha . beta`` in B; always an element, possibly nowhere defined."""
    return machine_apply(alpha, beta)


class BModel:
    """B with the same ``k`` and ``s`` reals as the machine coding."""

    name = "b"
    total_results = False  # B is a total algebra: no definedness obligation

    def __init__(self):
        m = default_machine()
        self.k, self.s = m.k, m.s

    def apply(self, a: PartialReal, b: PartialReal) -> PartialReal:
        return b_apply(a, b)


def punch(rng: random.Random, x: PartialReal, depth: int, max_holes: int = 3) -> Holed:
    """``x`` with a few random positions in ``1..depth-1`` made undefined."""
    holes = rng.sample(range(1, max(depth, 2)), k=min(rng.randint(1, max_holes), max(depth - 1, 1)))
    return Holed(x, holes)


def holed_samples(rng: random.Random, n: int, law: str, depth: int) -> List[tuple]:
    """Law samples with holes punched in one or more components."""
    out = []
    model = default_machine()
    for tup in machine_samples(rng, n, law, model=model):
        out.append(tuple(punch(rng, x, depth) if rng.random() < 0.6 else x for x in tup))
    return out


@dataclass
class InclusionReport:
    status: str
    depth: int
    fuel: int
    samples: int
    k_law: dict = field(default_factory=dict)
    s_law: dict = field(default_factory=dict)
    agreement: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def check_inclusion_agreement(pairs: Sequence[Tuple[PartialReal, PartialReal]], depth: int,
                              fuel: int, reference=None) -> LawReport:
    """``b_apply`` and a reference K2 application give identical verdicts on total pairs."""
    from .machine import k2m_apply

    reference = reference or k2m_apply
    rep = LawReport("inclusion", "b", PASS, len(pairs), depth, fuel)
    for i, (a, b) in enumerate(pairs):
        x, y = b_apply(a, b), reference(a, b)
        for n in range(depth):
            vx, vy = eval_at(x, n, fuel), eval_at(y, n, fuel)
            rep.positions_checked += 1
            if vx != vy:
                rep.status = FAIL
                rep.issues.append(Issue("diff", i, n, render(vx), render(vy)))
    return rep


def check_monotonicity(pairs: Sequence[Tuple[PartialReal, PartialReal]], depth: int, fuel: int,
                       seed: int = 0) -> LawReport:
    """Filling holes in the inputs never loses or changes a defined output position."""
    rng = random.Random(seed)
    rep = LawReport("monotonicity", "b", PASS, len(pairs), depth, fuel)
    for i, (a, b) in enumerate(pairs):
        ha, hb = punch(rng, a, depth), punch(rng, b, depth)
        partial, filled = b_apply(ha, hb), b_apply(a, b)
        for n in range(depth):
            vp = eval_at(partial, n, fuel)
            rep.positions_checked += 1
            if not isinstance(vp, Value):
                continue
            vf = eval_at(filled, n, fuel)
            if compare(vp, vf) != "agree":
                rep.status = FAIL
                rep.issues.append(Issue("monotonicity", i, n, render(vp), render(vf)))
    return rep


def b_check_strong_inclusion(depth: int = 16, fuel: int = 100_000, trials: int = 50,
                             seed: int = 0) -> InclusionReport:
    """Run the k and s laws in B over holed samples, with the K2 combinators unchanged."""
    rng = random.Random(seed)
    model = BModel()
    k_rep = check_k_law(model, holed_samples(rng, trials, "k", depth), depth, fuel)
    s_rep = check_s_law(model, holed_samples(rng, trials, "s", depth), depth, fuel)
    total = machine_samples(rng, trials, "pair")
    agree = check_inclusion_agreement(total, depth, fuel)
    return InclusionReport(
        merge_status([k_rep.status, s_rep.status, agree.status]), depth, fuel, trials,
        k_rep.to_dict(), s_rep.to_dict(), agree.to_dict(),
    )


__all__ = [
    "b_apply", "BModel", "punch", "holed_samples", "InclusionReport",
    "check_inclusion_agreement", "check_monotonicity", "b_check_strong_inclusion",
]
