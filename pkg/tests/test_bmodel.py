import random

from hypothesis import given, settings, strategies as st

from pcalab.bmodel import (
    BModel, b_apply, b_check_strong_inclusion, check_inclusion_agreement, check_monotonicity,
    holed_samples, punch,
)
from pcalab.foundations import (
    Diverged, Holed, Value, eval_at, join, parse_real, prefix, zeros,
)
from pcalab.machine import default_machine, opl_eval
from pcalab.pca import FAIL, PASS, check_k_law, check_s_law, machine_samples

FUEL = 10**5


def direct_run(alpha, beta, n, fuel):
    """Reference: run the program at ``alpha(0)`` on ``alpha (+) beta`` by hand."""
    return opl_eval(eval_at(alpha, 0, fuel).value, n, join(alpha, beta), fuel)


def test_total_inputs_match_direct_run():
    rng = random.Random(4)
    for a, b in machine_samples(rng, 20, "pair"):
        x = b_apply(a, b)
        for n in range(16):
            v, ref = eval_at(x, n, FUEL), direct_run(a, b, n, FUEL)
            if isinstance(v, Value) or isinstance(ref, Value):
                assert v == ref


def test_undefined_code_position():
    x = b_apply(Holed(parse_real("ec:1;0"), [0]), zeros())
    assert all(v == Diverged() for v in prefix(x, 8, FUEL))


def test_k_over_a_holed_argument():
    m = BModel()
    a = Holed(parse_real("ec:3,1,4,1,5,9;2"), [5])
    x = m.apply(m.apply(m.k, a), parse_real("ec:7;7"))
    got = prefix(x, 8, FUEL)
    assert got[5] == Diverged()
    assert [v.value for i, v in enumerate(got) if i != 5] == [3, 1, 4, 1, 5, 2, 2]


def test_k_law_with_hole_at_three():
    m = BModel()
    a = Holed(parse_real("ec:1,2,3,4;5"), [3])
    rep = check_k_law(m, [(a, zeros())], 16, FUEL)
    assert rep.status == PASS
    assert rep.undetermined_positions == 1


def test_s_law_with_holed_argument():
    m = BModel()
    c = Holed(parse_real("ec:2,7,1;8"), [1, 2])
    assert check_s_law(m, [(m.k, m.k, c)], 16, FUEL).status == PASS


def test_same_combinators_as_k2():
    m, b = default_machine(), BModel()
    assert b.k is not None and prefix(b.k, 4, FUEL) == prefix(m.k, 4, FUEL)
    assert prefix(b.s, 4, FUEL) == prefix(m.s, 4, FUEL)


def test_inclusion_agreement_detects_a_wrong_reference():
    pairs = machine_samples(random.Random(0), 5, "pair")
    assert check_inclusion_agreement(pairs, 8, FUEL).status == PASS
    bad = check_inclusion_agreement(pairs, 8, FUEL, reference=lambda a, b: zeros())
    assert bad.status == FAIL


def test_monotonicity_suite():
    pairs = machine_samples(random.Random(2), 20, "pair")
    assert check_monotonicity(pairs, 16, FUEL, seed=2).status == PASS


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_filling_holes_is_monotone(seed):
    rng = random.Random(seed)
    (a, b), = machine_samples(rng, 1, "pair")
    ha, hb = punch(rng, a, 12), punch(rng, b, 12)
    partial, full = b_apply(ha, hb), b_apply(a, b)
    for n in range(12):
        v = eval_at(partial, n, FUEL)
        if isinstance(v, Value):
            assert eval_at(full, n, FUEL) == v


def test_punch_keeps_position_zero():
    rng = random.Random(1)
    for _ in range(50):
        h = punch(rng, zeros(), 8)
        assert eval_at(h, 0, 1) == Value(0)
        assert 1 <= sum(v == Diverged() for v in prefix(h, 8, 1)) <= 3


def test_strong_inclusion_small():
    rep = b_check_strong_inclusion(depth=8, trials=10, seed=3)
    assert rep.status == PASS
    assert len(holed_samples(random.Random(0), 4, "s", 8)) == 4
