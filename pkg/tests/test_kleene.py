import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_apply, brute_F, ec, ref_encode
from pcalab.foundations import (
    Eq, EventuallyConstant, FuelOut, Value, eval_at, parse_real, prefix, prefix_eq,
    real_from_function, zeros,
)
from pcalab.kleene import (
    NEED_MORE, CurriedExprStrategy, ExprStrategy, FunctionStrategy, KleeneK2, Output,
    PrefixRuleStrategy, F_apply, application_scan_index, eval_expr, finite_F_verdict,
    k2k_apply, kleene_samples, random_expr, random_strategy, reify, scan_apply,
)
from pcalab.machine import If0, In, Lit, Qry, Succ, default_machine, encode_program, parity
from pcalab.seqcode import seq_encode

FUEL = 10**5


def table_real(table):
    return real_from_function(lambda c: table.get(c, 0), label="table")


def values(x, depth, fuel=FUEL):
    out = []
    for v in prefix(x, depth, fuel):
        assert isinstance(v, Value), v
        out.append(v.value)
    return out


# -- the scan ---------------------------------------------------------------

def test_F_apply_examples():
    assert (ref_encode(()), ref_encode((0,)), ref_encode((0, 0))) == (4, 1, 2)
    alpha = table_real({2: 7})
    assert F_apply(alpha, zeros(), 100) == Value(6)
    assert all(F_apply(zeros(), zeros(), f) == FuelOut() for f in (0, 5, 500))
    first = table_real({4: 1})
    for beta in (zeros(), parse_real("ec:9,9;3")):
        assert F_apply(first, beta, 10) == Value(0)


def test_F_apply_fuel_is_probe_count():
    alpha = table_real({2: 7})
    assert F_apply(alpha, zeros(), 2) == FuelOut()
    assert F_apply(alpha, zeros(), 3) == Value(6)


def test_finite_F_verdict_examples():
    # the same question as the F_apply example, asked through n ^ beta
    assert finite_F_verdict({4: 0, 1: 0, 2: 7}, {0: 0}, 0) == Output(6)
    assert finite_F_verdict({}, {0: 0}, 0) == NEED_MORE
    assert finite_F_verdict({4: 3}, {}, 5) == Output(2)


small_tables = st.dictionaries(st.integers(0, 40), st.integers(0, 3), max_size=12)
beta_lists = st.lists(st.integers(0, 2), max_size=4)


@given(small_tables, small_tables, beta_lists, beta_lists, st.integers(0, 3))
def test_finite_F_verdict_monotone(ta, extra, b, b_extra, n):
    tb = dict(enumerate(b))
    v = finite_F_verdict(ta, tb, n)
    bigger_a = {**extra, **ta}
    bigger_b = dict(enumerate(b + b_extra))
    w = finite_F_verdict(bigger_a, bigger_b, n)
    if v != NEED_MORE:
        assert w == v


@settings(max_examples=200)
@given(small_tables, st.lists(st.integers(0, 3), max_size=4), st.integers(0, 3),
       st.integers(0, 12))
def test_scan_matches_brute_scanner(ta, bv, bt, fuel):
    got = F_apply(table_real(ta), EventuallyConstant(bv, bt), fuel)
    kind, v = brute_F(lambda c: ta.get(c, 0), ec(bv, bt), fuel)
    assert got == (Value(v) if kind == "value" else FuelOut())


@settings(max_examples=100)
@given(small_tables, st.lists(st.integers(0, 3), max_size=4), st.integers(0, 3),
       st.integers(0, 5), st.integers(0, 12))
def test_application_matches_brute_scanner(ta, bv, bt, n, fuel):
    verdict, m = application_scan_index(table_real(ta), EventuallyConstant(bv, bt), n, fuel)
    kind, v = brute_apply(lambda c: ta.get(c, 0), ec(bv, bt), n, fuel)
    assert verdict == (Value(v) if kind == "value" else FuelOut())
    assert (m is None) == (kind == "fuel")


# -- reification ------------------------------------------------------------

def test_reify_identity():
    r = reify(FunctionStrategy(lambda n, read: n, "id"))
    for beta in (zeros(), parse_real("ec:7;1")):
        assert values(k2k_apply(r, beta), 10) == list(range(10))
        assert values(scan_apply(r, beta), 10) == list(range(10))


def test_reify_successor_of_first_answer():
    r = reify(FunctionStrategy(lambda n, read: read(0) + 1, "inc"))
    beta = parse_real("ec:4;0")
    assert values(scan_apply(r, beta), 5) == [5] * 5
    _, m = application_scan_index(r, beta, 3, FUEL)
    assert m == 2


def test_reify_always_need_more_diverges():
    r = reify(PrefixRuleStrategy(lambda n, answers: None, "never"))
    assert eval_at(scan_apply(r, zeros()), 0, 200) == FuelOut()


def test_reify_constant_zero():
    r = reify(FunctionStrategy(lambda n, read: 0, "zero"))
    assert values(k2k_apply(r, parse_real("ec:3;3")), 6) == [0] * 6


def test_reify_table_shape():
    r = reify(FunctionStrategy(lambda n, read: read(1) + n, "s"))
    assert eval_at(r, 4, 10) == Value(0)  # empty sequence
    assert eval_at(r, seq_encode((2, 5)), 10) == Value(0)  # not enough answers
    assert eval_at(r, seq_encode((2, 5, 6)), 10) == Value(9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.integers(0, 9), max_size=5), st.integers(0, 9),
       st.integers(0, 30))
def test_reify_soundness(seed, bv, bt, n):
    s = random_strategy(random.Random(seed))
    beta = EventuallyConstant(bv, bt)
    want = eval_expr(s.expr, n, ec(bv, bt))
    assert eval_at(scan_apply(reify(s), beta), n, FUEL) == Value(want)
    assert eval_at(k2k_apply(reify(s), beta), n, FUEL) == Value(want)


def test_on_prefix_is_monotone():
    s = ExprStrategy(("add", ("x", 2), ("n", 3)))
    assert s.on_prefix(4, (1, 1)) == NEED_MORE
    assert s.on_prefix(4, (1, 1, 5)) == Output(6)
    assert s.on_prefix(4, (1, 1, 5, 0)) == Output(6)


def test_curried_strategy():
    r = reify(CurriedExprStrategy(("add", ("x", 0), ("y", 1))))
    x, y = parse_real("ec:3;0"), parse_real("ec:0,4;0")
    assert values(k2k_apply(k2k_apply(r, x), y), 3) == [7, 7, 7]
    assert values(scan_apply(scan_apply(r, x), y), 3) == [7, 7, 7]


# -- combinators ------------------------------------------------------------

def test_k_examples():
    m = KleeneK2()
    a = parse_real("ec:3,1,4;0")
    x = k2k_apply(k2k_apply(m.k, a), zeros())
    assert eval_at(x, 2, FUEL) == Value(4)
    assert eval_at(scan_apply(scan_apply(m.k, a), zeros()), 2, FUEL) == Value(4)
    for a in (zeros(), a, parse_real("ec:8;9")):
        assert eval_at(k2k_apply(m.k, a), 4, FUEL) == Value(0)
    ka = k2k_apply(m.k, a)
    assert prefix_eq(k2k_apply(ka, zeros()), k2k_apply(ka, parse_real("ec:5,5;1")), 32,
                     FUEL) == Eq()


def test_k_closed_form_table():
    k = KleeneK2().k
    a = [3, 1, 4]
    q = seq_encode((1,))
    assert eval_at(k, seq_encode((q, *a)), 10) == Value(1 + 2)
    assert eval_at(k, seq_encode((q,)), 10) == Value(0)
    assert eval_at(k, seq_encode((7,)), 10) == Value(1)  # 7 codes no singleton
    assert eval_at(k, seq_encode((7, 0)), 10) == Value(0)


def test_k_application_via_scan_matches_direct():
    m = KleeneK2()
    a = parse_real("ec:2,6;1")
    direct = k2k_apply(m.k, a)
    scanned = scan_apply(m.k, a)
    for n in (0, 1, 4, seq_encode((0,)), seq_encode((1,)), seq_encode((5,))):
        assert eval_at(direct, n, FUEL) == eval_at(scanned, n, FUEL)


def test_skk_identity():
    m = KleeneK2()
    skk = m.apply(m.apply(m.s, m.k), m.k)
    c = parse_real("ec:5;0")
    assert prefix_eq(m.apply(skk, c), c, 16, FUEL) == Eq()
    assert values(m.apply(skk, c), 2) == [5, 0]


def test_s_with_diverging_argument():
    m = KleeneK2()
    sab = m.apply(m.apply(m.s, zeros()), zeros())
    assert values(sab, 8) == [0] * 8
    assert all(v == FuelOut() for v in prefix(m.apply(sab, zeros()), 3, 300))


@pytest.mark.parametrize("a,b", [("ec:0;0", "ec:1;2"), ("ec:3,4;5", "ec:0;0")])
def test_s_empty_sequence_is_zero(a, b):
    m = KleeneK2()
    sab = m.apply(m.apply(m.s, parse_real(a)), parse_real(b))
    assert eval_at(sab, 4, FUEL) == Value(0)


def test_s_via_scan_matches_direct():
    m = KleeneK2()
    a, b = reify(CurriedExprStrategy(("add", ("x", 0), ("y", 0)))), m.k
    direct = m.apply(m.apply(m.s, a), b)
    scanned = scan_apply(scan_apply(m.s, a), b)
    for q in (4, seq_encode((0,)), seq_encode((0, 2)), seq_encode((1, 2, 6))):
        assert eval_at(direct, q, FUEL) == eval_at(scanned, q, 10**6)


def test_samples_are_seeded():
    a = kleene_samples(random.Random(3), 5, "s")
    b = kleene_samples(random.Random(3), 5, "s")
    assert [[x.label for x in t] for t in a] == [[x.label for x in t] for t in b]


# -- consistency with the machine coding -----------------------------------

def _machine_real(program):
    return EventuallyConstant([encode_program(program)], 0)


def _arg(j):
    # argument slot j of the machine oracle
    return Lit(2 * j + 1)


CROSS = [
    (("add", ("x", 1), ("c", 2)), Succ(Succ(Qry(_arg(1))))),
    (("if0", ("x", 0), ("c", 5), ("x", 2)), If0(Qry(_arg(0)), Lit(5), Qry(_arg(2)))),
    (("n", 2), parity(In())),
]


@pytest.mark.parametrize("expr,program", CROSS)
@pytest.mark.parametrize("beta", ["ec:0;0", "ec:4,0,9;1", "ec:;6"])
def test_cross_coding_consistency(expr, program, beta):
    b = parse_real(beta)
    kleene = k2k_apply(reify(ExprStrategy(expr)), b)
    machine = default_machine().apply(_machine_real(program), b)
    assert prefix_eq(kleene, machine, 16, FUEL) == Eq()


def test_random_expr_deterministic():
    assert random_expr(random.Random(1), 3, True) == random_expr(random.Random(1), 3, True)
