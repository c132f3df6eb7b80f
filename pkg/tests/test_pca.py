import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from pcalab.foundations import (
    Diverged, EventuallyConstant, FuelOut, Value, parse_real, program_real, zeros,
)
from pcalab.kleene import KleeneK2
from pcalab.machine import Lit, Mu, default_machine, encode_program
from pcalab.pca import (
    FAIL, INCONCLUSIVE, PASS, UNSUPPORTED, PcaTable, TableError, Undefined, build_hnfs,
    check_barendregt, check_k_law, check_s_law, check_weak_embedding, compare,
    first_difference, hnf_dissimilarity, hnf_injectivity, machine_samples, merge_status,
    random_table, table_apply,
)
from pcalab.embed import embedding

XX = PcaTable(["x", "y"], {("x", "x"): "y"})


# -- tables -----------------------------------------------------------------

def test_table_apply_examples():
    assert table_apply(XX, "x", "x") == "y"
    assert table_apply(XX, "x", "y") is Undefined
    assert table_apply(XX, "y", "y") is Undefined
    with pytest.raises(TableError):
        table_apply(XX, "x", "z")


def test_table_json_round_trip(tmp_path):
    text = '{"elements": ["x", "y"], "table": [["x", "x", "y"]]}'
    t = PcaTable.from_json(text)
    assert t == XX
    path = tmp_path / "t.json"
    path.write_text(json.dumps(t.to_dict()))
    assert PcaTable.load(path) == XX


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"elements": "xy"}',
    '{"elements": ["x", "x"]}',
    '{"elements": ["x"], "table": [["x", "x"]]}',
    '{"elements": ["x"], "table": [["x", "x", "z"]]}',
    '{"elements": ["x", "y"], "table": [["x", "x", "y"], ["x", "x", "x"]]}',
])
def test_bad_tables(text):
    with pytest.raises(TableError):
        PcaTable.from_json(text)


@given(st.integers(0, 10**6))
def test_random_table_valid(seed):
    t = random_table(random.Random(seed))
    assert 1 <= len(t.elements) <= 6
    assert PcaTable.from_dict(t.to_dict()) == t


def test_compare_and_merge():
    assert compare(Value(1), Value(1)) == "agree"
    assert compare(Value(1), Value(2)) == "diff"
    assert compare(Value(1), Diverged()) == "conflict"
    assert compare(FuelOut(), Value(1)) == "inconclusive"
    assert compare(FuelOut(), Diverged()) == "undetermined"
    assert merge_status([PASS, INCONCLUSIVE]) == INCONCLUSIVE
    assert merge_status([INCONCLUSIVE, FAIL, PASS]) == FAIL
    assert merge_status([]) == PASS


# -- laws -------------------------------------------------------------------

def test_k_law_examples():
    m = default_machine()
    assert check_k_law(m, [(parse_real("ec:3,1,4;0"), zeros())], 16, 10**5).status == PASS
    kk = KleeneK2()
    assert check_k_law(kk, [(parse_real("ec:0;0"), parse_real("ec:9;9"))], 16, 10**5).status == PASS


@pytest.mark.parametrize("model", [default_machine(), KleeneK2()], ids=["k2m", "k2k"])
def test_no_fuel_is_inconclusive(model):
    assert check_k_law(model, [(parse_real("ec:1;2"), zeros())], 16, 0).status == INCONCLUSIVE


def test_s_law_skk():
    for m in (default_machine(), KleeneK2()):
        rep = check_s_law(m, [(m.k, m.k, parse_real("ec:5,2;7"))], 16, 10**5)
        assert rep.status == PASS and rep.undetermined_positions == 0


def test_s_law_diverging_argument_is_consistent():
    m = default_machine()
    loop = program_real(encode_program(Mu(Lit(1))))
    rep = check_s_law(m, [(loop, m.k, parse_real("ec:2;0"))], 8, 2000)
    assert rep.status == PASS
    assert rep.undetermined_positions == 8
    rep = check_s_law(m, [(m.k, loop, parse_real("ec:2;0"))], 8, 2000)
    assert rep.status == PASS


def test_s_law_random_programs():
    m = default_machine()
    rep = check_s_law(m, machine_samples(random.Random(5), 5, "s", model=m), 16, 10**5)
    assert rep.status == PASS


def test_k_law_detects_a_wrong_k():
    m = default_machine()

    class Broken:
        name = "broken"
        k, s = m.s, m.k
        apply = staticmethod(m.apply)

    rep = check_k_law(Broken(), [(parse_real("ec:3;1"), parse_real("ec:2;2"))], 8, 10**5)
    assert rep.status != PASS


def test_barendregt():
    m = default_machine()
    pairs = machine_samples(random.Random(1), 10, "pair", literals_only=True)
    assert check_barendregt(m, pairs, 32).status == PASS
    assert check_barendregt(KleeneK2(), pairs, 32).status == UNSUPPORTED


def test_seeded_samples_reproducible():
    a = machine_samples(random.Random(9), 6, "s", model=default_machine())
    b = machine_samples(random.Random(9), 6, "s", model=default_machine())
    assert [[x.label for x in t] for t in a] == [[x.label for x in t] for t in b]


# -- weak embeddings --------------------------------------------------------

def test_weak_embedding_vacuous():
    t = PcaTable(["a", "b"], {})
    f = {"a": parse_real("ec:0;0"), "b": parse_real("ec:1;0")}
    rep = check_weak_embedding(t, f, KleeneK2(), 16, 100)
    assert rep.status == PASS and rep.triples == []


def test_weak_embedding_of_the_self_application_table():
    f = embedding(XX)
    assert check_weak_embedding(XX, f, KleeneK2(), 64, 1000, strict=True).status == PASS


def test_weak_embedding_swapped_map_fails():
    f = embedding(XX)
    swapped = {"x": f["y"], "y": f["x"]}
    rep = check_weak_embedding(XX, swapped, KleeneK2(), 16, 1000, strict=True)
    assert rep.status == FAIL
    assert rep.issues


def test_weak_embedding_non_injective():
    f = {"x": zeros(), "y": zeros()}
    rep = check_weak_embedding(PcaTable(["x", "y"], {}), f, KleeneK2(), 8, 10)
    assert rep.injective == FAIL and rep.status == FAIL


def test_first_difference():
    assert first_difference(parse_real("ec:1,2;0"), parse_real("ec:1,3;0"), 8, 10) == (1, 2, 3)
    assert first_difference(zeros(), zeros(), 8, 10) is None
    assert first_difference(parse_real("pc:0=1"), parse_real("pc:0=1"), 8, 10) == "?"


# -- head normal forms ------------------------------------------------------

def test_hnf_pairs_separate_at_zero():
    m = default_machine()
    rep = hnf_dissimilarity(m, parse_real("ec:1;0"), parse_real("ec:2;0"))
    assert rep.status == PASS and len(rep.pairs) == 10
    assert all(p["position"] == 0 for p in rep.pairs)
    names = {(p["left"], p["right"]) for p in rep.pairs}
    assert ("k", "s") in names and ("ka", "sab") in names
    assert [h.kind for h in build_hnfs(m, zeros(), zeros())] == ["K", "S", "KA", "SA", "SAB"]


def test_hnf_injectivity_layout_shift():
    m = default_machine()
    a, a2 = parse_real("ec:1,2,3;0"), parse_real("ec:1,2,9;0")
    b = parse_real("ec:4;0")
    (row,) = hnf_injectivity(m, [(a, a2, b, b)], 32, 10**5)
    # ka and sa store a from position 1; sab interleaves a and b after the tag
    assert row["ka"] == 3 and row["sa"] == 3
    assert row["sab"] == 5


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 9), max_size=4), st.integers(0, 9),
       st.lists(st.integers(0, 9), max_size=4), st.integers(0, 9))
def test_hnf_injectivity_property(av, at, bv, bt):
    m = default_machine()
    a, b = EventuallyConstant(av, at), EventuallyConstant(bv, bt)
    a2 = EventuallyConstant(av, at + 1)
    (row,) = hnf_injectivity(m, [(a, a2, b, b)], 16, 10**5)
    assert isinstance(row["ka"], int) and isinstance(row["sa"], int)
    assert isinstance(row["sab"], int)
