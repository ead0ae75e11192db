from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffcoh import lens_cs as lc


def test_spot_values():
    assert lc.format_set(lc.cs_set(lc.lens(5, 1))) == "{0, 1/5, 4/5}"
    assert lc.cs_set(lc.lens(5, 2)) == {Fraction(0), Fraction(2, 5), Fraction(3, 5)}


def test_lens_validation():
    with pytest.raises(lc.LensError):
        lc.lens(4, 2)
    with pytest.raises(lc.LensError):
        lc.lens(1, 0)
    assert lc.lens(7, 3).r * 3 % 7 == 6


@pytest.mark.parametrize("p,q", [(5, 2), (7, 3), (12, 5), (31, 7)])
def test_r_shift_invariance(p, q):
    L = lc.lens(p, q)
    for n in range(p // 2 + 1):
        assert lc.cs_value(L, n, L.r) == lc.cs_value(L, n, L.r + p)


def test_cs_value_rejects_bad_input():
    with pytest.raises(lc.LensError):
        lc.cs_value(lc.lens(5, 2), 1, 1)
    with pytest.raises(lc.LensError):
        lc.cs_value(lc.lens(5, 2), 3)


def test_kirk_klassen_matches():
    for p in range(2, 20):
        for q in range(1, p):
            try:
                L = lc.lens(p, q)
            except lc.LensError:
                continue
            assert lc.kirk_klassen_set(L) == lc.cs_set(L)


def test_kirk_klassen_rejects_broken_path():
    a = lc.PathPiece(Fraction(0), Fraction(1, 2), (Fraction(0), Fraction(5)), (Fraction(0), Fraction(2)))
    b = lc.PathPiece(Fraction(3, 4), Fraction(1), (Fraction(0), Fraction(5)), (Fraction(0), Fraction(2)))
    with pytest.raises(lc.LensError):
        lc.kirk_klassen([a, b])


def test_homotopy_classification():
    v = lc.homotopy_equivalent(lc.lens(7, 1), lc.lens(7, 2))
    assert v and v.witness == 3
    assert str(v) == "oriented homotopy equivalent: yes (a=3)"
    assert not lc.homotopy_equivalent(lc.lens(5, 1), lc.lens(5, 2), oriented=False)
    # 1·3 ≡ −a² (mod 7) but never +a²
    assert not lc.homotopy_equivalent(lc.lens(7, 1), lc.lens(7, 3))
    assert lc.homotopy_equivalent(lc.lens(7, 1), lc.lens(7, 3), oriented=False)


def test_cs_sets_consistent_small_range():
    assert all(lc.equal_cs_sets(L, M).consistent for L, M in lc.coprime_pairs(15))


@pytest.mark.parametrize(
    "p,q,q2,want",
    [
        (11, 2, 3, {(-1, 2), (-1, 9)}),
        (13, 2, 5, {(1, 3), (1, 10), (-1, 2), (-1, 11)}),
        (17, 3, 5, {(1, 8), (1, 9), (-1, 2), (-1, 15)}),
        (5, 1, 2, set()),
    ],
)
def test_candidate_sets(p, q, q2, want):
    got = {(c.eps, c.a) for c in lc.candidate_equivalences(p, q, q2)}
    assert got == want


def test_cs_adds_no_constraint_beyond_congruence():
    for p, q, q2 in [(11, 2, 3), (13, 2, 5), (7, 1, 2)]:
        exp = lc.cs_intertwining_experiment(p, q, q2)
        assert all(cs_ok == cong for cs_ok, cong in exp.values())
        assert not lc.cs_adds_constraints(p, q, q2)


# ------------------------------------------------------------ F2 ring


P = 7
elements = st.integers(0, (1 << P) - 1).map(lambda b: lc.CyclotomicF2(P, b))


@settings(max_examples=80, deadline=None)
@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + a == lc.CyclotomicF2(P, 0)
    assert a * lc.CyclotomicF2.one(P) == a


@settings(max_examples=40, deadline=None)
@given(elements, elements, st.sampled_from([1, 2, 3, 4, 5, 6]))
def test_dilation_is_ring_map(a, b, k):
    assert (a * b).dilate(k) == a.dilate(k) * b.dilate(k)
    assert (a + b).dilate(k) == a.dilate(k) + b.dilate(k)


def test_t_has_order_p():
    t = lc.CyclotomicF2.t(P)
    assert t ** P == lc.CyclotomicF2.one(P)
    assert str(lc.CyclotomicF2.parse(P, "1 + t^2 + t^9")) == str(lc.CyclotomicF2.parse(P, "1 + t^2 + t^2"))


def test_ring_rejects_even_modulus():
    with pytest.raises(lc.LensError):
        lc.CyclotomicF2(8, 1)


# ------------------------------------------------------------ Massey


def test_massey_reduction_confluent():
    tab = lc.MasseyTable(11, 2, {(0, 1, 3): [lc.CyclotomicF2.parse(11, "1+t^2")]})
    r1 = lc.massey_reduce(2, 3, 5, tab)
    r2 = lc.massey_reduce(5, 3, 2, tab)
    assert r1.base == r2.base
    for r in (r1, r2):
        assert not r.missing
        assert r.values == {v * lc.CyclotomicF2.t(11, r.shift) for v in tab.base[r.base]}


def test_massey_missing_entry_reported():
    r = lc.massey_reduce(1, 2, 4, lc.MasseyTable(11, 2))
    assert r.missing


def test_massey_table_inconsistency_detected():
    tab = lc.MasseyTable(11, 2, {(0, 1, 3): [lc.CyclotomicF2.parse(11, "1")]})
    with pytest.raises(lc.LensError):
        tab.add((3, 1, 0), [lc.CyclotomicF2.parse(11, "t")])


def test_massey_parse_errors_carry_line():
    with pytest.raises(lc.LensError, match="line 1"):
        lc.parse_massey_tables("0 1 2 : 1")
    with pytest.raises(lc.LensError, match="line 2"):
        lc.parse_massey_tables("[11 2]\n0 1 : 1")


# ------------------------------------------------------------ tau + pipeline


def test_tau_dilation_witness():
    for a in range(1, 11):
        v = lc.tau_intertwine_check(a, 11)
        assert v.passed
    assert lc.tau_intertwine_check(2, 11).intertwiner == lc.dilation_matrix(11, 2)
    with pytest.raises(lc.LensError):
        lc.tau_intertwine_check(11, 11)


def test_pipeline_without_table_is_undecided():
    rep = lc.configuration_pipeline(11, 2, 3)
    assert {(c.eps, c.a) for c in rep.candidates} == {(-1, 2), (-1, 9)}
    assert rep.verdict == "undecided (missing data)"


def test_pipeline_congruence_only():
    rep = lc.configuration_pipeline(11, 2, 3, stages=("congruence",))
    assert len(rep.stages) == 1
    assert sorted(str(c) for c in rep.candidates) == ["(ε=-1, a=2)", "(ε=-1, a=9)"]


def test_pipeline_with_synthetic_table():
    from diffcoh import modelio

    tables = modelio.load("synthetic", "massey-table")
    rep = lc.configuration_pipeline(11, 2, 3, tables)
    assert [str(c) for c in rep.candidates] == ["(ε=-1, a=2)"]
    assert str(rep) == str(lc.configuration_pipeline(11, 2, 3, tables))


def test_empty_candidate_set_is_a_verdict():
    assert lc.configuration_pipeline(5, 1, 2).verdict == "not homotopy equivalent"
