from __future__ import annotations

import itertools
import time
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibpos.model import Verdict
from fibpos.xiao import (
    CliffordViolation,
    HNData,
    HNDataError,
    HNStep,
    IntersectionTable,
    MissingIntersectionError,
    general_a_bound,
    general_a_supremum,
    harmonic_coefficient,
    linstab_identity,
    linstab_xiao_bound,
    slope_from_clifford,
    subcanonical_bounds,
    worst_case_filtration,
    xiao_general_bound,
    xiao_highdim_bound,
    xiao_surface_bound,
    xiao_threefold_simplified,
    _objective_rows,
    _minimize_max,
)

from oracles import lp_bruteforce_min_max

TWO = HNData.of((3, 1, 0), (1, 2, 2))


def test_hn_validation():
    with pytest.raises(HNDataError):
        HNData.of((1, 1, 0), (2, 2, 2))  # slopes must decrease
    with pytest.raises(HNDataError):
        HNData.of((3, 2, 0), (1, 2, 2))  # ranks must increase
    with pytest.raises(HNDataError):
        HNData.of((3, 1, 4), (1, 2, 2))  # degrees must not decrease
    with pytest.raises(HNDataError):
        HNData.of((1, 1, 0), (-1, 2, 2))  # nef needs mu_l >= 0
    HNData.of((1, 1, 0), (-1, 2, 2), nef=False)
    assert TWO.total_deg == 4 and TWO.mu(3) == 0 and TWO.d(3) == 2


def test_surface_bound_examples():
    assert xiao_surface_bound(HNData.of((Fraction(1, 2), 2, 2))) == 2
    assert xiao_surface_bound(TWO) == 8
    mu1, mul, d1, dl = 3, 1, 0, 2
    assert xiao_surface_bound(TWO, [1, 2]) == (d1 + dl) * (mu1 - mul) + 2 * dl * mul


def test_clifford_examples():
    r = slope_from_clifford(2, TWO)
    assert (r.lhs, r.rhs, r.margin) == (8, 8, 0) and r.verdict is Verdict.HOLDS_WITH_EQUALITY
    r = slope_from_clifford(3, HNData.of((1, 3, 4)))
    assert (r.lhs, r.rhs) == (8, 8)
    with pytest.raises(CliffordViolation, match="step 1"):
        slope_from_clifford(3, HNData.of((2, 2, 1), (1, 3, 4)))


def test_general_bound_examples():
    t3 = IntersectionTable(3, {(1, 1): 12})
    assert xiao_general_bound(HNData.of((2, 1, 4)), t3, [2]) == 72
    assert xiao_general_bound(TWO, IntersectionTable.from_degrees(TWO), [1, 1], []) == 0
    with pytest.raises(MissingIntersectionError, match="missing intersection number"):
        xiao_general_bound(TWO, IntersectionTable(3, {(2, 2): 1}), [2, 2])


def test_threefold_simplified_examples():
    hn = HNData.of((3, 1, 2), (1, 2, 4))
    tbl = IntersectionTable(3, {(2, 2): 12, (1, 1): 8})
    assert xiao_threefold_simplified(hn, tbl, 1, 1, 5) == 52
    assert xiao_threefold_simplified(HNData.of((2, 1, 4)), IntersectionTable(3, {(1, 1): 12}), 1, 1, 1) == 72
    # with all steps generically finite it matches the general evaluator
    assert xiao_threefold_simplified(hn, tbl, 1, 1, 0) == 36 + 8 * 2
    with pytest.raises(HNDataError):
        xiao_threefold_simplified(hn, tbl, 2, 1, 0)


@st.composite
def filtrations(draw, max_len=5):
    l = draw(st.integers(1, max_len))
    ranks = sorted(draw(st.sets(st.integers(1, 12), min_size=l, max_size=l)))
    degs = sorted(draw(st.lists(st.integers(0, 20), min_size=l, max_size=l)))
    mus = sorted(draw(st.sets(st.fractions(0, 10, max_denominator=6), min_size=l, max_size=l)), reverse=True)
    return HNData(tuple(HNStep(m, r, Fraction(d)) for m, r, d in zip(mus, ranks, degs)))


@given(filtrations())
def test_general_collapses_to_surface_bound(hn):
    tbl = IntersectionTable.from_degrees(hn)
    for k in range(1, hn.length + 1):
        for I in itertools.combinations(range(1, hn.length + 1), k):
            assert xiao_general_bound(hn, tbl, [1] * hn.length, I) == xiao_surface_bound(hn, I)


@given(filtrations(), st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10))
def test_scaling(hn, t):
    assert xiao_surface_bound(hn.scaled(t)) == t * xiao_surface_bound(hn)


@given(filtrations())
def test_objective_rows_agree_with_evaluator(hn):
    ranks = [s.r for s in hn.steps]
    degs = [s.d for s in hn.steps]
    x = [hn.mu(i) - hn.mu(i + 1) for i in range(1, hn.length + 1)]
    rows = _objective_rows(ranks, degs, "all")
    values = {sum(c * v for c, v in zip(row, x)) for row in rows}
    subsets = [I for k in range(1, hn.length + 1) for I in itertools.combinations(range(1, hn.length + 1), k)]
    assert values == {xiao_surface_bound(hn, I) for I in subsets}


def test_subset_bounds_are_not_ordered():
    # skipping an index can raise or lower the bound, so neither dominates
    hn = HNData.of((1, 1, 0), (Fraction(1, 10), 2, 2), (Fraction(1, 20), 3, 4))
    assert xiao_surface_bound(hn) == Fraction(5, 2)
    assert xiao_surface_bound(hn, [1, 3]) == Fraction(21, 5)
    hn = HNData.of((2, 1, 0), (1, 2, 4), (Fraction(1, 2), 3, 4))
    assert xiao_surface_bound(hn) > xiao_surface_bound(hn, [1, 3])


def test_linstab_examples():
    for chi in (1, 3, Fraction(7, 2)):
        assert linstab_xiao_bound(2, 2, chi).rhs == 2 * chi
    assert linstab_identity(4, 3) and harmonic_coefficient(2, 4) == Fraction(8, 3)
    r = linstab_xiao_bound(4, 3, 0, L2=0)
    assert r.rhs == 0 and r.verdict is Verdict.HOLDS_WITH_EQUALITY
    with pytest.raises(ValueError):
        linstab_xiao_bound(4, 1, 1)


def test_linstab_identity_range():
    ds = [Fraction(n, k) for n, k in zip(range(1, 51), itertools.cycle(range(1, 8)))]
    assert all(linstab_identity(d, r) for r in range(2, 51) for d in ds)


def test_general_a_examples():
    assert general_a_bound(5, 5, 3) == 15
    assert general_a_bound(2, 4, 3) == 8
    assert general_a_supremum(4, 3) == 24
    values = [general_a_bound(a, 4, 3) for a in range(1, 200)]
    assert all(x < y for x, y in zip(values, values[1:])) and values[-1] < 24


def test_subcanonical_examples():
    r = subcanonical_bounds(3, 4, 3, True)
    assert r.rhs == 8 and "(i)" in r.assumptions[1]
    assert subcanonical_bounds(2, 5, 1, False).rhs == 2
    assert subcanonical_bounds(2, 4, 1, False).verdict is Verdict.NOT_APPLICABLE


def test_highdim_examples():
    assert xiao_highdim_bound(3, 12, 8, 5)[0].rhs == 15
    d, r, degG = Fraction(6), 4, Fraction(5)
    assert xiao_highdim_bound(2, d, r, degG)[0].rhs == 2 * d / (r + 1) * degG < linstab_xiao_bound(d, r, degG).rhs
    assert xiao_highdim_bound(3, 12, 8, 0)[0].rhs == 0
    assert len(xiao_highdim_bound(3, 12, 8, 5, mu1=1)) == 3
    with pytest.raises(ValueError):
        xiao_highdim_bound(3, 12, 2, 5)


def test_optimizer_examples():
    res = worst_case_filtration(2, 1, 2)
    assert res.minRatio == 2
    assert [(s.r, s.d) for s in res.witness.steps] == [(1, 0), (2, 2)]
    assert worst_case_filtration(3, 1, 3).minRatio == Fraction(8, 3)
    for g in range(2, 7):
        assert worst_case_filtration(g, 3, 1).minRatio == Fraction(4 * (g - 1), g)


def test_optimizer_full_family_alone_is_not_sharp():
    assert worst_case_filtration(3, 1, 3, family="full").minRatio == 2


def test_optimizer_wider_searches_agree():
    assert worst_case_filtration(4, 2, 4, family="all").minRatio == 3
    assert worst_case_filtration(4, 2, 4, clifford_minimal=False).minRatio == 3


def test_optimizer_chi_scaling_and_determinism():
    a = worst_case_filtration(4, 1, 4)
    b = worst_case_filtration(4, 5, 4)
    assert a.minRatio == b.minRatio
    assert worst_case_filtration(4, 5, 4) == b


def test_minimize_max_matches_grid_oracle():
    rows = _objective_rows((1, 2, 3), (0, 2, 4), "pair")
    t, _ = _minimize_max(rows, (1, 2, 3), Fraction(1))
    assert t == lp_bruteforce_min_max(rows, (1, 2, 3), Fraction(1))


def test_enumeration_cap(monkeypatch):
    monkeypatch.setenv("FIBPOS_MAX_ENUM", "2")
    with pytest.raises(ValueError, match="FIBPOS_MAX_ENUM"):
        worst_case_filtration(4, 1, 4)


def test_optimizer_validation():
    with pytest.raises(ValueError):
        worst_case_filtration(3, 0, 2)
    with pytest.raises(ValueError):
        worst_case_filtration(3, 1, 4)
