from __future__ import annotations

import pytest

from hmskit import bar
from hmskit.algebra import DiagGroupElement, enumerate_group
from hmskit.bar import CochainBudgetError, bar_oracle, cochain_basis, square_is_zero
from hmskit.hochschild import BidegreeCell, hh_dim


@pytest.mark.parametrize("s, t", [(0, 0), (1, 0), (1, -1), (2, -1), (2, 0)])
@pytest.mark.parametrize("h", [(0, 0, 0), (1, 1, 1), (1, 2, 0)])
def test_bar_differential_squares_to_zero(s, t, h):
    assert square_is_zero(3, s, t, DiagGroupElement(h))


def test_cochain_counts():
    # one input: Hom(Lambda^{>0} V, Lambda V) in internal degree 0 has
    # sum over k of C(3,k)^2 = 19 elements
    blocks = cochain_basis(3, 1, 0)
    assert sum(len(v) for v in blocks.values()) == 19


@pytest.mark.parametrize("degree, t", [(0, 0), (1, 0), (2, 0), (1, -1), (2, -1)])
@pytest.mark.parametrize("group", ["cyclic", "special"])
def test_oracle_agrees_with_closed_formula(degree, t, group):
    s = degree - t
    formula = hh_dim(BidegreeCell(1, s, t, group=group, grading="tilde"))
    assert bar_oracle(1, degree, t, group) == formula


def test_special_group_second_cell():
    assert bar_oracle(1, 2, 0, "special") == 12


def test_oracle_guards():
    with pytest.raises(ValueError):
        bar_oracle(2, 0, 0)
    with pytest.raises(ValueError):
        bar_oracle(1, 0, -4)


def test_budget(monkeypatch):
    monkeypatch.setattr(bar, "MAX_COCHAINS", 10)
    bar.cochain_basis.cache_clear()
    try:
        with pytest.raises(CochainBudgetError):
            cochain_basis(3, 2, 0)
    finally:
        bar.cochain_basis.cache_clear()
