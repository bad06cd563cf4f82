from __future__ import annotations

import itertools
import random
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation

from hmskit import algebra
from hmskit.algebra import (
    DiagGroupElement,
    ExtElement,
    SmashElement,
    TrivExtMorphism,
    associativity_failures,
    check_closure,
    check_smash_trivext_iso,
    enumerate_group,
    graded_dims,
    group_order,
    hom_piece,
    hom_table_dim,
    hom_table_graded,
    idempotents,
    koszul_sign,
    random_morphism,
    smash_dim,
    triv_ext_compose,
    wedge,
)

DIM = 4
subsets = st.lists(st.integers(1, DIM), unique=True, max_size=DIM).map(tuple)


@given(st.lists(st.integers(1, 6), unique=True, max_size=6), st.integers(0, 6))
def test_koszul_sign_is_permutation_parity(seq, cut):
    # oracle: sympy's permutation parity of the sorting permutation
    left, right = tuple(sorted(seq[:cut])), tuple(sorted(seq[cut:]))
    seq = list(left + right)
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    parity = Permutation(order).signature() if len(seq) > 1 else 1
    assert koszul_sign(left, right) == parity


def test_koszul_sign_overlap():
    assert koszul_sign((1, 2), (2,)) == 0


def ext(subset, c=1):
    return ExtElement.basis(DIM, 3, subset, c)


@given(subsets, subsets, subsets)
def test_wedge_associative(a, b, c):
    x, y, z = ext(a), ext(b), ext(c)
    assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


@given(subsets, subsets)
def test_wedge_graded_commutative(a, b):
    x, y = ext(a), ext(b)
    sign = -1 if (len(a) * len(b)) % 2 else 1
    assert wedge(x, y) == wedge(y, x).scale(sign)


@given(st.integers(1, DIM))
def test_vectors_square_to_zero(i):
    assert wedge(ext((i,)), ext((i,))).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_group_orders(n):
    m = n + 2
    assert len(enumerate_group("cyclic", n)) == m == group_order("cyclic", n)
    assert len(enumerate_group("projective", n)) == m**n == group_order("projective", n)
    assert len(enumerate_group("special", n)) == m ** (n + 1) == group_order("special", n)
    assert all(g.in_sl() for g in enumerate_group("special", n))
    for kind in ("cyclic", "projective", "special"):
        assert check_closure(enumerate_group(kind, n))


def test_group_element_basics():
    g = DiagGroupElement((1, 2, 0))
    assert (g * g.inverse()).is_identity()
    assert g.moved_indices() == (1, 2) and g.fixed_indices() == (3,)
    assert DiagGroupElement((1, 2, 0), projective=True).exps == (0, 1, 2)
    assert g.character((1, 1, 0)) == 0


@pytest.mark.parametrize("n", [1, 2])
def test_idempotents_are_orthogonal_and_complete(n):
    es = idempotents(n + 2)
    total = SmashElement(n)
    for i, e in enumerate(es):
        for j, f in enumerate(es):
            prod = e * f
            assert prod == (e if i == j else SmashElement(n))
        total = total + e
    assert total == SmashElement.one(n)


def test_smash_dim():
    assert smash_dim(1, "cyclic") == 8 * 3


@given(
    st.lists(st.integers(1, 3), unique=True, max_size=3).map(tuple),
    st.lists(st.integers(1, 3), unique=True, max_size=3).map(tuple),
    st.lists(st.integers(1, 3), unique=True, max_size=3).map(tuple),
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
)
def test_smash_product_associative(a, b, c, g, h):
    x = SmashElement.monomial(1, a, g)
    y = SmashElement.monomial(1, b, h)
    z = SmashElement.monomial(1, c)
    assert (x * y) * z == x * (y * z)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hom_pieces_match_table(n):
    m = n + 2
    for j in range(1, m + 1):
        for k in range(1, m + 1):
            space = hom_piece(n, j, k)
            assert space.dim == hom_table_dim(n, j, k)
            assert graded_dims(space) == hom_table_graded(n, j, k)


def test_hom_table_shape():
    # the three cases: binomial forward part, 1 + 1 on the diagonal, dual part below
    assert hom_table_dim(2, 1, 3) == comb(4, 2)
    assert hom_table_dim(2, 2, 2) == 2
    assert hom_table_dim(2, 3, 1) == comb(4, 2)
    assert set(hom_table_graded(3, 2, 2)) == {0, 3}


@pytest.mark.parametrize("n", [1, 2])
def test_smash_product_matches_trivial_extension(n):
    assert check_smash_trivext_iso(n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_composition_associative(n):
    assert associativity_failures(n, trials=200, seed=n) == 0


def test_identity_is_neutral():
    rng = random.Random(1)
    for _ in range(30):
        j, k = rng.randint(1, 4), rng.randint(1, 4)
        f = random_morphism(2, j, k, rng)
        assert triv_ext_compose(f, TrivExtMorphism.identity(2, j)) == f
        assert triv_ext_compose(TrivExtMorphism.identity(2, k), f) == f


def test_composition_rejects_mismatched_objects():
    f = TrivExtMorphism.identity(1, 1)
    g = TrivExtMorphism.identity(1, 2)
    with pytest.raises(ValueError):
        triv_ext_compose(f, g)


def test_flipped_koszul_sign_breaks_associativity(monkeypatch):
    original = algebra.forward_dual_sign
    monkeypatch.setattr(algebra, "forward_dual_sign", lambda *a: -original(*a))
    assert associativity_failures(1, trials=200) > 0


def test_uncorrected_sign_breaks_associativity(monkeypatch):
    # dropping the argument degree from the exponent is not associative either
    monkeypatch.setattr(
        algebra, "forward_dual_sign", lambda da, dd, darg: -1 if (da * dd) % 2 else 1
    )
    assert associativity_failures(1, trials=200) > 0
