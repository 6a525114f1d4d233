from dataclasses import replace
from fractions import Fraction
from itertools import product

import pytest

from tractorbracket import linalg
from tractorbracket.algebra import (
    DimensionError,
    UnsupportedAlgebraError,
    ad_matrix,
    bracket,
    build_algebra,
    classical_dimension,
    killing_form,
    root_decomposition,
    verify_structure,
)

ALGEBRAS = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 2), ("C", 3), ("D", 4)]

# Killing form as a multiple of the defining-representation trace form.
TRACE_FACTOR = {("A", 1): 4, ("A", 2): 6, ("A", 3): 8, ("B", 2): 3, ("B", 3): 5,
                ("C", 2): 6, ("C", 3): 8, ("D", 4): 6}

HIGHEST_ROOT = {("A", 1): (1,), ("A", 2): (1, 1), ("A", 3): (1, 1, 1), ("B", 2): (1, 2),
                ("B", 3): (1, 2, 2), ("C", 2): (2, 1), ("C", 3): (2, 2, 1), ("D", 4): (1, 2, 1, 1)}


@pytest.fixture(scope="module")
def sl2():
    return build_algebra("A", 1)


def test_sl2_structure_constants(sl2):
    e, f, h = (sl2.basis_element(i) for i in range(3))
    assert sl2.labels == ("e1", "f1", "h1")
    assert bracket(sl2, e, f) == h
    assert bracket(sl2, h, e) == 2 * e
    assert bracket(sl2, h, f) == -2 * f


def test_sl2_killing_gram(sl2):
    e, f, h = (sl2.basis_element(i) for i in range(3))
    assert killing_form(sl2, e, f) == 4
    assert killing_form(sl2, h, h) == 8
    assert killing_form(sl2, e, e) == 0


@pytest.mark.parametrize("family,rank", ALGEBRAS)
def test_dimension_matches_classical_formula(family, rank):
    a = build_algebra(family, rank)
    assert a.dimension == classical_dimension(family, rank)
    assert len(a.cartan_indices) == rank
    assert len(a.root_space_index) == a.dimension - rank


@pytest.mark.parametrize("family,rank", ALGEBRAS)
def test_killing_is_multiple_of_trace_form(family, rank):
    a = build_algebra(family, rank)
    c = TRACE_FACTOR[(family, rank)]
    for i, j in product(range(a.dimension), repeat=2):
        assert a.killing_gram[i][j] == c * linalg.trace(linalg.matmul(a.basis[i], a.basis[j]))


@pytest.mark.parametrize("family,rank", ALGEBRAS[:5])
def test_killing_equals_ad_trace(family, rank):
    a = build_algebra(family, rank)
    for i, j in product(range(a.dimension), repeat=2):
        x, y = a.basis_element(i), a.basis_element(j)
        tr = linalg.trace(linalg.matmul(ad_matrix(a, x), ad_matrix(a, y)))
        assert tr == a.killing_gram[i][j]


@pytest.mark.parametrize("family,rank", ALGEBRAS)
def test_highest_root(family, rank):
    assert build_algebra(family, rank).highest_root == HIGHEST_ROOT[(family, rank)]


@pytest.mark.parametrize("family,rank", ALGEBRAS)
def test_verify_structure_passes(family, rank):
    rep = verify_structure(build_algebra(family, rank))
    assert rep.passed, str(rep)
    assert {c.name for c in rep.checks} >= {
        "antisymmetry", "jacobi", "killing_symmetric", "killing_invariant", "killing_nondegenerate"}


def test_structure_constants_match_matrix_commutators():
    a = build_algebra("C", 2)
    for i, j in product(range(a.dimension), repeat=2):
        x, y = a.basis_element(i), a.basis_element(j)
        assert a.matrix_of(bracket(a, x, y)) == linalg.commutator(a.basis[i], a.basis[j])


def test_root_decomposition_is_ad_eigen():
    a = build_algebra("B", 2)
    rd = root_decomposition(a)
    assert len(rd.positive_roots) == 4
    assert set(rd.negative_roots) == {tuple(-c for c in r) for r in rd.positive_roots}
    for root, idx in rd.root_space_basis.items():
        for k in idx:
            x = a.basis_element(k)
            for i, hi in enumerate(a.cartan_indices):
                lhs = bracket(a, a.basis_element(hi), x)
                value = sum(c * a.simple_root_values[s][i] for s, c in enumerate(root))
                assert lhs == value * x


def test_perturbed_structure_constant_breaks_jacobi():
    a = build_algebra("A", 2)
    rows = [list(r) for r in a.brackets]
    i, j = 0, a.dimension - 1
    k, v = next(iter(rows[i][j].items()))
    rows[i][j] = {**rows[i][j], k: v + Fraction(1, 3)}
    rows[j][i] = {**rows[j][i], k: -(v + Fraction(1, 3))}
    bad = replace(a, brackets=tuple(tuple(r) for r in rows))
    rep = verify_structure(bad)
    assert rep["antisymmetry"].passed
    assert not rep["jacobi"].passed
    assert rep["jacobi"].witness is not None


def test_asymmetric_perturbation_breaks_antisymmetry():
    a = build_algebra("A", 1)
    rows = [list(r) for r in a.brackets]
    rows[0][1] = {2: Fraction(2)}
    assert not verify_structure(replace(a, brackets=tuple(tuple(r) for r in rows)))["antisymmetry"].passed


@pytest.mark.parametrize("family,rank", [("A", 0), ("B", 1), ("C", 1), ("D", 3), ("E", 6), ("G", 2)])
def test_unsupported_algebras_rejected(family, rank):
    with pytest.raises(UnsupportedAlgebraError):
        build_algebra(family, rank)


def test_element_dimension_checked(sl2):
    with pytest.raises(DimensionError):
        sl2.element([1, 2])
    with pytest.raises(DimensionError):
        bracket(sl2, sl2.basis_element(0), build_algebra("A", 2).basis_element(0))


def test_build_is_deterministic():
    assert build_algebra("B", 3).brackets == build_algebra("B", 3).brackets
