from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tractorbracket.chartcalc import (
    ChartDimensionError,
    ClosednessError,
    PolyField,
    PolyFn,
    PolyForm,
    ValuedForm,
    basis_indices,
    d,
    euler_field,
    exact,
    interior,
    lie_derivative,
    one_form,
    pairing,
    poincare_primitive,
    wedge,
)

N = 3
SETTINGS = settings(max_examples=40, deadline=None)

coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=3)
exponents = st.tuples(*[st.integers(0, 2)] * N)
polys = st.dictionaries(exponents, coeffs, max_size=3).map(lambda t: PolyFn(N, t))
fields = st.lists(polys, min_size=N, max_size=N).map(PolyField)


def forms(k: int):
    return st.dictionaries(st.sampled_from(basis_indices(N, k)), polys, max_size=3).map(
        lambda t: PolyForm(N, k, t))


any_form = st.integers(0, N).flatmap(forms)


def x(i):
    return PolyFn.variable(N, i)


# coordinate-free oracles, evaluated on vector fields


def d_oracle(w: PolyForm, Y: list[PolyField]) -> PolyFn:
    k = w.degree
    out = PolyFn.zero(N)
    for i in range(k + 1):
        rest = Y[:i] + Y[i + 1:]
        out = out + Y[i].apply(w.evaluate(rest)) * (-1) ** i
    for i, j in combinations(range(k + 1), 2):
        rest = [Y[i].bracket(Y[j])] + [Z for m, Z in enumerate(Y) if m not in (i, j)]
        out = out + w.evaluate(rest) * (-1) ** (i + j)
    return out


def lie_oracle(X: PolyField, w: PolyForm, Y: list[PolyField]) -> PolyFn:
    out = X.apply(w.evaluate(Y))
    for i in range(len(Y)):
        out = out - w.evaluate(Y[:i] + [X.bracket(Y[i])] + Y[i + 1:])
    return out


# polynomials and fields


def test_polynomial_arithmetic():
    p = (x(0) + 1) ** 2
    assert p == x(0) * x(0) + x(0) * 2 + 1
    assert p.diff(0) == x(0) * 2 + 2
    assert p.degree == 2
    assert p.evaluate([Fraction(1, 2), 0, 0]) == Fraction(9, 4)
    assert str(PolyFn(N, {(1, 0, 2): Fraction(-2, 3)})) == "-2/3*x1*x3^2"


def test_chart_dimension_mismatch():
    with pytest.raises(ChartDimensionError):
        PolyFn.variable(2, 0) + PolyFn.variable(3, 0)
    with pytest.raises(ChartDimensionError):
        PolyForm(2, 1, {(2,): 1})


@SETTINGS
@given(fields, fields, polys)
def test_vector_field_bracket_is_commutator(X, Y, f):
    assert X.bracket(Y).apply(f) == X.apply(Y.apply(f)) - Y.apply(X.apply(f))


def test_euler_field_scales_homogeneous_polynomials():
    p = x(0) * x(1) ** 2 + x(2) ** 3
    assert euler_field(N).apply(p) == p * 3


# forms


def test_basic_forms_and_evaluation():
    w = PolyForm.basic(N, 0, 1)
    e = [PolyField.coordinate(N, i) for i in range(N)]
    assert w.evaluate([e[0], e[1]]) == PolyFn.constant(N, 1)
    assert w.evaluate([e[1], e[0]]) == PolyFn.constant(N, -1)
    assert PolyForm(N, 2, {(1, 0): 1}) == -w
    assert not PolyForm(N, 2, {(1, 1): 1})
    assert str(PolyForm(N, 3, {(0, 1, 2): x(0)})) == "x1*dx1^dx2^dx3"


@SETTINGS
@given(any_form)
def test_d_squared_is_zero(w):
    assert d(d(w)).is_zero()


@SETTINGS
@given(st.integers(0, 2).flatmap(forms), fields, fields, fields)
def test_d_matches_invariant_formula(w, Y0, Y1, Y2):
    Y = [Y0, Y1, Y2][: w.degree + 1]
    assert d(w).evaluate(Y) == d_oracle(w, Y)


@SETTINGS
@given(st.integers(0, 2).flatmap(forms), st.integers(0, 1).flatmap(forms))
def test_graded_leibniz(a, b):
    lhs = d(wedge(a, b))
    rhs = wedge(d(a), b) + wedge(a, d(b)) * (-1) ** a.degree
    assert lhs == rhs


@SETTINGS
@given(st.integers(0, 2).flatmap(forms), st.integers(0, 2).flatmap(forms))
def test_wedge_graded_commutative(a, b):
    assert wedge(a, b) == wedge(b, a) * (-1) ** (a.degree * b.degree)


@SETTINGS
@given(st.integers(2, 3).flatmap(forms), fields, fields)
def test_interior_anticommutes(w, X, Y):
    assert interior(X, interior(Y, w)) == -interior(Y, interior(X, w))


@SETTINGS
@given(st.integers(1, 3).flatmap(forms), fields, fields, fields)
def test_interior_contracts_first_slot(w, X, Y1, Y2):
    rest = [Y1, Y2][: w.degree - 1]
    assert interior(X, w).evaluate(rest) == w.evaluate([X] + rest)


@SETTINGS
@given(st.integers(0, 2).flatmap(forms), fields, fields, fields)
def test_lie_derivative_matches_invariant_formula(w, X, Y1, Y2):
    Y = [Y1, Y2][: w.degree]
    assert lie_derivative(X, w).evaluate(Y) == lie_oracle(X, w, Y)


@SETTINGS
@given(st.integers(1, 2).flatmap(forms), fields, fields)
def test_lie_bracket_identity(w, X, Y):
    lhs = lie_derivative(X.bracket(Y), w)
    rhs = lie_derivative(X, lie_derivative(Y, w)) - lie_derivative(Y, lie_derivative(X, w))
    assert lhs == rhs


@SETTINGS
@given(st.integers(0, 2).flatmap(forms))
def test_primitive_of_exact_forms(a):
    w = d(a)
    if w.degree > N:
        return
    p = poincare_primitive(w)
    assert d(p) == w


def test_primitive_worked_value():
    # d of (x1 dx2 - x2 dx1)/2 is dx1^dx2
    p = poincare_primitive(PolyForm.basic(N, 0, 1))
    assert p == PolyForm(N, 1, {(1,): x(0) * Fraction(1, 2), (0,): x(1) * Fraction(-1, 2)})


def test_primitive_rejects_non_closed():
    w = PolyForm(N, 1, {(0,): x(1)})
    with pytest.raises(ClosednessError) as info:
        poincare_primitive(w)
    assert info.value.dw == d(w)
    with pytest.raises(ValueError):
        poincare_primitive(PolyForm.function(x(0)))


def test_interior_of_function_rejected():
    with pytest.raises(ValueError):
        interior(PolyField.coordinate(N, 0), PolyForm.function(x(0)))


def test_exact_and_pairing():
    f = x(0) ** 2 * x(2)
    X = PolyField([x(1), PolyFn.zero(N), PolyFn.constant(N, 1)])
    assert pairing(exact(f), X) == X.apply(f)
    assert one_form([x(0), 0 * x(0), x(2)]) == PolyForm(N, 1, {(0,): x(0), (2,): x(2)})


def test_top_degree_d_is_zero():
    w = PolyForm(N, N, {(0, 1, 2): x(0) ** 3})
    assert d(w).is_zero() and d(w).degree == N + 1


def test_valued_form_accessors():
    v = ValuedForm(N, 1, [PolyForm.basic(N, 0), PolyForm.zero(N, 1)])
    assert v.value_dim == 2
    assert v.coefficient((0,)) == [PolyFn.constant(N, 1), PolyFn.zero(N)]
    assert v + v != v
    assert ValuedForm.zero(N, 1, 2) == v - v
