import random
from fractions import Fraction

import pytest

from tractorbracket.algebra import DimensionError, build_algebra
from tractorbracket.chartcalc import PolyField, PolyFn, PolyForm, ValuedForm, d, interior
from tractorbracket.courant import (
    JACOBIATOR_SIGN,
    Section,
    StructureError,
    check_axioms,
    check_compatibility,
    check_jacobi,
    coordinate_sections,
    courant_bracket,
    curvature,
    curvature_from_forms,
    curvature_value,
    del_,
    e_pair,
    h4_contraction,
    h4_form,
    isotropize,
    jacobiator,
    make_context,
    metric,
    mid_add,
    mid_sub,
    mid_zero,
    nabla,
    pontrjagin_form,
    pontrjagin_via_wedge,
    random_connection,
    random_samples,
    random_section,
    unobstructed_h,
    with_data,
)
from tractorbracket import courant as courant_module
from tractorbracket.grading import grade


def context(family, rank, sigma, seed=None, max_degree=1):
    a = build_algebra(family, rank)
    ctx = make_context(a, grade(a, sigma))
    if seed is not None:
        ctx = with_data(ctx, A=random_connection(ctx.n, ctx.m, random.Random(seed), max_degree))
    return ctx


@pytest.fixture(scope="module")
def a2_flat():
    return context("A", 2, {1})


@pytest.fixture(scope="module")
def a3_twisted():
    """sl(4) grading with nonabelian g_0 and a nonflat connection."""
    return context("A", 3, {2}, seed=3)


def test_context_dimensions(a2_flat):
    assert (a2_flat.n, a2_flat.m) == (2, 4)
    borel = context("A", 3, {1, 2, 3})
    assert (borel.n, borel.m) == (6, 3)


def test_pinned_worked_jacobiator():
    ctx = context("A", 3, {1, 2, 3})
    n = ctx.n
    H = PolyForm(n, 3, {(1, 2, 3): PolyFn.variable(n, 0)})
    ctx = with_data(ctx, H=H)
    assert h4_form(ctx) == PolyForm.basic(n, 0, 1, 2, 3)
    e = coordinate_sections(ctx)
    J = jacobiator(ctx, e[1], e[2], e[3])
    assert J.form == -PolyForm.basic(n, 0)
    assert JACOBIATOR_SIGN == 1
    assert J.form == h4_contraction(ctx, e[1].vec, e[2].vec, e[3].vec) * JACOBIATOR_SIGN


def test_flat_context_satisfies_everything(a2_flat):
    samples = random_samples(a2_flat, 8, seed=1)
    assert check_axioms(a2_flat, samples).passed
    assert check_compatibility(a2_flat, samples=4).passed
    rep = check_jacobi(a2_flat, samples)
    assert rep.passed and rep["jacobi_identity"].passed
    for s in samples:
        assert jacobiator(a2_flat, s.e1, s.e2, s.e3).is_zero()


def test_metric_on_frame(a2_flat):
    n, m = a2_flat.n, a2_flat.m
    frame = coordinate_sections(a2_flat)
    assert metric(a2_flat, frame[0], frame[n + m]) == PolyFn.constant(n, 1)
    assert not metric(a2_flat, frame[0], frame[1])
    for i in range(m):
        for j in range(m):
            assert metric(a2_flat, frame[n + i], frame[n + j]) == PolyFn.constant(n, a2_flat.e0_gram[i][j])


def test_curvature_two_routes(a3_twisted):
    R = curvature(a3_twisted)
    assert R
    assert R == curvature_from_forms(a3_twisted)


def test_pontrjagin_two_routes_and_closed(a3_twisted):
    borel = context("A", 3, {1, 2, 3}, seed=5, max_degree=2)
    for ctx in (a3_twisted, borel):
        p = pontrjagin_form(ctx)
        assert p == pontrjagin_via_wedge(ctx)
        assert d(p).is_zero()


def test_axioms_hold_with_nonflat_connection(a3_twisted):
    samples = random_samples(a3_twisted, 6, seed=11)
    rep = check_axioms(a3_twisted, samples)
    assert rep.passed, str(rep)


def test_compatibility_with_nonflat_connection(a3_twisted):
    rep = check_compatibility(a3_twisted, samples=6, seed=2, max_degree=2)
    assert rep.passed, str(rep)


def test_bianchi_needs_the_bracket_term_subtracted(a3_twisted):
    ctx = a3_twisted
    n = ctx.n
    x = lambda i: PolyFn.variable(n, i)
    one, z = PolyFn.constant(n, 1), PolyFn.zero(n)
    X1, X2, X3 = PolyField([z, x(0), z, z]), PolyField([one, z, z, x(2)]), PolyField([z, z, x(1), z])
    R = lambda X, Y: curvature_value(ctx, X, Y)
    cov, brk = mid_zero(ctx), mid_zero(ctx)
    for A, B, C in ((X1, X2, X3), (X2, X3, X1), (X3, X1, X2)):
        cov = mid_add(cov, nabla(ctx, A, R(B, C)))
        brk = mid_add(brk, R(A.bracket(B), C))
    assert cov == brk
    # adding the bracket term instead leaves 2 * brk, nonzero for these fields
    assert any(brk)


def test_unobstructed_h_kills_jacobiator(a3_twisted):
    ctx = with_data(a3_twisted, H=unobstructed_h(a3_twisted))
    assert not h4_form(ctx)
    for s in random_samples(ctx, 3, seed=4, max_degree=1):
        assert jacobiator(ctx, s.e1, s.e2, s.e3).is_zero()


def test_twisted_jacobiator_matches_h4():
    ctx = context("A", 3, {1, 2, 3}, seed=8)
    H = unobstructed_h(ctx) + PolyForm(ctx.n, 3, {(0, 2, 4): PolyFn.variable(ctx.n, 5)})
    ctx = with_data(ctx, H=H)
    assert h4_form(ctx)
    rep = check_jacobi(ctx, random_samples(ctx, 3, seed=0, max_degree=1))
    assert rep.passed, str(rep)
    assert rep["h4_detected_on_coordinates"].passed


def test_leibniz_and_del(a2_flat):
    rng = random.Random(0)
    e1, e2 = random_section(a2_flat, rng), random_section(a2_flat, rng)
    f = PolyFn.variable(2, 0) ** 2 + 1
    df = del_(a2_flat, f)
    assert metric(a2_flat, df, e1) == e1.vec.apply(f)
    lhs = courant_bracket(a2_flat, e1, e2 * f)
    rhs = courant_bracket(a2_flat, e1, e2) * f + e2 * e1.vec.apply(f)
    assert (lhs - rhs).is_zero()


def test_metric_without_fibre_block_fails_metric_preservation(a3_twisted):
    def broken(ctx, u, v):
        return metric(ctx, u, v) - e_pair(ctx, u.mid, v.mid)

    rep = check_axioms(a3_twisted, random_samples(a3_twisted, 3, seed=0), metric_fn=broken)
    assert not rep["metric_preservation"].passed
    assert rep["metric_preservation"].witness is not None


def test_perturbed_curvature_fails_identity(a3_twisted):
    R = curvature(a3_twisted)
    n = a3_twisted.n
    bump = PolyForm(n, 2, {(i, j): 1 for i in range(n) for j in range(i + 1, n)})
    bad = ValuedForm(n, 2, [c + bump for c in R.components])
    rep = check_compatibility(a3_twisted, samples=6, curvature_override=bad)
    assert not rep["curvature"].passed


def test_isotropize_images_are_isotropic(a3_twisted):
    ctx = a3_twisted
    rng = random.Random(21)
    gamma_mid = random_connection(ctx.n, ctx.m, rng, max_degree=2, density=0.8)
    split = isotropize(ctx, gamma_mid)
    fields = [PolyField.coordinate(ctx.n, i) for i in range(ctx.n)]
    fields.append(PolyField([PolyFn.variable(ctx.n, i) for i in range(ctx.n)]))
    for X in fields:
        for Y in fields:
            assert not metric(ctx, split.image(X), split.image(Y))
            assert not metric(ctx, ctx.section(vec=X), ctx.section(vec=Y))
    raw = [metric(ctx, split.raw_image(X), split.raw_image(X)) for X in fields]
    assert any(raw)


def test_isotropize_dimension_check(a2_flat):
    with pytest.raises(DimensionError):
        isotropize(a2_flat, ValuedForm.zero(2, 1, 3))


def test_make_context_validates(a2_flat):
    a, gd = a2_flat.algebra, a2_flat.gd
    with pytest.raises(DimensionError):
        make_context(a, gd, A=ValuedForm.zero(2, 1, 3))
    with pytest.raises(DimensionError):
        make_context(a, gd, A=ValuedForm.zero(3, 1, 4))
    with pytest.raises(DimensionError):
        make_context(a, gd, H=PolyForm.zero(2, 2))


def test_strict_jacobiator_rejects_non_form(monkeypatch):
    ctx = context("A", 3, {2}, seed=3)
    e = coordinate_sections(ctx)
    assert not jacobiator(ctx, e[0], e[1], e[2]).vec
    real = courant_module.courant_bracket

    def no_curvature(c, u, v):
        out = real(c, u, v)
        return Section(out.vec, mid_sub(out.mid, curvature_value(c, u.vec, v.vec)), out.form)

    monkeypatch.setattr(courant_module, "courant_bracket", no_curvature)
    with pytest.raises(StructureError):
        for smp in random_samples(ctx, 5, seed=0, max_degree=1):
            jacobiator(ctx, smp.e1, smp.e2, smp.e3)


def test_samples_are_deterministic(a3_twisted):
    a = random_samples(a3_twisted, 4, seed=99)
    b = random_samples(a3_twisted, 4, seed=99)
    assert [s.e1.to_dict() for s in a] == [s.e1.to_dict() for s in b]
    assert a[0].e1.to_dict() != random_samples(a3_twisted, 1, seed=98)[0].e1.to_dict()


def test_vacuous_sample_list(a2_flat):
    rep = check_axioms(a2_flat, [])
    assert rep.passed
    assert rep["samples"].note.startswith("vacuous")


def test_triples_accepted_as_samples(a2_flat):
    rng = random.Random(5)
    triple = tuple(random_section(a2_flat, rng) for _ in range(3))
    assert check_axioms(a2_flat, [triple]).passed


def test_interior_contracts_h_in_order(a2_flat):
    # [X, Y] form part on pure vector fields is H(X, Y, -)
    ctx = context("A", 3, {1, 2, 3})
    n = ctx.n
    ctx = with_data(ctx, H=PolyForm.basic(n, 0, 1, 2) * Fraction(3))
    e = coordinate_sections(ctx)
    br = courant_bracket(ctx, e[0], e[1])
    assert br.form == interior(e[1].vec, interior(e[0].vec, ctx.h_form))
    assert br.form == PolyForm.basic(n, 2) * 3
