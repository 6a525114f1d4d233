"""Pre-Courant bracket on the trivialized adjoint tractor model TM + E + T*M.

A chart R^n with n = dim(g/p) carries the trivial bundle E with fibre g_0.
The data are a g_0-valued connection 1-form ``A`` and a 3-form ``H``; the
metric is

    ((X, s, xi), (Y, t, eta)) = <xi, Y> + <eta, X> + B(s, t)

with B the Killing form of g restricted to g_0.  For pure-type arguments the
bracket is

    [X, Y]     = [X, Y] + R(X, Y) + H(X, Y, -)
    [X, t]     = nabla_X t - B(R(X, -), t)          = -[t, X]
    [s, t]     = [s, t]_0 + B(nabla_- s, t)
    [X, eta]   = L_X eta
    [xi, Y]    = -L_Y xi + d<xi, Y>
    [xi, t] = [s, eta] = [xi, eta] = 0

and general sections are handled by biadditivity: each part is already a
section with polynomial coefficients, so no further Leibniz expansion is
needed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from typing import Callable, Iterable, Sequence

from . import linalg
from .algebra import DimensionError, LieAlgebra
from .chartcalc import (
    PolyField,
    PolyFn,
    PolyForm,
    ValuedForm,
    _sort_sign,
    d,
    exact,
    interior,
    lie_derivative,
    one_form,
    one_form_components,
    pairing,
    poincare_primitive,
    wedge,
)
from .grading import GradedDecomposition
from .report import Report

Mid = tuple[PolyFn, ...]


class StructureError(AssertionError):
    """An identity that holds by construction failed: an implementation bug."""


# ---------------------------------------------------------------------------
# context and sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CourantContext:
    algebra: LieAlgebra = field(repr=False)
    gd: GradedDecomposition = field(repr=False)
    n: int
    e0_basis: tuple[int, ...]
    e0_gram: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    connection_A: ValuedForm = field(repr=False)
    h_form: PolyForm = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.e0_basis)

    @cached_property
    def e0_structure(self) -> tuple[tuple[dict, ...], ...]:
        """[s_b, s_c] = sum_a e0_structure[b][c][a] s_a within g_0."""
        pos = {i: a for a, i in enumerate(self.e0_basis)}
        out = []
        for b in self.e0_basis:
            row = []
            for c in self.e0_basis:
                br = self.algebra.brackets[b][c]
                if any(k not in pos for k in br):
                    raise StructureError("g_0 is not closed under the bracket")
                row.append({pos[k]: v for k, v in br.items()})
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def connection_coeffs(self) -> tuple[Mid, ...]:
        """A(d/dx_i) as a g_0-vector, for each i."""
        return tuple(
            tuple(comp.coefficient((i,)) for comp in self.connection_A.components) for i in range(self.n)
        )

    @cached_property
    def curvature_table(self) -> tuple[tuple[Mid, ...], ...]:
        """R(d_i, d_j) for all i, j (antisymmetric)."""
        R = curvature(self)
        zero = mid_zero(self)
        table = [[zero] * self.n for _ in range(self.n)]
        for i, j in combinations(range(self.n), 2):
            v = tuple(R.coefficient((i, j)))
            table[i][j] = v
            table[j][i] = mid_neg(v)
        return tuple(tuple(r) for r in table)

    def zero_function(self) -> PolyFn:
        return PolyFn.zero(self.n)

    def section(self, vec: PolyField | None = None, mid: Sequence[PolyFn] | None = None,
                form: PolyForm | None = None) -> "Section":
        return Section(
            vec if vec is not None else PolyField.zero(self.n),
            tuple(mid) if mid is not None else mid_zero(self),
            form if form is not None else PolyForm.zero(self.n, 1),
        )


@dataclass(frozen=True)
class Section:
    vec: PolyField
    mid: Mid
    form: PolyForm

    def __post_init__(self):
        n = self.vec.n
        if self.form.n != n or any(f.n != n for f in self.mid):
            raise DimensionError("section parts live on different chart dimensions")
        if self.form.degree != 1:
            raise DimensionError("the T*M part of a section must be a 1-form")

    def __add__(self, other: "Section") -> "Section":
        _check_mid(self.mid, other.mid)
        return Section(self.vec + other.vec, mid_add(self.mid, other.mid), self.form + other.form)

    def __sub__(self, other: "Section") -> "Section":
        _check_mid(self.mid, other.mid)
        return Section(self.vec - other.vec, mid_sub(self.mid, other.mid), self.form - other.form)

    def __neg__(self) -> "Section":
        return Section(-self.vec, mid_neg(self.mid), -self.form)

    def __mul__(self, f) -> "Section":
        return Section(self.vec * f, tuple(c * f for c in self.mid), self.form * f)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.vec and not any(self.mid) and not self.form

    def to_dict(self) -> dict:
        return {
            "vec": [str(c) for c in self.vec.components],
            "mid": [str(c) for c in self.mid],
            "form": str(self.form),
        }

    def __str__(self) -> str:
        return f"({self.vec}; [{', '.join(map(str, self.mid))}]; {self.form})"


@dataclass(frozen=True)
class ReducedSection:
    vec: PolyField
    mid: Mid


def _check_mid(s: Mid, t: Mid) -> None:
    if len(s) != len(t):
        raise DimensionError(f"E-parts have different lengths: {len(s)} vs {len(t)}")


def mid_zero(ctx: CourantContext) -> Mid:
    return (PolyFn.zero(ctx.n),) * ctx.m


def mid_add(s: Mid, t: Mid) -> Mid:
    return tuple(a + b for a, b in zip(s, t))


def mid_sub(s: Mid, t: Mid) -> Mid:
    return tuple(a - b for a, b in zip(s, t))


def mid_neg(s: Mid) -> Mid:
    return tuple(-a for a in s)


def mid_scale(s: Mid, f) -> Mid:
    return tuple(a * f for a in s)


def e_bracket(ctx: CourantContext, s: Mid, t: Mid) -> Mid:
    """Fibrewise g_0 bracket."""
    _check_mid(s, t)
    _check_mid(s, mid_zero(ctx))
    out = list(mid_zero(ctx))
    sc = ctx.e0_structure
    for b, sb in enumerate(s):
        if not sb:
            continue
        for c, tc in enumerate(t):
            if not tc:
                continue
            prod = None
            for a, v in sc[b][c].items():
                if prod is None:
                    prod = sb * tc
                out[a] = out[a] + prod * v
    return tuple(out)


def e_pair(ctx: CourantContext, s: Mid, t: Mid, gram=None) -> PolyFn:
    """Fibrewise Killing pairing on E."""
    _check_mid(s, t)
    g = ctx.e0_gram if gram is None else gram
    out = PolyFn.zero(ctx.n)
    for b, sb in enumerate(s):
        if not sb:
            continue
        for c, tc in enumerate(t):
            if tc and g[b][c]:
                out = out + sb * tc * g[b][c]
    return out


def connection_value(ctx: CourantContext, X: PolyField) -> Mid:
    out = mid_zero(ctx)
    for i, xi in enumerate(X.components):
        if xi:
            out = mid_add(out, mid_scale(ctx.connection_coeffs[i], xi))
    return out


def derive_mid(X: PolyField, s: Mid) -> Mid:
    return tuple(X.apply(c) for c in s)


def make_context(a: LieAlgebra, gd: GradedDecomposition, A: ValuedForm | None = None,
                 H: PolyForm | None = None) -> CourantContext:
    """Validate and assemble the data of the trivialized model."""
    e0 = gd.component(0)
    n = len(gd.g_minus)
    if n != a.dimension - len(gd.p):
        raise DimensionError("dim g_- does not match dim g - dim p")
    m = len(e0)
    gram = tuple(tuple(a.killing_gram[i][j] for j in e0) for i in e0)
    if linalg.rank([list(r) for r in gram]) != m:
        raise StructureError("Killing form is degenerate on g_0")
    if A is None:
        A = ValuedForm.zero(n, 1, m)
    if H is None:
        H = PolyForm.zero(n, 3)
    if not isinstance(A, ValuedForm) or A.degree != 1:
        raise DimensionError("connection must be a 1-form")
    if A.value_dim != m:
        raise DimensionError(f"connection has {A.value_dim} components, dim g_0 = {m}")
    if A.n != n:
        raise DimensionError(f"connection lives on chart dimension {A.n}, expected {n}")
    if not isinstance(H, PolyForm) or H.degree != 3:
        raise DimensionError(f"H must be a 3-form, got degree {getattr(H, 'degree', None)}")
    if H.n != n:
        raise DimensionError(f"H lives on chart dimension {H.n}, expected {n}")
    return CourantContext(a, gd, n, tuple(e0), gram, A, H)


def with_data(ctx: CourantContext, A: ValuedForm | None = None, H: PolyForm | None = None) -> CourantContext:
    """Same algebra and grading with new connection and/or 3-form."""
    return make_context(ctx.algebra, ctx.gd, A if A is not None else ctx.connection_A,
                        H if H is not None else ctx.h_form)


# ---------------------------------------------------------------------------
# reduced Lie algebroid, connection, curvature
# ---------------------------------------------------------------------------

def reduced_bracket(ctx: CourantContext, u: ReducedSection, v: ReducedSection) -> ReducedSection:
    """Atiyah bracket ([X,Y], X(t) - Y(s) + [s,t]_0)."""
    _check_mid(u.mid, v.mid)
    mid = mid_add(mid_sub(derive_mid(u.vec, v.mid), derive_mid(v.vec, u.mid)), e_bracket(ctx, u.mid, v.mid))
    return ReducedSection(u.vec.bracket(v.vec), mid)


def gamma(ctx: CourantContext, X: PolyField) -> ReducedSection:
    return ReducedSection(X, connection_value(ctx, X))


def nabla(ctx: CourantContext, X: PolyField, s: Mid) -> Mid:
    """nabla_X s = X(s) + [A(X), s]_0."""
    _check_mid(s, mid_zero(ctx))
    return mid_add(derive_mid(X, s), e_bracket(ctx, connection_value(ctx, X), s))


def curvature(ctx: CourantContext) -> ValuedForm:
    """R(X, Y) = [gamma X, gamma Y] - gamma [X, Y], tabulated on coordinate fields."""
    n, m = ctx.n, ctx.m
    comps: list[dict] = [{} for _ in range(m)]
    for i, j in combinations(range(n), 2):
        Xi, Xj = PolyField.coordinate(n, i), PolyField.coordinate(n, j)
        top = reduced_bracket(ctx, gamma(ctx, Xi), gamma(ctx, Xj))
        corr = gamma(ctx, Xi.bracket(Xj))
        for a, v in enumerate(mid_sub(top.mid, corr.mid)):
            if v:
                comps[a][(i, j)] = v
    return ValuedForm(n, 2, [PolyForm(n, 2, c) for c in comps])


def curvature_from_forms(ctx: CourantContext) -> ValuedForm:
    """dA + 1/2 [A ^ A], computed componentwise with wedge products."""
    n, m = ctx.n, ctx.m
    A = ctx.connection_A.components
    out = [d(A[a]) for a in range(m)]
    sc = ctx.e0_structure
    for b in range(m):
        for c in range(m):
            if not A[b] or not A[c]:
                continue
            w = wedge(A[b], A[c])
            if not w:
                continue
            for a, v in sc[b][c].items():
                out[a] = out[a] + w * (Fraction(v) / 2)
    return ValuedForm(n, 2, out)


def curvature_value(ctx: CourantContext, X: PolyField, Y: PolyField, table=None) -> Mid:
    R = ctx.curvature_table if table is None else table
    out = mid_zero(ctx)
    for i, xi in enumerate(X.components):
        if not xi:
            continue
        for j, yj in enumerate(Y.components):
            if yj and i != j:
                out = mid_add(out, mid_scale(R[i][j], xi * yj))
    return out


def curvature_table_of(ctx: CourantContext, R: ValuedForm) -> tuple[tuple[Mid, ...], ...]:
    zero = mid_zero(ctx)
    table = [[zero] * ctx.n for _ in range(ctx.n)]
    for i, j in combinations(range(ctx.n), 2):
        v = tuple(R.coefficient((i, j)))
        table[i][j] = v
        table[j][i] = mid_neg(v)
    return tuple(tuple(r) for r in table)


# ---------------------------------------------------------------------------
# the bracket and derived operations
# ---------------------------------------------------------------------------

def anchor(e: Section) -> PolyField:
    return e.vec


def metric(ctx: CourantContext, e1: Section, e2: Section) -> PolyFn:
    return pairing(e1.form, e2.vec) + pairing(e2.form, e1.vec) + e_pair(ctx, e1.mid, e2.mid)


def _curv_pair_form(ctx: CourantContext, X: PolyField, t: Mid) -> list[PolyFn]:
    """Components l of the 1-form B(R(X, d_l), t)."""
    R = ctx.curvature_table
    out = []
    for l in range(ctx.n):
        v = mid_zero(ctx)
        for i, xi in enumerate(X.components):
            if xi and i != l:
                v = mid_add(v, mid_scale(R[i][l], xi))
        out.append(e_pair(ctx, v, t) if any(v) else PolyFn.zero(ctx.n))
    return out


def courant_bracket(ctx: CourantContext, e1: Section, e2: Section) -> Section:
    X, s, xi = e1.vec, e1.mid, e1.form
    Y, t, eta = e2.vec, e2.mid, e2.form
    _check_mid(s, mid_zero(ctx))
    _check_mid(t, mid_zero(ctx))
    n = ctx.n
    zero = PolyFn.zero(n)

    vec = X.bracket(Y)

    mid = curvature_value(ctx, X, Y)
    if any(t):
        mid = mid_add(mid, nabla(ctx, X, t))
    if any(s):
        mid = mid_sub(mid, nabla(ctx, Y, s))
        if any(t):
            mid = mid_add(mid, e_bracket(ctx, s, t))

    comps = [zero] * n
    if X and Y and ctx.h_form:
        comps = one_form_components(interior(Y, interior(X, ctx.h_form)))
    if X and any(t):
        comps = [c - r for c, r in zip(comps, _curv_pair_form(ctx, X, t))]
    if Y and any(s):
        comps = [c + r for c, r in zip(comps, _curv_pair_form(ctx, Y, s))]
    if any(s) and any(t):
        for l in range(n):
            comps[l] = comps[l] + e_pair(ctx, nabla(ctx, PolyField.coordinate(n, l), s), t)
    form = one_form(comps)
    if X and eta:
        form = form + lie_derivative(X, eta)
    if Y and xi:
        form = form - lie_derivative(Y, xi) + exact(pairing(xi, Y))
    return Section(vec, mid, form)


def del_(ctx: CourantContext, f: PolyFn) -> Section:
    """The section with (del f, e) = anchor(e) f, i.e. (0, 0, df)."""
    if f.n != ctx.n:
        raise DimensionError(f"function on chart dimension {f.n}, expected {ctx.n}")
    return ctx.section(form=exact(f))


def skew_bracket(ctx: CourantContext, e1: Section, e2: Section) -> Section:
    return (courant_bracket(ctx, e1, e2) - courant_bracket(ctx, e2, e1)) * Fraction(1, 2)


def jacobiator(ctx: CourantContext, e1: Section, e2: Section, e3: Section, strict: bool = True) -> Section:
    """[e1,[e2,e3]] - [[e1,e2],e3] - [e2,[e1,e3]]; a pure 1-form when ``strict``."""
    b = courant_bracket
    J = b(ctx, e1, b(ctx, e2, e3)) - b(ctx, b(ctx, e1, e2), e3) - b(ctx, e2, b(ctx, e1, e3))
    if strict and (J.vec or any(J.mid)):
        raise StructureError(f"Jacobiator has non-form components: {J}")
    return J


def _pontrjagin_from_table(ctx: CourantContext, table) -> PolyForm:
    n = ctx.n
    terms = {}
    for idx in combinations(range(n), 4):
        total = PolyFn.zero(n)
        for perm in permutations(range(4)):
            a, b, c, e = (idx[p] for p in perm)
            val = e_pair(ctx, table[a][b], table[c][e])
            if val:
                total = total + val * _sort_sign(perm)
        if total:
            terms[idx] = total * Fraction(1, 4)
    return PolyForm(n, 4, terms)


def pontrjagin_form(ctx: CourantContext) -> PolyForm:
    """1/4 sum over S_4 of sgn(tau) B(R(X_t1, X_t2), R(X_t3, X_t4))."""
    p = _pontrjagin_from_table(ctx, ctx.curvature_table)
    dp = d(p)
    if dp:
        raise StructureError(f"Pontrjagin form is not closed: d = {dp}")
    return p


def pontrjagin_via_wedge(ctx: CourantContext) -> PolyForm:
    """sum_{b,c} B_bc R^b ^ R^c; an independent route to the same 4-form."""
    R = curvature(ctx).components
    out = PolyForm.zero(ctx.n, 4)
    for b in range(ctx.m):
        for c in range(ctx.m):
            if ctx.e0_gram[b][c] and R[b] and R[c]:
                out = out + wedge(R[b], R[c]) * ctx.e0_gram[b][c]
    return out


def h4_form(ctx: CourantContext) -> PolyForm:
    """dH - 1/2 <R ^ R>; vanishes exactly when the Jacobi identity holds."""
    return d(ctx.h_form) - pontrjagin_form(ctx) * Fraction(1, 2)


# Sign relating the Jacobiator to the H_4 contraction, fixed by experiment:
# J(e1, e2, e3) = JACOBIATOR_SIGN * H_4(a(e1), a(e2), a(e3), -).
JACOBIATOR_SIGN = 1


def h4_contraction(ctx: CourantContext, X1: PolyField, X2: PolyField, X3: PolyField,
                   h4: PolyForm | None = None) -> PolyForm:
    """The 1-form H_4(X1, X2, X3, -)."""
    w = h4_form(ctx) if h4 is None else h4
    return interior(X3, interior(X2, interior(X1, w)))


def unobstructed_h(ctx: CourantContext) -> PolyForm:
    """A 3-form H with dH = 1/2 <R ^ R>, from the radial homotopy operator."""
    target = pontrjagin_form(ctx) * Fraction(1, 2)
    if not target:
        return PolyForm.zero(ctx.n, 3)
    return poincare_primitive(target)


# ---------------------------------------------------------------------------
# isotropic splittings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsotropicSplitting:
    """gamma0(X) = (X, m(X), beta(X)) with <beta(X), Y> = -1/2 B(m(X), m(Y))."""

    ctx: CourantContext = field(repr=False)
    gamma_mid: ValuedForm
    beta: tuple[tuple[PolyFn, ...], ...]

    def mid_of(self, X: PolyField) -> Mid:
        out = mid_zero(self.ctx)
        for i, xi in enumerate(X.components):
            if xi:
                out = mid_add(out, mid_scale(tuple(c.coefficient((i,)) for c in self.gamma_mid.components), xi))
        return out

    def correction(self, X: PolyField) -> PolyForm:
        n = self.ctx.n
        comps = [PolyFn.zero(n)] * n
        for i, xi in enumerate(X.components):
            if xi:
                comps = [c + self.beta[i][j] * xi for j, c in enumerate(comps)]
        return one_form(comps)

    def image(self, X: PolyField) -> Section:
        return Section(X, self.mid_of(X), self.correction(X))

    def raw_image(self, X: PolyField) -> Section:
        """The uncorrected lift (X, m(X), 0)."""
        return self.ctx.section(vec=X, mid=self.mid_of(X))


def isotropize(ctx: CourantContext, gamma_mid: ValuedForm) -> IsotropicSplitting:
    if gamma_mid.degree != 1 or gamma_mid.value_dim != ctx.m or gamma_mid.n != ctx.n:
        raise DimensionError("gamma_mid must be a g_0-valued 1-form on the chart")
    n = ctx.n
    cols = [tuple(c.coefficient((i,)) for c in gamma_mid.components) for i in range(n)]
    beta = tuple(
        tuple(e_pair(ctx, cols[i], cols[j]) * Fraction(-1, 2) for j in range(n)) for i in range(n)
    )
    split = IsotropicSplitting(ctx, gamma_mid, beta)
    for i in range(n):
        for j in range(i, n):
            v = metric(ctx, split.image(PolyField.coordinate(n, i)), split.image(PolyField.coordinate(n, j)))
            if v:
                raise StructureError(f"isotropized lift not isotropic on d{i + 1}, d{j + 1}: {v}")
    return split


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

def random_poly(n: int, rng: random.Random, max_degree: int = 2, max_terms: int = 3,
                coeff: int = 3) -> PolyFn:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        e = [0] * n
        for _ in range(rng.randint(0, max_degree)):
            e[rng.randrange(n)] += 1
        terms[tuple(e)] = Fraction(rng.choice([c for c in range(-coeff, coeff + 1) if c]))
    return PolyFn(n, terms)


def random_field(n: int, rng: random.Random, max_degree: int = 2, density: float = 0.6) -> PolyField:
    return PolyField([random_poly(n, rng, max_degree) if rng.random() < density else PolyFn.zero(n)
                      for _ in range(n)])


def random_mid(ctx: CourantContext, rng: random.Random, max_degree: int = 2, density: float = 0.6) -> Mid:
    return tuple(random_poly(ctx.n, rng, max_degree) if rng.random() < density else PolyFn.zero(ctx.n)
                 for _ in range(ctx.m))


def random_section(ctx: CourantContext, rng: random.Random, max_degree: int = 2, density: float = 0.6) -> Section:
    form = one_form([random_poly(ctx.n, rng, max_degree) if rng.random() < density else PolyFn.zero(ctx.n)
                     for _ in range(ctx.n)])
    return Section(random_field(ctx.n, rng, max_degree, density), random_mid(ctx, rng, max_degree, density), form)


def random_connection(n: int, m: int, rng: random.Random, max_degree: int = 1, density: float = 0.5) -> ValuedForm:
    comps = []
    for _ in range(m):
        comps.append(one_form([random_poly(n, rng, max_degree, 2) if rng.random() < density else PolyFn.zero(n)
                               for _ in range(n)]))
    return ValuedForm(n, 1, comps)


@dataclass(frozen=True)
class Sample:
    e1: Section
    e2: Section
    e3: Section
    f: PolyFn


def sample_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def random_samples(ctx: CourantContext, count: int, seed: int = 0, max_degree: int = 2) -> list[Sample]:
    out = []
    for k in range(count):
        rng = sample_rng(seed, k)
        e1, e2, e3 = (random_section(ctx, rng, max_degree) for _ in range(3))
        out.append(Sample(e1, e2, e3, random_poly(ctx.n, rng, max_degree)))
    return out


def coordinate_sections(ctx: CourantContext) -> list[Section]:
    """(d_i, 0, 0), (0, s_a, 0), (0, 0, dx_i): a constant spanning frame."""
    n, m = ctx.n, ctx.m
    out = [ctx.section(vec=PolyField.coordinate(n, i)) for i in range(n)]
    for a in range(m):
        mid = [PolyFn.zero(n)] * m
        mid[a] = PolyFn.constant(n, 1)
        out.append(ctx.section(mid=mid))
    out += [ctx.section(form=PolyForm.basic(n, i)) for i in range(n)]
    return out


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

MetricFn = Callable[[CourantContext, Section, Section], PolyFn]


def _as_sample(item, n: int) -> Sample:
    if isinstance(item, Sample):
        return item
    e1, e2, e3, *rest = item
    f = rest[0] if rest else PolyFn.variable(n, 0) * PolyFn.variable(n, n - 1) + 1
    return Sample(e1, e2, e3, f)


def _first_failure(name: str, rep: Report, witnesses: dict) -> None:
    rep.add(name, name not in witnesses, witnesses.get(name))


def check_axioms(ctx: CourantContext, samples: Iterable, metric_fn: MetricFn | None = None) -> Report:
    """Exact pre-Courant axioms and derived identities on every sample."""
    pair = metric_fn or metric
    br = courant_bracket
    items = [_as_sample(s, ctx.n) for s in samples]
    rep = Report("courant axioms")
    if not items:
        rep.add("samples", True, note="vacuous: no samples supplied")
    failures: dict[str, dict] = {}

    def fail(name, k, detail):
        failures.setdefault(name, {"sample": k, "detail": str(detail)})

    for k, smp in enumerate(items):
        e1, e2, e3, f = smp.e1, smp.e2, smp.e3, smp.f
        b12, b21 = br(ctx, e1, e2), br(ctx, e2, e1)
        b23, b32, b13 = br(ctx, e2, e3), br(ctx, e3, e2), br(ctx, e1, e3)
        lhs = e1.vec.apply(pair(ctx, e2, e3))

        r = lhs - pair(ctx, e1, b23) - pair(ctx, e1, b32)
        if r:
            fail("non_skew_symmetry", k, r)
        r = lhs - pair(ctx, b12, e3) - pair(ctx, e2, b13)
        if r:
            fail("metric_preservation", k, r)
        r = br(ctx, e1, e2 * f) - (b12 * f + e2 * e1.vec.apply(f))
        if not r.is_zero():
            fail("leibniz_right", k, r)
        r = br(ctx, e1 * f, e2) - (b12 * f - e1 * e2.vec.apply(f) + del_(ctx, f) * pair(ctx, e1, e2))
        if not r.is_zero():
            fail("leibniz_left", k, r)
        if b12.vec != e1.vec.bracket(e2.vec):
            fail("anchor_homomorphism", k, b12.vec - e1.vec.bracket(e2.vec))
        r = b12 + b21 - del_(ctx, pair(ctx, e1, e2))
        if not r.is_zero():
            fail("symmetrization", k, r)
        r = b12 - (skew_bracket(ctx, e1, e2) + del_(ctx, pair(ctx, e1, e2)) * Fraction(1, 2))
        if not r.is_zero():
            fail("skew_defect", k, r)
        df = del_(ctx, f)
        r = pair(ctx, df, e1) - e1.vec.apply(f)
        if r:
            fail("del_pairing", k, r)
        if df.vec:
            fail("del_in_kernel", k, df.vec)
        r = br(ctx, e1, df) - del_(ctx, e1.vec.apply(f))
        if not r.is_zero():
            fail("bracket_with_del_right", k, r)
        r = br(ctx, df, e1)
        if not r.is_zero():
            fail("bracket_with_del_left", k, r)

    for name in ("non_skew_symmetry", "metric_preservation", "leibniz_right", "leibniz_left",
                 "anchor_homomorphism", "symmetrization", "skew_defect", "del_pairing", "del_in_kernel",
                 "bracket_with_del_right", "bracket_with_del_left"):
        _first_failure(name, rep, failures)

    rep.extend(kernel_coisotropy(ctx, pair))
    return rep


def fibre_gram(ctx: CourantContext, metric_fn: MetricFn | None = None) -> list[list[Fraction]]:
    """Gram matrix of the metric on the constant frame from ``coordinate_sections``."""
    pair = metric_fn or metric
    frame = coordinate_sections(ctx)
    origin = (0,) * ctx.n
    return [[pair(ctx, u, v).evaluate(origin) for v in frame] for u in frame]


def kernel_coisotropy(ctx: CourantContext, metric_fn: MetricFn | None = None) -> Report:
    """Fibrewise: im(del) inside ker(anchor), isotropic, with (im del)^perp = ker(anchor)."""
    rep = Report("kernel coisotropy")
    n, m = ctx.n, ctx.m
    N = 2 * n + m
    G = fibre_gram(ctx, metric_fn)
    unit = lambda k: [Fraction(int(k == j)) for j in range(N)]
    # frame order: n vector slots, m E slots, n form slots; im(del) = span{dx_i}
    im_del = [unit(n + m + i) for i in range(n)]
    ker_anchor = [unit(k) for k in range(n, N)]
    rep.add("im_del_in_ker_anchor", linalg.row_space_equal(im_del + ker_anchor, ker_anchor))
    iso = all(not linalg.matvec(G, u)[j] for u in im_del for j in range(n + m, N))
    rep.add("im_del_isotropic", iso)
    perp = linalg.nullspace(linalg.matmul(im_del, G), N)
    rep.add("im_del_perp_is_ker_anchor", linalg.row_space_equal(perp, ker_anchor),
            {"dim_perp": len(perp), "dim_ker": len(ker_anchor)})
    ker_perp = linalg.nullspace(linalg.matmul(ker_anchor, G), N)
    rep.add("ker_anchor_coisotropic", linalg.row_space_equal(ker_perp + ker_anchor, ker_anchor))
    return rep


def check_compatibility(ctx: CourantContext, samples: int = 10, seed: int = 0, max_degree: int = 1,
                        curvature_override: ValuedForm | None = None) -> Report:
    """nabla is a derivation of [-,-]_0, its curvature is ad(R), and R obeys Bianchi."""
    n = ctx.n
    table = ctx.curvature_table if curvature_override is None else curvature_table_of(ctx, curvature_override)
    R = lambda X, Y: curvature_value(ctx, X, Y, table)
    rep = Report("compatibility")
    cases = []
    coords = [PolyField.coordinate(n, i) for i in range(n)]
    for k in range(samples):
        rng = sample_rng(seed, 10_000 + k)
        X1, X2, X3 = (random_field(n, rng, max_degree) for _ in range(3))
        if k < n:
            X1 = coords[k]
        cases.append((X1, X2, X3, random_mid(ctx, rng, max_degree), random_mid(ctx, rng, max_degree)))
    failures: dict[str, dict] = {}
    for k, (X1, X2, X3, s2, s3) in enumerate(cases):
        lhs = nabla(ctx, X1, e_bracket(ctx, s2, s3))
        rhs = mid_add(e_bracket(ctx, nabla(ctx, X1, s2), s3), e_bracket(ctx, s2, nabla(ctx, X1, s3)))
        if lhs != rhs:
            failures.setdefault("derivation", {"sample": k})
        lhs = mid_sub(mid_sub(nabla(ctx, X1, nabla(ctx, X2, s3)), nabla(ctx, X2, nabla(ctx, X1, s3))),
                      nabla(ctx, X1.bracket(X2), s3))
        rhs = e_bracket(ctx, R(X1, X2), s3)
        if lhs != rhs:
            failures.setdefault("curvature", {"sample": k, "residual": [str(v) for v in mid_sub(lhs, rhs)]})
        total = mid_zero(ctx)
        for A, B, C in ((X1, X2, X3), (X2, X3, X1), (X3, X1, X2)):
            total = mid_add(total, mid_sub(nabla(ctx, A, R(B, C)), R(A.bracket(B), C)))
        if any(total):
            failures.setdefault("bianchi", {"sample": k, "residual": [str(v) for v in total]})
    for name in ("derivation", "curvature", "bianchi"):
        _first_failure(name, rep, failures)
    if curvature_override is None:
        rep.add("curvature_two_routes", curvature(ctx) == curvature_from_forms(ctx))
    return rep


def check_jacobi(ctx: CourantContext, samples: Sequence, strict: bool = True) -> Report:
    """Jacobiator is a 1-form equal to JACOBIATOR_SIGN times the H_4 contraction."""
    rep = Report("jacobi")
    h4 = h4_form(ctx)
    coords = coordinate_sections(ctx)[: ctx.n]
    triples = [(a, b, c) for a, b, c in combinations(coords, 3)]
    triples += [(s.e1, s.e2, s.e3) if isinstance(s, Sample) else tuple(s[:3]) for s in samples]
    pure = True
    match = True
    nonzero = 0
    witness = None
    for k, (e1, e2, e3) in enumerate(triples):
        J = jacobiator(ctx, e1, e2, e3, strict=False)
        if J.vec or any(J.mid):
            pure = False
            witness = witness or {"triple": k, "jacobiator": J.to_dict()}
            continue
        expected = h4_contraction(ctx, e1.vec, e2.vec, e3.vec, h4) * JACOBIATOR_SIGN
        if J.form != expected:
            match = False
            witness = witness or {"triple": k, "jacobiator": str(J.form), "expected": str(expected)}
        if J.form:
            nonzero += 1
    rep.add("jacobiator_is_form", pure, witness)
    rep.add("jacobiator_matches_h4", match, witness)
    if not h4:
        rep.add("jacobi_identity", nonzero == 0, {"nonzero_triples": nonzero})
    else:
        rep.add("h4_detected_on_coordinates", nonzero > 0, {"nonzero_triples": nonzero},
                note="twisted: H_4 != 0")
    return rep
