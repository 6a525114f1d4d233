"""Exact polynomial exterior calculus on a chart R^n.

Coordinates are ``x1..xn``; internally index ``i`` (0-based) stands for
``x{i+1}``.  A k-form stores ``{(i1 < ... < ik): coefficient}``; wedge signs
come from sorting the concatenated index tuple, and interior products
contract the first slot.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]
Exponent = tuple[int, ...]


class ChartDimensionError(ValueError):
    pass


class ClosednessError(ValueError):
    """Raised when a primitive is requested for a form that is not closed."""

    def __init__(self, dw: "PolyForm"):
        super().__init__(f"form is not closed: d(w) = {dw}")
        self.dw = dw


def _match(n1: int, n2: int) -> None:
    if n1 != n2:
        raise ChartDimensionError(f"chart dimensions differ: {n1} vs {n2}")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class PolyFn:
    """Polynomial in x1..xn with rational coefficients.  Treated as immutable."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Exponent, Scalar] | None = None):
        self.n = n
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != n:
                        raise ChartDimensionError(f"exponent {e} does not match chart dimension {n}")
                    clean[tuple(e)] = Fraction(c)
        self.terms: dict[Exponent, Fraction] = clean

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "PolyFn":
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        return p

    @classmethod
    def constant(cls, n: int, c: Scalar) -> "PolyFn":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "PolyFn":
        """The coordinate function x_{i+1}."""
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def zero(cls, n: int) -> "PolyFn":
        return cls._raw(n, {})

    def _coerce(self, other) -> "PolyFn":
        if isinstance(other, PolyFn):
            _match(self.n, other.n)
            return other
        return PolyFn.constant(self.n, other)

    def __add__(self, other) -> "PolyFn":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return PolyFn._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "PolyFn":
        return PolyFn._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "PolyFn":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PolyFn":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PolyFn":
        if not isinstance(other, PolyFn):
            c = Fraction(other)
            if not c:
                return PolyFn.zero(self.n)
            return PolyFn._raw(self.n, {e: c * v for e, v in self.terms.items()})
        _match(self.n, other.n)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return PolyFn._raw(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PolyFn":
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        out = PolyFn.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyFn):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == PolyFn.constant(self.n, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def diff(self, i: int) -> "PolyFn":
        """Partial derivative along x_{i+1}."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return PolyFn._raw(self.n, out)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t *= Fraction(x) ** k
            total += t
        return total

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        # graded-lex, highest first
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))

    def __str__(self) -> str:
        return _format_sum([(c, _monomial(e)) for e, c in self.sorted_terms()])

    def __repr__(self) -> str:
        return f"PolyFn({self})"


def _monomial(e: Exponent) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i + 1}")
        elif k:
            parts.append(f"x{i + 1}^{k}")
    return "*".join(parts)


def _format_sum(items: list[tuple[Fraction, str]]) -> str:
    if not items:
        return "0"
    out = []
    for idx, (c, body) in enumerate(items):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if body and mag == 1:
            text = body
        elif body:
            text = f"{_fmt_rational(mag)}*{body}"
        else:
            text = _fmt_rational(mag)
        if idx == 0:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------

class PolyField:
    """The vector field sum_i components[i] * d/dx_{i+1}."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[PolyFn]):
        comps = tuple(components)
        if not comps:
            raise ChartDimensionError("vector field needs at least one component")
        for c in comps:
            _match(c.n, len(comps))
        self.components = comps

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, n: int) -> "PolyField":
        return cls([PolyFn.zero(n)] * n)

    @classmethod
    def coordinate(cls, n: int, i: int) -> "PolyField":
        """d/dx_{i+1}."""
        return cls([PolyFn.constant(n, int(j == i)) for j in range(n)])

    def apply(self, f: PolyFn) -> PolyFn:
        _match(self.n, f.n)
        out = PolyFn.zero(self.n)
        for i, c in enumerate(self.components):
            if c:
                out = out + c * f.diff(i)
        return out

    __call__ = apply

    def bracket(self, other: "PolyField") -> "PolyField":
        _match(self.n, other.n)
        return PolyField([self.apply(b) - other.apply(a) for a, b in zip(self.components, other.components)])

    def __add__(self, other: "PolyField") -> "PolyField":
        _match(self.n, other.n)
        return PolyField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "PolyField") -> "PolyField":
        _match(self.n, other.n)
        return PolyField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "PolyField":
        return PolyField([-a for a in self.components])

    def __mul__(self, f) -> "PolyField":
        return PolyField([a * f for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyField) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __bool__(self) -> bool:
        return any(self.components)

    def __str__(self) -> str:
        parts = [f"({c})*d/dx{i + 1}" for i, c in enumerate(self.components) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"PolyField({self})"


def euler_field(n: int) -> PolyField:
    return PolyField([PolyFn.variable(n, i) for i in range(n)])


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------

def _sort_sign(indices: Sequence[int]) -> int:
    """Sign of the permutation sorting ``indices``; 0 on repeats."""
    if len(set(indices)) != len(indices):
        return 0
    inv = 0
    for i in range(len(indices)):
        for j in range(i + 1, len(indices)):
            if indices[i] > indices[j]:
                inv += 1
    return -1 if inv % 2 else 1


class PolyForm:
    """Differential k-form with polynomial coefficients.  Treated as immutable."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: Mapping[tuple[int, ...], PolyFn] | None = None):
        if not 0 <= degree:
            raise ValueError("negative form degree")
        self.n = n
        self.degree = degree
        clean: dict[tuple[int, ...], PolyFn] = {}
        for idx, f in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not match degree {degree}")
            if any(i < 0 or i >= n for i in idx):
                raise ChartDimensionError(f"index {idx} out of range for chart dimension {n}")
            if not isinstance(f, PolyFn):
                f = PolyFn.constant(n, f)
            _match(n, f.n)
            s = _sort_sign(idx)
            if s == 0 or not f:
                continue
            key = tuple(sorted(idx))
            f = f if s > 0 else -f
            if key in clean:
                f = clean[key] + f
                if not f:
                    del clean[key]
                    continue
            clean[key] = f
        self.terms = clean

    @classmethod
    def zero(cls, n: int, degree: int) -> "PolyForm":
        return cls(n, degree)

    @classmethod
    def function(cls, f: PolyFn) -> "PolyForm":
        return cls(f.n, 0, {(): f})

    @classmethod
    def basic(cls, n: int, *indices: int) -> "PolyForm":
        """dx_{i1+1} ^ ... ^ dx_{ik+1} for 0-based indices."""
        return cls(n, len(indices), {tuple(indices): PolyFn.constant(n, 1)})

    def coefficient(self, idx: Sequence[int]) -> PolyFn:
        s = _sort_sign(tuple(idx))
        if s == 0:
            return PolyFn.zero(self.n)
        f = self.terms.get(tuple(sorted(idx)), PolyFn.zero(self.n))
        return f if s > 0 else -f

    def _check(self, other: "PolyForm") -> None:
        _match(self.n, other.n)
        if self.degree != other.degree:
            raise ValueError(f"form degrees differ: {self.degree} vs {other.degree}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        out = dict(self.terms)
        for idx, f in other.terms.items():
            g = out.get(idx)
            g = f if g is None else g + f
            if g:
                out[idx] = g
            else:
                out.pop(idx, None)
        return PolyForm._raw(self.n, self.degree, out)

    def __neg__(self) -> "PolyForm":
        return PolyForm._raw(self.n, self.degree, {i: -f for i, f in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def __mul__(self, f) -> "PolyForm":
        """Multiply by a function or scalar."""
        if isinstance(f, PolyFn):
            _match(self.n, f.n)
        out = {}
        for i, g in self.terms.items():
            h = g * f
            if h:
                out[i] = h
        return PolyForm._raw(self.n, self.degree, out)

    __rmul__ = __mul__

    @classmethod
    def _raw(cls, n: int, degree: int, terms: dict) -> "PolyForm":
        w = cls.__new__(cls)
        w.n, w.degree, w.terms = n, degree, terms
        return w

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.n == other.n and self.degree == other.degree and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, self.degree, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, fields: Sequence[PolyField]) -> PolyFn:
        """w(Y1, ..., Yk) as a polynomial function."""
        if len(fields) != self.degree:
            raise ValueError(f"expected {self.degree} arguments, got {len(fields)}")
        out = PolyFn.zero(self.n)
        for idx, f in self.terms.items():
            for perm in permutations(range(self.degree)):
                sign = _sort_sign(perm)
                t = f * sign
                for slot, p in enumerate(perm):
                    t = t * fields[slot].components[idx[p]]
                    if not t:
                        break
                out = out + t
        return out

    def sorted_terms(self) -> list[tuple[tuple[int, ...], PolyFn]]:
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        if self.degree == 0:
            return str(self.terms[()])
        pieces = []
        for idx, f in self.sorted_terms():
            basis = "^".join(f"dx{i + 1}" for i in idx)
            for e, c in f.sorted_terms():
                mono = _monomial(e)
                body = f"{mono}*{basis}" if mono else basis
                pieces.append((c, body))
        return _format_sum(pieces)

    def __repr__(self) -> str:
        return f"PolyForm[{self.degree}]({self})"


def d(w: PolyForm) -> PolyForm:
    """Exterior derivative.  On top-degree forms returns the zero (n+1)-form."""
    out: dict[tuple[int, ...], PolyFn] = {}
    if w.degree >= w.n:
        return PolyForm._raw(w.n, w.degree + 1, {})
    for idx, f in w.terms.items():
        for j in range(w.n):
            if j in idx:
                continue
            g = f.diff(j)
            if not g:
                continue
            pos = sum(1 for i in idx if i < j)
            key = idx[:pos] + (j,) + idx[pos:]
            if pos % 2:
                g = -g
            h = out.get(key)
            h = g if h is None else h + g
            if h:
                out[key] = h
            else:
                out.pop(key, None)
    return PolyForm._raw(w.n, w.degree + 1, out)


def wedge(w1: PolyForm, w2: PolyForm) -> PolyForm:
    _match(w1.n, w2.n)
    k = w1.degree + w2.degree
    if k > w1.n:
        return PolyForm._raw(w1.n, k, {})
    out: dict[tuple[int, ...], PolyFn] = {}
    for i1, f1 in w1.terms.items():
        for i2, f2 in w2.terms.items():
            s = _sort_sign(i1 + i2)
            if not s:
                continue
            key = tuple(sorted(i1 + i2))
            g = f1 * f2
            if s < 0:
                g = -g
            h = out.get(key)
            h = g if h is None else h + g
            if h:
                out[key] = h
            else:
                out.pop(key, None)
    return PolyForm._raw(w1.n, k, out)


def interior(X: PolyField, w: PolyForm) -> PolyForm:
    """Contraction of ``X`` into the first slot of ``w``."""
    _match(X.n, w.n)
    if w.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    out: dict[tuple[int, ...], PolyFn] = {}
    for idx, f in w.terms.items():
        for m, i in enumerate(idx):
            c = X.components[i]
            if not c:
                continue
            g = f * c
            if m % 2:
                g = -g
            key = idx[:m] + idx[m + 1:]
            h = out.get(key)
            h = g if h is None else h + g
            if h:
                out[key] = h
            else:
                out.pop(key, None)
    return PolyForm._raw(w.n, w.degree - 1, out)


def lie_derivative(X: PolyField, w: PolyForm) -> PolyForm:
    """Cartan formula: L_X = d i_X + i_X d."""
    _match(X.n, w.n)
    if w.degree == 0:
        return PolyForm.function(X.apply(w.terms.get((), PolyFn.zero(w.n))))
    return d(interior(X, w)) + interior(X, d(w))


def poincare_primitive(w: PolyForm) -> PolyForm:
    """Primitive of a closed form via the radial homotopy operator at the origin.

    x^a dx_I  ->  x^a i_E(dx_I) / (|a| + k)  with E the Euler field.
    """
    if w.degree < 1:
        raise ValueError("primitive requires degree >= 1")
    dw = d(w)
    if dw:
        raise ClosednessError(dw)
    n, k = w.n, w.degree
    out: dict[tuple[int, ...], PolyFn] = {}
    for idx, f in w.terms.items():
        for e, c in f.terms.items():
            scale = c / (sum(e) + k)
            for m, i in enumerate(idx):
                e2 = list(e)
                e2[i] += 1
                g = PolyFn._raw(n, {tuple(e2): scale if m % 2 == 0 else -scale})
                key = idx[:m] + idx[m + 1:]
                h = out.get(key)
                h = g if h is None else h + g
                if h:
                    out[key] = h
                else:
                    out.pop(key, None)
    p = PolyForm._raw(n, k - 1, out)
    if d(p) != w:
        raise AssertionError("homotopy operator failed to produce a primitive")
    return p


def exact(f: PolyFn) -> PolyForm:
    """df as a 1-form."""
    return d(PolyForm.function(f))


def pairing(w: PolyForm, X: PolyField) -> PolyFn:
    """<w, X> for a 1-form w."""
    if w.degree != 1:
        raise ValueError("pairing needs a 1-form")
    _match(w.n, X.n)
    out = PolyFn.zero(w.n)
    for (i,), f in w.terms.items():
        if X.components[i]:
            out = out + f * X.components[i]
    return out


def one_form(components: Sequence[PolyFn]) -> PolyForm:
    n = len(components)
    return PolyForm(n, 1, {(i,): c for i, c in enumerate(components)})


def one_form_components(w: PolyForm) -> list[PolyFn]:
    if w.degree != 1:
        raise ValueError("expected a 1-form")
    return [w.terms.get((i,), PolyFn.zero(w.n)) for i in range(w.n)]


# ---------------------------------------------------------------------------
# vector-valued forms
# ---------------------------------------------------------------------------

class ValuedForm:
    """k-form with values in R^m, stored as m scalar k-forms."""

    __slots__ = ("n", "degree", "components")

    def __init__(self, n: int, degree: int, components: Sequence[PolyForm]):
        comps = tuple(components)
        for c in comps:
            _match(n, c.n)
            if c.degree != degree:
                raise ValueError(f"component of degree {c.degree}, expected {degree}")
        self.n, self.degree, self.components = n, degree, comps

    @classmethod
    def zero(cls, n: int, degree: int, value_dim: int) -> "ValuedForm":
        return cls(n, degree, [PolyForm.zero(n, degree)] * value_dim)

    @property
    def value_dim(self) -> int:
        return len(self.components)

    @property
    def terms(self) -> dict[tuple[int, ...], tuple[PolyFn, ...]]:
        keys = sorted({i for c in self.components for i in c.terms})
        zero = PolyFn.zero(self.n)
        return {i: tuple(c.terms.get(i, zero) for c in self.components) for i in keys}

    def coefficient(self, idx: Sequence[int]) -> list[PolyFn]:
        return [c.coefficient(idx) for c in self.components]

    def __add__(self, other: "ValuedForm") -> "ValuedForm":
        return ValuedForm(self.n, self.degree, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "ValuedForm") -> "ValuedForm":
        return ValuedForm(self.n, self.degree, [a - b for a, b in zip(self.components, other.components)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ValuedForm)
            and self.n == other.n
            and self.degree == other.degree
            and self.components == other.components
        )

    def __hash__(self) -> int:
        return hash(self.components)

    def __bool__(self) -> bool:
        return any(self.components)

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.components) + "]"

    def __repr__(self) -> str:
        return f"ValuedForm[{self.degree}]{self}"


def basis_indices(n: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), k))
