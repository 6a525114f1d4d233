"""Split classical Lie algebras as explicit rational matrix algebras.

The realizations are chosen so that the Cartan subalgebra is the diagonal:

* ``A_n``: sl(n+1).
* ``B_n``, ``D_n``: matrices X with X^T J + J X = 0 for the anti-diagonal
  symmetric J (size 2n+1 resp. 2n).
* ``C_n``: the same with the anti-diagonal symplectic J of size 2n.

Every non-Cartan basis vector is a single root vector, so root data fall out
of the structure constants without any diagonalization heuristics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .linalg import ZERO, Matrix
from .report import Report

FAMILIES = ("A", "B", "C", "D")
MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4}

Root = tuple[int, ...]


class UnsupportedAlgebraError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def classical_dimension(family: str, rank: int) -> int:
    n = rank
    return {"A": n * (n + 2), "B": n * (2 * n + 1), "C": n * (2 * n + 1), "D": n * (2 * n - 1)}[family]


@dataclass(frozen=True)
class AlgebraElement:
    coords: tuple[Fraction, ...]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_dim(self, other)
        return AlgebraElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_dim(self, other)
        return AlgebraElement(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(tuple(-a for a in self.coords))

    def __rmul__(self, c) -> "AlgebraElement":
        c = Fraction(c)
        return AlgebraElement(tuple(c * a for a in self.coords))

    def __len__(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)


def _same_dim(x: AlgebraElement, y: AlgebraElement) -> None:
    if len(x.coords) != len(y.coords):
        raise DimensionError(f"element sizes differ: {len(x.coords)} vs {len(y.coords)}")


@dataclass(frozen=True)
class LieAlgebra:
    """A basis-indexed Lie algebra with exact structure constants.

    ``brackets[i][j]`` is the sparse coordinate dict of [x_i, x_j];
    ``roots[i]`` is the simple-root expansion of the root of x_i, or the zero
    tuple for Cartan basis elements.
    """

    family: str
    rank: int
    basis: tuple[tuple[tuple[Fraction, ...], ...], ...]
    brackets: tuple[tuple[dict, ...], ...]
    cartan_indices: tuple[int, ...]
    roots: tuple[Root, ...]
    simple_root_values: tuple[tuple[Fraction, ...], ...]
    killing_gram: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    labels: tuple[str, ...] = field(default=(), repr=False)

    @property
    def dimension(self) -> int:
        return len(self.brackets)

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    @cached_property
    def structure_constants(self) -> list[list[list[Fraction]]]:
        """Dense table c[i][j][k] with [x_i, x_j] = sum_k c[i][j][k] x_k."""
        n = self.dimension
        return [[[self.brackets[i][j].get(k, ZERO) for k in range(n)] for j in range(n)] for i in range(n)]

    def element(self, coords: Iterable) -> AlgebraElement:
        el = AlgebraElement(tuple(Fraction(c) for c in coords))
        if len(el.coords) != self.dimension:
            raise DimensionError(f"expected {self.dimension} coordinates, got {len(el.coords)}")
        return el

    def basis_element(self, i: int) -> AlgebraElement:
        c = [ZERO] * self.dimension
        c[i] = Fraction(1)
        return AlgebraElement(tuple(c))

    def zero(self) -> AlgebraElement:
        return AlgebraElement((ZERO,) * self.dimension)

    def matrix_of(self, x: AlgebraElement) -> Matrix:
        """Realize ``x`` in the defining matrix representation."""
        self._check(x)
        size = len(self.basis[0])
        out = linalg.zeros(size, size)
        for c, b in zip(x.coords, self.basis):
            if c:
                for r in range(size):
                    for s in range(size):
                        if b[r][s]:
                            out[r][s] += c * b[r][s]
        return out

    @cached_property
    def root_space_index(self) -> dict[Root, tuple[int, ...]]:
        out: dict[Root, list[int]] = {}
        for i, r in enumerate(self.roots):
            if i not in self.cartan_indices:
                out.setdefault(r, []).append(i)
        return {r: tuple(v) for r, v in out.items()}

    @cached_property
    def highest_root(self) -> Root:
        return max((r for r in self.root_space_index if min(r) >= 0), key=sum)

    def _check(self, x: AlgebraElement) -> None:
        if len(x.coords) != self.dimension:
            raise DimensionError(f"expected {self.dimension} coordinates, got {len(x.coords)}")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _elementary(size: int, p: int, q: int) -> Matrix:
    m = linalg.zeros(size, size)
    m[p][q] = Fraction(1)
    return m


def _form_matrix(family: str, rank: int) -> tuple[int, Matrix | None]:
    if family == "A":
        return rank + 1, None
    size = 2 * rank + 1 if family == "B" else 2 * rank
    J = linalg.zeros(size, size)
    for i in range(size):
        sign = -1 if (family == "C" and i >= rank) else 1
        J[i][size - 1 - i] = Fraction(sign)
    return size, J


def _simple_root_functionals(family: str, rank: int, size: int) -> list[list[Fraction]]:
    """Simple roots as linear functionals on diagonal entries, Bourbaki order."""
    out = []
    for i in range(rank):
        v = [ZERO] * size
        if family == "A" or i < rank - 1:
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
        elif family == "B":
            v[i] = Fraction(1)
        elif family == "C":
            v[i] = Fraction(2)
        else:  # D
            v[i - 1], v[i] = Fraction(1), Fraction(1)
        out.append(v)
    return out


def _raw_basis(family: str, rank: int) -> tuple[list[Matrix], list[Matrix]]:
    """(cartan, root vectors) for the chosen realization, unordered."""
    size, J = _form_matrix(family, rank)
    if family == "A":
        cartan = []
        for i in range(rank):
            h = linalg.zeros(size, size)
            h[i][i], h[i + 1][i + 1] = Fraction(1), Fraction(-1)
            cartan.append(h)
        roots = [_elementary(size, p, q) for p in range(size) for q in range(size) if p != q]
        return cartan, roots
    Jinv = linalg.inverse(J)
    cartan, roots, seen = [], [], set()
    for p in range(size):
        for q in range(size):
            e = _elementary(size, p, q)
            # project onto {X : X^T J + J X = 0}
            corr = linalg.matmul(linalg.matmul(Jinv, linalg.transpose(e)), J)
            x = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(e, corr)]
            if not any(any(r) for r in x):
                continue
            key = _normalized_key(x)
            if key in seen:
                continue
            seen.add(key)
            if p == q:
                if p < rank:
                    cartan.append(x)
            else:
                roots.append(x)
    return cartan, roots


def _normalized_key(x: Matrix) -> tuple:
    flat = [v for row in x for v in row]
    lead = next(v for v in flat if v)
    return tuple(v / lead for v in flat)


def build_algebra(family: str, rank: int) -> LieAlgebra:
    """Construct the split simple Lie algebra of type ``family``/``rank``."""
    family = str(family).upper()
    if family not in FAMILIES:
        raise UnsupportedAlgebraError(f"unsupported family {family!r}; expected one of {FAMILIES}")
    if not isinstance(rank, int) or rank < MIN_RANK[family]:
        raise UnsupportedAlgebraError(
            f"unsupported rank {rank!r} for family {family} (minimum {MIN_RANK[family]})"
        )
    size = len(_form_matrix(family, rank)[1] or [None] * (rank + 1))
    cartan, rootvecs = _raw_basis(family, rank)
    simple = _simple_root_functionals(family, rank, size)

    # weight of each root vector on the diagonal, then in simple-root coordinates
    simple_values = [[sum((a * h[p][p] for p, a in enumerate(alpha)), ZERO) for h in cartan] for alpha in simple]
    labelled: list[tuple[Root, Matrix]] = []
    for x in rootvecs:
        p, q = next((r, c) for r in range(size) for c in range(size) if x[r][c])
        weight = [h[p][p] - h[q][q] for h in cartan]
        coeffs = linalg.solve(linalg.transpose(simple_values), weight)
        if any(c.denominator != 1 for c in coeffs):
            raise AssertionError(f"non-integral root {coeffs}")
        labelled.append((tuple(int(c) for c in coeffs), x))

    positives = sorted((lx for lx in labelled if min(lx[0]) >= 0), key=lambda lx: (sum(lx[0]), lx[0][::-1]))
    by_root = {r: x for r, x in labelled}
    ordered: list[tuple[Root, Matrix]] = list(positives)
    ordered += [(tuple(-c for c in r), by_root[tuple(-c for c in r)]) for r, _ in positives]
    ordered += [((0,) * rank, h) for h in cartan]
    if len(ordered) != len(labelled) + len(cartan):
        raise AssertionError("root vectors are not paired")

    basis = [x for _, x in ordered]
    roots = tuple(r for r, _ in ordered)
    cartan_idx = tuple(range(len(ordered) - len(cartan), len(ordered)))
    brackets = _structure_constants(basis)
    gram = _killing_gram(brackets)
    labels = tuple(_label(r) for r in roots[: cartan_idx[0]]) + tuple(f"h{i + 1}" for i in range(rank))
    return LieAlgebra(
        family=family,
        rank=rank,
        basis=tuple(tuple(tuple(row) for row in b) for b in basis),
        brackets=brackets,
        cartan_indices=cartan_idx,
        roots=roots,
        simple_root_values=tuple(tuple(r) for r in simple_values),
        killing_gram=gram,
        labels=labels,
    )


def _label(root: Root) -> str:
    sign = "e" if min(root) >= 0 else "f"
    return sign + "".join(str(abs(c)) for c in root)


def _structure_constants(basis: list[Matrix]) -> tuple[tuple[dict, ...], ...]:
    dim = len(basis)
    flat = [[v for row in b for v in row] for b in basis]
    _, pivots = linalg.rref(flat)
    if len(pivots) != dim:
        raise AssertionError("basis matrices are linearly dependent")
    pinv = linalg.inverse([[f[p] for p in pivots] for f in flat])
    out = []
    for i in range(dim):
        row = []
        for j in range(dim):
            if j < i:
                row.append({k: -v for k, v in out[j][i].items()})
                continue
            c = linalg.commutator(basis[i], basis[j])
            cf = [v for r in c for v in r]
            coords = linalg.matvec(linalg.transpose(pinv), [cf[p] for p in pivots])
            recon = [sum((coords[k] * flat[k][e] for k in range(dim) if coords[k]), ZERO) for e in range(len(cf))]
            if recon != cf:
                raise AssertionError(f"commutator of basis {i},{j} leaves the algebra")
            row.append({k: v for k, v in enumerate(coords) if v})
        out.append(row)
    return tuple(tuple(r) for r in out)


def _killing_gram(brackets) -> tuple[tuple[Fraction, ...], ...]:
    dim = len(brackets)
    gram = [[ZERO] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i, dim):
            t = ZERO
            for k in range(dim):
                for l, c in brackets[i][k].items():
                    d = brackets[j][l].get(k)
                    if d:
                        t += c * d
            gram[i][j] = gram[j][i] = t
    return tuple(tuple(r) for r in gram)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def bracket(a: LieAlgebra, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    a._check(x)
    a._check(y)
    out = [ZERO] * a.dimension
    for i, xi in enumerate(x.coords):
        if not xi:
            continue
        for j, yj in enumerate(y.coords):
            if not yj:
                continue
            for k, c in a.brackets[i][j].items():
                out[k] += xi * yj * c
    return AlgebraElement(tuple(out))


def ad_matrix(a: LieAlgebra, x: AlgebraElement) -> Matrix:
    a._check(x)
    n = a.dimension
    m = linalg.zeros(n, n)
    for j in range(n):
        for i, xi in enumerate(x.coords):
            if xi:
                for k, c in a.brackets[i][j].items():
                    m[k][j] += xi * c
    return m


def killing_form(a: LieAlgebra, x: AlgebraElement, y: AlgebraElement) -> Fraction:
    a._check(x)
    a._check(y)
    g = a.killing_gram
    return sum(
        (xi * g[i][j] * yj for i, xi in enumerate(x.coords) if xi for j, yj in enumerate(y.coords) if yj),
        ZERO,
    )


@dataclass(frozen=True)
class RootDatum:
    roots: tuple[Root, ...]
    root_space_basis: dict
    simple_roots: tuple[Root, ...]
    positive_roots: tuple[Root, ...]

    @property
    def negative_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if max(r) <= 0)


def root_decomposition(a: LieAlgebra) -> RootDatum:
    """Simultaneously diagonalize ad over the Cartan subalgebra.

    Each non-Cartan basis vector must be an eigenvector of every ad(h); its
    eigenvalue vector is then expressed in simple-root coordinates.
    """
    cartan = [ad_matrix(a, a.basis_element(c)) for c in a.cartan_indices]
    simple_t = linalg.transpose([list(r) for r in a.simple_root_values])
    spaces: dict[Root, list[int]] = {}
    for j in range(a.dimension):
        if j in a.cartan_indices:
            for adh in cartan:
                if any(row[j] for row in adh):
                    raise AssertionError(f"Cartan basis element {j} is not ad-nilpotent on the Cartan")
            continue
        weight = []
        for adh in cartan:
            lam = adh[j][j]
            if any(adh[r][j] for r in range(a.dimension) if r != j):
                raise AssertionError(f"basis element {j} is not a weight vector")
            weight.append(lam)
        coeffs = linalg.solve(simple_t, weight)
        root = tuple(int(c) for c in coeffs)
        if list(map(Fraction, root)) != coeffs:
            raise AssertionError(f"non-integral root at basis element {j}")
        spaces.setdefault(root, []).append(j)
    roots = tuple(spaces)
    simple = tuple(tuple(int(i == k) for i in range(a.rank)) for k in range(a.rank))
    return RootDatum(
        roots=roots,
        root_space_basis={r: tuple(v) for r, v in spaces.items()},
        simple_roots=simple,
        positive_roots=tuple(r for r in roots if min(r) >= 0),
    )


def verify_structure(a: LieAlgebra) -> Report:
    """Antisymmetry, Jacobi, and Killing symmetry/invariance/nondegeneracy."""
    n = a.dimension
    if n == 0:
        raise ValueError("zero-dimensional algebra")
    rep = Report(f"structure {a.name}")
    br = a.brackets

    witness = next(
        ((i, j) for i in range(n) for j in range(i, n)
         if {k: -v for k, v in br[j][i].items()} != br[i][j]),
        None,
    )
    rep.add("antisymmetry", witness is None, witness)

    def bracket_vec(i: int, vec: dict) -> dict:
        out: dict[int, Fraction] = {}
        for l, c in vec.items():
            for k, d in br[i][l].items():
                out[k] = out.get(k, ZERO) + c * d
        return out

    def bracket_left(vec: dict, k: int) -> dict:
        out: dict[int, Fraction] = {}
        for l, c in vec.items():
            for m, d in br[l][k].items():
                out[m] = out.get(m, ZERO) + c * d
        return out

    witness = None
    for i, j, k in itertools.product(range(n), repeat=3):
        lhs = bracket_vec(i, br[j][k])
        r1 = bracket_left(br[i][j], k)
        r2 = bracket_vec(j, br[i][k])
        keys = set(lhs) | set(r1) | set(r2)
        if any(lhs.get(m, ZERO) - r1.get(m, ZERO) - r2.get(m, ZERO) for m in keys):
            witness = (i, j, k)
            break
    rep.add("jacobi", witness is None, witness)

    g = a.killing_gram
    witness = next(((i, j) for i in range(n) for j in range(i) if g[i][j] != g[j][i]), None)
    rep.add("killing_symmetric", witness is None, witness)

    witness = None
    for i, j, k in itertools.product(range(n), repeat=3):
        lhs = sum((c * g[m][k] for m, c in br[i][j].items()), ZERO)
        rhs = sum((c * g[j][m] for m, c in br[i][k].items()), ZERO)
        if lhs + rhs:
            witness = (i, j, k)
            break
    rep.add("killing_invariant", witness is None, witness)

    rk = linalg.rank([list(r) for r in g])
    rep.add("killing_nondegenerate", rk == n, {"rank": rk, "dimension": n})
    expected = classical_dimension(a.family, a.rank) if a.family in FAMILIES else n
    rep.add("classical_dimension", expected == n, {"expected": expected, "actual": n})
    return rep


def trace_form(a: LieAlgebra, x: AlgebraElement, y: AlgebraElement) -> Fraction:
    """trace(xy) in the defining representation."""
    return linalg.trace(linalg.matmul(a.matrix_of(x), a.matrix_of(y)))


def sum_elements(a: LieAlgebra, items: Sequence[AlgebraElement]) -> AlgebraElement:
    out = a.zero()
    for x in items:
        out = out + x
    return out
