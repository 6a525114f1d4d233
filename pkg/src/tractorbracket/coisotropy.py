"""Killing-orthogonal complements, coisotropy, and the root-subalgebra sweep."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg
from .algebra import AlgebraElement, LieAlgebra, Root, bracket
from .linalg import ZERO

DEFAULT_ROOT_CAP = 12


class SweepCapExceeded(ValueError):
    def __init__(self, n_roots: int, cap: int):
        super().__init__(f"{n_roots} roots exceed the enumeration cap of {cap} (2^{n_roots} subsets)")
        self.n_roots = n_roots
        self.cap = cap


class NotASubalgebraError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Subspace:
    owner: LieAlgebra = field(repr=False)
    generators: tuple[AlgebraElement, ...] = field(repr=False)
    basis: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...] = field(repr=False)

    @classmethod
    def span(cls, owner: LieAlgebra, generators: Iterable[AlgebraElement]) -> "Subspace":
        gens = tuple(generators)
        for g in gens:
            owner._check(g)
        rows = [list(g.coords) for g in gens]
        red, piv = linalg.rref(rows) if rows else ([], [])
        return cls(owner, gens, tuple(tuple(r) for r in red), tuple(piv))

    @classmethod
    def from_indices(cls, owner: LieAlgebra, indices: Iterable[int]) -> "Subspace":
        return cls.span(owner, (owner.basis_element(i) for i in indices))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def elements(self) -> list[AlgebraElement]:
        return [AlgebraElement(r) for r in self.basis]

    def contains(self, x: AlgebraElement) -> bool:
        return linalg.in_row_space([list(r) for r in self.basis], list(self.pivots), x.coords)

    def issubspace(self, other: "Subspace") -> bool:
        return all(other.contains(x) for x in self.elements())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.owner is other.owner and self.basis == other.basis

    def __hash__(self) -> int:
        return hash(self.basis)


def orth_complement(s: Subspace) -> Subspace:
    """Null space of x -> B(s, x)."""
    a = s.owner
    g = a.killing_gram
    rows = [[sum((v[i] * g[i][j] for i in range(a.dimension) if v[i]), ZERO) for j in range(a.dimension)]
            for v in s.basis]
    null = linalg.nullspace(rows, a.dimension)
    return Subspace.span(a, (AlgebraElement(tuple(r)) for r in null))


def is_subalgebra(s: Subspace) -> bool:
    els = s.elements()
    for i, x in enumerate(els):
        for y in els[i + 1:]:
            if not s.contains(bracket(s.owner, x, y)):
                return False
    return True


def is_coisotropic(s: Subspace) -> bool:
    return orth_complement(s).issubspace(s)


@dataclass(frozen=True)
class RootSubalgebraDescriptor:
    """Cartan plus the root spaces of ``root_subset``."""

    root_subset: frozenset[Root]
    closed: bool
    ambient_roots: frozenset[Root] = field(repr=False)
    contains_cartan: bool = True

    def subspace(self, a: LieAlgebra) -> Subspace:
        idx = list(a.cartan_indices) if self.contains_cartan else []
        for r in sorted(self.root_subset):
            idx.extend(a.root_space_index[r])
        return Subspace.from_indices(a, sorted(idx))


def is_closed(root_subset: Iterable[Root], all_roots: Iterable[Root]) -> bool:
    subset = set(root_subset)
    roots = set(all_roots)
    for x in subset:
        for y in subset:
            z = tuple(p + q for p, q in zip(x, y))
            if z in roots and z not in subset:
                return False
    return True


def describe(a: LieAlgebra, root_subset: Iterable[Root]) -> RootSubalgebraDescriptor:
    subset = frozenset(tuple(r) for r in root_subset)
    unknown = subset - set(a.root_space_index)
    if unknown:
        raise ValueError(f"not roots of {a.name}: {sorted(unknown)}")
    ambient = frozenset(a.root_space_index)
    return RootSubalgebraDescriptor(subset, is_closed(subset, ambient), ambient)


def is_parabolic_root_subalgebra(d: RootSubalgebraDescriptor) -> bool:
    """R together with -R covers every root; equivalent to containing a Borel."""
    if not d.closed:
        raise NotASubalgebraError("root subset is not closed, so the subspace is not a subalgebra")
    roots = d.ambient_roots
    covered = set(d.root_subset) | {tuple(-c for c in r) for r in d.root_subset}
    return covered >= roots


@dataclass(frozen=True)
class SweepEntry:
    descriptor: RootSubalgebraDescriptor
    is_subalgebra: bool
    is_coisotropic: bool
    is_parabolic: bool

    @property
    def agrees(self) -> bool:
        return self.is_coisotropic == self.is_parabolic


def sweep_root_subalgebras(a: LieAlgebra, cap: int = DEFAULT_ROOT_CAP) -> list[SweepEntry]:
    """Exhaustively test coisotropic <=> parabolic over closed root subsets."""
    roots: Sequence[Root] = sorted(a.root_space_index, key=lambda r: (-sum(r), r))
    if len(roots) > cap:
        raise SweepCapExceeded(len(roots), cap)
    rootset = set(roots)
    out = []
    for size in range(len(roots) + 1):
        for subset in combinations(roots, size):
            if not is_closed(subset, rootset):
                continue
            d = RootSubalgebraDescriptor(frozenset(subset), True, frozenset(rootset))
            s = d.subspace(a)
            out.append(SweepEntry(d, is_subalgebra(s), is_coisotropic(s), is_parabolic_root_subalgebra(d)))
    return out


def counterexamples(entries: Iterable[SweepEntry]) -> list[SweepEntry]:
    return [e for e in entries if not e.agrees or not e.is_subalgebra]
