"""|k|-gradings induced by subsets of simple roots."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import linalg
from .algebra import AlgebraElement, LieAlgebra, Root, ad_matrix, bracket
from .linalg import ZERO
from .report import Report


class GradingError(ValueError):
    pass


@dataclass(frozen=True)
class GradedDecomposition:
    sigma: frozenset[int]
    k: int
    components: dict[int, tuple[int, ...]]
    grading_element: AlgebraElement

    @property
    def degrees(self) -> dict[int, int]:
        return {i: j for j, idx in self.components.items() for i in idx}

    def component(self, j: int) -> tuple[int, ...]:
        return self.components.get(j, ())

    def filtration(self, j: int) -> tuple[int, ...]:
        """Basis indices of g^j, the sum of all g_i with i >= j."""
        return tuple(sorted(i for d, idx in self.components.items() if d >= j for i in idx))

    @property
    def p(self) -> tuple[int, ...]:
        return self.filtration(0)

    @property
    def p_plus(self) -> tuple[int, ...]:
        return self.filtration(1)

    @property
    def g_minus(self) -> tuple[int, ...]:
        return tuple(sorted(i for d, idx in self.components.items() if d < 0 for i in idx))

    def dims(self) -> tuple[int, ...]:
        return tuple(len(self.component(j)) for j in range(-self.k, self.k + 1))


def sigma_height(root: Iterable[int], sigma: Iterable[int]) -> int:
    """Sum of the coefficients of ``root`` at the (1-based) indices in ``sigma``."""
    root = tuple(root)
    total = 0
    for i in sigma:
        if not 1 <= i <= len(root):
            raise IndexError(f"simple-root index {i} out of range 1..{len(root)}")
        total += root[i - 1]
    return total


def _check_sigma(a: LieAlgebra, sigma: Iterable[int]) -> frozenset[int]:
    sigma = frozenset(int(i) for i in sigma)
    if not sigma:
        raise GradingError("empty sigma gives p = g and no |k|-grading")
    bad = sorted(i for i in sigma if not 1 <= i <= a.rank)
    if bad:
        raise GradingError(f"sigma indices {bad} out of range 1..{a.rank}")
    return sigma


def grade(a: LieAlgebra, sigma: Iterable[int]) -> GradedDecomposition:
    sigma = _check_sigma(a, sigma)
    comps: dict[int, list[int]] = {}
    for i, root in enumerate(a.roots):
        j = 0 if i in a.cartan_indices else sigma_height(root, sigma)
        comps.setdefault(j, []).append(i)
    k = sigma_height(a.highest_root, sigma)
    K = _solve_grading_element(a, sigma)
    return GradedDecomposition(
        sigma=sigma,
        k=k,
        components={j: tuple(comps[j]) for j in sorted(comps)},
        grading_element=K,
    )


def _solve_grading_element(a: LieAlgebra, sigma: frozenset[int]) -> AlgebraElement:
    # alpha_i(K) = 1 for i in sigma, 0 otherwise; K in the Cartan subalgebra
    system = [list(r) for r in a.simple_root_values]
    rhs = [Fraction(int(i + 1 in sigma)) for i in range(a.rank)]
    if linalg.rank(system) != a.rank:
        raise AssertionError("simple roots are linearly dependent on the Cartan subalgebra")
    h = linalg.solve(system, rhs)
    coords = [ZERO] * a.dimension
    for c, idx in zip(h, a.cartan_indices):
        coords[idx] = c
    return AlgebraElement(tuple(coords))


def grading_element(a: LieAlgebra, gd: GradedDecomposition) -> AlgebraElement:
    return _solve_grading_element(a, gd.sigma)


def _span_rref(vectors: list[list[Fraction]]):
    return linalg.rref(vectors) if vectors else ([], [])


def verify_grading(a: LieAlgebra, gd: GradedDecomposition) -> Report:
    rep = Report(f"grading {a.name} sigma={sorted(gd.sigma)}")
    n = a.dimension
    all_idx = sorted(i for idx in gd.components.values() for i in idx)
    rep.add("partition", all_idx == list(range(n)), {"indices": all_idx})

    deg = gd.degrees
    witness = None
    for i in range(n):
        for j in range(n):
            target = deg.get(i, 0) + deg.get(j, 0)
            for m in a.brackets[i][j]:
                if deg.get(m) != target:
                    witness = {"pair": (i, j), "output_index": m, "expected_degree": target}
                    break
            if witness:
                break
        if witness:
            break
    rep.add("bracket_compatible", witness is None, witness)

    g_minus = gd.g_minus
    gen = [list(a.basis_element(i).coords) for i in gd.component(-1)]
    span, piv = _span_rref(gen)
    frontier = [a.element(r) for r in span]
    while frontier:
        new = []
        for x in frontier:
            for i in gd.component(-1):
                y = bracket(a, a.basis_element(i), x)
                if y.is_zero() or linalg.in_row_space(span, piv, y.coords):
                    continue
                span, piv = linalg.rref(span + [list(y.coords)])
                new.append(y)
        frontier = new
    target, _ = _span_rref([list(a.basis_element(i).coords) for i in g_minus])
    rep.add("generated_by_g_minus_1", span == target, {"generated": len(span), "dim_g_minus": len(g_minus)})

    rep.add(
        "extreme_components_nonzero",
        gd.k >= 1 and bool(gd.component(gd.k)) and bool(gd.component(-gd.k))
        and max(gd.components) == gd.k and min(gd.components) == -gd.k,
        {"k": gd.k, "degrees": sorted(gd.components)},
    )
    recomputed = sigma_height(a.highest_root, gd.sigma)
    rep.add("k_matches_highest_root", recomputed == gd.k, {"claimed": gd.k, "recomputed": recomputed})

    adK = ad_matrix(a, gd.grading_element)
    witness = None
    for j, idx in gd.components.items():
        for i in idx:
            col = [adK[r][i] for r in range(n)]
            expect = [Fraction(j) if r == i else ZERO for r in range(n)]
            if col != expect:
                witness = {"basis_index": i, "degree": j}
                break
        if witness:
            break
    rep.add("grading_element_acts_by_degree", witness is None, witness)

    cartan = set(a.cartan_indices)
    in_cartan = all(c == 0 or i in cartan for i, c in enumerate(gd.grading_element.coords))
    rep.add("grading_element_in_cartan", in_cartan)

    dims_ok = all(len(gd.component(j)) == len(gd.component(-j)) for j in range(1, gd.k + 1))
    rep.add("symmetric_dimensions", dims_ok, {"dims": gd.dims()})
    return rep


def _gram_block(a: LieAlgebra, rows, cols) -> list[list[Fraction]]:
    g = a.killing_gram
    return [[g[i][j] for j in cols] for i in rows]


def verify_duality(a: LieAlgebra, gd: GradedDecomposition) -> Report:
    from .coisotropy import Subspace, orth_complement

    rep = Report(f"duality {a.name} sigma={sorted(gd.sigma)}")
    degrees = sorted(gd.components)
    witness = None
    for i in degrees:
        for j in degrees:
            if i + j == 0:
                continue
            block = _gram_block(a, gd.component(i), gd.component(j))
            if any(any(r) for r in block):
                witness = (i, j)
                break
        if witness:
            break
    rep.add("orthogonal_unless_opposite", witness is None, witness)

    bad = []
    for j in degrees:
        block = _gram_block(a, gd.component(j), gd.component(-j))
        if linalg.rank(block) != len(gd.component(j)) or len(gd.component(j)) != len(gd.component(-j)):
            bad.append(j)
    rep.add("opposite_pairing_nondegenerate", not bad, bad)

    block = _gram_block(a, gd.g_minus, gd.p_plus)
    nd = len(gd.g_minus) == len(gd.p_plus) and linalg.rank(block) == len(gd.g_minus)
    rep.add("g_minus_dual_to_p_plus", nd, {"dim_g_minus": len(gd.g_minus), "dim_p_plus": len(gd.p_plus)})

    p = Subspace.from_indices(a, gd.p)
    p_perp = orth_complement(p)
    p_plus = Subspace.from_indices(a, gd.p_plus)
    rep.add("p_perp_equals_p_plus", p_perp == p_plus, {"dim_p_perp": p_perp.dim, "dim_p_plus": p_plus.dim})
    rep.add("p_plus_inside_p", p_plus.issubspace(p))
    return rep


def all_sigmas(rank: int) -> list[tuple[int, ...]]:
    """Every nonempty subset of simple-root indices, by size then lexicographically."""
    from itertools import combinations

    return [c for r in range(1, rank + 1) for c in combinations(range(1, rank + 1), r)]

