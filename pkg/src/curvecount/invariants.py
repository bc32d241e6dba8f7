"""Closed-form invariants of a nodal curve computed from its dual graph.

Numeric invariants, the two routes to the class of a fine compactified
Jacobian (stratification sum and closed form), weight polynomials,
Hilbert-scheme series, the stalk series of the perverse filtration,
vertex classes feeding the exponential identity, Severi vectors, and
polarization stability combinatorics.

Conventions:

* K-class formulas (anything valued in RationalQL) require all vertex
  genera zero; weight-polynomial formulas accept arbitrary genera
  through a (1+qt)^{2 sum g_v} factor.
* the subcurve indexed by the empty vertex set contributes 1, forced by
  the constant term of the vertex exponential.
* series attached to a possibly-disconnected subcurve use its
  Euler-characteristic genus ``arithmetic_genus`` (1 - chi(O), which is
  |E| - |V| + 1 + sum g_v regardless of connectivity), while
  ``NumericInvariants.g`` keeps the h1 + sum g_v form, the two agreeing
  exactly on connected graphs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Mapping, Tuple

from .graph import (
    GraphError,
    Multigraph,
    component_count,
    connected_components,
    connected_partitions,
    first_betti,
    forest_count_if_connected,
    is_connected,
    matroid_size_counts,
    n_vector,
    spanning_forest_count,
)
from .kring import (
    ONE,
    RationalQL,
    RingError,
    ULaurent,
    VertexClass,
    WeightPoly,
    ZERO,
    inv_1q_1qL,
    u_convert,
    u_power,
)

D_FACTOR = RationalQL({(0, 0): 1, (1, 0): -1}) * RationalQL({(0, 0): 1, (1, 1): -1})
QL = RationalQL.monomial(1, 1)
NODE_FACTOR = RationalQL({(0, 0): 1, (1, 0): -1, (2, 1): 1})  # 1 - q + q^2*L


class InvariantError(ValueError):
    pass


def _require_rational(graph: Multigraph, what: str):
    if graph.genus_sum():
        raise InvariantError(f"{what} needs all vertex genera zero (weight-polynomial route accepts genera)")


def _require_connected(graph: Multigraph, what: str):
    if component_count(graph) != 1:
        raise InvariantError(f"{what} needs a connected graph")


def arithmetic_genus(graph: Multigraph) -> int:
    """1 - chi(O) = |E| - |V| + 1 + sum of vertex genera; valid for
    disconnected graphs as well (two disjoint lines have genus -1)."""
    return len(graph.edges) - len(graph.vertices) + 1 + graph.genus_sum()


# ----------------------------------------------------------------------
# numeric invariants

@dataclass(frozen=True)
class NumericInvariants:
    gamma: int    # component count
    delta: int    # cogenus = number of nodes = |E|
    g: int        # h1 + sum of vertex genera
    g_geom: int   # geometric genus, sum of vertex genera
    g_ab: int     # abelian rank
    delta_a: int  # affine rank

    def to_json(self):
        return {
            "gamma": self.gamma,
            "delta": self.delta,
            "g": self.g,
            "g_geom": self.g_geom,
            "g_ab": self.g_ab,
            "delta_a": self.delta_a,
        }


def numeric_invariants(graph: Multigraph) -> NumericInvariants:
    """The numeric invariant table of the curve behind the graph.

    The cogenus is recomputed as the sum over vertices of their loop
    counts plus the pairwise edge counts and asserted equal to |E|
    (each node has local delta one); this is structural and always
    holds, acting as a self-check of the edge bookkeeping.
    """
    gamma = component_count(graph)
    loops = sum(1 for e in graph.edges if e.is_loop)
    pair_counts: Dict[Tuple[str, str], int] = {}
    for e in graph.edges:
        if not e.is_loop:
            key = tuple(sorted(e.ends))
            pair_counts[key] = pair_counts.get(key, 0) + 1
    delta = loops + sum(pair_counts.values())
    assert delta == len(graph.edges), "node count disagrees with the edge count"
    g_geom = graph.genus_sum()
    g = first_betti(graph) + g_geom
    return NumericInvariants(
        gamma=gamma,
        delta=delta,
        g=g,
        g_geom=g_geom,
        g_ab=g_geom - 1 + gamma,
        delta_a=delta + 1 - gamma,
    )


# ----------------------------------------------------------------------
# Jacobian classes

def jacobian_class_strata(graph: Multigraph) -> RationalQL:
    """Class of a fine compactified Jacobian as the sum over the
    partial-normalization strata: sum over edge subsets S of
    c-hat(G - S) * (L-1)^{h1(G - S)}."""
    _require_connected(graph, "jacobian class")
    _require_rational(graph, "jacobian class")
    lminus1 = RationalQL({(0, 1): 1, (0, 0): -1})
    total = ZERO
    eids = sorted(graph.edge_ids)
    for r in range(len(eids) + 1):
        for subset in itertools.combinations(eids, r):
            chat = forest_count_if_connected(graph, frozenset(subset))
            if not chat:
                continue
            h1 = first_betti(graph.delete_edges(frozenset(subset)))
            total = total + lminus1**h1 * chat
    return total


def jacobian_class_closed(graph: Multigraph) -> RationalQL:
    """Closed form c(G) * L^{h1(G)}."""
    _require_connected(graph, "jacobian class")
    _require_rational(graph, "jacobian class")
    c = spanning_forest_count(graph, "matrix-tree")
    return RationalQL.monomial(0, first_betti(graph), c)


def jacobian_class(graph: Multigraph):
    """Both routes to the Jacobian class, as (strata_sum, closed_form);
    their equality is the named check 'jacobian-strata'."""
    return jacobian_class_strata(graph), jacobian_class_closed(graph)


def subset_sum_identity(graph: Multigraph):
    """Per removed-edge count i: (sum of c-hat(G - S) over |S| = i,
    binom(h1, i) * c(G)); the two columns agree coefficient-wise."""
    _require_connected(graph, "subset sum")
    h1 = first_betti(graph)
    c = spanning_forest_count(graph, "matrix-tree")
    sums = [0] * (len(graph.edges) + 1)
    eids = sorted(graph.edge_ids)
    for r in range(len(eids) + 1):
        for subset in itertools.combinations(eids, r):
            sums[r] += forest_count_if_connected(graph, frozenset(subset))
    expected = [comb(h1, i) * c if i <= h1 else 0 for i in range(len(graph.edges) + 1)]
    return sums, expected


def jacobian_weight_poly(graph: Multigraph) -> WeightPoly:
    """(1+t)^{2 sum g_v} * t^{2 h1} * c(G)."""
    _require_connected(graph, "jacobian weight polynomial")
    c = spanning_forest_count(graph, "matrix-tree")
    one_plus_t = WeightPoly({(0, 0): 1, (0, 1): 1})
    return one_plus_t ** (2 * graph.genus_sum()) * WeightPoly.monomial(0, 2 * first_betti(graph), c)


# ----------------------------------------------------------------------
# stalk series

def perverse_series(graph: Multigraph) -> RationalQL:
    """sum_h n_h(G) (qL)^{g-h} ((1-q)(1-qL))^h with g = h1 + sum g_v.

    Zero for disconnected or empty graphs (the n-vector convention).
    Matches the graded stalk of the perverse filtration when all vertex
    genera vanish; with genera it is the bare formula.
    """
    ns = n_vector(graph)
    g = first_betti(graph) + graph.genus_sum()
    total = ZERO
    for h, n in enumerate(ns):
        if n:
            total = total + QL ** (g - h) * D_FACTOR**h * n
    return total


def ic_stalk_product(graph: Multigraph) -> RationalQL:
    """Closed product form of the intersection-cohomology stalk class:
    the normalization factor times the sum over independent edge
    subsets, which after cancellation is always a Laurent polynomial:

        sum_{I in C(G)} (qL)^{|I|} ((1-q)(1-qL))^{|E - I| + h0 - |V|}

    (all per-node and per-component symbols specialized to 1, all
    components rational). Connected graphs only.
    """
    _require_connected(graph, "stalk product")
    _require_rational(graph, "stalk product")
    ne = len(graph.edges)
    nv = len(graph.vertices)
    counts = matroid_size_counts(graph)
    total = ZERO
    for k, cnt in enumerate(counts):
        if cnt:
            total = total + QL**k * D_FACTOR ** (ne - k + 1 - nv) * cnt
    return total


def ic_weight_poly(graph: Multigraph) -> WeightPoly:
    """(1+qt)^{2 sum g_v} sum_i n_i (qt^2)^{h1-i} ((1-qt^2)(1-q))^i;
    at q = 1 this collapses to the Jacobian weight polynomial."""
    _require_connected(graph, "stalk weight polynomial")
    ns = n_vector(graph)
    h1 = first_betti(graph)
    one_plus_qt = WeightPoly({(0, 0): 1, (1, 1): 1})
    qt2 = WeightPoly.monomial(1, 2)
    dfac = WeightPoly({(0, 0): 1, (1, 2): -1}) * WeightPoly({(0, 0): 1, (1, 0): -1})
    total = WeightPoly.zero()
    for i, n in enumerate(ns):
        if n:
            total = total + qt2 ** (h1 - i) * dfac**i * n
    return one_plus_qt ** (2 * graph.genus_sum()) * total


# ----------------------------------------------------------------------
# Hilbert series and vertex classes

def hilbert_series(graph: Multigraph, vertices=None) -> RationalQL:
    """Motivic series of the Hilbert schemes of points:

        prod over vertices of 1/((1-q)(1-qL)) * prod over nodes of
        (1 - q + q^2 L),

    for the induced subcurve when ``vertices`` is given. The empty
    subcurve gives 1. Rational components only.
    """
    sub = graph if vertices is None else graph.induced(vertices)
    _require_rational(sub, "Hilbert series")
    smooth = inv_1q_1qL(len(sub.vertices), len(sub.vertices))
    return smooth * NODE_FACTOR ** len(sub.edges)


def hilbert_vertex_class(graph: Multigraph) -> VertexClass:
    """Vertex class S -> (qL)^{1 - g(S)} * Hilbert series of the induced
    subcurve, with the empty subcurve contributing 1 and g the
    Euler-characteristic genus."""
    _require_rational(graph, "Hilbert vertex class")
    verts = graph.vertex_ids
    coeffs = {frozenset(): ONE}
    for r in range(1, len(verts) + 1):
        for subset in itertools.combinations(sorted(verts), r):
            sub = graph.induced(subset)
            g = arithmetic_genus(sub)
            coeffs[frozenset(subset)] = QL ** (1 - g) * hilbert_series(sub)
    return VertexClass(verts, coeffs)


def perverse_vertex_class(graph: Multigraph) -> VertexClass:
    """Vertex class S -> (qL)^{1-g(S)} / ((1-q)(1-qL)) * perverse series
    of the induced subcurve for connected nonempty S, zero otherwise;
    this is the argument of the vertex exponential."""
    _require_rational(graph, "perverse vertex class")
    verts = graph.vertex_ids
    coeffs = {}
    for r in range(1, len(verts) + 1):
        for subset in itertools.combinations(sorted(verts), r):
            sub = graph.induced(subset)
            if component_count(sub) != 1:
                continue
            g = arithmetic_genus(sub)
            coeffs[frozenset(subset)] = QL ** (1 - g) * inv_1q_1qL() * perverse_series(sub)
    return VertexClass(verts, coeffs)


def connected_disconnected_sides(graph: Multigraph):
    """The two sides of the pointwise counting identity behind the main
    exponential: the all-subsets side

        (qL)^{1-g} sum_{J subset E} (qL)^{|J|} ((1-q)(1-qL))^{|E-J|}

    versus the sum over partitions of the vertex set into connected
    blocks of the per-block independent-subset sums. Rational
    components; g is the Euler-characteristic genus.
    """
    _require_rational(graph, "counting identity")
    ne = len(graph.edges)
    g = arithmetic_genus(graph)
    lhs = ZERO
    for j in range(ne + 1):
        lhs = lhs + QL**j * D_FACTOR ** (ne - j) * comb(ne, j)
    lhs = QL ** (1 - g) * lhs

    rhs = ZERO
    for partition in connected_partitions(graph):
        term = ONE
        for block in partition:
            sub = graph.induced(block)
            g_a = arithmetic_genus(sub)
            counts = matroid_size_counts(sub)
            inner = ZERO
            for k, cnt in enumerate(counts):
                if cnt:
                    inner = inner + QL**k * D_FACTOR ** (len(sub.edges) - k) * cnt
            term = term * (QL ** (1 - g_a) * inner)
        rhs = rhs + term
    return lhs, rhs


# ----------------------------------------------------------------------
# Severi vectors

def severi_from_series(graph: Multigraph):
    """(nbar, n) extracted from the series: nbar^i is the u-coefficient
    at u^{i+1-g} of q^{1-g} * Hilb|_{L=1}, n^i the u-coefficient at
    u^{i-g} of q^{-g} * Perv|_{L=1}. Connected, rational components."""
    _require_connected(graph, "Severi vectors")
    _require_rational(graph, "Severi vectors")
    g = arithmetic_genus(graph)
    ne = len(graph.edges)
    hseries = RationalQL.monomial(1 - g, 0) * hilbert_series(graph).substitute_L_one()
    hu = u_convert(hseries, g)
    pseries = RationalQL.monomial(-g, 0) * perverse_series(graph).substitute_L_one()
    pu = u_convert(pseries, g + 1)
    nbar = [hu.coefficient(i + 1 - g) for i in range(ne + 1)]
    n = [pu.coefficient(i - g) for i in range(ne + 1)]
    return nbar, n


def severi_oracle(graph: Multigraph):
    """(nbar, n) from the combinatorial descriptions: nbar^i counts all
    i-element edge subsets, n^i the independent ones (whose removal
    leaves the graph connected)."""
    _require_connected(graph, "Severi oracle")
    ne = len(graph.edges)
    counts = matroid_size_counts(graph)
    nbar = [comb(ne, i) for i in range(ne + 1)]
    n = [counts[i] if i < len(counts) else 0 for i in range(ne + 1)]
    return nbar, n


def severi_vectors(graph: Multigraph):
    """(nbar, n), both of length |E|+1, from the series extractions,
    asserted against the combinatorial oracles."""
    nbar, n = severi_from_series(graph)
    onbar, on = severi_oracle(graph)
    if nbar != onbar or n != on:
        raise InvariantError("series extraction disagrees with the combinatorial oracle")
    return nbar, n


def _u_series_n_side(graph: Multigraph, vertices) -> ULaurent:
    """u * (u-series of the perverse stalk at L=1) for an induced
    subcurve, through the series extraction; zero for disconnected."""
    sub = graph.induced(vertices)
    if component_count(sub) != 1:
        return ULaurent()
    g = arithmetic_genus(sub)
    p = RationalQL.monomial(-g, 0) * perverse_series(sub).substitute_L_one()
    return ULaurent({1: 1}) * u_convert(p, g + 1)


def _u_series_nbar_side(graph: Multigraph, vertices) -> ULaurent:
    """u-series of q^{1-g} * Hilb|_{L=1} for an induced subcurve
    (connected or not)."""
    sub = graph.induced(vertices)
    g = arithmetic_genus(sub)
    h = RationalQL.monomial(1 - g, 0) * hilbert_series(sub).substitute_L_one()
    return u_convert(h)


def nnbar_sides(graph: Multigraph):
    """Coefficient-by-coefficient sides of the square-zero product
    identity tying the two Severi families together: for every nonempty
    vertex subset S, the sum over partitions of S into blocks of
    products of n-side u-series equals the nbar-side u-series of S.

    Returns {S: (lhs, rhs)} over all nonempty vertex subsets.
    """
    _require_rational(graph, "Severi product identity")
    verts = sorted(graph.vertex_ids)
    n_side = {}
    for r in range(1, len(verts) + 1):
        for subset in itertools.combinations(verts, r):
            n_side[frozenset(subset)] = _u_series_n_side(graph, subset)

    cache = {frozenset(): ULaurent.one()}

    def exp_on(subset):
        subset = frozenset(subset)
        try:
            return cache[subset]
        except KeyError:
            pass
        pivot = min(subset)
        rest = sorted(subset - {pivot})
        total = ULaurent()
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                block = frozenset((pivot, *extra))
                fb = n_side[block]
                if fb.is_zero():
                    continue
                total = total + fb * exp_on(subset - block)
        cache[subset] = total
        return total

    out = {}
    for r in range(1, len(verts) + 1):
        for subset in itertools.combinations(verts, r):
            key = frozenset(subset)
            out[key] = (exp_on(key), _u_series_nbar_side(graph, subset))
    return out


# ----------------------------------------------------------------------
# polarizations and stability

@dataclass(frozen=True)
class Polarization:
    """Per-vertex exact rationals with integer total degree."""

    values: Mapping[str, Fraction]

    def __post_init__(self):
        vals = {k: Fraction(v) for k, v in dict(self.values).items()}
        object.__setattr__(self, "values", vals)
        if self.total.denominator != 1:
            raise InvariantError("polarization total must be an integer")

    @property
    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def on(self, vertex_subset) -> Fraction:
        return sum((self.values[v] for v in vertex_subset), Fraction(0))


Multidegree = Tuple[int, ...]


def _chi_structure_sheaf(graph: Multigraph, subset) -> int:
    """chi(O) of the induced subcurve: |D| - |E(D)| - sum of genera."""
    sub = graph.induced(subset)
    return len(sub.vertices) - len(sub.edges) - sub.genus_sum()


def is_general_polarization(graph: Multigraph, m: Polarization) -> bool:
    """A polarization is integral at a subcurve D when every connected
    component of D and of its complement has integer total; general
    means integral at no nontrivial subcurve."""
    verts = sorted(graph.vertex_ids)
    if set(m.values) != set(verts):
        raise InvariantError("polarization must assign a value to every vertex")
    if len(verts) <= 1:
        return True
    for r in range(1, len(verts)):
        for subset in itertools.combinations(verts, r):
            dset = frozenset(subset)
            comp = frozenset(verts) - dset
            integral = True
            for part in (dset, comp):
                for block in connected_components(graph.induced(part)):
                    if m.on(block).denominator != 1:
                        integral = False
                        break
                if not integral:
                    break
            if integral:
                return False
    return True


def _strict_floor_plus_one(x: Fraction) -> int:
    """Least integer strictly greater than x."""
    from math import floor

    return floor(x) + 1


def stable_multidegrees(graph: Multigraph, m: Polarization) -> List[Multidegree]:
    """All line-bundle multidegrees stable for a general polarization:
    integer vectors d with sum |m| - chi(O_C) such that for every
    nontrivial subcurve D, d_D + chi(O_D) > m_D.

    The total degree is normalized so the sheaf Euler characteristic is
    |m| (the unique normalization making the subcurve inequalities for
    D and its complement jointly consistent: chi on D plus chi on the
    complement exceeds chi total by the number of connecting nodes).
    The count equals the spanning-forest count, independent of the
    polarization; that equality is the named check 'multidegrees'.
    """
    _require_connected(graph, "stable multidegrees")
    if not is_general_polarization(graph, m):
        raise InvariantError("polarization is not general")
    verts = sorted(graph.vertex_ids)
    total = int(m.total) - _chi_structure_sheaf(graph, verts)
    if len(verts) == 1:
        return [(total,)]

    chi = {}
    for r in range(1, len(verts)):
        for subset in itertools.combinations(verts, r):
            chi[frozenset(subset)] = _chi_structure_sheaf(graph, subset)

    lo, hi = {}, {}
    for v in verts:
        dv = frozenset((v,))
        rest = frozenset(verts) - dv
        lo[v] = _strict_floor_plus_one(m.on(dv) - chi[dv])
        # complement bound: d_rest > m_rest - chi(rest)
        hi[v] = total - _strict_floor_plus_one(m.on(rest) - chi[rest])
    out = []
    ranges = [range(lo[v], hi[v] + 1) for v in verts[:-1]]
    for head in itertools.product(*ranges):
        last = total - sum(head)
        if last < lo[verts[-1]] or last > hi[verts[-1]]:
            continue
        d = dict(zip(verts, head + (last,)))
        ok = True
        for subset, chi_d in chi.items():
            if sum(d[v] for v in subset) + chi_d <= m.on(subset):
                ok = False
                break
        if ok:
            out.append(tuple(d[v] for v in verts))
    out.sort()
    return out
