"""Exact linear algebra for the dual-graph chain complex and its
monodromy operators.

For a multigraph G this module builds the chain space spanned by
oriented edges, the boundary map to the vertex space, explicit bases of
H^1(G) and H_1(G) attached to a deterministic spanning forest, and the
commuting square-zero operators N_e on W = H^1 + H_1 (one per edge,
twist +1) together with their extensions to wedge powers. The signed,
weight-graded dimension count of the image complex

    0 -> wedge^i W -> sum_{|I|=1} Im N_I -> sum_{|I|=2} Im N_I -> ...

is the intersection cohomology stalk class that the invariants module
recomputes through a closed product formula; the two routes check each
other.

Conventions (all exercised by the test suite):

* every non-loop edge is oriented from the endpoint that appears
  earlier in the vertex list to the later one; loops get one fixed
  orientation and enter the boundary map with boundary zero, the same
  as every other edge (the checked identities are insensitive to this),
* H^1 basis vectors have weight 0, H_1 basis vectors weight 1 (one
  Tate twist), and each application of an N_e shifts weights by +1,
* in the stalk class, wedge degree i contributes with sign (-1)^i and
  homological degree k inside the image complex with sign (-1)^k; the
  differentials themselves are never materialized since only the
  K-class is consumed.

Everything is pure and immutable; matrices are exact rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Tuple

from . import linalg
from .graph import GraphError, Multigraph, is_connected
from .kring import RationalQL

MAX_STALK_EDGES = 16


class HomologyError(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    """Ordered basis labels with an integer L-weight per basis vector."""

    labels: Tuple[str, ...]
    weights: Tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise ValueError("labels and weights must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def class_poly(self) -> RationalQL:
        """The K-class: sum of L^weight over basis vectors."""
        out = {}
        for w in self.weights:
            out[(0, w)] = out.get((0, w), 0) + 1
        return RationalQL(out)


@dataclass(frozen=True)
class LinOp:
    """Exact-rational linear map with a uniform L-twist.

    ``matrix`` is row-major, target dim x source dim; a vector of
    weight w in the source lands in weight w + twist in the target.
    """

    source: GradedSpace
    target: GradedSpace
    matrix: Tuple[Tuple[Fraction, ...], ...]
    twist: int = 0

    def __post_init__(self):
        if len(self.matrix) != self.target.dim:
            raise ValueError("row count does not match target dimension")
        for row in self.matrix:
            if len(row) != self.source.dim:
                raise ValueError("column count does not match source dimension")

    def apply(self, vec):
        return linalg.mat_vec([list(r) for r in self.matrix], list(vec))

    def compose(self, other: "LinOp") -> "LinOp":
        """self after other."""
        if other.target.dim != self.source.dim:
            raise ValueError("composition dimension mismatch")
        prod = linalg.matmul([list(r) for r in self.matrix], [list(r) for r in other.matrix])
        return LinOp(other.source, self.target, tuple(tuple(r) for r in prod), self.twist + other.twist)

    def is_zero(self) -> bool:
        return all(not x for row in self.matrix for x in row)

    def to_json(self):
        return {
            "source": {"labels": list(self.source.labels), "weights": list(self.source.weights)},
            "target": {"labels": list(self.target.labels), "weights": list(self.target.weights)},
            "twist": self.twist,
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


@dataclass(frozen=True)
class ForestBasis:
    """A maximal independent edge set (the cotree of a deterministic
    spanning forest) with, per cotree edge, the fundamental cycle in
    edge coordinates; the dual covectors are the standard coordinates
    under the cycle pairing."""

    cotree: Tuple[str, ...]
    cycles: Mapping[str, Mapping[str, int]]

    def pairing_matrix(self):
        """<covector_i, cycle_j>; the construction makes this exactly
        the identity (the contract is +-delta)."""
        n = len(self.cotree)
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# ----------------------------------------------------------------------
# core homology data

def _orientations(graph: Multigraph) -> Dict[str, Tuple[str, str]]:
    pos = {v.id: k for k, v in enumerate(graph.vertices)}
    out = {}
    for e in graph.edges:
        a, b = e.ends
        out[e.id] = (a, b) if pos[a] <= pos[b] else (b, a)
    return out


class _HomologyData:
    """Spanning-forest presentation of H^1 and H_1 of one graph.

    ``cotree`` lists the edges outside the forest in graph edge order;
    both H_1 and H^1 are identified with Q^cotree: a 1-cycle's
    coordinates are its cotree coefficients, and a covector's are its
    values on the fundamental cycles. Under this identification the
    H^1 class of the covector of any edge f is the integer vector
    w_f = (coefficient of f in cycle_j)_j, so every operator below has
    small integer entries.
    """

    def __init__(self, graph: Multigraph):
        self.graph = graph
        self.orient = _orientations(graph)
        roots = {v.id: v.id for v in graph.vertices}

        def find(v):
            while roots[v] != v:
                roots[v] = roots[roots[v]]
                v = roots[v]
            return v

        forest, cotree = [], []
        adj = {v.id: [] for v in graph.vertices}
        for e in graph.edges:
            a, b = e.ends
            if a != b and find(a) != find(b):
                roots[find(a)] = find(b)
                forest.append(e.id)
                adj[a].append((b, e.id))
                adj[b].append((a, e.id))
            else:
                cotree.append(e.id)
        self.forest = tuple(forest)
        self.cotree = tuple(cotree)

        # parent pointers from a BFS over each forest tree
        parent = {}
        seen = set()
        for v in graph.vertex_ids:
            if v in seen:
                continue
            seen.add(v)
            queue = [v]
            while queue:
                u = queue.pop(0)
                for w_vert, eid in adj[u]:
                    if w_vert in seen:
                        continue
                    seen.add(w_vert)
                    parent[w_vert] = (u, eid)
                    queue.append(w_vert)
        self._parent = parent
        self._paths = {}

        # fundamental cycle of a cotree edge e oriented (a, b):
        # e plus the tree path from b back to a
        self.cycles = {}
        for eid in cotree:
            a, b = self.orient[eid]
            vec = {eid: 1}
            for f, s in self._path_to_root(b).items():
                vec[f] = vec.get(f, 0) + s
            for f, s in self._path_to_root(a).items():
                vec[f] = vec.get(f, 0) - s
            self.cycles[eid] = {f: c for f, c in vec.items() if c}
        self.w = {f: tuple(self.cycles[j].get(f, 0) for j in self.cotree) for f in graph.edge_ids}

    def _path_to_root(self, v):
        """Signed forest chain from v to the root of its tree; an edge
        traversed along its orientation contributes +1."""
        try:
            return self._paths[v]
        except KeyError:
            pass
        out = {}
        u = v
        while u in self._parent:
            p, eid = self._parent[u]
            t, _ = self.orient[eid]
            out[eid] = out.get(eid, 0) + (1 if u == t else -1)
            u = p
        out = {k: c for k, c in out.items() if c}
        self._paths[v] = out
        return out

    @property
    def h1(self):
        return len(self.cotree)


def _homology_data(graph: Multigraph) -> _HomologyData:
    return _HomologyData(graph)


def build_homology(graph: Multigraph):
    """(H^1 space, H_1 space, forest basis) for any multigraph.

    Both spaces have dimension h1(G); H^1 basis vectors carry weight 0,
    H_1 basis vectors weight 1.
    """
    data = _homology_data(graph)
    coh = GradedSpace(tuple(f"{e}*" for e in data.cotree), (0,) * data.h1)
    hom = GradedSpace(tuple(f"cyc({e})" for e in data.cotree), (1,) * data.h1)
    return coh, hom, ForestBasis(data.cotree, data.cycles)


def even_weight_space(graph: Multigraph, data: _HomologyData = None) -> GradedSpace:
    """W = H^1 + H_1 with its weight grading (0 and 1)."""
    if data is None:
        data = _homology_data(graph)
    labels = tuple(f"{e}*" for e in data.cotree) + tuple(f"cyc({e})" for e in data.cotree)
    return GradedSpace(labels, (0,) * data.h1 + (1,) * data.h1)


def boundary_matrix(graph: Multigraph):
    """The boundary map from oriented edges to vertices in graph order
    (an oriented edge maps to head minus tail, loops to 0)."""
    vidx = {v.id: i for i, v in enumerate(graph.vertices)}
    orient = _orientations(graph)
    mat = [[0] * len(graph.edges) for _ in range(len(graph.vertices))]
    for k, e in enumerate(graph.edges):
        t, h = orient[e.id]
        if t == h:
            continue
        mat[vidx[h]][k] += 1
        mat[vidx[t]][k] -= 1
    return mat


def covector_class(graph: Multigraph, eid: str, data: _HomologyData = None):
    """The H^1 class of the covector of one edge, in cotree coordinates."""
    if data is None:
        data = _homology_data(graph)
    if eid not in data.w:
        raise GraphError(f"unknown edge id {eid!r}")
    return data.w[eid]


def operator_N(graph: Multigraph, eid: str, data: _HomologyData = None) -> LinOp:
    """The square-zero twisted operator of one edge on W = H^1 + H_1.

    Kills H^1 and sends a 1-cycle t to its pairing with the edge
    covector times the covector class; twist +1. Independent of the
    orientation chosen for the edge (flipping negates both factors).
    """
    if data is None:
        data = _homology_data(graph)
    if eid not in data.w:
        raise GraphError(f"unknown edge id {eid!r}")
    h = data.h1
    w = data.w[eid]
    space = even_weight_space(graph, data)
    mat = [[Fraction(0)] * (2 * h) for _ in range(2 * h)]
    for j in range(h):
        if not w[j]:
            continue
        for i in range(h):
            if w[i]:
                mat[i][h + j] = Fraction(w[i] * w[j])
    return LinOp(space, space, tuple(tuple(r) for r in mat), twist=1)


# ----------------------------------------------------------------------
# wedge powers

def _wedge_basis(dim: int, i: int):
    return list(itertools.combinations(range(dim), i))


def wedge_space(space: GradedSpace, i: int) -> GradedSpace:
    combos = _wedge_basis(space.dim, i)
    labels = tuple("^".join(space.labels[k] for k in c) if c else "1" for c in combos)
    weights = tuple(sum(space.weights[k] for k in c) for c in combos)
    return GradedSpace(labels, weights)


def _insert_sign(rest: tuple, k: int, t: int):
    """Sign and sorted tuple for replacing slot k of a combo by index t;
    ``rest`` is the combo with slot k removed. (None, None) on collision."""
    if t in rest:
        return None, None
    merged = tuple(sorted(rest + (t,)))
    p = merged.index(t)
    sign = -1 if (k - p) % 2 else 1
    return sign, merged


def wedge_operator(op: LinOp, i: int) -> LinOp:
    """Derivation extension of a degree-0 endomorphism to the i-th wedge
    power: c_1^...^c_i maps to the sum over slots of c_1^...^N(c_k)^...^c_i."""
    if i < 0:
        raise ValueError("wedge degree must be nonnegative")
    if op.source != op.target:
        raise ValueError("wedge extension needs an endomorphism")
    src = wedge_space(op.source, i)
    combos = _wedge_basis(op.source.dim, i)
    index = {c: n for n, c in enumerate(combos)}
    mat = [[Fraction(0)] * len(combos) for _ in range(len(combos))]
    for col, combo in enumerate(combos):
        for k, sk in enumerate(combo):
            rest = combo[:k] + combo[k + 1 :]
            for t in range(op.source.dim):
                c = op.matrix[t][sk]
                if not c:
                    continue
                sign, merged = _insert_sign(rest, k, t)
                if sign is None:
                    continue
                mat[index[merged]][col] += sign * c
    return LinOp(src, src, tuple(tuple(r) for r in mat), twist=op.twist)


def _apply_edge_operator(vec, w, h):
    """One derivation step of an edge operator on a sparse multivector
    {index combo: coeff} in wedge coordinates of W (H^1 block 0..h-1,
    H_1 block h..2h-1)."""
    out = {}
    for cmb, c in vec.items():
        for pos, s in enumerate(cmb):
            if s < h:
                continue
            wj = w[s - h]
            if not wj:
                continue
            rest = cmb[:pos] + cmb[pos + 1 :]
            for i2 in range(h):
                wi = w[i2]
                if not wi or i2 in rest:
                    continue
                merged = tuple(sorted(rest + (i2,)))
                p = merged.index(i2)
                sign = -1 if (pos - p) % 2 else 1
                val = out.get(merged, 0) + sign * c * wi * wj
                if val:
                    out[merged] = val
                elif merged in out:
                    del out[merged]
    return out


@dataclass(frozen=True)
class ImageSubspace:
    """A weight-graded subspace of a wedge power of W, with inclusion.

    ``space`` records the twisted weights (intrinsic weight plus |I|);
    ``graded_spans`` maps each twisted weight to the canonical reduced
    sparse basis of the corresponding graded piece, keyed by ambient
    index combos; ``inclusion`` is the same basis as a dense LinOp into
    the ambient wedge power (twist -|I| returns twisted weights to
    ambient intrinsic ones).
    """

    space: GradedSpace
    inclusion: LinOp
    ambient: GradedSpace
    graded_spans: Mapping[int, tuple]

    @property
    def dim(self):
        return self.space.dim

    def class_poly(self) -> RationalQL:
        return self.space.class_poly()


def image_NI(graph: Multigraph, edge_subset, i: int, data: _HomologyData = None) -> ImageSubspace:
    """Image of the product of the N_e^(i) over e in the subset, inside
    the i-th wedge power of W, weights shifted up by |I|.

    The image is zero whenever the subset is dependent in the cographic
    matroid, or i < |I|, or h1 < |I|; this routine discovers that by
    computing the actual image rather than assuming it.
    """
    subset = sorted(graph.check_edge_subset(edge_subset))
    if data is None:
        data = _homology_data(graph)
    h = data.h1
    space = even_weight_space(graph, data)
    amb = wedge_space(space, i)
    combos = _wedge_basis(2 * h, i)
    index = {c: n for n, c in enumerate(combos)}
    k = len(subset)

    by_weight = {}
    for cmb in combos:
        src_weight = sum(1 for s in cmb if s >= h)
        vec = {cmb: 1}
        for eid in subset:
            vec = _apply_edge_operator(vec, data.w[eid], h)
            if not vec:
                break
        if vec:
            by_weight.setdefault(src_weight, []).append(vec)

    labels, weights, cols, spans = [], [], [], {}
    counter = itertools.count()
    for wt in sorted(by_weight):
        basis = linalg.sparse_reduce(by_weight[wt])
        if basis:
            spans[wt] = tuple(dict(b) for b in basis)
        for b in basis:
            labels.append(f"im{next(counter)}")
            weights.append(wt)
            dense = [Fraction(0)] * amb.dim
            for cmb, x in b.items():
                dense[index[cmb]] = x
            cols.append(dense)
    rows = [[cols[c][r] for c in range(len(cols))] for r in range(amb.dim)]
    sub = GradedSpace(tuple(labels), tuple(weights))
    inc = LinOp(sub, amb, tuple(tuple(r) for r in rows), twist=-k)
    return ImageSubspace(sub, inc, amb, spans)


# ----------------------------------------------------------------------
# stalk class via blocked image ranks

def _wedge_with_vector(multivec, vec, offset=0):
    """Wedge a sparse multivector {combo: coeff} with a 1-vector given
    as a dense sequence whose indices are shifted by ``offset``."""
    out = {}
    for combo, c in multivec.items():
        for idx, x in enumerate(vec):
            if not x:
                continue
            t = idx + offset
            if t in combo:
                continue
            merged = tuple(sorted(combo + (t,)))
            sign = -1 if (len(combo) - merged.index(t)) % 2 else 1
            val = out.get(merged, 0) + sign * c * x
            if val:
                out[merged] = val
            elif merged in out:
                del out[merged]
    return out


def _multiplication_ranks(w_I, h: int, k: int):
    """Ranks of (wedge by w_I): wedge^d H^1 -> wedge^{d+k} H^1 for
    d = 0..h, where w_I is a sparse element of wedge^k."""
    ranks = []
    for d in range(h + 1):
        if d + k > h:
            ranks.append(0)
            continue
        cols = []
        for combo in itertools.combinations(range(h), d):
            prod = {}
            cset = set(combo)
            for wcombo, c in w_I.items():
                if cset & set(wcombo):
                    continue
                merged = tuple(sorted(combo + wcombo))
                sign = 1
                seen = list(combo)
                for t in wcombo:
                    pos = sum(1 for s in seen if s < t)
                    if (len(seen) - pos) % 2:
                        sign = -sign
                    seen.insert(pos, t)
                val = prod.get(merged, 0) + sign * c
                if val:
                    prod[merged] = val
                elif merged in prod:
                    del prod[merged]
            cols.append(prod)
        ranks.append(linalg.sparse_rank(cols))
    return ranks


def _contraction_ranks(lams, h: int):
    """Ranks of the iterated contraction of wedge^j H_1 by the given
    covectors, for j = 0..h."""
    k = len(lams)
    ranks = []
    for j in range(h + 1):
        if j < k:
            ranks.append(0)
            continue
        cols = []
        for combo in itertools.combinations(range(h), j):
            cur = {combo: 1}
            for lam in lams:
                nxt = {}
                for cmb, c in cur.items():
                    for m, idx in enumerate(cmb):
                        if not lam[idx]:
                            continue
                        sign = -1 if m % 2 else 1
                        rest = cmb[:m] + cmb[m + 1 :]
                        val = nxt.get(rest, 0) + sign * c * lam[idx]
                        if val:
                            nxt[rest] = val
                        elif rest in nxt:
                            del nxt[rest]
                cur = nxt
                if not cur:
                    break
            cols.append(cur)
        ranks.append(linalg.sparse_rank(cols))
    return ranks


def image_class_table(graph: Multigraph, data: _HomologyData = None):
    """Graded dimensions of Im N_I^(i) for every edge subset I and every
    wedge degree, as {I: {(i, twisted weight): dim}}.

    Evaluated through the exact block factorization of the product of
    the N_e on wedge powers: on the pure-H_1 part the product acts as
    (wedge by the covector volume w_I) composed with an iterated
    contraction, and H^1 factors pass through. This is an operator
    identity of the constructed matrices; the generic materialized
    route ``image_NI`` must and does agree, which the test suite checks
    exhaustively on small graphs.
    """
    if len(graph.edges) > MAX_STALK_EDGES:
        raise GraphError(f"stalk computation guard: more than {MAX_STALK_EDGES} edges")
    if data is None:
        data = _homology_data(graph)
    h = data.h1
    table = {}
    for r in range(len(graph.edges) + 1):
        for subset in itertools.combinations(sorted(graph.edge_ids), r):
            k = len(subset)
            w_I = {(): 1}
            for eid in subset:
                w_I = _wedge_with_vector(w_I, data.w[eid])
            out = {}
            if w_I and k <= h:
                mult = _multiplication_ranks(w_I, h, k)
                contr = _contraction_ranks([data.w[eid] for eid in subset], h)
                for d, t in enumerate(mult):
                    if not t:
                        continue
                    for j, s in enumerate(contr):
                        if s:
                            # wedge degree d + j; twisted weight j
                            key = (d + j, j)
                            out[key] = out.get(key, 0) + t * s
            table[frozenset(subset)] = out
    return table


def cks_stalk_class(graph: Multigraph) -> RationalQL:
    """Signed, weight-graded dimension count of the image complex over
    all wedge degrees:

        sum_i q^i (-1)^i sum_k (-1)^k [ sum_{|I|=k} Im N_I^(i) ]

    with every graded piece recorded as a power of L. Always a Laurent
    polynomial in q and L. Connected graphs only.
    """
    if not is_connected(graph):
        raise HomologyError("stalk class needs a connected graph")
    table = image_class_table(graph)
    terms = {}
    for subset, classes in table.items():
        sign_k = -1 if len(subset) % 2 else 1
        for (i, wt), dim in classes.items():
            sign = sign_k * (-1 if i % 2 else 1)
            key = (i, wt)
            terms[key] = terms.get(key, 0) + sign * dim
    return RationalQL(terms)


# ----------------------------------------------------------------------
# graph automorphisms and equivariant traces

@dataclass(frozen=True)
class GraphAutomorphism:
    """Permutations of vertices and edges compatible with incidence,
    plus a per-edge flag telling whether the chosen orientation is
    preserved (only loops are free to reverse)."""

    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, str]
    orientation_preserved: Mapping[str, bool]

    @classmethod
    def identity(cls, graph: Multigraph) -> "GraphAutomorphism":
        return cls(
            {v: v for v in graph.vertex_ids},
            {e: e for e in graph.edge_ids},
            {e: True for e in graph.edge_ids},
        )

    def power(self, m: int) -> "GraphAutomorphism":
        if m < 1:
            raise ValueError("power must be a positive integer")
        vmap = dict(self.vertex_map)
        emap = dict(self.edge_map)
        flips = dict(self.orientation_preserved)
        for _ in range(m - 1):
            vmap = {v: self.vertex_map[w] for v, w in vmap.items()}
            flips = {e: flips[e] == self.orientation_preserved[emap[e]] for e in emap}
            emap = {e: self.edge_map[f] for e, f in emap.items()}
        return GraphAutomorphism(vmap, emap, flips)


def check_automorphism(graph: Multigraph, sigma: GraphAutomorphism):
    orient = _orientations(graph)
    if sorted(sigma.vertex_map) != sorted(graph.vertex_ids) or sorted(
        sigma.vertex_map.values()
    ) != sorted(graph.vertex_ids):
        raise HomologyError("vertex map is not a permutation of the vertex set")
    if sorted(sigma.edge_map) != sorted(graph.edge_ids) or sorted(
        sigma.edge_map.values()
    ) != sorted(graph.edge_ids):
        raise HomologyError("edge map is not a permutation of the edge set")
    for eid in graph.edge_ids:
        t, h = orient[eid]
        it, ih = sigma.vertex_map[t], sigma.vertex_map[h]
        jt, jh = orient[sigma.edge_map[eid]]
        preserved = sigma.orientation_preserved.get(eid)
        if preserved is None:
            raise HomologyError(f"missing orientation flag for edge {eid!r}")
        if {it, ih} != {jt, jh}:
            raise HomologyError(f"edge map breaks incidence at {eid!r}")
        if it != ih and preserved != (it == jt):
            raise HomologyError(f"orientation flag for {eid!r} contradicts the vertex map")


def _sigma_matrices(sigma: GraphAutomorphism, data: _HomologyData):
    """Matrices of the automorphism on H_1 and H^1 in cotree coordinates."""
    h = data.h1

    def push(vec):
        out = {}
        for eid, c in vec.items():
            s = 1 if sigma.orientation_preserved[eid] else -1
            f = sigma.edge_map[eid]
            out[f] = out.get(f, 0) + s * c
        return out

    hom = [[Fraction(0)] * h for _ in range(h)]
    for col, j in enumerate(data.cotree):
        img = push(data.cycles[j])
        for row, jj in enumerate(data.cotree):
            hom[row][col] = Fraction(img.get(jj, 0))
    # covectors transform by the inverse transpose (phi -> phi o sigma^{-1})
    aug = [row[:] + e for row, e in zip(hom, linalg.identity(h))]
    rrefed, pivots = linalg.rref(aug)
    if pivots != list(range(h)):
        raise HomologyError("automorphism does not act invertibly on homology")
    inv = [row[h:] for row in rrefed]
    coh = linalg.transpose(inv)
    return coh, hom


def equivariant_trace(graph: Multigraph, sigma: GraphAutomorphism, m: int = 1):
    """Graded trace of sigma^m on the signed image complex, wedge degree
    by wedge degree:

        i  ->  sum_k (-1)^{i+k} tr(sigma^m | sum_{|I|=k} Im N_I^(i))

    where sigma permutes the summands by I -> sigma(I), so only fixed
    subsets contribute. Values are Laurent polynomials in L (returned
    as RationalQL with no q); the identity automorphism recovers the
    stalk class coefficients.
    """
    check_automorphism(graph, sigma)
    sig = sigma.power(m) if m != 1 else sigma
    data = _homology_data(graph)
    h = data.h1
    coh, hom = _sigma_matrices(sig, data)
    big = [[Fraction(0)] * (2 * h) for _ in range(2 * h)]
    for a in range(h):
        for b in range(h):
            big[a][b] = coh[a][b]
            big[h + a][h + b] = hom[a][b]
    out = {}
    for i in range(2 * h + 1):
        total = {}
        for r in range(len(graph.edges) + 1):
            for subset in itertools.combinations(sorted(graph.edge_ids), r):
                if frozenset(sig.edge_map[e] for e in subset) != frozenset(subset):
                    continue
                img = image_NI(graph, subset, i, data)
                if img.dim == 0:
                    continue
                sign = -1 if (i + r) % 2 else 1
                for wt, basis in img.graded_spans.items():
                    for n, b in enumerate(basis):
                        mapped = {(): Fraction(1)}
                        acc = {}
                        for cmb, coeff in b.items():
                            vec = {(): coeff}
                            for idx in cmb:
                                col = [big[t][idx] for t in range(2 * h)]
                                vec = _wedge_with_vector(vec, col)
                            for key, x in vec.items():
                                val = acc.get(key, 0) + x
                                if val:
                                    acc[key] = val
                                elif key in acc:
                                    del acc[key]
                        coords = linalg.coords_in_reduced_basis(basis, acc)
                        if coords is None:
                            raise HomologyError("automorphism does not preserve an image summand")
                        total[wt] = total.get(wt, 0) + sign * coords[n]
        poly = {}
        for wt, val in total.items():
            val = Fraction(val)
            if val.denominator != 1:
                raise HomologyError("non-integral equivariant trace")
            if val:
                poly[(0, wt)] = int(val)
        out[i] = RationalQL(poly)
    return out


# ----------------------------------------------------------------------
# image factorization comparison

def verify_image_factorization(graph: Multigraph, edge_subset, i: int):
    """Compare Im N_I^(i) with its wedge-image description: the covector
    volume of I wedged against lifts of the (i-|I|)-th wedge of
    H^1 + H_1 of the edge-deleted graph, inside the ambient wedge power.

    Returns (passed, lhs_class, rhs_class, detail); the classes carry
    the L^{|I|} twist. Requires the subset to be independent (deleting
    it must not disconnect anything).
    """
    from .graph import is_spanning_connected

    subset = graph.check_edge_subset(edge_subset)
    if not is_spanning_connected(graph, subset):
        raise HomologyError("edge subset must leave the component count unchanged")
    data = _homology_data(graph)
    h = data.h1
    k = len(subset)
    img = image_NI(graph, subset, i, data)
    lhs_class = img.class_poly()

    deleted = graph.delete_edges(subset)
    ddata = _homology_data(deleted)
    lifted = []  # (dense vector over W coordinates, weight)
    for j in ddata.cotree:  # covector classes lift along the edge inclusion
        vec = [Fraction(0)] * (2 * h)
        for pos, x in enumerate(data.w[j]):
            vec[pos] = Fraction(x)
        lifted.append((vec, 0))
    for j in ddata.cotree:  # cycles of the deleted graph inject directly
        cyc = ddata.cycles[j]
        vec = [Fraction(0)] * (2 * h)
        for pos, jj in enumerate(data.cotree):
            vec[h + pos] = Fraction(cyc.get(jj, 0))
        lifted.append((vec, 1))
    w_I = {(): 1}
    for eid in sorted(subset):
        w_I = _wedge_with_vector(w_I, data.w[eid])

    by_weight = {}
    if i >= k:
        for choice in itertools.combinations(range(len(lifted)), i - k):
            vec = dict(w_I)
            wt = k
            for n in choice:
                v, w0 = lifted[n]
                vec = _wedge_with_vector(vec, v)
                wt += w0
            if vec:
                by_weight.setdefault(wt, []).append(vec)
    rhs_terms = {}
    rhs_spans = {}
    for wt, vecs in by_weight.items():
        span = linalg.sparse_reduce(vecs)
        if span:
            rhs_spans[wt] = span
            rhs_terms[(0, wt)] = len(span)
    rhs_class = RationalQL(rhs_terms)

    lhs_spans = {wt: list(span) for wt, span in img.graded_spans.items()}
    passed = lhs_spans == rhs_spans
    detail = "" if passed else "graded subspaces differ"
    return passed, lhs_class, rhs_class, detail
