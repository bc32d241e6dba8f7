"""Dual multigraphs of nodal curves and their edge-subset combinatorics.

A ``Multigraph`` caries vertex labels, per-vertex geometric genera, and
labeled edges that may be loops or parallel. The operations here are the
raw enumeration layer everything else sits on: connected components,
first Betti number, the downward-closed family C(G) of edge subsets
whose removal disconnects no component (the independent sets of the
cographic matroid), the n-vector counting those subsets by the Betti
number of the complement, spanning-forest counts by two methods, and
connected vertex partitions.

All values are immutable and all operations pure. Enumeration is
exponential in the edge count by design (this is a desk-scale tool); a
guard rejects graphs with more than MAX_ENUM_EDGES edges.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Tuple

MAX_ENUM_EDGES = 24

EdgeSubset = FrozenSet[str]
Subcurve = FrozenSet[str]


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0


@dataclass(frozen=True)
class Edge:
    id: str
    ends: Tuple[str, str]

    @property
    def is_loop(self):
        return self.ends[0] == self.ends[1]


class Multigraph:
    """Vertex-labeled, genus-weighted multigraph with loops."""

    __slots__ = ("vertices", "edges", "_vindex", "_eindex")

    def __init__(self, vertices: Iterable, edges: Iterable = ()):
        vs = []
        for v in vertices:
            if isinstance(v, Vertex):
                vs.append(v)
            elif isinstance(v, str):
                vs.append(Vertex(v, 0))
            else:
                vid, genus = v
                vs.append(Vertex(str(vid), int(genus)))
        vindex = {}
        for pos, v in enumerate(vs):
            if v.id in vindex:
                raise GraphError(f"duplicate vertex id {v.id!r}")
            if v.genus < 0:
                raise GraphError(f"vertex {v.id!r} has negative genus")
            vindex[v.id] = pos
        es = []
        for e in edges:
            if isinstance(e, Edge):
                es.append(e)
            else:
                eid, ends = e
                u, w = ends
                es.append(Edge(str(eid), (str(u), str(w))))
        eindex = {}
        for pos, e in enumerate(es):
            if e.id in eindex:
                raise GraphError(f"duplicate edge id {e.id!r}")
            for end in e.ends:
                if end not in vindex:
                    raise GraphError(f"edge {e.id!r} touches unknown vertex {end!r}")
            eindex[e.id] = pos
        object.__setattr__(self, "vertices", tuple(vs))
        object.__setattr__(self, "edges", tuple(es))
        object.__setattr__(self, "_vindex", vindex)
        object.__setattr__(self, "_eindex", eindex)

    def __setattr__(self, name, value):
        raise AttributeError("Multigraph is immutable")

    # -- basic accessors ----------------------------------------------

    @property
    def vertex_ids(self):
        return tuple(v.id for v in self.vertices)

    @property
    def edge_ids(self):
        return tuple(e.id for e in self.edges)

    def vertex(self, vid: str) -> Vertex:
        return self.vertices[self._vindex[vid]]

    def edge(self, eid: str) -> Edge:
        return self.edges[self._eindex[eid]]

    def genus_sum(self) -> int:
        return sum(v.genus for v in self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Multigraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    def check_edge_subset(self, subset) -> EdgeSubset:
        subset = frozenset(subset)
        for eid in subset:
            if eid not in self._eindex:
                raise GraphError(f"unknown edge id {eid!r}")
        return subset

    def check_vertex_subset(self, subset) -> Subcurve:
        subset = frozenset(subset)
        for vid in subset:
            if vid not in self._vindex:
                raise GraphError(f"unknown vertex id {vid!r}")
        return subset

    # -- derived graphs -------------------------------------------------

    def delete_edges(self, subset) -> "Multigraph":
        """The graph with the given edges removed (vertices kept)."""
        subset = self.check_edge_subset(subset)
        return Multigraph(self.vertices, [e for e in self.edges if e.id not in subset])

    def induced(self, vertex_subset) -> "Multigraph":
        """Induced subgraph: kept edges are those with both ends kept."""
        keep = self.check_vertex_subset(vertex_subset)
        return Multigraph(
            [v for v in self.vertices if v.id in keep],
            [e for e in self.edges if e.ends[0] in keep and e.ends[1] in keep],
        )

    # -- JSON wire format -----------------------------------------------

    def to_json_dict(self):
        return {
            "vertices": [{"id": v.id, "genus": v.genus} for v in self.vertices],
            "edges": [{"id": e.id, "ends": [e.ends[0], e.ends[1]]} for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data) -> "Multigraph":
        if not isinstance(data, dict):
            raise GraphError("graph JSON must be an object")
        unknown = set(data) - {"vertices", "edges"}
        if unknown:
            raise GraphError(f"unknown keys in graph JSON: {sorted(unknown)}")
        vertices = []
        for rec in data.get("vertices", []):
            extra = set(rec) - {"id", "genus"}
            if extra:
                raise GraphError(f"unknown keys in vertex record: {sorted(extra)}")
            if "id" not in rec:
                raise GraphError("vertex record misses 'id'")
            genus = rec.get("genus", 0)
            if not isinstance(genus, int) or genus < 0:
                raise GraphError(f"vertex {rec['id']!r}: genus must be a nonnegative integer")
            vertices.append(Vertex(str(rec["id"]), genus))
        edges = []
        for rec in data.get("edges", []):
            extra = set(rec) - {"id", "ends"}
            if extra:
                raise GraphError(f"unknown keys in edge record: {sorted(extra)}")
            if "id" not in rec or "ends" not in rec:
                raise GraphError("edge record needs 'id' and 'ends'")
            ends = rec["ends"]
            if not (isinstance(ends, list) and len(ends) == 2):
                raise GraphError(f"edge {rec['id']!r}: 'ends' must be a 2-element list")
            edges.append(Edge(str(rec["id"]), (str(ends[0]), str(ends[1]))))
        return cls(vertices, edges)

    @classmethod
    def from_json(cls, text: str) -> "Multigraph":
        return cls.from_json_dict(json.loads(text))


# ----------------------------------------------------------------------
# connectivity

class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def connected_components(graph: Multigraph) -> List[FrozenSet[str]]:
    """Partition of the vertex ids into maximal connected blocks."""
    uf = _UnionFind(graph.vertex_ids)
    for e in graph.edges:
        uf.union(e.ends[0], e.ends[1])
    blocks = {}
    for vid in graph.vertex_ids:
        blocks.setdefault(uf.find(vid), []).append(vid)
    return sorted((frozenset(b) for b in blocks.values()), key=lambda b: sorted(b))


def component_count(graph: Multigraph) -> int:
    uf = _UnionFind(graph.vertex_ids)
    n = len(graph.vertex_ids)
    for e in graph.edges:
        a, b = uf.find(e.ends[0]), uf.find(e.ends[1])
        if a != b:
            uf.parent[a] = b
            n -= 1
    return n


def is_connected(graph: Multigraph) -> bool:
    return component_count(graph) == 1


def first_betti(graph: Multigraph) -> int:
    """dim H^1 = |E| - |V| + (number of components)."""
    return len(graph.edges) - len(graph.vertices) + component_count(graph)


def _components_without(graph: Multigraph, removed: frozenset) -> int:
    uf = _UnionFind(graph.vertex_ids)
    n = len(graph.vertex_ids)
    for e in graph.edges:
        if e.id in removed:
            continue
        a, b = uf.find(e.ends[0]), uf.find(e.ends[1])
        if a != b:
            uf.parent[a] = b
            n -= 1
    return n


def is_spanning_connected(graph: Multigraph, subset) -> bool:
    """Membership test for C(G): does removing ``subset`` keep every
    component of the graph connected?"""
    subset = graph.check_edge_subset(subset)
    return _components_without(graph, subset) == component_count(graph)


def guard_enumeration(graph: Multigraph):
    """Reject graphs too large for exhaustive edge-subset enumeration."""
    if len(graph.edges) > MAX_ENUM_EDGES:
        raise GraphError(
            f"{len(graph.edges)} edges exceeds the enumeration guard "
            f"({MAX_ENUM_EDGES}); this tool enumerates edge subsets exhaustively"
        )


def enumerate_matroid(graph: Multigraph) -> List[EdgeSubset]:
    """All edge subsets whose removal disconnects no component.

    These are the independent sets of the cographic matroid, so the
    result is downward closed. Order: by size, then lexicographically by
    sorted edge ids.
    """
    guard_enumeration(graph)
    base = component_count(graph)
    eids = sorted(graph.edge_ids)
    out = []
    for r in range(len(eids) + 1):
        for combo in itertools.combinations(eids, r):
            if _components_without(graph, frozenset(combo)) == base:
                out.append(frozenset(combo))
    return out


def matroid_size_counts(graph: Multigraph) -> List[int]:
    """count[k] = number of subsets in C(G) of size k, k = 0..h1."""
    guard_enumeration(graph)
    base = component_count(graph)
    h1 = first_betti(graph)
    counts = [0] * (h1 + 1)
    eids = graph.edge_ids
    for r in range(h1 + 1):
        for combo in itertools.combinations(eids, r):
            if _components_without(graph, frozenset(combo)) == base:
                counts[r] += 1
    return counts


def n_vector(graph: Multigraph) -> List[int]:
    """(n_0, ..., n_{h1}) with n_i = #{I in C(G) : h1(G - I) = i}.

    By the convention of the theorems this vanishes identically when the
    graph is disconnected or empty; the raw size counts for arbitrary
    graphs are available as ``matroid_size_counts``.
    """
    h1 = first_betti(graph)
    if component_count(graph) != 1:
        return [0] * (h1 + 1)
    counts = matroid_size_counts(graph)
    # removing I in C(G) drops h1 by exactly |I|
    return [counts[h1 - i] for i in range(h1 + 1)]


# ----------------------------------------------------------------------
# spanning forests

def _laplacian_det_component(graph: Multigraph, block: Sequence[str]) -> int:
    """Any cofactor determinant of the loop-free Laplacian of one
    connected block (Kirchhoff); exact integer arithmetic."""
    verts = sorted(block)
    if len(verts) == 1:
        return 1
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    lap = [[0] * n for _ in range(n)]
    for e in graph.edges:
        a, b = e.ends
        if a not in idx or b not in idx or a == b:
            continue
        i, j = idx[a], idx[b]
        lap[i][i] += 1
        lap[j][j] += 1
        lap[i][j] -= 1
        lap[j][i] -= 1
    # Bareiss fraction-free elimination on the matrix minus last row/col
    m = [row[: n - 1] for row in lap[: n - 1]]
    size = n - 1
    prev = 1
    sign = 1
    for k in range(size):
        if m[k][k] == 0:
            for r in range(k + 1, size):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[size - 1][size - 1]


def spanning_forest_count(graph: Multigraph, method: str = "matrix-tree") -> int:
    """Number of spanning forests (product of spanning-tree counts over
    components). ``method`` is "matrix-tree" (Kirchhoff cofactor
    determinant per component) or "matroid" (count of maximal elements
    of C(G)); the two agree and cross-check each other."""
    if method == "matrix-tree":
        result = 1
        for block in connected_components(graph):
            result *= _laplacian_det_component(graph, block)
        return result
    if method == "matroid":
        return matroid_size_counts(graph)[first_betti(graph)]
    raise ValueError(f"unknown method {method!r}")


def forest_count_if_connected(graph: Multigraph, removed=frozenset()) -> int:
    """c-hat: spanning-forest count of the graph minus ``removed``, or 0
    when the deletion increases the component count.

    For a disconnected ambient graph this extends the connected-case
    definition by the per-component product (flagged extension: the
    sources only ever use the connected case).
    """
    removed = graph.check_edge_subset(removed)
    if _components_without(graph, removed) != component_count(graph):
        return 0
    return spanning_forest_count(graph.delete_edges(removed), "matrix-tree")


# ----------------------------------------------------------------------
# partitions into connected blocks

def connected_partitions(graph: Multigraph) -> List[Tuple[FrozenSet[str], ...]]:
    """All partitions of the vertex set whose blocks induce connected
    subgraphs, in a deterministic order."""
    verts = sorted(graph.vertex_ids)
    adj = {v: set() for v in verts}
    for e in graph.edges:
        a, b = e.ends
        if a != b:
            adj[a].add(b)
            adj[b].add(a)

    def block_connected(block):
        block = set(block)
        seen = {next(iter(block))}
        stack = list(seen)
        while stack:
            v = stack.pop()
            for w in adj[v] & block:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen == block

    results = []

    def recurse(remaining, blocks):
        if not remaining:
            results.append(tuple(blocks))
            return
        pivot = remaining[0]
        rest = remaining[1:]
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                block = frozenset((pivot, *extra))
                if not block_connected(block):
                    continue
                left = [v for v in rest if v not in block]
                blocks.append(block)
                recurse(left, blocks)
                blocks.pop()

    recurse(verts, [])
    results.sort(key=lambda p: sorted(sorted(b) for b in p))
    return results


# ----------------------------------------------------------------------
# hypergraphs

class Hypergraph:
    """Vertices plus hyperedges that are multisets of vertices."""

    __slots__ = ("vertices", "hyperedges")

    def __init__(self, vertices: Iterable[str], hyperedges: Iterable[Sequence[str]] = ()):
        vs = tuple(str(v) for v in vertices)
        if len(set(vs)) != len(vs):
            raise GraphError("duplicate hypergraph vertex ids")
        hs = []
        for members in hyperedges:
            members = tuple(str(m) for m in members)
            for m in members:
                if m not in vs:
                    raise GraphError(f"hyperedge member {m!r} is not a vertex")
            hs.append(members)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "hyperedges", tuple(hs))

    def __setattr__(self, name, value):
        raise AttributeError("Hypergraph is immutable")

    @classmethod
    def from_multigraph(cls, graph: Multigraph) -> "Hypergraph":
        """The dual graph seen as a hypergraph: each edge becomes the
        multiset of its two endpoints (a loop counts its vertex twice)."""
        return cls(graph.vertex_ids, [e.ends for e in graph.edges])


def hypergraph_b(h: Hypergraph) -> int:
    """b(H) = sum over hyperedges of (|e| - 1) - |V| + 1."""
    return sum(len(e) - 1 for e in h.hyperedges) - len(h.vertices) + 1


def hypergraph_is_connected(h: Hypergraph) -> bool:
    """Connectivity through the bipartite incidence graph."""
    if not h.vertices:
        return True
    uf = _UnionFind(h.vertices)
    for members in h.hyperedges:
        for m in members[1:]:
            uf.union(members[0], m)
    roots = {uf.find(v) for v in h.vertices}
    return len(roots) == 1


# ----------------------------------------------------------------------
# isomorphism-free generation (exhaustive desk-scale suites)

def _simple_connected_skeletons(n_vertices: int, max_edges: int):
    """Unlabeled connected simple graphs on n vertices with at most
    max_edges edges, as canonical sorted edge tuples, plus their
    automorphisms (vertex permutations preserving the edge set)."""
    pairs = list(itertools.combinations(range(n_vertices), 2))
    perms = list(itertools.permutations(range(n_vertices)))
    seen = set()
    out = []
    lo = max(n_vertices - 1, 0)
    for k in range(lo, max_edges + 1):
        if k > len(pairs) and k > 0:
            break
        for combo in itertools.combinations(pairs, k):
            if n_vertices > 1:
                uf = _UnionFind(range(n_vertices))
                for a, b in combo:
                    uf.union(a, b)
                if len({uf.find(v) for v in range(n_vertices)}) != 1:
                    continue
            edge_set = frozenset(combo)
            images = []
            for p in perms:
                images.append(frozenset(tuple(sorted((p[a], p[b]))) for a, b in combo))
            canon = min(tuple(sorted(img)) for img in images)
            if canon in seen:
                continue
            seen.add(canon)
            auts = [p for p, img in zip(perms, images) if img == edge_set]
            out.append((tuple(sorted(edge_set)), auts))
    return out


def _compositions(total: int, slots: int):
    """All tuples of nonnegative ints of the given length summing to total."""
    if slots == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first, *rest)


def connected_multigraphs(max_vertices: int, max_edges: int) -> List[Multigraph]:
    """Every connected multigraph with loops, up to isomorphism, within
    the given vertex and edge bounds (all vertex genera zero).

    A multigraph is a connected simple skeleton plus edge multiplicities
    and loop counts; assignments are deduplicated under the skeleton's
    automorphism group.
    """
    out = []
    for n in range(1, max_vertices + 1):
        if n - 1 > max_edges:
            break
        for skeleton, auts in _simple_connected_skeletons(n, max_edges):
            s = len(skeleton)
            slot_index = {pair: i for i, pair in enumerate(skeleton)}
            for total in range(s, max_edges + 1):
                seen = set()
                for extra in _compositions(total - s, s + n):
                    mult = tuple(1 + extra[i] for i in range(s))
                    loops = tuple(extra[s + i] for i in range(n))
                    canon = None
                    for p in auts:
                        pm = [0] * s
                        for pair, i in slot_index.items():
                            a, b = pair
                            pm[slot_index[tuple(sorted((p[a], p[b])))]] = mult[i]
                        pl = [0] * n
                        for v in range(n):
                            pl[p[v]] = loops[v]
                        key = (tuple(pm), tuple(pl))
                        if canon is None or key < canon:
                            canon = key
                    if canon in seen:
                        continue
                    seen.add(canon)
                    vertices = [Vertex(f"v{i + 1}", 0) for i in range(n)]
                    edges = []
                    counter = itertools.count(1)
                    for (a, b), m in zip(skeleton, mult):
                        for _ in range(m):
                            edges.append(Edge(f"e{next(counter)}", (f"v{a + 1}", f"v{b + 1}")))
                    for v in range(n):
                        for _ in range(loops[v]):
                            edges.append(Edge(f"e{next(counter)}", (f"v{v + 1}", f"v{v + 1}")))
                    out.append(Multigraph(vertices, edges))
    return out
