"""In-memory reference implementations used as ground truth at desk scale.

These are deliberately direct: greedy degeneracy by repeated minimum-degree
removal, exhaustive simple-cycle enumeration, and the classic pivoting
clique enumerator.  They live in the shipped library (not only in tests) so
the CLI's ``--verify`` mode can cross-check the external pipelines end to
end.
"""

from __future__ import annotations

import heapq
from itertools import product


class DenseGraph:
    """Adjacency-set mirror of an ExternalGraph for n up to ~10^3."""

    def __init__(self, n: int, directed: bool = False):
        self.n = n
        self.directed = directed
        self.out: list[set[int]] = [set() for _ in range(n)]
        self.inn: list[set[int]] = [set() for _ in range(n)]
        self.vertices: set[int] = set(range(n))

    @classmethod
    def from_external(cls, g) -> "DenseGraph":
        dg = cls(g.n, g.directed)
        dg.vertices = set(v for (v,) in g.vertices.stream())
        for u, v in g.arcs.stream():
            dg.add_arc(u, v)
        return dg

    @classmethod
    def from_edges(cls, n: int, edges, directed: bool = False) -> "DenseGraph":
        dg = cls(n, directed)
        for u, v in edges:
            if u == v:
                continue
            dg.add_arc(u, v)
            if not directed:
                dg.add_arc(v, u)
        return dg

    def add_arc(self, u: int, v: int) -> None:
        self.out[u].add(v)
        self.inn[v].add(u)

    def has_arc(self, u: int, v: int) -> bool:
        return v in self.out[u]

    def neighbors(self, v: int) -> set[int]:
        """Underlying (undirected) neighborhood."""
        return self.out[v] | self.inn[v]

    def degree(self, v: int) -> int:
        """Underlying degree; for directed graphs counts distinct neighbors
        once per incident arc direction."""
        if self.directed:
            return len(self.out[v]) + len(self.inn[v])
        return len(self.out[v])

    def arc_count(self) -> int:
        return sum(len(s) for s in self.out)

    def edge_count(self) -> int:
        """Undirected edges counted once, or arcs when directed."""
        m = self.arc_count()
        return m if self.directed else m // 2

    def undirected_edges(self) -> set[frozenset]:
        return {frozenset((u, v)) for u in self.vertices for v in self.out[u] if u < v}


# -- degeneracy -------------------------------------------------------------


def exact_degeneracy(dg: DenseGraph) -> tuple[int, list[int]]:
    """Greedy minimum-degree removal; ties broken by smallest vertex id.

    Returns the exact degeneracy d and a d-degeneracy ordering.  Directed
    graphs are measured on their underlying undirected adjacency.
    """
    adj = {v: set(dg.neighbors(v)) & dg.vertices for v in sorted(dg.vertices)}
    heap = [(len(nbrs), v) for v, nbrs in adj.items()]
    heapq.heapify(heap)
    removed: set[int] = set()
    order: list[int] = []
    d = 0
    while heap:
        deg, v = heapq.heappop(heap)
        if v in removed:
            continue
        if deg != len(adj[v]):
            heapq.heappush(heap, (len(adj[v]), v))
            continue
        d = max(d, deg)
        order.append(v)
        removed.add(v)
        for w in adj[v]:
            adj[w].discard(v)
            heapq.heappush(heap, (len(adj[w]), w))
        adj[v] = set()
    return d, order


def max_forward_degree(dg: DenseGraph, order: list[int]) -> int:
    """Largest count of later-in-order neighbors over all vertices."""
    pos = {v: i for i, v in enumerate(order)}
    best = 0
    for v in order:
        fwd = sum(1 for w in dg.neighbors(v) if w in pos and pos[w] > pos[v])
        best = max(best, fwd)
    return best


# -- cycles and paths -------------------------------------------------------


def _canonical_cycle(seq: tuple[int, ...], directed: bool) -> tuple[int, ...]:
    i = seq.index(min(seq))
    rot = seq[i:] + seq[:i]
    if not directed and len(rot) > 2:
        rev = (rot[0],) + tuple(reversed(rot[1:]))
        if rev < rot:
            rot = rev
    return rot


def brute_cycles(dg: DenseGraph, c: int, find_all: bool = True):
    """Exhaustive enumeration of simple cycles of length exactly c.

    Returns (exists, witnesses); witnesses are canonical vertex tuples
    (minimum vertex first, and for undirected graphs the lexicographically
    smaller direction).  With find_all=False stops at the first hit.
    """
    if c < 2 or (not dg.directed and c < 3):
        return False, []
    found: set[tuple[int, ...]] = set()
    verts = sorted(dg.vertices)

    def extend(path: list[int], seen: set[int]):
        if len(path) == c:
            if path[0] in dg.out[path[-1]]:
                found.add(_canonical_cycle(tuple(path), dg.directed))
                return not find_all
            return False
        for w in sorted(dg.out[path[-1]]):
            if w in seen or w < path[0]:
                continue  # anchor cycles at their smallest vertex
            path.append(w)
            seen.add(w)
            if extend(path, seen):
                return True
            path.pop()
            seen.discard(w)
        return False

    for s in verts:
        if extend([s], {s}) and not find_all:
            break
    witnesses = sorted(found)
    return bool(witnesses), witnesses


def cycle_exists(dg: DenseGraph, c: int) -> bool:
    return brute_cycles(dg, c, find_all=False)[0]


def all_simple_paths(dg: DenseGraph, k: int) -> list[tuple[int, ...]]:
    """Every simple directed path with exactly k arcs, as vertex tuples."""
    if k < 1:
        return [(v,) for v in sorted(dg.vertices)]
    out: list[tuple[int, ...]] = []

    def extend(path: list[int], seen: set[int]):
        if len(path) == k + 1:
            out.append(tuple(path))
            return
        for w in sorted(dg.out[path[-1]]):
            if w not in seen:
                path.append(w)
                seen.add(w)
                extend(path, seen)
                path.pop()
                seen.discard(w)

    for s in sorted(dg.vertices):
        extend([s], {s})
    return out


def validate_cycle(dg: DenseGraph, witness, c: int) -> bool:
    """Distinct vertices, every consecutive arc plus the closing arc, length c."""
    w = list(witness)
    if len(w) != c or len(set(w)) != c:
        return False
    if any(v not in dg.vertices for v in w):
        return False
    return all(dg.has_arc(w[i], w[(i + 1) % c]) for i in range(c))


# -- maximal cliques --------------------------------------------------------


def classic_bron_kerbosch(dg: DenseGraph) -> set[frozenset]:
    """Pivoting Bron-Kerbosch over the underlying undirected adjacency."""
    adj = {v: set(dg.neighbors(v)) & dg.vertices for v in dg.vertices}
    cliques: set[frozenset] = set()

    def expand(r: set[int], p: set[int], x: set[int]):
        if not p and not x:
            cliques.add(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: (len(p & adj[u]), -u))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.discard(v)
            x.add(v)

    expand(set(), set(dg.vertices), set())
    return cliques


def is_maximal_clique(dg: DenseGraph, members) -> bool:
    ms = set(members)
    for u in ms:
        if not (ms - {u}) <= dg.neighbors(u):
            return False
    outside = dg.vertices - ms
    return not any(ms <= dg.neighbors(w) for w in outside)


# -- small named graphs for tests -------------------------------------------


def petersen_edges() -> list[tuple[int, int]]:
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))
        edges.append((i, i + 5))
        edges.append((5 + i, 5 + (i + 2) % 5))
    return edges


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    edges = []
    for r, c in product(range(rows), range(cols)):
        v = r * cols + c
        if c + 1 < cols:
            edges.append((v, v + 1))
        if r + 1 < rows:
            edges.append((v, v + cols))
    return edges
