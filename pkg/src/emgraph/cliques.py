"""Maximal clique enumeration via degeneracy-ordered pivoting.

The graph is relabeled by ordering rank, every root vertex gets the
candidate set P (later neighbors) and exclusion set X (earlier neighbors),
and the recursion works entirely inside per-context subgraphs H that hold
exactly the edges among P and X with at least one endpoint in P.  H drives
pivot selection (highest H-degree) and supplies all the adjacency the
recursion needs, so the original graph is never touched after preparation.

Preparation is two sort-scan pipelines: one tags each arc into its
endpoints' P/X sets, the other joins later-neighbor pairs against the edge
list to discover the H memberships.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .degeneracy import DegeneracyOrdering, approx_degeneracy_order
from .emio import ExternalRun, RECORD_DTYPE, Substrate
from .graphs import ExternalGraph, PreconditionError, reorder_graph


class HSubgraph:
    """Edges among P and X with a P endpoint, plus the P marks."""

    def __init__(self, adj: dict[int, set[int]] | None = None,
                 pmarks: set[int] | None = None):
        self.adj = adj if adj is not None else {}
        self.pmarks = pmarks if pmarks is not None else set()

    def neighbors(self, v: int) -> set[int]:
        return self.adj.get(v, set())

    def degree(self, v: int) -> int:
        return len(self.adj.get(v, ()))

    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def record_size(self) -> int:
        return 2 * self.edge_count() + len(self.pmarks)

    def snapshot(self) -> "HSubgraph":
        return HSubgraph({x: set(s) for x, s in self.adj.items()},
                         set(self.pmarks))

    def equals(self, other: "HSubgraph") -> bool:
        a = {x: s for x, s in self.adj.items() if s}
        b = {x: s for x, s in other.adj.items() if s}
        return a == b and self.pmarks == other.pmarks


@dataclass
class CliqueContext:
    r: list[int]
    p: set[int]
    x: set[int]
    h: HSubgraph


# -- preparation pipelines -----------------------------------------------------


def gen_px(g: ExternalGraph) -> ExternalRun:
    """(vertex, side, member) records: side 0 collects the later neighbors
    (P), side 1 the earlier ones (X).  The graph must be rank-relabeled."""
    if g.directed:
        raise PreconditionError("clique preparation needs an undirected graph")
    sub = g.substrate
    w = sub.new_run_writer(3)
    for i, j in g.arcs.stream():
        if i < j:
            w.append((i, 0, j))
            w.append((j, 1, i))
    return sub.external_sort(w.close())


def gen_h(g: ExternalGraph, delta_hat: int, px: ExternalRun) -> ExternalRun:
    """(root, x, y, x_in_p, y_in_p) arc records of every initial H, sorted.

    For each vertex u and each pair v < w of its later neighbors, the tuple
    (v, w, u) meets the edge list; when (v, w) is itself an edge the triple
    is a triangle, contributing the arc pair (u, w) to root v's subgraph
    (X-P edge) and (v, w) to root u's subgraph (P-P edge).
    """
    if g.directed:
        raise PreconditionError("clique preparation needs an undirected graph")
    sub = g.substrate

    combined = sub.new_run_writer(4)
    for block in g.arcs.blocks():
        rows = np.zeros((len(block), 4), dtype=RECORD_DTYPE)
        rows[:, 0] = block[:, 0]
        rows[:, 1] = block[:, 1]
        combined.append_block(rows)
    cur = None
    fwd: list[int] = []

    def flush_pairs(u, nbrs):
        if len(nbrs) > delta_hat and sub.debug:
            raise AssertionError("forward degree exceeds certificate")
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                combined.append((nbrs[i], nbrs[j], 1, u))

    for a, b in g.arcs.stream():
        if a != cur:
            if cur is not None:
                flush_pairs(cur, fwd)
            cur, fwd = a, []
        if b > a:
            fwd.append(b)
    if cur is not None:
        flush_pairs(cur, fwd)

    merged = sub.external_sort(combined.close())
    hw = sub.new_run_writer(3)
    edge = None
    for a, b, kind, u in merged.stream():
        if kind == 0:
            edge = (a, b)
        elif (a, b) == edge:
            v, w = a, b
            hw.append((v, u, w))
            hw.append((v, w, u))
            hw.append((u, v, w))
            hw.append((u, w, v))
    harcs = sub.external_sort(hw.close())

    # final scan: mark the endpoints that belong to each root's P set
    out = sub.new_run_writer(5)
    px_it = px.stream()
    px_rec = next(px_it, None)
    proot = None
    pset: set[int] = set()

    def pset_for(root):
        nonlocal px_rec, proot, pset
        if proot == root:
            return pset
        pset = set()
        while px_rec is not None and px_rec[0] < root:
            px_rec = next(px_it, None)
        while px_rec is not None and px_rec[0] == root:
            if px_rec[1] == 0:
                pset.add(px_rec[2])
            px_rec = next(px_it, None)
        proot = root
        return pset

    for root, x, y in harcs.stream():
        ps = pset_for(root)
        out.append((root, x, y, 1 if x in ps else 0, 1 if y in ps else 0))
    return out.close()


# -- recursion ------------------------------------------------------------------


def update_h(candidates, v: int) -> None:
    """Move v from P to X in every candidate subgraph.

    Unmarks v, then drops every arc with no P endpoint left; candidates
    not containing v are untouched.
    """
    for cand in candidates:
        if v not in cand.pmarks:
            continue
        cand.pmarks.discard(v)
        marks = cand.pmarks
        for x in list(cand.adj):
            if x in marks:
                continue
            kept = {y for y in cand.adj[x] if y in marks}
            dropped = cand.adj[x] - kept
            cand.adj[x] = kept
            for y in dropped:
                cand.adj[y].discard(x)


def _candidate_for(h: HSubgraph, v: int, p: set[int]) -> HSubgraph:
    """H as the recursion on v will need it, before any P-to-X moves."""
    verts = h.neighbors(v)
    pv = p & verts
    adj: dict[int, set[int]] = {}
    for x in verts:
        adj[x] = {y for y in h.neighbors(x) & verts
                  if x in pv or y in pv}
    return HSubgraph(adj, pv)


def bk_pivot(ctx: CliqueContext, sink, delta_guard: int,
             substrate: Substrate, _depth: int = 0) -> None:
    """Pivoting enumeration: emit maximal cliques extending ctx.r.

    The pivot is the highest-degree vertex of H (smallest id on ties);
    branch candidates P minus its neighborhood, each recursion receiving
    the eagerly built and successively updated candidate subgraph.
    """
    if substrate.debug:
        assert _depth <= delta_guard, "recursion deeper than certificate"
    p, x, h = ctx.p, ctx.x, ctx.h
    if not p and not x:
        sink(tuple(ctx.r))
        return
    domain = p | x
    pivot = max(sorted(domain), key=h.degree)
    branches = sorted(p - h.neighbors(pivot))

    cands = {v: _candidate_for(h, v, p) for v in branches}
    substrate.charge_scan_of(sum(c.record_size() for c in cands.values()))

    for i, v in enumerate(branches):
        nv = h.neighbors(v)
        child = CliqueContext(ctx.r + [v], p & nv, x & nv, cands[v])
        bk_pivot(child, sink, delta_guard, substrate, _depth + 1)
        p.discard(v)
        x.add(v)
        rest = [cands[w] for w in branches[i + 1:]]
        update_h(rest, v)
        substrate.charge_scan_of(sum(c.record_size() for c in rest))
        if substrate.debug and rest and (v % 7 == 0):
            w = branches[i + 1]
            fresh = _candidate_for(h, w, p)
            assert cands[w].equals(fresh), "incremental H drifted from definition"


# -- driver ----------------------------------------------------------------------


def _root_contexts(g_ranked: ExternalGraph, px: ExternalRun, h: ExternalRun):
    """Per-root (rank, P, X, HSubgraph) from the sorted preparation runs."""
    px_it = px.stream()
    h_it = h.stream()
    px_rec = next(px_it, None)
    h_rec = next(h_it, None)
    for (root,) in g_ranked.vertices.stream():
        pset: set[int] = set()
        xset: set[int] = set()
        while px_rec is not None and px_rec[0] < root:
            px_rec = next(px_it, None)
        while px_rec is not None and px_rec[0] == root:
            (pset if px_rec[1] == 0 else xset).add(px_rec[2])
            px_rec = next(px_it, None)
        adj: dict[int, set[int]] = {}
        pmarks: set[int] = set()
        while h_rec is not None and h_rec[0] < root:
            h_rec = next(h_it, None)
        while h_rec is not None and h_rec[0] == root:
            _, xx, yy, xp, yp = h_rec
            adj.setdefault(xx, set()).add(yy)
            if xp:
                pmarks.add(xx)
            if yp:
                pmarks.add(yy)
            h_rec = next(h_it, None)
        yield root, pset, xset, HSubgraph(adj, pmarks)


def enumerate_maximal_cliques(g: ExternalGraph,
                              ordering: DegeneracyOrdering | None = None,
                              sink=None) -> list[tuple] | None:
    """Emit every maximal clique of an undirected graph exactly once.

    Cliques are reported as sorted tuples of original vertex ids, streamed
    in root-rank-then-recursion order.  With sink=None the cliques are
    collected and returned.
    """
    if g.directed:
        raise PreconditionError("maximal cliques need an undirected graph")
    sub = g.substrate
    if ordering is None:
        ordering = approx_degeneracy_order(g)
    delta_hat = ordering.certified_bound

    collected: list[tuple] | None = [] if sink is None else None

    if g.num_vertices == 0:
        return collected

    rel = reorder_graph(g, ordering)
    px = gen_px(rel)
    h = gen_h(rel, delta_hat, px)

    with sub.ledger.reserve(ordering.order.length):
        rank_to_id = [v for (v,) in ordering.order.stream()]

        def emit(ranks: tuple):
            clique = tuple(sorted(rank_to_id[r] for r in ranks))
            if collected is not None:
                collected.append(clique)
            else:
                sink(clique)

        for root, pset, xset, hsub in _root_contexts(rel, px, h):
            with sub.ledger.reserve(len(pset) + len(xset) + hsub.record_size()):
                ctx = CliqueContext([root], pset, xset, hsub)
                bk_pivot(ctx, emit, delta_hat, sub)
    return collected
