"""Clique preparation pipelines, the pivot recursion, end-to-end equality."""

import random

import pytest

import emgraph as eg
from emgraph import oracles
from emgraph.cliques import (CliqueContext, HSubgraph, _candidate_for,
                             bk_pivot, gen_h, gen_px, update_h)


def ranked(sub, g, eps=1.0):
    o = eg.approx_degeneracy_order(g, eps)
    return o, eg.reorder_graph(g, o)


def px_sets(px_run, n):
    p = {v: set() for v in range(n)}
    x = {v: set() for v in range(n)}
    for root, side, member in px_run.stream():
        (p if side == 0 else x)[root].add(member)
    return p, x


def h_arcs(h_run):
    arcs = {}
    marks = {}
    for root, a, b, ap, bp in h_run.stream():
        arcs.setdefault(root, set()).add((a, b))
        marks.setdefault(root, {})[a] = bool(ap)
        marks[root][b] = bool(bp)
    return arcs, marks


def definitional_h(adj, p, x):
    verts = p | x
    return {(a, b) for a in verts for b in adj[a] & verts
            if (a in p or b in p)}


def test_gen_px_path_example(sub):
    g = eg.generate_named(sub, "path", n=3)  # 0-1-2 is already rank order
    px = gen_px(g)
    p, x = px_sets(px, 3)
    assert p == {0: {1}, 1: {2}, 2: set()}
    assert x == {0: set(), 1: {0}, 2: {1}}


def test_gen_px_triangle_sizes(sub):
    g = eg.generate_named(sub, "complete", k=3)
    p, x = px_sets(gen_px(g), 3)
    assert [len(p[v]) for v in range(3)] == [2, 1, 0]
    assert sum(len(s) for s in p.values()) + sum(len(s) for s in x.values()) \
        == 2 * g.edge_count


def test_gen_px_matches_adjacency_oracle(sub):
    rng = random.Random(20)
    for _ in range(10):
        n = rng.randint(1, 25)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        g = eg.graph_from_edges(sub, n, edges)
        o, rel = ranked(sub, g)
        p, x = px_sets(gen_px(rel), n)
        dg = oracles.DenseGraph.from_external(rel)
        for v in range(n):
            assert p[v] == {w for w in dg.neighbors(v) if w > v}
            assert x[v] == {w for w in dg.neighbors(v) if w < v}


def test_gen_px_rejects_directed(sub):
    d = eg.graph_from_edges(sub, 2, [(0, 1)], directed=True)
    with pytest.raises(eg.PreconditionError):
        gen_px(d)


def test_gen_h_triangle(sub):
    g = eg.generate_named(sub, "complete", k=3)
    px = gen_px(g)
    arcs, marks = h_arcs(gen_h(g, 2, px))
    # root 0: the P-P edge (1,2); root 1: the X-P edge (0,2); root 2: nothing
    assert arcs[0] == {(1, 2), (2, 1)}
    assert marks[0] == {1: True, 2: True}
    assert arcs[1] == {(0, 2), (2, 0)}
    assert marks[1] == {0: False, 2: True}
    assert 2 not in arcs


def test_gen_h_triangle_free_graphs_have_empty_h(sub):
    for g in (eg.generate_named(sub, "path", n=3),
              eg.generate_named(sub, "complete_bipartite", a=3, b=3),
              eg.generate_named(sub, "cycle", c=5)):
        px = gen_px(g)
        h = gen_h(g, 10, px)
        assert h.length == 0


def test_gen_h_matches_definitional_oracle(sub):
    rng = random.Random(21)
    for _ in range(10):
        n = rng.randint(1, 20)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        g = eg.graph_from_edges(sub, n, edges)
        o, rel = ranked(sub, g)
        px = gen_px(rel)
        p, x = px_sets(px, n)
        arcs, marks = h_arcs(gen_h(rel, o.certified_bound, px))
        dg = oracles.DenseGraph.from_external(rel)
        adj = {v: dg.neighbors(v) for v in range(n)}
        for v in range(n):
            want = definitional_h(adj, p[v], x[v])
            assert arcs.get(v, set()) == want
            for endpoint, flag in marks.get(v, {}).items():
                assert flag == (endpoint in p[v])


def test_update_h_drops_everything_when_last_p_vertex_leaves(sub):
    h = HSubgraph({1: {2}, 2: {1}}, pmarks={2})
    update_h([h], 2)
    assert h.pmarks == set()
    assert all(not s for s in h.adj.values())


def test_update_h_noop_without_v(sub):
    h = HSubgraph({1: {2}, 2: {1}}, pmarks={1})
    snap = h.snapshot()
    update_h([h], 99)
    assert h.equals(snap)


def test_update_h_matches_definitional_rebuild(sub):
    rng = random.Random(22)
    for _ in range(30):
        n = rng.randint(2, 10)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        adj = {v: set() for v in range(n)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        verts = set(range(n))
        p = set(rng.sample(sorted(verts), rng.randint(1, n)))
        x = verts - p
        harcs = definitional_h(adj, p, x)
        hadj = {v: set() for v in verts}
        for a, b in harcs:
            hadj[a].add(b)
        h = HSubgraph(hadj, set(p))
        v = rng.choice(sorted(p))
        update_h([h], v)
        want = definitional_h(adj, p - {v}, x | {v})
        got = {(a, b) for a, s in h.adj.items() for b in s}
        assert got == want
        assert h.pmarks == p - {v}


def test_bk_pivot_isolated_vertex(sub):
    out = []
    ctx = CliqueContext([0], set(), set(), HSubgraph())
    bk_pivot(ctx, out.append, 0, sub)
    assert out == [(0,)]


def test_bk_pivot_depth_guard(sub):
    g = eg.generate_named(sub, "complete", k=4)
    o = eg.approx_degeneracy_order(g, 1.0)
    assert o.certified_bound == 3
    cliques = eg.enumerate_maximal_cliques(g, o)
    assert cliques == [(0, 1, 2, 3)]


def test_enumerate_k4_once(sub):
    g = eg.generate_named(sub, "complete", k=4)
    assert eg.enumerate_maximal_cliques(g) == [(0, 1, 2, 3)]


def test_enumerate_edgeless(sub):
    g = eg.graph_from_edges(sub, 5, [])
    assert eg.enumerate_maximal_cliques(g) == [(i,) for i in range(5)]


def test_enumerate_k33_edges(sub):
    g = eg.generate_named(sub, "complete_bipartite", a=3, b=3)
    cliques = eg.enumerate_maximal_cliques(g)
    assert len(cliques) == 9
    assert {frozenset(c) for c in cliques} == \
        {frozenset((i, 3 + j)) for i in range(3) for j in range(3)}


def test_enumerate_complete_tripartite(sub):
    # K_{3,3,3}: maximal cliques are the 27 one-per-part transversals
    parts = [range(0, 3), range(3, 6), range(6, 9)]
    edges = [(u, v) for i in range(3) for j in range(i + 1, 3)
             for u in parts[i] for v in parts[j]]
    g = eg.graph_from_edges(sub, 9, edges)
    cliques = eg.enumerate_maximal_cliques(g)
    assert len(cliques) == 27
    assert all(len(c) == 3 for c in cliques)
    dg = oracles.DenseGraph.from_external(g)
    assert {frozenset(c) for c in cliques} == oracles.classic_bron_kerbosch(dg)


def test_enumerate_rejects_directed(sub):
    d = eg.graph_from_edges(sub, 2, [(0, 1)], directed=True)
    with pytest.raises(eg.PreconditionError):
        eg.enumerate_maximal_cliques(d)


def test_enumerate_matches_oracle_random(sub):
    rng = random.Random(23)
    for _ in range(25):
        n = rng.randint(1, 60)
        cap = n * (n - 1) // 2
        m = rng.randint(0, min(5 * n, cap))
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)], m)
        g = eg.graph_from_edges(sub, n, edges)
        cliques = eg.enumerate_maximal_cliques(g)
        assert len({frozenset(c) for c in cliques}) == len(cliques), "duplicates"
        dg = oracles.DenseGraph.from_external(g)
        assert {frozenset(c) for c in cliques} == oracles.classic_bron_kerbosch(dg)
        for c in cliques:
            assert oracles.is_maximal_clique(dg, c)


def test_sum_of_x_sizes_bounded_by_m(sub):
    rng = random.Random(24)
    for _ in range(5):
        n = rng.randint(2, 40)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        g = eg.graph_from_edges(sub, n, edges)
        o, rel = ranked(sub, g)
        _, x = px_sets(gen_px(rel), n)
        assert sum(len(s) for s in x.values()) <= g.edge_count


def test_candidate_filter_matches_definition(sub):
    rng = random.Random(25)
    for _ in range(20):
        n = rng.randint(3, 12)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(1, cap))
        adj = {v: set() for v in range(n)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        p = set(rng.sample(range(n), rng.randint(1, n)))
        x = set(range(n)) - p
        hadj = {v: set() for v in range(n)}
        for a, b in definitional_h(adj, p, x):
            hadj[a].add(b)
        h = HSubgraph(hadj, set(p))
        v = rng.choice(sorted(p))  # branches always come from P
        cand = _candidate_for(h, v, p)
        inner_adj = {w: adj[w] & h.neighbors(v) for w in h.neighbors(v)}
        want = definitional_h(inner_adj, p & h.neighbors(v),
                              x & h.neighbors(v))
        got = {(a, b) for a, s in cand.adj.items() for b in s}
        assert got == want
