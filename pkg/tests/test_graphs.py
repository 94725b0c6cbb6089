"""Graph store: ingestion, degrees, removal, reordering, generators."""

import io
import random

import pytest

import emgraph as eg
from emgraph import oracles


def lines(text):
    return io.StringIO(text)


def arcset(g):
    return set(g.arcs.stream())


def test_load_undirected_symmetrizes(sub):
    g = eg.load_edge_list(sub, lines("0 1\n1 2\n"))
    assert g.n == 3
    assert arcset(g) == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert g.edge_count == 2


def test_load_dedup(sub):
    g = eg.load_edge_list(sub, lines("0 1\n0 1\n1 0\n"))
    assert g.edge_count == 1
    assert g.load_stats.duplicate_arcs_dropped == 2


def test_load_drops_self_loop_with_warning(sub):
    g = eg.load_edge_list(sub, lines("0 0\n1 2\n"))
    assert g.load_stats.self_loops_dropped == 1
    assert g.edge_count == 1


def test_load_header_declares_n(sub):
    g = eg.load_edge_list(sub, lines("# n=9\n0 1\n"))
    assert g.n == 9
    assert g.num_vertices == 9


def test_load_parse_error_carries_line_number(sub):
    with pytest.raises(eg.EdgeListParseError) as err:
        eg.load_edge_list(sub, lines("0 1\nnope nope\n"))
    assert err.value.line_no == 2
    with pytest.raises(eg.EdgeListParseError) as err:
        eg.load_edge_list(sub, lines("0 1\n2\n"))
    assert err.value.line_no == 2


def test_load_range_error_against_header(sub):
    with pytest.raises(eg.VertexRangeError):
        eg.load_edge_list(sub, lines("# n=2\n0 5\n"))


def test_directed_load(sub):
    g = eg.load_edge_list(sub, lines("0 1\n1 0\n2 0\n"), directed=True)
    assert arcset(g) == {(0, 1), (1, 0), (2, 0)}
    assert g.edge_count == 3


def test_degrees_triangle_and_star(sub):
    tri = eg.generate_named(sub, "cycle", c=3)
    assert eg.compute_degrees(tri).to_list() == [(2, 0), (2, 1), (2, 2)]
    star = eg.graph_from_edges(sub, 5, [(0, i) for i in range(1, 5)])
    degs = dict((v, d) for d, v in eg.compute_degrees(star).stream())
    assert degs == {0: 4, 1: 1, 2: 1, 3: 1, 4: 1}


def test_degrees_petersen_all_three(sub):
    g = eg.generate_named(sub, "petersen")
    dg = oracles.DenseGraph.from_external(g)
    mine = {v: d for d, v in eg.compute_degrees(g).stream()}
    assert mine == {v: dg.degree(v) for v in range(10)}


def test_degrees_include_isolated_vertices(sub):
    g = eg.graph_from_edges(sub, 4, [(0, 1)])
    assert (0, 2) in eg.compute_degrees(g).to_list()


def test_total_degrees_directed(sub):
    g = eg.graph_from_edges(sub, 3, [(0, 1), (2, 1)], directed=True)
    assert dict((v, d) for d, v in eg.total_degrees(g).stream()) == {0: 1, 1: 2, 2: 1}


def test_remove_all_vertices(sub):
    g = eg.generate_named(sub, "cycle", c=4)
    s = sub.run_from_records(1, [(i,) for i in range(4)])
    out = eg.remove_vertices(g, s)
    assert out.num_vertices == 0 and out.arc_count == 0


def test_remove_nothing(sub):
    g = eg.generate_named(sub, "cycle", c=4)
    out = eg.remove_vertices(g, sub.empty_run(1))
    assert arcset(out) == arcset(g)
    assert out.num_vertices == 4


def test_remove_one_from_c5_gives_path(sub):
    g = eg.generate_named(sub, "cycle", c=5)
    out = eg.remove_vertices(g, sub.run_from_records(1, [(0,)]))
    assert arcset(out) == {(1, 2), (2, 1), (2, 3), (3, 2), (3, 4), (4, 3)}


def test_remove_unsorted_set_rejected(sub):
    g = eg.generate_named(sub, "cycle", c=4)
    bad = sub.run_from_records(1, [(2,), (1,)])
    with pytest.raises(eg.PreconditionError):
        eg.remove_vertices(g, bad)


def test_remove_directed_in_arcs(sub):
    g = eg.graph_from_edges(sub, 3, [(0, 2), (1, 2)], directed=True)
    out = eg.remove_vertices(g, sub.run_from_records(1, [(2,)]))
    assert out.arc_count == 0


def test_removed_vertices_never_reported(sub):
    rng = random.Random(0)
    for _ in range(10):
        n = rng.randint(2, 12)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        g = eg.graph_from_edges(sub, n, edges)
        s = sorted(rng.sample(range(n), rng.randint(0, n)))
        out = eg.remove_vertices(g, sub.run_from_records(1, [(v,) for v in s]))
        reported = {v for _, v in eg.compute_degrees(out).stream()}
        assert reported.isdisjoint(s)
        assert reported == set(range(n)) - set(s)


def test_reorder_identity(sub):
    g = eg.generate_named(sub, "petersen")
    out = eg.reorder_graph(g, list(range(10)))
    assert arcset(out) == arcset(g)


def test_reorder_single_arc_swap(sub):
    g = eg.graph_from_edges(sub, 2, [(0, 1)], directed=True)
    out = eg.reorder_graph(g, [1, 0])
    assert arcset(out) == {(1, 0)}


def test_reorder_matches_oracle_and_inverts(sub):
    rng = random.Random(1)
    for _ in range(8):
        n = rng.randint(2, 15)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        g = eg.graph_from_edges(sub, n, edges)
        perm = list(range(n))
        rng.shuffle(perm)
        rank = {v: i for i, v in enumerate(perm)}
        out = eg.reorder_graph(g, perm)
        assert arcset(out) == {(rank[u], rank[v]) for u, v in arcset(g)}
        inverse = [0] * n
        for i, v in enumerate(perm):
            inverse[v] = i
        back = eg.reorder_graph(out, inverse)
        assert arcset(back) == arcset(g)


def test_reorder_rejects_non_permutation(sub):
    g = eg.generate_named(sub, "cycle", c=3)
    with pytest.raises(eg.PreconditionError):
        eg.reorder_graph(g, [0, 1, 1])


def test_symmetry_invariant_random(sub):
    rng = random.Random(2)
    for _ in range(5):
        n = rng.randint(2, 20)
        cap = n * (n - 1) // 2
        edges = rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)],
                           rng.randint(0, cap))
        g = eg.graph_from_edges(sub, n, edges)
        arcs = arcset(g)
        assert all((v, u) in arcs for u, v in arcs)


def test_named_graphs(sub):
    assert eg.generate_named(sub, "cycle", c=5).edge_count == 5
    assert eg.generate_named(sub, "complete", k=4).edge_count == 6
    assert eg.generate_named(sub, "petersen").edge_count == 15
    assert eg.generate_named(sub, "complete_bipartite", a=2, b=3).edge_count == 6
    assert eg.generate_named(sub, "grid", rows=3, cols=3).edge_count == 12
    assert eg.generate_named(sub, "path", n=10).edge_count == 9
    with pytest.raises(eg.VertexRangeError):
        eg.generate_named(sub, "nonsense")


def test_erdos_renyi_deterministic_and_feasible(sub):
    a = eg.generate_erdos_renyi(sub, 100, 200, seed=7)
    b = eg.generate_erdos_renyi(sub, 100, 200, seed=7)
    assert arcset(a) == arcset(b)
    assert a.edge_count == 200
    c = eg.generate_erdos_renyi(sub, 100, 200, seed=8)
    assert arcset(a) != arcset(c)
    with pytest.raises(eg.VertexRangeError):
        eg.generate_erdos_renyi(sub, 4, 10, seed=0)


def test_preferential_attachment_shape(sub):
    g = eg.generate_preferential(sub, 50, 2, seed=3)
    assert g.n == 50
    assert g.edge_count <= 2 * 48
    degs = {v: d for d, v in eg.compute_degrees(g).stream()}
    assert all(degs[v] >= 1 for v in range(2, 50))
    again = eg.generate_preferential(sub, 50, 2, seed=3)
    assert arcset(g) == arcset(again)


def test_binary_roundtrip(tmp_path, sub):
    g = eg.generate_erdos_renyi(sub, 60, 120, seed=9)
    path = str(tmp_path / "g.bin")
    eg.save_graph_binary(g, path)
    back = eg.load_graph_binary(sub, path)
    assert back.n == g.n and back.directed == g.directed
    assert arcset(back) == arcset(g)
    d = eg.graph_from_edges(sub, 3, [(0, 1), (1, 2)], directed=True)
    dpath = str(tmp_path / "d.bin")
    eg.save_graph_binary(d, dpath)
    back = eg.load_graph_binary(sub, dpath)
    assert back.directed and arcset(back) == {(0, 1), (1, 2)}
