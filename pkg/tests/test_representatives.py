"""Representative trees: structure rules, query equivalence, disjoint pairs."""

import random
from itertools import combinations

import pytest

import emgraph as eg
from emgraph.representatives import (PSetFamily, RepTree, build_representative,
                                     find_disjoint, QueryTooLarge,
                                     validate_representative_tree)

FIG_FAMILY = [(2, 4), (1, 5), (1, 6), (1, 7), (3, 6), (3, 8), (4, 7), (4, 8)]


def build_reference_tree(sub) -> RepTree:
    """The published 3-representative of FIG_FAMILY, node for node."""
    t = RepTree(2, 3, sub)
    root = t.add_node(None, None, (1, 6))
    n38 = t.add_node(root, 1, (3, 8))
    n47a = t.add_node(root, 6, (4, 7))
    n24a = t.add_node(n38, 8, (2, 4))
    n48 = t.add_node(n38, 3, (4, 8))
    t.add_node(n24a, 4, (3, 6))
    t.add_node(n24a, 2, (4, 7))
    t.add_node(n48, 8, (2, 4))
    t.add_node(n48, 4, None)  # the lone lambda leaf
    n17 = t.add_node(n47a, 4, (1, 7))
    n15a = t.add_node(n47a, 7, (1, 5))
    t.add_node(n17, 7, (1, 5))
    t.add_node(n17, 1, (3, 8))
    t.add_node(n15a, 1, (2, 4))
    t.add_node(n15a, 5, (3, 8))
    return t


def test_reference_tree_accepted_by_checker(sub):
    t = build_reference_tree(sub)
    assert t.labeled_count == 14
    assert t.lambda_count == 1
    ok, msg = validate_representative_tree(t, FIG_FAMILY)
    assert ok, msg


def test_reference_tree_query_matches_brute_force(sub):
    t = build_reference_tree(sub)
    # every member meets {1,3,4}, so the walk must end at the lambda leaf
    assert t.query({1, 3, 4}) is None
    assert all(set(a) & {1, 3, 4} for a in FIG_FAMILY)
    universe = range(1, 9)
    for q in (0, 1, 2, 3):
        for b in combinations(universe, q):
            direct = any(not set(b) & set(a) for a in FIG_FAMILY)
            assert (t.query(set(b)) is not None) == direct


def test_builder_on_reference_family(sub):
    fam = PSetFamily.from_tuples(sub, 2, FIG_FAMILY)
    t = build_representative(fam, 3)
    ok, msg = validate_representative_tree(t, FIG_FAMILY)
    assert ok, msg
    assert t.labeled_count <= 1 + sum(2 ** i for i in (1, 2, 3))
    assert t.lambda_count <= 2 * t.labeled_count + 1


def test_empty_family_gives_lambda_root(sub):
    fam = PSetFamily.from_tuples(sub, 2, [])
    for q in (0, 1, 3):
        t = build_representative(fam, q)
        assert len(t.nodes) == 1 and t.nodes[0].is_lambda
        assert t.query(set()) is None


def test_query_empty_set_returns_root_label(sub):
    fam = PSetFamily.from_tuples(sub, 2, FIG_FAMILY)
    t = build_representative(fam, 3)
    assert t.query(set()) == FIG_FAMILY[0]  # first-fit root label


def test_query_size_guard(sub):
    fam = PSetFamily.from_tuples(sub, 2, FIG_FAMILY)
    t = build_representative(fam, 2)
    with pytest.raises(QueryTooLarge):
        t.query({1, 2, 3})


def random_family(rng, universe, p, count):
    pool = list(combinations(universe, p))
    picks = [pool[rng.randrange(len(pool))] for _ in range(count)]
    return picks


def test_exhaustive_equivalence_small_universes(sub):
    rng = random.Random(0)
    for _ in range(40):
        usize = rng.randint(3, 10)
        universe = list(range(1, usize + 1))
        p = rng.randint(1, min(3, usize))
        q = rng.randint(0, 3)
        fam_sets = random_family(rng, universe, p, rng.randint(0, 12))
        fam = PSetFamily.from_tuples(sub, p, fam_sets)
        t = build_representative(fam, q)
        ok, msg = validate_representative_tree(t, fam_sets)
        assert ok, msg
        assert t.labeled_count <= 1 + sum(p ** i for i in range(1, q + 1))
        assert t.lambda_count <= p * t.labeled_count + 1
        for b in combinations(universe, q):
            direct = any(not set(b) & set(a) for a in fam_sets)
            got = t.query(set(b))
            assert (got is not None) == direct
            if got is not None:
                assert not set(b) & set(got)
                assert got in fam_sets  # witness soundness


def test_find_disjoint_trivial_pairs(sub):
    f = PSetFamily.from_tuples(sub, 2, [(1, 2)])
    g = PSetFamily.from_tuples(sub, 2, [(3, 4)])
    assert find_disjoint(f, g) == ((1, 2), (3, 4))
    g2 = PSetFamily.from_tuples(sub, 2, [(1, 3), (2, 4)])
    assert find_disjoint(f, g2) is None


def test_find_disjoint_zero_size_side(sub):
    f = PSetFamily.from_tuples(sub, 0, [()])
    g = PSetFamily.from_tuples(sub, 2, [(1, 2)])
    assert find_disjoint(f, g) == ((), (1, 2))
    assert find_disjoint(g, f) == ((1, 2), ())
    empty = PSetFamily.from_tuples(sub, 0, [])
    assert find_disjoint(empty, g) is None


def test_find_disjoint_against_all_pairs_oracle(sub):
    rng = random.Random(1)
    for _ in range(100):
        usize = rng.randint(4, 12)
        universe = list(range(usize))
        p = rng.randint(1, 3)
        q = rng.randint(1, 3)
        fs = random_family(rng, universe, p, rng.randint(0, 10))
        gs = random_family(rng, universe, q, rng.randint(0, 10))
        f = PSetFamily.from_tuples(sub, p, fs)
        g = PSetFamily.from_tuples(sub, q, gs)
        res = find_disjoint(f, g)
        oracle = any(not set(a) & set(b) for a in fs for b in gs)
        assert (res is not None) == oracle
        if res is not None:
            a, b = res
            assert a in fs and b in gs
            assert not set(a) & set(b)
        # symmetry: swapping sides flips the witness or keeps the miss
        flipped = find_disjoint(g, f)
        assert (flipped is not None) == oracle
        if flipped is not None:
            b2, a2 = flipped
            assert b2 in gs and a2 in fs and not set(a2) & set(b2)


def test_tree_run_roundtrip(sub):
    fam = PSetFamily.from_tuples(sub, 2, FIG_FAMILY)
    t = build_representative(fam, 3)
    run = t.to_run(sub)
    back = RepTree.from_run(run, 2, 3)
    ok, msg = validate_representative_tree(back, FIG_FAMILY)
    assert ok, msg
    assert back.labeled_count == t.labeled_count
    assert [n.label for n in back.nodes] == [n.label for n in t.nodes]


def test_family_window_view(sub):
    run = sub.run_from_records(4, [(9, 9, 1, 2), (9, 9, 3, 4), (9, 9, 5, 6)])
    fam = PSetFamily(2, run, start=1, stop=3, col_offset=2)
    assert fam.to_list() == [(3, 4), (5, 6)]
    assert fam.length == 2


def test_checker_rejects_bad_trees(sub):
    t = RepTree(2, 2)
    root = t.add_node(None, None, (1, 2))
    t.add_node(root, 1, (1, 3))  # label intersects its path
    t.add_node(root, 2, None)
    ok, msg = validate_representative_tree(t, [(1, 2), (1, 3)])
    assert not ok and "intersects" in msg

    t2 = RepTree(1, 1)
    t2.add_node(None, None, None)  # lambda root hiding a member
    ok, msg = validate_representative_tree(t2, [(5,)])
    assert not ok and "hides" in msg
