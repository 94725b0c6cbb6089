"""Fixed-length cycle detection on the block substrate.

Three layers:

* ``cycle_through`` answers "is there a simple c-cycle through v" by the
  representative-tree dynamic program: level p holds, for every endpoint u,
  a (c-2-p)-representative of the inner-vertex families of u->v paths with
  p inner vertices; each level is derived from the previous one by scanning
  out-neighborhoods and querying the previous trees.

* the path generators enumerate simple directed paths of a fixed arc count
  by writing index sequences next to the edge list and decoding them with
  sort-assisted rounds.  The ordering-guided variants replace most index
  positions with forward-degree-bounded steps and support descending-prefix
  extension.

* the finders split work between high-degree vertices (handled one by one
  via ``cycle_through``) and the low-degree remainder, where half-length
  path families are grouped by endpoints and probed pairwise with
  ``find_disjoint``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .degeneracy import DegeneracyOrdering
from .emio import ExternalRun, RECORD_DTYPE, Substrate
from .graphs import (ExternalGraph, PreconditionError, _dedup_sorted,
                     compute_degrees, graph_has_arc, remove_vertices,
                     reorder_graph, reversed_arcs, total_degrees)
from .representatives import PSetFamily, RepTree, find_disjoint, grow_tree


@dataclass(frozen=True)
class CycleWitness:
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)


def validate_witness(g: ExternalGraph, vertices, c: int) -> bool:
    """Distinct vertices, exact length, every arc (incl. closing) present."""
    w = [int(x) for x in vertices]
    if len(w) != c or len(set(w)) != c:
        return False
    return all(graph_has_arc(g, w[i], w[(i + 1) % c]) for i in range(c))


def _check_length(g: ExternalGraph, c: int) -> None:
    if g.directed and c < 2:
        raise PreconditionError("directed cycles need length >= 2")
    if not g.directed and c < 3:
        raise PreconditionError("undirected cycles need length >= 3")


def _iceil_root(m: int, k: int) -> int:
    """Exact ceil(m ** (1/k)) for positive integers."""
    t = max(1, int(round(m ** (1.0 / k))))
    while t ** k < m:
        t += 1
    while t > 1 and (t - 1) ** k >= m:
        t -= 1
    return t


# -- cycle through a designated vertex ---------------------------------------


class _Adjacency:
    """Out-neighbor lists pinned in simulated memory for one operation."""

    def __init__(self, g: ExternalGraph):
        self.sub = g.substrate
        self.out: dict[int, list[int]] = {}
        for (v,) in g.vertices.stream():
            self.out[v] = []
        for u, v in g.arcs.stream():
            self.out[u].append(v)
        self._held = g.num_vertices + g.arc_count
        self.sub.ledger.acquire(self._held)

    def release(self) -> None:
        self.sub.ledger.release(self._held)
        self._held = 0


def _tree_records(tree: RepTree) -> int:
    return len(tree.nodes) * (tree.p + 3)


def cycle_through(g: ExternalGraph, k: int, v: int) -> CycleWitness | None:
    """A simple cycle of length exactly k containing v, or None.

    Builds (k-2)-representatives of the one-arc path families seeded from
    the edge list, derives one level per extra inner vertex, and finally
    queries the zero-depth trees for every out-neighbor of v.

    Out-neighbor lists and the two live tree levels are pinned in simulated
    memory and ledgered; a configuration whose M cannot hold them fails
    loudly instead of overcommitting.
    """
    _check_length(g, k)
    sub = g.substrate
    adj = _Adjacency(g)
    tree_held = 0
    try:
        if v not in adj.out:
            raise PreconditionError(f"vertex {v} is not in the graph")

        q0 = k - 2
        trees: dict[int, RepTree] = {}
        sub.charge_scan_of(g.arc_count)
        for u, nbrs in adj.out.items():
            t = RepTree(0, q0, sub)
            t.add_node(None, None, () if v in nbrs else None)
            trees[u] = t
            sub.ledger.acquire(_tree_records(t))
            tree_held += _tree_records(t)

        for p in range(k - 2):
            q_new = k - 3 - p
            nxt: dict[int, RepTree] = {}
            for u, nbrs in adj.out.items():
                def labeler(blocked, _u=u, _nbrs=nbrs):
                    sub.charge_scan_of(len(_nbrs))
                    probe = set(blocked)
                    probe.add(_u)
                    for w in _nbrs:
                        if w == v or w in blocked:
                            continue
                        hit = trees[w].query(probe)
                        if hit is not None:
                            return (w,) + hit
                    return None
                nxt[u] = grow_tree(p + 1, q_new, labeler, sub)
                sub.ledger.acquire(_tree_records(nxt[u]))
                tree_held += _tree_records(nxt[u])
            for t in trees.values():
                sub.ledger.release(_tree_records(t))
                tree_held -= _tree_records(t)
            trees = nxt

        for u in sorted(adj.out.get(v, ())):
            hit = trees[u].query(())
            if hit is not None:
                witness = (v, u) + hit
                if sub.debug:
                    assert validate_witness(g, witness, k)
                return CycleWitness(witness)
        return None
    finally:
        sub.ledger.release(tree_held)
        adj.release()


# -- unrestricted path generation ---------------------------------------------


def _max_out_degree(g: ExternalGraph) -> int:
    best = 0
    for deg, _ in compute_degrees(g).stream():
        best = max(best, deg)
    return best


def _decode_round(sub: Substrate, seqs: ExternalRun, arcs_sorted: ExternalRun,
                  pick) -> ExternalRun:
    """One sort-assisted decode round.

    seqs must be sorted by (vertex, code).  ``pick(code, cur, nbrs)``
    returns the decoded next vertex or None to drop the sequence; each
    surviving record rotates its consumed vertex to the back.
    """
    out = sub.new_run_writer(seqs.arity)
    arc_it = arcs_sorted.stream()
    arc = next(arc_it, None)
    cur = None
    nbrs: list[int] = []
    for rec in seqs.stream():
        u = rec[0]
        if u != cur:
            while arc is not None and arc[0] < u:
                arc = next(arc_it, None)
            nbrs = []
            while arc is not None and arc[0] == u:
                nbrs.append(arc[1])
                arc = next(arc_it, None)
            cur = u
        nxt = pick(rec[1], u, nbrs)
        if nxt is not None:
            out.append((nxt,) + rec[2:] + (rec[0],))
    return out.close()


def _finish_paths(sub: Substrate, seqs: ExternalRun, k: int) -> ExternalRun:
    """Rotate decoded tuples into path order and drop non-simple ones."""
    out = sub.new_run_writer(k + 1)
    for rec in seqs.stream():
        path = rec[1:] + rec[:1]
        if len(set(path)) == k + 1:
            out.append(path)
    return out.close()


def _seed_sequences(sub: Substrate, g: ExternalGraph, codes: list[tuple],
                    length: int) -> ExternalRun:
    """Records (head, step codes..., origin), one per arc x code tuple."""
    seqs = sub.new_run_writer(length + 1)
    with sub.ledger.reserve(max(1, len(codes) * max(1, length - 1))):
        carr = (np.asarray(codes, dtype=RECORD_DTYPE).reshape(len(codes), length - 1)
                if length > 1 else np.empty((1, 0), dtype=RECORD_DTYPE))
        for block in g.arcs.blocks():
            for u, v in block.tolist():
                rows = np.empty((len(carr), length + 1), dtype=RECORD_DTYPE)
                rows[:, 0] = v
                if length > 1:
                    rows[:, 1:length] = carr
                rows[:, length] = u
                seqs.append_block(rows)
    return seqs.close()


def generate_paths(g: ExternalGraph, k: int) -> ExternalRun:
    """Every simple directed path of exactly k arcs, each exactly once.

    Encodes candidate paths as an edge plus k-1 neighbor ranks, then decodes
    rank by rank with one sort per round.  The caller is expected to have
    removed high-degree vertices; the rank range adapts to the actual
    maximum out-degree.
    """
    if k < 1:
        raise PreconditionError("paths need at least one arc")
    sub = g.substrate
    if g.arc_count == 0:
        return sub.empty_run(k + 1)
    if k == 1:
        return g.arcs

    delta = _max_out_degree(g)
    codes = list(product(range(1, delta + 1), repeat=k - 1))
    run = _seed_sequences(sub, g, codes, k)

    def pick(code, cur, nbrs):
        return nbrs[code - 1] if 1 <= code <= len(nbrs) else None

    for _ in range(k - 1):
        run = sub.external_sort(run, (0, 1))
        run = _decode_round(sub, run, g.arcs, pick)
    return _finish_paths(sub, run, k)


# -- ordering-guided generation ------------------------------------------------


def _reversed_graph(g: ExternalGraph) -> ExternalGraph:
    return ExternalGraph(g.substrate, g.n, g.directed, reversed_arcs(g), g.vertices)


def _step_codes(length: int, cap: int, delta_hat: int, delta_e: int) -> list[tuple]:
    """Code tuples for the length-1 steps after the seed arc.

    Even codes are ascending steps indexed within the (at most delta_hat)
    later out-neighbors; odd codes are unrestricted steps indexed within
    all out-neighbors, and at most `cap` of them may appear.
    """
    l_codes = [j << 1 for j in range(1, delta_hat + 1)]
    e_codes = [(j << 1) | 1 for j in range(1, delta_e + 1)]
    out: list[tuple] = []

    def gen(prefix: list, used_e: int):
        if len(prefix) == length - 1:
            out.append(tuple(prefix))
            return
        for c in l_codes:
            prefix.append(c)
            gen(prefix, used_e)
            prefix.pop()
        if used_e < cap:
            for c in e_codes:
                prefix.append(c)
                gen(prefix, used_e + 1)
                prefix.pop()

    gen([], 0)
    return out


def _guided_paths(g: ExternalGraph, delta_hat: int, length: int,
                  reverse: bool) -> ExternalRun:
    """Paths generated from seed arcs plus guided steps, deduplicated.

    Forward direction emits exactly the simple length-arc paths with at
    most floor(length/2) descending arcs after the first arc; the reverse
    variant runs on the reversed graph and flips its output.  Output is
    sorted lexicographically.
    """
    sub = g.substrate
    gw = _reversed_graph(g) if reverse else g
    if gw.arc_count == 0:
        return sub.empty_run(length + 1)
    cap = length // 2
    delta_e = _max_out_degree(gw)
    codes = _step_codes(length, cap, delta_hat, delta_e)
    run = _seed_sequences(sub, gw, codes, length)

    def pick(code, cur, nbrs):
        j, is_e = code >> 1, code & 1
        if is_e:
            lst = nbrs
        else:
            lst = [w for w in nbrs if w > cur]
            if sub.debug:
                assert len(lst) <= delta_hat, "forward degree exceeds certificate"
        return lst[j - 1] if 1 <= j <= len(lst) else None

    for _ in range(length - 1):
        run = sub.external_sort(run, (0, 1))
        run = _decode_round(sub, run, gw.arcs, pick)
    paths = _finish_paths(sub, run, length)
    if reverse:
        w = sub.new_run_writer(length + 1)
        for block in paths.blocks():
            w.append_block(block[:, ::-1])
        paths = w.close()
    deduped, _ = _dedup_sorted(sub, sub.external_sort(paths))
    return deduped


def _all_paths_guided(g: ExternalGraph, delta_hat: int, length: int) -> ExternalRun:
    """All simple length-arc paths: forward-guided union reverse-guided."""
    sub = g.substrate
    if length == 0:
        w = sub.new_run_writer(1)
        for block in g.vertices.blocks():
            w.append_block(block)
        return w.close()
    fwd = _guided_paths(g, delta_hat, length, reverse=False)
    bwd = _guided_paths(g, delta_hat, length, reverse=True)
    w = sub.new_run_writer(length + 1)
    for block in fwd.blocks():
        w.append_block(block)
    for block in bwd.blocks():
        w.append_block(block)
    merged, _ = _dedup_sorted(sub, sub.external_sort(w.close()))
    return merged


def _extend_descending(g: ExternalGraph, delta_hat: int,
                       paths: ExternalRun) -> ExternalRun:
    """Prepend one descending arc to every path.

    New heads are in-neighbors of the old head that come later in the
    ordering (the graph is rank-relabeled, so "later" is numeric), which is
    exactly the forward-degree-bounded step the ordering certifies.
    """
    sub = g.substrate
    rev = reversed_arcs(g)
    srt = sub.external_sort(paths)
    out = sub.new_run_writer(paths.arity + 1)
    rev_it = rev.stream()
    arc = next(rev_it, None)
    cur = None
    later_in: list[int] = []
    for rec in srt.stream():
        head = rec[0]
        if head != cur:
            while arc is not None and arc[0] < head:
                arc = next(rev_it, None)
            later_in = []
            while arc is not None and arc[0] == head:
                if arc[1] > head:
                    later_in.append(arc[1])
                arc = next(rev_it, None)
            if sub.debug:
                assert len(later_in) <= delta_hat, \
                    "forward degree exceeds certificate"
            cur = head
        for w in later_in:
            if w not in rec:
                out.append((w,) + rec)
    return sub.external_sort(out.close())


def generate_paths_degenerate(g: ExternalGraph, delta_hat: int, length: int,
                              mode: str) -> ExternalRun:
    """Restricted path families over a rank-relabeled graph.

    modes:
      forward             paths with <= floor(length/2) descending arcs
                          after the first arc
      backward            mirror image (reverse-guided generation)
      one_backward_prefix paths whose first arc descends
      two_backward_prefix paths whose first two arcs descend

    The prefix modes build tails of reduced length from the union of the
    two guided generators (which covers every path) and extend them with
    ordering-bounded descending steps.
    """
    if length < 1:
        raise PreconditionError("paths need at least one arc")
    if delta_hat < 0:
        raise PreconditionError("need a certified forward-degree bound")
    if mode == "forward":
        return _guided_paths(g, delta_hat, length, reverse=False)
    if mode == "backward":
        return _guided_paths(g, delta_hat, length, reverse=True)
    if mode in ("one_backward_prefix", "two_backward_prefix"):
        j = 1 if mode == "one_backward_prefix" else 2
        if length < j:
            raise PreconditionError(f"{mode} needs length >= {j}")
        run = _all_paths_guided(g, delta_hat, length - j)
        for _ in range(j):
            run = _extend_descending(g, delta_hat, run)
        return run
    raise PreconditionError(f"unknown path generation mode {mode!r}")


# -- grouping ------------------------------------------------------------------


def group_families(paths: ExternalRun, inner_length: int):
    """Pair families of same-length paths by unordered endpoints.

    Tags every path record (u, ..., v) as (min, max, side, inner...) where
    side 1 means the path runs min->max, sorts, and yields
    (u, v, F_uv, F_vu) with u < v; one side may be empty.
    """
    p = inner_length
    if paths.arity != p + 2:
        raise PreconditionError("inner_length does not match path records")
    sub = paths.substrate
    w = sub.new_run_writer(p + 3)
    for rec in paths.stream():
        u, v = rec[0], rec[-1]
        inner = rec[1:-1]
        if u < v:
            w.append((u, v, 1) + inner)
        else:
            w.append((v, u, 2) + inner)
    tagged = sub.external_sort(w.close())

    groups: list[tuple] = []
    idx = 0
    key = None
    g_start = 0
    side2_start = None
    for rec in tagged.stream():
        k = (rec[0], rec[1])
        if k != key:
            if key is not None:
                mid = side2_start if side2_start is not None else idx
                groups.append((key, g_start, mid, idx))
            key, g_start, side2_start = k, idx, None
        if rec[2] == 2 and side2_start is None:
            side2_start = idx
        idx += 1
    if key is not None:
        mid = side2_start if side2_start is not None else idx
        groups.append((key, g_start, mid, idx))

    for (u, v), a0, mid, end in groups:
        yield (u, v,
               PSetFamily(p, tagged, a0, mid, 3),
               PSetFamily(p, tagged, mid, end, 3))


def _keyed_paths(sub: Substrate, paths: ExternalRun, reverse_key: bool) -> ExternalRun:
    """Rearrange path records to (key0, key1, inner...) and sort by key."""
    w = sub.new_run_writer(paths.arity)
    for block in paths.blocks():
        rows = np.empty_like(block)
        if reverse_key:
            rows[:, 0] = block[:, -1]
            rows[:, 1] = block[:, 0]
        else:
            rows[:, 0] = block[:, 0]
            rows[:, 1] = block[:, -1]
        rows[:, 2:] = block[:, 1:-1]
        w.append_block(rows)
    return sub.external_sort(w.close())


def _key_groups(run: ExternalRun):
    idx = 0
    cur = None
    start = 0
    for rec in run.stream():
        k = (rec[0], rec[1])
        if k != cur:
            if cur is not None:
                yield cur, start, idx
            cur, start = k, idx
        idx += 1
    if cur is not None:
        yield cur, start, idx


def pair_cross_families(sub: Substrate, paths_a: ExternalRun, a: int,
                        paths_b: ExternalRun, b: int):
    """Match a-arc families F_uv against b-arc families taken v->u.

    Yields (u, v, F_a(u->v), F_b(v->u)) for every ordered endpoint pair
    present on both sides.
    """
    ka = _keyed_paths(sub, paths_a, reverse_key=False)
    kb = _keyed_paths(sub, paths_b, reverse_key=True)
    ita, itb = _key_groups(ka), _key_groups(kb)
    ga, gb = next(ita, None), next(itb, None)
    while ga is not None and gb is not None:
        if ga[0] < gb[0]:
            ga = next(ita, None)
        elif gb[0] < ga[0]:
            gb = next(itb, None)
        else:
            (u, v) = ga[0]
            yield (u, v,
                   PSetFamily(a - 1, ka, ga[1], ga[2], 2),
                   PSetFamily(b - 1, kb, gb[1], gb[2], 2))
            ga, gb = next(ita, None), next(itb, None)


# -- the finders ----------------------------------------------------------------


def _high_degree_set(g: ExternalGraph, threshold: int) -> ExternalRun:
    sub = g.substrate
    w = sub.new_run_writer(1)
    for deg, v in total_degrees(g).stream():
        if deg >= threshold:
            w.append((v,))
    return w.close()


def _assert_split(work: ExternalGraph, threshold: int) -> None:
    if work.substrate.debug:
        assert all(d < threshold for d, _ in total_degrees(work).stream()), \
            "high-degree removal left a vertex at or above the threshold"


def _assemble(u, inner_a, v, inner_b) -> tuple[int, ...]:
    return (u,) + tuple(inner_a) + (v,) + tuple(inner_b)


def find_cycle_general(g: ExternalGraph, c: int) -> CycleWitness | None:
    """Decide and witness a length-c cycle in an arbitrary graph.

    Vertices of degree at least m^(1/ceil(c/2)) are probed individually,
    then removed; the remainder is covered by endpoint-grouped path
    families of the two half lengths.
    """
    _check_length(g, c)
    if g.edge_count == 0:
        return None
    m = g.edge_count
    k = -(-c // 2)
    threshold = _iceil_root(m, k)

    high = _high_degree_set(g, threshold)
    for (v,) in high.stream():
        hit = cycle_through(g, c, v)
        if hit is not None:
            return hit
    work = remove_vertices(g, high)
    _assert_split(work, threshold)
    if work.arc_count == 0:
        return None

    a, b = c // 2, c - c // 2
    paths_b = generate_paths(work, b)
    if a == b:
        for u, v, fam_uv, fam_vu in group_families(paths_b, a - 1):
            if fam_uv.length == 0 or fam_vu.length == 0:
                continue
            res = find_disjoint(fam_uv, fam_vu)
            if res is not None:
                witness = _assemble(u, res[0], v, res[1])
                if g.substrate.debug:
                    assert validate_witness(g, witness, c)
                return CycleWitness(witness)
        return None

    paths_a = generate_paths(work, a)
    for u, v, fam_a, fam_b in pair_cross_families(
            g.substrate, paths_a, a, paths_b, b):
        if fam_a.length == 0 or fam_b.length == 0:
            continue
        res = find_disjoint(fam_a, fam_b)
        if res is not None:
            witness = _assemble(u, res[0], v, res[1])
            if g.substrate.debug:
                assert validate_witness(g, witness, c)
            return CycleWitness(witness)
    return None


def find_cycle_degenerate(g: ExternalGraph, ordering: DegeneracyOrdering,
                          c: int) -> CycleWitness | None:
    """Length-c cycle search guided by a degeneracy ordering.

    Falls back to the general finder when the certified bound is too large
    to pay off.  Otherwise the high-degree threshold drops to
    m^(1/k)/bound^(1+1/k) with k = floor((c+2)/4), and the second stage
    pairs floor(c/2)-arc paths whose first arc descends in the ordering
    against all ceil(c/2)-arc paths between the opposite endpoints.  Every
    cycle survives the restriction: start the short path at the predecessor
    of the ordering-least cycle vertex and its first arc descends.
    """
    _check_length(g, c)
    if g.edge_count == 0:
        return None
    m = g.edge_count
    k = max(1, (c + 2) // 4)
    bound = ordering.certified_bound
    if bound == 0 or bound ** (2 * k + 1) >= m:
        return find_cycle_general(g, c)

    delta = (m ** (1.0 / k)) / (bound ** ((k + 1.0) / k))
    threshold = max(1, math.ceil(delta))
    high = _high_degree_set(g, threshold)
    for (v,) in high.stream():
        hit = cycle_through(g, c, v)
        if hit is not None:
            return hit
    work = remove_vertices(g, high)
    _assert_split(work, threshold)
    if work.arc_count == 0:
        return None

    sub = g.substrate
    rel = reorder_graph(work, ordering)
    a, b = c // 2, c - c // 2
    paths_a = generate_paths_degenerate(rel, bound, a, "one_backward_prefix")
    paths_b = _all_paths_guided(rel, bound, b)

    for u, v, fam_a, fam_b in pair_cross_families(sub, paths_a, a, paths_b, b):
        if fam_a.length == 0 or fam_b.length == 0:
            continue
        res = find_disjoint(fam_a, fam_b)
        if res is not None:
            ranks = _assemble(u, res[0], v, res[1])
            witness = tuple(ordering.order.read_record(r)[0] for r in ranks)
            if sub.debug:
                assert validate_witness(g, witness, c)
            return CycleWitness(witness)
    return None
