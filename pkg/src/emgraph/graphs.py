"""External edge-list graphs: ingestion, degrees, removal, reordering.

A graph is a run of (origin, destination) arc records plus a run of live
vertex ids.  Undirected graphs store every edge as both arcs so that all
pipelines can traverse by origin.  Arc runs are kept lexicographically
sorted and deduplicated; self-loops are dropped at ingest.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field

import numpy as np

from .emio import ExternalRun, RECORD_DTYPE, StorageError, Substrate
from . import oracles

BINARY_MAGIC = b"EMGRBIN1"


class EdgeListParseError(ValueError):
    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class VertexRangeError(ValueError):
    """Vertex id outside the declared id space."""


class PreconditionError(ValueError):
    """An operation's input contract was violated."""


@dataclass
class LoadStats:
    self_loops_dropped: int = 0
    duplicate_arcs_dropped: int = 0


@dataclass
class ExternalGraph:
    """n is the id bound; vertices lists the live ids in ascending order."""

    substrate: Substrate
    n: int
    directed: bool
    arcs: ExternalRun
    vertices: ExternalRun
    load_stats: LoadStats = field(default_factory=LoadStats)

    @property
    def num_vertices(self) -> int:
        return self.vertices.length

    @property
    def arc_count(self) -> int:
        return self.arcs.length

    @property
    def edge_count(self) -> int:
        """m in the undirected sense: arc pairs count once."""
        return self.arc_count if self.directed else self.arc_count // 2

    def is_empty(self) -> bool:
        return self.num_vertices == 0


# -- small streaming helpers -------------------------------------------------


def _dedup_sorted(sub: Substrate, run: ExternalRun) -> tuple[ExternalRun, int]:
    """Drop adjacent duplicates of a sorted run; returns (run, dropped)."""
    w = sub.new_run_writer(run.arity)
    prev = None
    dropped = 0
    for rec in run.stream():
        if rec == prev:
            dropped += 1
            continue
        w.append(rec)
        prev = rec
    return w.close(), dropped


def _iota_run(sub: Substrate, n: int) -> ExternalRun:
    w = sub.new_run_writer(1)
    b = sub.config.block_size
    for lo in range(0, n, b):
        hi = min(lo + b, n)
        w.append_block(np.arange(lo, hi, dtype=RECORD_DTYPE).reshape(-1, 1))
    return w.close()


def _sorted_ids_run(sub: Substrate, ids) -> ExternalRun:
    run = sub.run_from_records(1, ((v,) for v in ids))
    return sub.external_sort(run, (0,))


def check_vertex_set(run: ExternalRun) -> None:
    """VertexSet contract: strictly increasing ids."""
    prev = -1
    for (v,) in run.stream():
        if v <= prev:
            raise PreconditionError("vertex set must be strictly increasing")
        prev = v


# -- ingestion ----------------------------------------------------------------

_HEADER_N = re.compile(r"#\s*n\s*=\s*(\d+)")


def load_edge_list(substrate: Substrate, source, directed: bool = False) -> ExternalGraph:
    """Parse whitespace-separated integer pairs; '#' lines are comments.

    A leading comment of the form ``# n=K`` declares the id space; otherwise
    n = 1 + max id seen.  Self-loops are dropped (counted), duplicate arcs
    are removed, and undirected input is symmetrized.
    """
    if isinstance(source, str):
        with open(source, "r") as fh:
            return load_edge_list(substrate, fh, directed)

    stats = LoadStats()
    declared_n = None
    max_id = -1
    raw = substrate.new_run_writer(2)
    for line_no, line in enumerate(source, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            m = _HEADER_N.match(text)
            if m and declared_n is None:
                declared_n = int(m.group(1))
            continue
        parts = text.split()
        if len(parts) != 2:
            raise EdgeListParseError(
                f"line {line_no}: expected two integers, got {text!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(
                f"line {line_no}: non-integer token in {text!r}", line_no)
        if u < 0 or v < 0:
            raise EdgeListParseError(
                f"line {line_no}: negative vertex id", line_no)
        if u >= 1 << 63 or v >= 1 << 63:
            raise VertexRangeError(f"line {line_no}: vertex id overflows")
        if declared_n is not None and (u >= declared_n or v >= declared_n):
            raise VertexRangeError(
                f"line {line_no}: id exceeds declared n={declared_n}")
        if u == v:
            stats.self_loops_dropped += 1
            continue
        max_id = max(max_id, u, v)
        raw.append((u, v))
        if not directed:
            raw.append((v, u))
    run = raw.close()
    n = declared_n if declared_n is not None else max_id + 1
    arcs, dup = _dedup_sorted(substrate, substrate.external_sort(run, (0, 1)))
    stats.duplicate_arcs_dropped = dup if directed else dup // 2
    return ExternalGraph(substrate, n, directed, arcs, _iota_run(substrate, n), stats)


def graph_from_edges(substrate: Substrate, n: int, edges,
                     directed: bool = False) -> ExternalGraph:
    """Build a graph from (u, v) pairs; dedups, drops loops, symmetrizes."""
    stats = LoadStats()
    raw = substrate.new_run_writer(2)
    for u, v in edges:
        if u >= n or v >= n or u < 0 or v < 0:
            raise VertexRangeError(f"arc ({u},{v}) outside id space n={n}")
        if u == v:
            stats.self_loops_dropped += 1
            continue
        raw.append((u, v))
        if not directed:
            raw.append((v, u))
    arcs, dup = _dedup_sorted(substrate, substrate.external_sort(raw.close(), (0, 1)))
    stats.duplicate_arcs_dropped = dup if directed else dup // 2
    return ExternalGraph(substrate, n, directed, arcs, _iota_run(substrate, n), stats)


# -- binary run format ---------------------------------------------------------


def save_graph_binary(g: ExternalGraph, path: str) -> None:
    """32-byte header (magic, n, arc count, flags) + LE u64 arc pairs."""
    flags = 1 if g.directed else 0
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<QQQ", g.n, g.arc_count, flags))
        for block in g.arcs.blocks():
            fh.write(np.ascontiguousarray(block, dtype="<u8").tobytes())


def load_graph_binary(substrate: Substrate, path: str) -> ExternalGraph:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != BINARY_MAGIC:
            raise EdgeListParseError(f"bad magic in {path!r}")
        n, arc_count, flags = struct.unpack("<QQQ", fh.read(24))
        w = substrate.new_run_writer(2)
        remaining = arc_count
        chunk = max(1, substrate.config.block_size)
        while remaining:
            take = min(chunk, remaining)
            raw = fh.read(take * 16)
            if len(raw) != take * 16:
                raise EdgeListParseError(f"truncated arc data in {path!r}")
            w.append_block(np.frombuffer(raw, dtype="<u8").reshape(take, 2))
            remaining -= take
    arcs, _ = _dedup_sorted(substrate, substrate.external_sort(w.close(), (0, 1)))
    return ExternalGraph(substrate, int(n), bool(flags & 1), arcs,
                         _iota_run(substrate, int(n)))


def is_binary_graph_file(path: str) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(8) == BINARY_MAGIC
    except OSError:
        return False


# -- degrees -------------------------------------------------------------------


def _counted_pairs(run: ExternalRun):
    """Yield (value, count) for col-0 groups of a sorted run, blockwise."""
    cur, cnt = None, 0
    for block in run.blocks():
        vals, counts = np.unique(block[:, 0], return_counts=True)
        vals, counts = vals.tolist(), counts.tolist()
        for v, c in zip(vals, counts):
            if v == cur:
                cnt += c
            else:
                if cur is not None:
                    yield cur, cnt
                cur, cnt = v, c
    if cur is not None:
        yield cur, cnt


def compute_degrees(g: ExternalGraph) -> ExternalRun:
    """Run of (degree, vertex) pairs, one per live vertex, ascending vertex.

    Degree counts out-arcs; for undirected graphs this is the vertex degree.
    Realized as sort-by-origin plus a blockwise counting scan merged with
    the live-vertex run so isolated vertices appear with degree 0.
    """
    sub = g.substrate
    by_origin = sub.external_sort(g.arcs, (0, 1))
    out = sub.new_run_writer(2)
    counted = _counted_pairs(by_origin)
    pending = next(counted, None)
    for (v,) in g.vertices.stream():
        while pending is not None and pending[0] < v:
            pending = next(counted, None)  # arcs from non-live ids cannot occur
        if pending is not None and pending[0] == v:
            out.append((pending[1], v))
            pending = next(counted, None)
        else:
            out.append((0, v))
    return out.close()


def reversed_arcs(g: ExternalGraph) -> ExternalRun:
    w = g.substrate.new_run_writer(2)
    for block in g.arcs.blocks():
        w.append_block(block[:, ::-1])
    return g.substrate.external_sort(w.close(), (0, 1))


def total_degrees(g: ExternalGraph) -> ExternalRun:
    """(degree, vertex) with degree = in + out for directed graphs."""
    if not g.directed:
        return compute_degrees(g)
    sub = g.substrate
    w = sub.new_run_writer(2)
    for block in g.arcs.blocks():
        w.append_block(block)
    for block in g.arcs.blocks():
        w.append_block(block[:, ::-1])
    both = sub.external_sort(w.close(), (0, 1))
    doubled = ExternalGraph(sub, g.n, True, both, g.vertices)
    return compute_degrees(doubled)


# -- vertex removal -------------------------------------------------------------


def _emit_tombstones(sub: Substrate, arcs_sorted: ExternalRun,
                     svertices: ExternalRun, col: int, symmetric: bool,
                     writer) -> None:
    """Synchronized scan of arcs (sorted by `col`) against sorted S.

    Emits tombstone records (a, b, 0) for arcs whose `col` endpoint is in S;
    with symmetric=True also emits the reversed tombstone, which is how the
    single-pass undirected removal covers arcs into S.
    """
    sit = svertices.stream()
    cur = next(sit, None)
    for rec in arcs_sorted.stream():
        key = rec[col]
        while cur is not None and cur[0] < key:
            cur = next(sit, None)
        if cur is not None and cur[0] == key:
            u, v = rec[0], rec[1]
            writer.append((u, v, 0))
            if symmetric:
                writer.append((v, u, 0))


def remove_vertices(g: ExternalGraph, svertices: ExternalRun) -> ExternalGraph:
    """G minus S and all incident arcs, via tombstone sort-and-drop.

    S must be a strictly increasing run of live vertex ids.  Undirected
    graphs use the one-pass marker trick (each origin-side marker also
    tombstones the mirror arc); directed graphs add a destination-side
    marker scan since the mirror arc may not exist.
    """
    sub = g.substrate
    check_vertex_set(svertices)

    combined = sub.new_run_writer(3)
    by_origin = sub.external_sort(g.arcs, (0, 1))
    _emit_tombstones(sub, by_origin, svertices, 0, not g.directed, combined)
    if g.directed:
        by_dest = sub.external_sort(g.arcs, (1, 0))
        _emit_tombstones(sub, by_dest, svertices, 1, False, combined)
    for block in g.arcs.blocks():
        padded = np.empty((len(block), 3), dtype=RECORD_DTYPE)
        padded[:, :2] = block
        padded[:, 2] = 1
        combined.append_block(padded)

    merged = sub.external_sort(combined.close(), (0, 1, 2))
    out = sub.new_run_writer(2)
    tomb = None
    for a, b, kind in merged.stream():
        if kind == 0:
            tomb = (a, b)
        elif (a, b) != tomb:
            out.append((a, b))
    arcs = out.close()

    # live vertices minus S, verifying S is a subset of the live set
    vw = sub.new_run_writer(1)
    sit = svertices.stream()
    cur = next(sit, None)
    for (v,) in g.vertices.stream():
        if cur is not None and cur[0] == v:
            cur = next(sit, None)
            continue
        vw.append((v,))
    if cur is not None:
        raise PreconditionError(f"removal set contains non-live vertex {cur[0]}")
    return ExternalGraph(sub, g.n, g.directed, arcs, vw.close())


# -- reordering ------------------------------------------------------------------


def _ordering_run(sub: Substrate, ordering) -> ExternalRun:
    if isinstance(ordering, ExternalRun):
        return ordering
    order = getattr(ordering, "order", None)
    if isinstance(order, ExternalRun):
        return order
    return sub.run_from_records(1, ((v,) for v in ordering))


def _validate_permutation(sub: Substrate, order_run: ExternalRun, n: int) -> None:
    if order_run.length != n:
        raise PreconditionError(
            f"ordering lists {order_run.length} vertices, graph has {n}")
    srt = sub.external_sort(order_run, (0,))
    expect = 0
    for (v,) in srt.stream():
        if v != expect:
            raise PreconditionError("ordering is not a permutation of 0..n-1")
        expect += 1


def _rank_markers(sub: Substrate, order_run: ExternalRun) -> ExternalRun:
    """(vertex, 0, rank) marker records, one per vertex."""
    w = sub.new_run_writer(3)
    rank = 0
    for (v,) in order_run.stream():
        w.append((v, 0, rank))
        rank += 1
    return w.close()


def _rename_pass(sub: Substrate, arcs: ExternalRun, markers: ExternalRun) -> ExternalRun:
    """Rename arc origins to their ranks and reverse the arcs."""
    combined = sub.new_run_writer(3)
    for block in markers.blocks():
        combined.append_block(block)
    for block in arcs.blocks():
        padded = np.empty((len(block), 3), dtype=RECORD_DTYPE)
        padded[:, 0] = block[:, 0]
        padded[:, 1] = 1
        padded[:, 2] = block[:, 1]
        combined.append_block(padded)
    merged = sub.external_sort(combined.close(), (0, 1, 2))
    out = sub.new_run_writer(2)
    rank = None
    owner = None
    for a, kind, payload in merged.stream():
        if kind == 0:
            owner, rank = a, payload
        else:
            if a != owner:
                raise PreconditionError(f"arc endpoint {a} missing from ordering")
            out.append((payload, rank))
    return out.close()


def reorder_graph(g: ExternalGraph, ordering) -> ExternalGraph:
    """Relabel every arc (v_i, v_j) to (i, j) for the given vertex ordering.

    Two annotate-sort-rename passes; the second pass undoes the reversal of
    the first, so arc directions are preserved.
    """
    sub = g.substrate
    order_run = _ordering_run(sub, ordering)
    _validate_permutation(sub, order_run, g.n)
    markers = _rank_markers(sub, order_run)
    half = _rename_pass(sub, g.arcs, markers)
    arcs = sub.external_sort(_rename_pass(sub, half, markers), (0, 1))

    # live vertices become their ranks
    combined = sub.new_run_writer(3)
    for block in markers.blocks():
        combined.append_block(block)
    for block in g.vertices.blocks():
        padded = np.empty((len(block), 3), dtype=RECORD_DTYPE)
        padded[:, 0] = block[:, 0]
        padded[:, 1] = 1
        padded[:, 2] = 0
        combined.append_block(padded)
    merged = sub.external_sort(combined.close(), (0, 1, 2))
    vw = sub.new_run_writer(1)
    owner = rank = None
    for a, kind, payload in merged.stream():
        if kind == 0:
            owner, rank = a, payload
        elif a == owner:
            vw.append((rank,))
    verts = sub.external_sort(vw.close(), (0,))
    return ExternalGraph(sub, g.n, g.directed, arcs, verts)


def ordering_lookup(order_run: ExternalRun, rank: int) -> int:
    """Original vertex id at a given rank (random-access, charged)."""
    return order_run.read_record(rank)[0]


def graph_has_arc(g: ExternalGraph, u: int, v: int) -> bool:
    """Binary search over the sorted arc run (charged random reads)."""
    b = g.substrate.config.block_size
    lo, hi = 0, g.arcs.n_blocks() - 1
    target = (u, v)
    while lo <= hi:
        mid = (lo + hi) // 2
        block = g.arcs.read_block(mid)
        first = (int(block[0, 0]), int(block[0, 1]))
        last = (int(block[-1, 0]), int(block[-1, 1]))
        if target < first:
            hi = mid - 1
        elif target > last:
            lo = mid + 1
        else:
            rows = block.tolist()
            import bisect
            i = bisect.bisect_left(rows, [u, v])
            return i < len(rows) and rows[i] == [u, v]
    return False


# -- generators -------------------------------------------------------------------


def generate_erdos_renyi(substrate: Substrate, n: int, m: int, seed: int) -> ExternalGraph:
    if n < 1 or m < 0:
        raise VertexRangeError("need n >= 1 and m >= 0")
    if m > n * (n - 1) // 2:
        raise VertexRangeError(f"m={m} exceeds max undirected edges for n={n}")
    rng = np.random.default_rng(seed)
    chosen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    while len(edges) < m:
        k = max(16, (m - len(edges)) * 2)
        us = rng.integers(0, n, size=k)
        vs = rng.integers(0, n, size=k)
        for u, v in zip(us.tolist(), vs.tolist()):
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key in chosen:
                continue
            chosen.add(key)
            edges.append(key)
            if len(edges) == m:
                break
    return graph_from_edges(substrate, n, edges)


def generate_preferential(substrate: Substrate, n: int, m0: int, seed: int) -> ExternalGraph:
    """Preferential-attachment graph: each arrival links to m0 earlier vertices."""
    if m0 < 1 or n < m0 + 1:
        raise VertexRangeError("need m0 >= 1 and n > m0")
    rng = np.random.default_rng(seed)
    targets = list(range(m0))
    repeated: list[int] = []
    edges: list[tuple[int, int]] = []
    for v in range(m0, n):
        edges.extend((v, t) for t in targets)
        repeated.extend(targets)
        repeated.extend([v] * m0)
        picked: set[int] = set()
        while len(picked) < m0:
            picked.add(repeated[int(rng.integers(0, len(repeated)))])
        targets = sorted(picked)
    return graph_from_edges(substrate, n, edges)


def generate_named(substrate: Substrate, name: str, **params) -> ExternalGraph:
    """Fixed test graphs: petersen, cycle, complete, complete_bipartite,
    grid, path."""
    if name == "petersen":
        return graph_from_edges(substrate, 10, oracles.petersen_edges())
    if name == "cycle":
        c = int(params["c"])
        if c < 3:
            raise VertexRangeError("cycle needs c >= 3")
        return graph_from_edges(substrate, c, [(i, (i + 1) % c) for i in range(c)])
    if name == "complete":
        k = int(params["k"])
        return graph_from_edges(
            substrate, k, [(i, j) for i in range(k) for j in range(i + 1, k)])
    if name == "complete_bipartite":
        a, b = int(params["a"]), int(params["b"])
        return graph_from_edges(
            substrate, a + b, [(i, a + j) for i in range(a) for j in range(b)])
    if name == "grid":
        rows, cols = int(params["rows"]), int(params["cols"])
        return graph_from_edges(substrate, rows * cols, oracles.grid_edges(rows, cols))
    if name == "path":
        k = int(params["n"])
        return graph_from_edges(substrate, k, [(i, i + 1) for i in range(k - 1)])
    raise VertexRangeError(f"unknown named model {name!r}")
