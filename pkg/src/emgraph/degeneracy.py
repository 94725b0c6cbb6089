"""Approximate degeneracy ordering by repeated small-vertex removal.

The driver repeatedly extracts the max(1, floor(n * eps/(2+eps))) vertices
of smallest degree, appends them to the ordering, and removes them.  Every
vertex then has at most (2+eps)*d neighbors later in the ordering, where d
is the exact degeneracy of the input; the certified bound is recomputed
from the finished ordering rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .emio import ExternalRun, Substrate
from .graphs import (ExternalGraph, PreconditionError, compute_degrees,
                     graph_from_edges, remove_vertices, reorder_graph,
                     _ordering_run, _sorted_ids_run)


@dataclass
class DegeneracyOrdering:
    order: ExternalRun            # vertex ids, position = rank
    epsilon: float
    certified_bound: int
    iterations: int = 0
    batch_sizes: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return self.order.length

    def to_list(self) -> list[int]:
        return [v for (v,) in self.order.stream()]


def small_vertices(g: ExternalGraph, fraction: float) -> ExternalRun:
    """The max(1, floor(n*fraction)) smallest-degree live vertices.

    Ties break by (degree, vertex id); the returned set is re-sorted to
    ascending id per the vertex-set contract.
    """
    sub = g.substrate
    nlive = g.num_vertices
    if nlive == 0:
        raise PreconditionError("small_vertices needs a nonempty graph")
    take = max(1, int(nlive * fraction))
    pairs = sub.external_sort(compute_degrees(g), (0, 1))
    w = sub.new_run_writer(1)
    for _, v in pairs.stream(0, take):
        w.append((v,))
    return sub.external_sort(w.close(), (0,))


def _underlying(g: ExternalGraph) -> ExternalGraph:
    """Symmetrized view: degeneracy is a property of the underlying graph."""
    if not g.directed:
        return g
    sub = g.substrate
    w = sub.new_run_writer(2)
    for block in g.arcs.blocks():
        w.append_block(block)
    for block in g.arcs.blocks():
        w.append_block(block[:, ::-1])
    from .graphs import _dedup_sorted
    arcs, _ = _dedup_sorted(sub, sub.external_sort(w.close(), (0, 1)))
    return ExternalGraph(sub, g.n, False, arcs, g.vertices)


def approx_degeneracy_order(g: ExternalGraph, epsilon: float = 1.0) -> DegeneracyOrdering:
    """Batch peeling without knowing d; the input graph is left untouched."""
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    sub = g.substrate
    fraction = epsilon / (2.0 + epsilon)
    work = _underlying(g)
    lw = sub.new_run_writer(1)
    iterations = 0
    batches: list[int] = []
    while not work.is_empty():
        batch = small_vertices(work, fraction)
        for rec in batch.stream():
            lw.append(rec)
        batches.append(batch.length)
        work = remove_vertices(work, batch)
        iterations += 1
    order = lw.close()
    bound = verify_ordering(g, order) if order.length else 0
    return DegeneracyOrdering(order, epsilon, bound, iterations, batches)


def verify_ordering(g: ExternalGraph, ordering) -> int:
    """Max forward degree of an ordering, via reorder + sort + scan."""
    sub = g.substrate
    work = _underlying(g)
    rel = reorder_graph(work, _ordering_run(sub, ordering))
    arcs = sub.external_sort(rel.arcs, (0, 1))
    best = 0
    cur = None
    fwd = 0
    for u, v in arcs.stream():
        if u != cur:
            best = max(best, fwd)
            cur, fwd = u, 0
        if v > u:
            fwd += 1
    return max(best, fwd)


# -- ordering file format -----------------------------------------------------


def write_ordering(ordering: DegeneracyOrdering, path: str) -> None:
    """One vertex id per line, rank order; footer comment carries metadata."""
    with open(path, "w") as fh:
        for (v,) in ordering.order.stream():
            fh.write(f"{v}\n")
        fh.write(f"# epsilon={ordering.epsilon} bound={ordering.certified_bound}\n")


def read_ordering(substrate: Substrate, path: str) -> DegeneracyOrdering:
    epsilon = 0.0
    bound = 0
    w = substrate.new_run_writer(1)
    with open(path, "r") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                for tok in text[1:].split():
                    if tok.startswith("epsilon="):
                        epsilon = float(tok.split("=", 1)[1])
                    elif tok.startswith("bound="):
                        bound = int(tok.split("=", 1)[1])
                continue
            try:
                w.append((int(text),))
            except ValueError:
                raise PreconditionError(
                    f"ordering file line {line_no}: not a vertex id: {text!r}")
    return DegeneracyOrdering(w.close(), epsilon, bound)
