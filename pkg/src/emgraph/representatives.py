"""Labeled p-ary trees encoding q-representatives of families of p-sets.

A family F of p-sets has a q-representative: a sub-family that preserves,
for every set B of at most q elements, whether some member avoids B.  The
tree form makes the representative queryable in O(p*q) steps: each node is
labeled with a member disjoint from the edge labels on its root path, or
with a lambda marker when no such member exists; a labeled node above the
leaf level has one child per element of its label.

Labels are stored as ordered tuples because the cycle pipelines read a
returned label directly as the inner vertex sequence of a path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .emio import ExternalRun, NIL, RECORD_DTYPE, Substrate


class QueryTooLarge(ValueError):
    """rep_query was given a set larger than the tree's q."""


@dataclass
class PSetFamily:
    """Ordered p-element records, optionally a column window of a wider run."""

    p: int
    run: ExternalRun
    start: int = 0
    stop: int | None = None
    col_offset: int = 0

    @classmethod
    def from_tuples(cls, substrate: Substrate, p: int, sets) -> "PSetFamily":
        recs = [tuple(s) for s in sets]
        for r in recs:
            if len(r) != p or len(set(r)) != p:
                raise ValueError(f"not a {p}-set: {r}")
        return cls(p, substrate.run_from_records(p, recs))

    @property
    def length(self) -> int:
        stop = self.run.length if self.stop is None else self.stop
        return stop - self.start

    def sets(self):
        lo, hi = self.col_offset, self.col_offset + self.p
        for rec in self.run.stream(self.start, self.stop):
            yield rec[lo:hi]

    def to_list(self) -> list[tuple]:
        return list(self.sets())

    def first_disjoint(self, excluded) -> tuple | None:
        """First stored set avoiding `excluded`; scan stops at the hit."""
        ex = set(excluded)
        gen = self.sets()
        try:
            for s in gen:
                if not ex.intersection(s):
                    return s
        finally:
            gen.close()
        return None


@dataclass
class RepNode:
    label: tuple | None          # None encodes the lambda marker
    parent: int
    edge: int | None             # label of the edge from the parent
    depth: int
    children: dict[int, int] = field(default_factory=dict)

    @property
    def is_lambda(self) -> bool:
        return self.label is None


class RepTree:
    """Tree form of a q-representative for a family of p-sets."""

    def __init__(self, p: int, q: int, substrate: Substrate | None = None):
        self.p = p
        self.q = q
        self.substrate = substrate
        self.nodes: list[RepNode] = []

    def add_node(self, parent: int | None, edge: int | None,
                 label: tuple | None) -> int:
        depth = 0 if parent is None else self.nodes[parent].depth + 1
        idx = len(self.nodes)
        self.nodes.append(RepNode(label, -1 if parent is None else parent,
                                  edge, depth))
        if parent is not None:
            self.nodes[parent].children[edge] = idx
        return idx

    def path_labels(self, idx: int) -> set[int]:
        """E(v): edge labels from node idx up to the root."""
        out: set[int] = set()
        while idx > 0:
            node = self.nodes[idx]
            out.add(node.edge)
            idx = node.parent
        return out

    def labels(self) -> list[tuple]:
        return [n.label for n in self.nodes if n.label is not None]

    @property
    def labeled_count(self) -> int:
        return sum(1 for n in self.nodes if n.label is not None)

    @property
    def lambda_count(self) -> int:
        return sum(1 for n in self.nodes if n.label is None)

    def _charge(self, units: int) -> None:
        if self.substrate is not None:
            self.substrate.charge_read_units(units)

    def query(self, bset) -> tuple | None:
        """Some family member disjoint from bset, or None if none exists.

        Walks down one root-to-leaf path, descending along an edge labeled
        with an element of the intersection at each step.
        """
        b = set(bset)
        if len(b) > self.q:
            raise QueryTooLarge(f"|B|={len(b)} exceeds q={self.q}")
        if not self.nodes:
            return None
        node = self.nodes[0]
        while True:
            self._charge(1)
            if node.label is None:
                return None
            hits = [x for x in node.label if x in b]
            if not hits:
                return node.label
            if not node.children:
                raise AssertionError("walk exhausted the tree below depth q")
            node = self.nodes[node.children[hits[0]]]

    # -- run round-trip: (parent+1 or NIL, edge or NIL, is_lambda, elems...) --

    def to_run(self, substrate: Substrate) -> ExternalRun:
        w = substrate.new_run_writer(3 + self.p)
        for n in self.nodes:
            elems = list(n.label) if n.label is not None else []
            elems += [NIL] * (self.p - len(elems))
            w.append(((NIL if n.parent < 0 else n.parent),
                      (NIL if n.edge is None else n.edge),
                      1 if n.label is None else 0, *elems))
        return w.close()

    @classmethod
    def from_run(cls, run: ExternalRun, p: int, q: int) -> "RepTree":
        tree = cls(p, q, run.substrate)
        for parent, edge, is_lambda, *elems in run.stream():
            label = None if is_lambda else tuple(e for e in elems if e != NIL)
            tree.add_node(None if parent == NIL else parent,
                          None if edge == NIL else edge, label)
        return tree


def grow_tree(p: int, q: int, labeler, substrate: Substrate | None = None) -> RepTree:
    """Build a representative tree node by node, breadth first.

    `labeler(path_labels)` must return a member disjoint from path_labels or
    None when no member qualifies; structure rules are applied here.
    """
    tree = RepTree(p, q, substrate)
    pending = [(None, None, frozenset())]
    while pending:
        parent, edge, blocked = pending.pop(0)
        label = labeler(blocked)
        if label is not None and (len(label) != p or len(set(label)) != p):
            raise AssertionError(f"labeler produced a non-{p}-set: {label}")
        idx = tree.add_node(parent, edge, label)
        if label is not None and tree.nodes[idx].depth < q:
            for x in label:
                pending.append((idx, x, blocked | {x}))
    return tree


def build_representative(family: PSetFamily, q: int) -> RepTree:
    """q-representative of a family, labels chosen first-fit in stored order."""
    if q < 0:
        raise ValueError("q must be >= 0")
    sub = family.run.substrate
    return grow_tree(family.p, q, family.first_disjoint, sub)


def validate_representative_tree(tree: RepTree, family_sets) -> tuple[bool, str]:
    """Check every structural rule of the tree form against a family.

    family_sets is any iterable of tuples/sets; membership is set-wise.
    Returns (ok, reason).
    """
    fam = [tuple(s) for s in family_sets]
    fam_keys = {frozenset(s) for s in fam}
    if not tree.nodes:
        return False, "tree has no root"
    for idx, node in enumerate(tree.nodes):
        blocked = tree.path_labels(idx)
        if node.label is not None:
            if frozenset(node.label) not in fam_keys:
                return False, f"node {idx} label {node.label} not in family"
            if blocked.intersection(node.label):
                return False, f"node {idx} label intersects its path labels"
            if node.depth < tree.q:
                if len(node.children) != tree.p or \
                        set(node.children) != set(node.label):
                    return False, (f"node {idx} must have one child per "
                                   f"label element")
            elif node.children:
                return False, f"node {idx} at depth q has children"
        else:
            if node.children:
                return False, f"lambda node {idx} has children"
            if any(not blocked.intersection(s) for s in fam):
                return False, (f"lambda node {idx} hides a member disjoint "
                               f"from {sorted(blocked)}")
    return True, "ok"


def find_disjoint(f: PSetFamily, g: PSetFamily):
    """A pair (A, B) in F x G with A and B disjoint, or None.

    Builds a q-representative of F (q = |G| member size) and a
    p-representative of G, then queries the tree that answers the larger
    queries with every label of the other tree.
    """
    tf = build_representative(f, g.p)
    tg = build_representative(g, f.p)
    if f.p >= g.p:
        for a in tf.labels():
            b = tg.query(a)
            if b is not None:
                return a, b
    else:
        for b in tg.labels():
            a = tf.query(b)
            if a is not None:
                return a, b
    return None
