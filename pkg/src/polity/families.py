"""Family topology of a dominated matrix.

A family is a set of persons nobody inside of which listens (structurally)
to anybody outside. In the listening digraph (edge ``i -> j`` iff
``a_hat[i, j] > 0``) families are exactly the sets closed under out-edges,
so everything here reduces to strongly connected components: the
condensation's down-sets are the families and its sinks are the
upper-class families.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import EXACT_ZERO_TOL, DominatedMatrix, complement, index_set
from .errors import TooLarge

ENUM_LIMIT = 20


def enum_limit() -> int:
    return int(os.environ.get("POLITY_MAX_N", ENUM_LIMIT))


def listening_graph(a_hat, nodes: Iterable[int] | None = None) -> dict:
    """Adjacency lists of the sign pattern of ``a_hat`` restricted to
    ``nodes`` (self-loops dropped)."""
    m = np.asarray(a_hat, dtype=float)
    nodes = range(m.shape[0]) if nodes is None else list(nodes)
    keep = set(nodes)
    return {
        i: [int(j) for j in np.flatnonzero(m[i] > EXACT_ZERO_TOL) if j in keep and j != i]
        for i in nodes
    }


def strongly_connected_components(graph: dict) -> list:
    """Tarjan's algorithm, iterative. Components come out in reverse
    topological order: every component appears after all the components it
    has edges into."""
    index, low = {}, {}
    stack, on_stack = [], set()
    out = []
    counter = 0
    for root in graph:
        if root in index:
            continue
        work = [(root, iter(graph[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(frozenset(comp))
    return out


def _condensation(graph: dict):
    comps = strongly_connected_components(graph)
    owner = {v: k for k, comp in enumerate(comps) for v in comp}
    succ = [set() for _ in comps]
    for v, targets in graph.items():
        for w in targets:
            if owner[v] != owner[w]:
                succ[owner[v]].add(owner[w])
    return comps, succ


@dataclass(frozen=True)
class FamilyTopology:
    n: int
    families: tuple
    upper_class: tuple

    def __contains__(self, members) -> bool:
        return frozenset(members) in self._lookup

    @property
    def _lookup(self):
        return frozenset(self.families)

    def is_topology(self) -> bool:
        """Check the finite-topology axioms: contains the empty and the full
        set, closed under pairwise union and intersection."""
        fams = self._lookup
        if frozenset() not in fams or frozenset(range(self.n)) not in fams:
            return False
        return all(x | y in fams and x & y in fams for x in fams for y in fams)

    def to_json(self, connected: bool) -> dict:
        return {
            "families": [sorted(i + 1 for i in f) for f in self.families],
            "upper_class": [sorted(i + 1 for i in f) for f in self.upper_class],
            "connected": bool(connected),
        }


def is_family(a_hat, members: Iterable[int]) -> bool:
    m = np.asarray(a_hat, dtype=float)
    f = index_set(members, m.shape[0])
    rest = complement(f, m.shape[0])
    if not f or not rest:
        return True
    return bool(np.all(m[np.ix_(f, rest)] <= EXACT_ZERO_TOL))


def upper_class_families(a_hat) -> list:
    """Minimal nonempty families: the sink components of the condensation,
    ordered by smallest member."""
    comps, succ = _condensation(listening_graph(a_hat))
    sinks = [c for c, s in zip(comps, succ) if not s]
    return sorted(sinks, key=min)


def enumerate_families(a_hat: DominatedMatrix, limit: int | None = None) -> FamilyTopology:
    """List every family. The count can reach ``2**c`` for ``c`` condensation
    components, so more than ``limit`` components is refused."""
    limit = enum_limit() if limit is None else limit
    n = np.asarray(a_hat).shape[0]
    comps, succ = _condensation(listening_graph(a_hat))
    if len(comps) > limit:
        raise TooLarge(
            f"{len(comps)} strongly connected components exceed the enumeration "
            f"limit {limit} (set POLITY_MAX_N to raise it)"
        )
    # components arrive sinks-first, so successors are decided before use
    closed = [frozenset()]
    for k in range(len(comps)):
        closed += [s | {k} for s in closed if succ[k] <= s]
    families = sorted(
        (frozenset().union(*(comps[k] for k in s)) for s in closed),
        key=lambda f: (len(f), sorted(f)),
    )
    upper = sorted((c for c, s in zip(comps, succ) if not s), key=min)
    return FamilyTopology(n, tuple(families), tuple(upper))


def is_connected(a_hat) -> bool:
    """Whether the society cannot be split into two disjoint nonempty
    families, i.e. the listening graph is weakly connected."""
    graph = listening_graph(a_hat)
    undirected = {v: set(ws) for v, ws in graph.items()}
    for v, ws in graph.items():
        for w in ws:
            undirected[w].add(v)
    seen = {0}
    todo = [0]
    while todo:
        v = todo.pop()
        for w in undirected[v] - seen:
            seen.add(w)
            todo.append(w)
    return len(seen) == len(graph)


def family_in_block(a_hat, members: Iterable[int]) -> frozenset | None:
    """A nonempty family contained in ``members``, or ``None``.

    Any such family contains a sink component of the listening graph
    restricted to ``members``; a sink qualifies iff none of its persons
    listens to somebody outside ``members``.
    """
    m = np.asarray(a_hat, dtype=float)
    block_set = index_set(members, m.shape[0])
    if not block_set:
        raise ValueError("members must be nonempty")
    outside = complement(block_set, m.shape[0])
    leaky = set()
    if outside:
        leaks = np.any(m[np.ix_(block_set, outside)] > EXACT_ZERO_TOL, axis=1)
        leaky = {i for i, flag in zip(block_set, leaks) if flag}
    comps, succ = _condensation(listening_graph(m, block_set))
    found = [c for c, s in zip(comps, succ) if not s and not (c & leaky)]
    return min(found, key=min) if found else None
