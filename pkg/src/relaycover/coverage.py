"""Visit tallies and the count-driven coverage cost layered onto the relay solver.

Counts live on nodes and lift to edges through count(n, n') = count(n'), so
topology stays symmetric while costs pick up a direction.
"""

from __future__ import annotations

import random
from collections import deque

from .graph import NavGraph, NodeId, comm_cost


class VisitCounts:
    """Per-node visit tallies.

    window = 0 keeps cumulative counts; window = W keeps a sliding sum over
    the last W committed rounds (plus the still-uncommitted current round).
    """

    def __init__(self, node_count: int, window: int = 0):
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        if window < 0:
            raise ValueError("window must be non-negative")
        self.window = window
        self._counts = [0] * node_count
        self._pending: list[NodeId] = []
        self._history: deque[list[NodeId]] = deque()

    def __len__(self) -> int:
        return len(self._counts)

    def count(self, n: NodeId) -> int:
        return self._counts[n]

    def as_list(self) -> list[int]:
        return list(self._counts)

    def total(self) -> int:
        return sum(self._counts)

    def record(self, n: NodeId) -> None:
        self._counts[n] += 1
        if self.window:
            self._pending.append(n)

    def commit_round(self) -> None:
        """Close the current round; in windowed mode expire rounds older than W."""
        if not self.window:
            return
        self._history.append(self._pending)
        self._pending = []
        while len(self._history) > self.window:
            for n in self._history.popleft():
                self._counts[n] -= 1

    def copy(self) -> "VisitCounts":
        dup = VisitCounts(len(self._counts), self.window)
        dup._counts = list(self._counts)
        dup._pending = list(self._pending)
        dup._history = deque(list(rnd) for rnd in self._history)
        return dup

    def merge_max(self, other: "VisitCounts") -> None:
        """Element-wise max merge of another tally into this one.

        In windowed mode the raised entries are not backed by history, so
        they only decay as this tally's own increments expire.
        """
        if len(other) != len(self._counts):
            raise ValueError("tally size mismatch")
        for i, c in enumerate(other._counts):
            if c > self._counts[i]:
                self._counts[i] = c


def record_visit(vc: VisitCounts, n: NodeId) -> VisitCounts:
    """Increment the visit count of n by one; returns the updated tally."""
    vc.record(n)
    return vc


def node_count_step(g: NavGraph, current: NodeId, vc: VisitCounts, rng_seed: int) -> NodeId:
    """Pick the least-visited node in the neighborhood of current.

    Ties break by a seeded uniform choice. The visit is not recorded here;
    that is the caller's job.
    """
    nbrs = g.neighbors[current]
    if not nbrs:
        raise ValueError(f"node {current} has no outgoing edges")
    best = min(vc.count(n) for n in nbrs)
    ties = [n for n in nbrs if vc.count(n) == best]
    if len(ties) == 1:
        return ties[0]
    return random.Random(rng_seed).choice(ties)


def coverage_cost(vc: VisitCounts, n: NodeId, n_to: NodeId, beta: float) -> float:
    """Coverage cost of edge (n, n_to): beta times the destination's count."""
    return beta * vc.count(n_to)


def total_cost(g: NavGraph, vc: VisitCounts, n: NodeId, n_to: NodeId, beta: float) -> float:
    """Hybrid per-edge cost: communication cost plus coverage cost."""
    if (n, n_to) not in g.edges:
        raise ValueError(f"({n}, {n_to}) is not an edge")
    return comm_cost(g, n, n_to) + coverage_cost(vc, n, n_to, beta)


def hybrid_edge_cost(g: NavGraph, vc: VisitCounts, beta: float):
    """Edge-cost callable for the relay solver; reads vc live, so freeze or
    finish mutating it before solving."""
    comm = g.edge_comm_costs
    def cost(u: NodeId, v: NodeId) -> float:
        return comm[(u, v)] + beta * vc.count(v)
    return cost
