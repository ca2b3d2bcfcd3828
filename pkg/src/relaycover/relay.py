"""Relay-chain solver: bicriteria shortest-chain tree plus hop-budget refinement.

The tree stage is a Dijkstra variant over compound (cost, hops) labels where
cost has priority and hop count breaks ties. The refinement stage raises a
uniform per-edge penalty alpha until the chain from the base to the target
fits the UAV budget, or no further shortening is possible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

from .graph import NavGraph, NodeId

EdgeCost = Callable[[NodeId, NodeId], float]

# Absolute tolerance for cost equality; hop counts are exact integers.
COST_TOL = 1e-9

FAIL_UNREACHABLE = "unreachable"
FAIL_NO_IMPROVING_EDGE = "no_improving_edge"
FAIL_ITERATION_CAP = "iteration_cap"


def _cost_lt(a: float, b: float) -> bool:
    return a < b - COST_TOL

def _cost_eq(a: float, b: float) -> bool:
    return abs(a - b) <= COST_TOL


def _label_lt(cost_a: float, hops_a: int, cost_b: float, hops_b: int) -> bool:
    if _cost_lt(cost_a, cost_b):
        return True
    if _cost_lt(cost_b, cost_a):
        return False
    return hops_a < hops_b


@dataclass(frozen=True)
class Chain:
    """Ordered node sequence from the base to the target; length counts edges."""

    nodes: tuple[NodeId, ...]

    def __post_init__(self) -> None:
        if not self.nodes:
            raise ValueError("a chain has at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"chain revisits a node: {self.nodes}")

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    @property
    def target(self) -> NodeId:
        return self.nodes[-1]

    def interior(self) -> tuple[NodeId, ...]:
        return self.nodes[1:-1]


@dataclass
class MlmcTree:
    """Shortest-chain tree under the (cost, hops) compound ordering.

    depth holds the hop distance from the root (-1 when unreachable) and
    modified_cost the alpha-augmented chain cost (inf when unreachable).
    """

    root: NodeId
    parent: list[NodeId | None]
    depth: list[int]
    modified_cost: list[float]

    def reachable(self, n: NodeId) -> bool:
        return self.modified_cost[n] < math.inf

    def chain_to(self, n: NodeId) -> Chain | None:
        if not self.reachable(n):
            return None
        nodes = [n]
        cur = n
        while cur != self.root:
            cur = self.parent[cur]
            assert cur is not None
            nodes.append(cur)
        nodes.reverse()
        return Chain(tuple(nodes))


def mlmc_tree(
    g: NavGraph,
    root: NodeId,
    edge_cost: EdgeCost,
    alpha: float = 0.0,
    stop_at: NodeId | None = None,
) -> MlmcTree:
    """Build the minimum-(cost, hops) chain tree from root.

    Every edge is charged edge_cost(n, n') + alpha. Labels compare by cost
    first (within COST_TOL) and hop count second; on fully equal labels the
    lower node id and lower parent id win, which pins down one tree among
    ties. With stop_at the search halts once that node is finalized and the
    rest of the tree may be left unexplored (unreachable-looking).
    """
    n = g.node_count
    cost = [math.inf] * n
    hops = [0] * n
    parent: list[NodeId | None] = [None] * n
    done = [False] * n
    cost[root] = 0.0
    heap: list[tuple[float, int, NodeId]] = [(0.0, 0, root)]
    while heap:
        c, h, u = heapq.heappop(heap)
        if done[u]:
            continue
        if _label_lt(cost[u], hops[u], c, h):
            continue  # stale entry
        done[u] = True
        if u == stop_at:
            break
        for v in g.neighbors[u]:
            if done[v]:
                continue
            cand_c = c + edge_cost(u, v) + alpha
            cand_h = h + 1
            if _label_lt(cand_c, cand_h, cost[v], hops[v]):
                cost[v] = cand_c
                hops[v] = cand_h
                parent[v] = u
                heapq.heappush(heap, (cand_c, cand_h, v))
            elif (
                _cost_eq(cand_c, cost[v])
                and cand_h == hops[v]
                and parent[v] is not None
                and u < parent[v]
            ):
                parent[v] = u
    depth = [hops[i] if cost[i] < math.inf else -1 for i in range(n)]
    return MlmcTree(root=root, parent=parent, depth=depth, modified_cost=cost)


@dataclass(frozen=True)
class DualAscentState:
    """Snapshot of one refinement step, for inspection in tests."""

    alpha: float
    improving_edges: frozenset[tuple[NodeId, NodeId]]
    epsilon: float
    edge_epsilons: dict[tuple[NodeId, NodeId], float]


@dataclass(frozen=True)
class DualAscentResult:
    chain: Chain | None
    failure_reason: str | None
    alpha: float
    iterations: int
    states: tuple[DualAscentState, ...]
    tree: MlmcTree | None

    @property
    def ok(self) -> bool:
        return self.chain is not None


def dual_ascent_chain(
    g: NavGraph,
    target: NodeId,
    n_uav: int,
    edge_cost: EdgeCost,
    alpha_0: float = 0.0,
    max_iterations: int | None = None,
) -> DualAscentResult:
    """Find a minimal-cost chain from the base to target using at most
    n_uav + 1 nodes.

    Each pass builds the tree with per-edge penalty alpha and accepts the
    base-target chain if it fits the budget. Otherwise the improving-edge
    set S = {(n, n') : depth(n') > depth(n) + 1} yields the smallest penalty
    increment epsilon that pulls a strictly shorter chain into the tree;
    empty S means no chain can be shortened further. A cap on iterations
    (default 10 * node count) turns non-termination into a failure.
    """
    if n_uav < 1:
        raise ValueError("n_uav must be at least 1")
    if max_iterations is None:
        max_iterations = 10 * g.node_count
    alpha = alpha_0
    states: list[DualAscentState] = []
    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        tree = mlmc_tree(g, g.base_node, edge_cost, alpha, stop_at=target)
        chain = tree.chain_to(target)
        if chain is None:
            return DualAscentResult(None, FAIL_UNREACHABLE, alpha, iterations, tuple(states), None)
        if len(chain.nodes) <= n_uav + 1:
            return DualAscentResult(chain, None, alpha, iterations, tuple(states), tree)

        # Full tree labels are needed for S; the early-exit pass above may
        # have skipped part of the graph.
        tree = mlmc_tree(g, g.base_node, edge_cost, alpha)
        edge_eps: dict[tuple[NodeId, NodeId], float] = {}
        for u, v in g.edges:
            if not tree.reachable(u) or not tree.reachable(v):
                continue
            gap = tree.depth[v] - (tree.depth[u] + 1)
            if gap > 0:
                modified = tree.modified_cost[u] + edge_cost(u, v) + alpha
                edge_eps[(u, v)] = (modified - tree.modified_cost[v]) / gap
        if not edge_eps:
            states.append(DualAscentState(alpha, frozenset(), 0.0, {}))
            return DualAscentResult(
                None, FAIL_NO_IMPROVING_EDGE, alpha, iterations, tuple(states), tree
            )
        epsilon = min(edge_eps.values())
        states.append(DualAscentState(alpha, frozenset(edge_eps), epsilon, edge_eps))
        alpha += epsilon
    return DualAscentResult(None, FAIL_ITERATION_CAP, alpha, iterations, tuple(states), None)


def chain_cost(g: NavGraph, chain: Chain, edge_cost: EdgeCost) -> float:
    """Sum of edge_cost over consecutive chain pairs; rejects invalid chains."""
    for u, v in zip(chain.nodes, chain.nodes[1:]):
        if (u, v) not in g.edges:
            raise ValueError(f"chain step ({u}, {v}) is not a graph edge")
    return sum(edge_cost(u, v) for u, v in zip(chain.nodes, chain.nodes[1:]))
