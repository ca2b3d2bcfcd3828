"""Discretized navigation graph: lattice construction, reachability and edge costs.

Nodes are cell centers of a regular square lattice laid over a rectangular
map. Two nodes are joined by a (directed) edge pair exactly when they can
communicate: close enough and with no obstacle rectangle blocking the
straight segment between them.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

NodeId = int

# Samples per segment when estimating how much of a link runs through
# cluttered space. Endpoints included, so the sample set is symmetric.
SEGMENT_SAMPLES = 9

# Absolute slack on the inclusive range test, so d_comm_max = spacing*sqrt(2)
# style configs keep their diagonals.
_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class Position:
    """A point in the map plane, meters."""

    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned obstacle rectangle (closed)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError(f"degenerate rectangle: {self}")

    def contains(self, p: Position) -> bool:
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max

    def distance_to_point(self, x: float, y: float) -> float:
        dx = max(self.x_min - x, 0.0, x - self.x_max)
        dy = max(self.y_min - y, 0.0, y - self.y_max)
        return math.hypot(dx, dy)


def _segment_crosses_rect(r: Rect, a: Position, b: Position) -> bool:
    """True if segment a-b passes through the rectangle interior.

    Liang-Barsky clip against the closed rectangle; the segment crosses only
    if the clipped portion has positive length and its midpoint is strictly
    inside. Touching an edge or a corner does not count.
    """
    dx = b.x - a.x
    dy = b.y - a.y
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, a.x - r.x_min),
        (dx, r.x_max - a.x),
        (-dy, a.y - r.y_min),
        (dy, r.y_max - a.y),
    ):
        if p == 0.0:
            if q < 0.0:
                return False  # parallel to this boundary and outside it
            continue
        t = q / p
        if p < 0.0:
            if t > t1:
                return False
            if t > t0:
                t0 = t
        else:
            if t < t0:
                return False
            if t < t1:
                t1 = t
    if t1 - t0 <= 1e-12:
        return False  # touches at a single point
    tm = 0.5 * (t0 + t1)
    mx = a.x + tm * dx
    my = a.y + tm * dy
    return r.x_min < mx < r.x_max and r.y_min < my < r.y_max


@dataclass(frozen=True, eq=True)
class NavGraph:
    """Immutable discretized map. Construct via build_grid_graph().

    Edges are directed but always inserted in symmetric pairs; asymmetry can
    only come from costs layered on top, never from topology.
    """

    positions: tuple[Position, ...]
    edges: frozenset[tuple[NodeId, NodeId]]
    neighbors: tuple[tuple[NodeId, ...], ...]
    base_node: NodeId
    obstacle_nodes: frozenset[NodeId]
    obstacles: tuple[Rect, ...]
    spacing: float
    d_comm_max: float
    c_comm_max: float
    obstacle_weight: float
    clutter_radius: float
    width: float
    height: float
    grid_shape: tuple[int, int]  # (rows, cols), row-major node ids
    reachable_nodes: frozenset[NodeId] = field(default_factory=frozenset)
    edge_comm_costs: dict[tuple[NodeId, NodeId], float] = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return len(self.positions)

    def position(self, n: NodeId) -> Position:
        return self.positions[n]

    def has_edge(self, n: NodeId, m: NodeId) -> bool:
        return (n, m) in self.edges


def nav_graph_from_parts(
    positions: list[Position],
    undirected_edges: set[tuple[NodeId, NodeId]],
    base_node: NodeId,
    obstacle_nodes: frozenset[NodeId] = frozenset(),
    obstacles: tuple[Rect, ...] = (),
    spacing: float = 1.0,
    d_comm_max: float = 1e9,
    c_comm_max: float = 1.0,
    obstacle_weight: float | None = None,
    clutter_radius: float | None = None,
    width: float | None = None,
    height: float | None = None,
    grid_shape: tuple[int, int] | None = None,
) -> NavGraph:
    """Assemble a NavGraph from explicit parts, deriving adjacency and
    reachability. Used by build_grid_graph and by tests that need arbitrary
    topologies."""
    n = len(positions)
    adj: list[list[NodeId]] = [[] for _ in range(n)]
    directed: set[tuple[NodeId, NodeId]] = set()
    for u, v in undirected_edges:
        if u == v:
            raise ValueError(f"self-edge on node {u}")
        for a, b in ((u, v), (v, u)):
            if (a, b) not in directed:
                directed.add((a, b))
                adj[a].append(b)
    neighbors = tuple(tuple(sorted(nbrs)) for nbrs in adj)

    reach = {base_node}
    queue = deque([base_node])
    while queue:
        u = queue.popleft()
        for v in neighbors[u]:
            if v not in reach:
                reach.add(v)
                queue.append(v)

    g = NavGraph(
        positions=tuple(positions),
        edges=frozenset(directed),
        neighbors=neighbors,
        base_node=base_node,
        obstacle_nodes=obstacle_nodes,
        obstacles=tuple(obstacles),
        spacing=spacing,
        d_comm_max=d_comm_max,
        c_comm_max=c_comm_max,
        obstacle_weight=0.2 * c_comm_max if obstacle_weight is None else obstacle_weight,
        clutter_radius=spacing if clutter_radius is None else clutter_radius,
        width=width if width is not None else max((p.x for p in positions), default=0.0),
        height=height if height is not None else max((p.y for p in positions), default=0.0),
        grid_shape=grid_shape if grid_shape is not None else (1, n),
        reachable_nodes=frozenset(reach),
    )
    # Cache per-edge communication costs; the solver evaluates them in its
    # inner loop and the graph is immutable.
    for u, v in directed:
        if (v, u) in g.edge_comm_costs:
            g.edge_comm_costs[(u, v)] = g.edge_comm_costs[(v, u)]
        else:
            g.edge_comm_costs[(u, v)] = _comm_cost_raw(g, u, v)
    return g


def lattice_size(width: float, height: float, spacing: float) -> tuple[int, int]:
    """Number of lattice (rows, cols) for a map; one node per spacing-sized cell."""
    cols = max(1, int(math.floor(width / spacing + 1e-9)))
    rows = max(1, int(math.floor(height / spacing + 1e-9)))
    return rows, cols


def build_grid_graph(
    width: float,
    height: float,
    spacing: float,
    base: Position,
    obstacles: tuple[Rect, ...] = (),
    d_comm_max: float = 0.0,
    c_comm_max: float = 1.0,
    obstacle_weight: float | None = None,
    clutter_radius: float | None = None,
) -> NavGraph:
    """Build the lattice graph for a rectangular map.

    Nodes sit at cell centers, row-major. All directed edge pairs between
    distinct non-obstacle nodes within d_comm_max are present, minus those
    whose straight segment crosses an obstacle rectangle. The base node is
    the non-obstacle lattice node nearest to `base`.
    """
    if width <= 0 or height <= 0 or spacing <= 0:
        raise ValueError("width, height and spacing must be positive")
    if spacing > width or spacing > height:
        raise ValueError(f"spacing {spacing} exceeds map extent {width}x{height}")
    if not (0.0 <= base.x <= width and 0.0 <= base.y <= height):
        raise ValueError(f"base {base} outside the {width}x{height} map")
    for r in obstacles:
        if r.contains(base):
            raise ValueError(f"base {base} lies inside obstacle {r}")
    if d_comm_max <= 0:
        raise ValueError("d_comm_max must be positive")
    if c_comm_max <= 0:
        raise ValueError("c_comm_max must be positive")

    rows, cols = lattice_size(width, height, spacing)
    positions = [
        Position((c + 0.5) * spacing, (r + 0.5) * spacing)
        for r in range(rows)
        for c in range(cols)
    ]
    obstacle_nodes = frozenset(
        i for i, p in enumerate(positions) if any(rect.contains(p) for rect in obstacles)
    )
    free = [i for i in range(len(positions)) if i not in obstacle_nodes]
    if not free:
        raise ValueError("obstacles cover every lattice node")
    base_node = min(free, key=lambda i: (base.distance_to(positions[i]), i))

    undirected: set[tuple[NodeId, NodeId]] = set()
    limit = d_comm_max + _RANGE_TOL
    for ai in range(len(free)):
        a = free[ai]
        pa = positions[a]
        for b in free[ai + 1 :]:
            pb = positions[b]
            if pa.distance_to(pb) > limit:
                continue
            if any(_segment_crosses_rect(r, pa, pb) for r in obstacles):
                continue
            undirected.add((a, b))

    return nav_graph_from_parts(
        positions,
        undirected,
        base_node,
        obstacle_nodes=obstacle_nodes,
        obstacles=obstacles,
        spacing=spacing,
        d_comm_max=d_comm_max,
        c_comm_max=c_comm_max,
        obstacle_weight=obstacle_weight,
        clutter_radius=clutter_radius,
        width=width,
        height=height,
        grid_shape=(rows, cols),
    )


def comm_reachable(g: NavGraph, n: NodeId, m: NodeId) -> bool:
    """Whether two nodes can communicate directly (f_comm).

    Inclusive on the range boundary; a segment merely touching an obstacle
    boundary still counts as reachable.
    """
    pa, pb = g.positions[n], g.positions[m]
    if pa.distance_to(pb) > g.d_comm_max + _RANGE_TOL:
        return False
    return not any(_segment_crosses_rect(r, pa, pb) for r in g.obstacles)


def _comm_cost_raw(g: NavGraph, n: NodeId, m: NodeId) -> float:
    pa, pb = g.positions[n], g.positions[m]
    d = pa.distance_to(pb)
    cost = g.c_comm_max * min(d / g.d_comm_max, 1.0)
    if g.obstacles and g.obstacle_weight > 0.0:
        near = 0
        last = SEGMENT_SAMPLES - 1
        for k in range(SEGMENT_SAMPLES):
            t = k / last
            x = pa.x + t * (pb.x - pa.x)
            y = pa.y + t * (pb.y - pa.y)
            if any(r.distance_to_point(x, y) <= g.clutter_radius for r in g.obstacles):
                near += 1
        cost += g.obstacle_weight * (near / SEGMENT_SAMPLES)
    return cost


def comm_cost(g: NavGraph, n: NodeId, m: NodeId) -> float:
    """Communication cost c_comm between two nodes.

    Linear in distance up to saturation at c_comm_max, plus a clutter
    penalty: obstacle_weight times the fraction of segment samples lying
    within clutter_radius of any obstacle. Symmetric in its arguments.
    """
    cached = g.edge_comm_costs.get((n, m))
    if cached is not None:
        return cached
    return _comm_cost_raw(g, n, m)
