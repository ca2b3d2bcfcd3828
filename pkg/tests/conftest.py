import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relaycover import NavGraph, Position, build_grid_graph, nav_graph_from_parts


@pytest.fixture
def grid_196() -> NavGraph:
    """The paper-scale lattice: 70x70 m, 5 m spacing, no obstacles."""
    return build_grid_graph(70, 70, 5, Position(2.5, 2.5), d_comm_max=7.5, c_comm_max=10)


@pytest.fixture
def grid_2x2() -> NavGraph:
    """Four mutually connected nodes (diagonals within range)."""
    return build_grid_graph(10, 10, 5, Position(0, 0), d_comm_max=7.5, c_comm_max=10)


def diamond_graph():
    """Four nodes: cheap 2-hop side 0-1-3 (cost 3 total), direct 0-3 (cost 5),
    expensive side 0-2-3. Returns (graph, cost_fn)."""
    positions = [Position(0, 1), Position(1, 2), Position(1, 0), Position(2, 1)]
    edges = {(0, 1), (1, 3), (0, 3), (0, 2), (2, 3)}
    g = nav_graph_from_parts(positions, edges, base_node=0)
    table = {
        (0, 1): 1.5, (1, 3): 1.5,
        (0, 3): 5.0,
        (0, 2): 10.0, (2, 3): 10.0,
    }
    table.update({(b, a): c for (a, b), c in list(table.items())})
    return g, lambda u, v: table[(u, v)]


def line_graph(n: int, cost: float = 1.0):
    """Path 0-1-...-(n-1) with uniform edge cost."""
    positions = [Position(float(i), 0.0) for i in range(n)]
    edges = {(i, i + 1) for i in range(n - 1)}
    g = nav_graph_from_parts(positions, edges, base_node=0)
    return g, lambda u, v: cost
