"""Round records, experiment summaries and their CSV/text export formats."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from statistics import mean
from typing import Iterable, Sequence

from .coverage import VisitCounts
from .graph import NavGraph, NodeId
from .relay import Chain


@dataclass(frozen=True)
class RoundRecord:
    """One interleaved round: the chain flown and what it cost.

    occupied lists the node of every in-contact UAV (master + chain), with
    duplicates kept, so per-round sums match the visit tally exactly.
    """

    round: int
    chain: Chain | None
    comm_cost: float
    total_cost: float
    occupied: tuple[NodeId, ...]
    events: tuple[str, ...] = ()


@dataclass(frozen=True)
class ExperimentSummary:
    iterations_to_k: int | None
    visit_min: int
    visit_max: int
    visit_mean: float
    comm_cost_min: float
    comm_cost_max: float
    comm_cost_mean: float
    peak_nodes: tuple[NodeId, ...] = ()


def coverage_targets(g: NavGraph) -> frozenset[NodeId]:
    """Nodes that count toward coverage: reachable from base, not obstacles."""
    return frozenset(n for n in g.reachable_nodes if n not in g.obstacle_nodes)


def iterations_to_k_coverage(
    records: Sequence[RoundRecord], g: NavGraph, k: int
) -> int | None:
    """First round index at which every coverage-target node has k visits."""
    if k < 1:
        raise ValueError("k must be at least 1")
    targets = coverage_targets(g)
    counts = {n: 0 for n in targets}
    remaining = {n for n in targets}
    for rec in records:
        for n in rec.occupied:
            if n in counts:
                counts[n] += 1
                if counts[n] >= k:
                    remaining.discard(n)
        if not remaining:
            return rec.round
    return None


def visit_stats(vc: VisitCounts, g: NavGraph) -> tuple[int, int, float]:
    """(min, max, mean) visits over reachable non-obstacle nodes."""
    values = [vc.count(n) for n in sorted(coverage_targets(g))]
    if not values:
        raise ValueError("graph has no coverage-target nodes")
    return min(values), max(values), mean(values)


def comm_stats(records: Sequence[RoundRecord]) -> tuple[float, float, float]:
    """(min, max, mean) chain communication cost over rounds."""
    values = [rec.comm_cost for rec in records]
    if not values:
        raise ValueError("no rounds recorded")
    return min(values), max(values), mean(values)


def peak_nodes(vc: VisitCounts, g: NavGraph) -> tuple[NodeId, ...]:
    targets = sorted(coverage_targets(g))
    top = max(vc.count(n) for n in targets)
    return tuple(n for n in targets if vc.count(n) == top)


def summarize(
    records: Sequence[RoundRecord], vc: VisitCounts, g: NavGraph, k: int
) -> ExperimentSummary:
    v_min, v_max, v_mean = visit_stats(vc, g)
    c_min, c_max, c_mean = comm_stats(records)
    return ExperimentSummary(
        iterations_to_k=iterations_to_k_coverage(records, g, k),
        visit_min=v_min,
        visit_max=v_max,
        visit_mean=v_mean,
        comm_cost_min=c_min,
        comm_cost_max=c_max,
        comm_cost_mean=c_mean,
        peak_nodes=peak_nodes(vc, g),
    )


def write_visit_grid(path: Path | str, vc: VisitCounts, g: NavGraph) -> None:
    """Visit counts as a row-major grid CSV; first line holds the grid dims."""
    rows, cols = g.grid_shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([rows, cols])
        for r in range(rows):
            writer.writerow([vc.count(r * cols + c) for c in range(cols)])


def write_round_table(path: Path | str, records: Iterable[RoundRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "chain_length", "comm_cost", "total_cost"])
        for rec in records:
            length = rec.chain.length if rec.chain is not None else ""
            writer.writerow(
                [rec.round, length, f"{rec.comm_cost:.6f}", f"{rec.total_cost:.6f}"]
            )


def write_summary(path: Path | str, summary: ExperimentSummary) -> None:
    """Flat key=value text file."""
    lines = [
        f"iterations_to_k={summary.iterations_to_k if summary.iterations_to_k is not None else 'none'}",
        f"visit_min={summary.visit_min}",
        f"visit_max={summary.visit_max}",
        f"visit_mean={summary.visit_mean:.6f}",
        f"comm_cost_min={summary.comm_cost_min:.6f}",
        f"comm_cost_max={summary.comm_cost_max:.6f}",
        f"comm_cost_mean={summary.comm_cost_mean:.6f}",
        "peak_nodes=" + ";".join(str(n) for n in summary.peak_nodes),
    ]
    Path(path).write_text("\n".join(lines) + "\n")
