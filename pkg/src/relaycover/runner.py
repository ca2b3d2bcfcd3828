"""Experiment runner: realizes scenarios, sweeps (beta, seed) pairs, writes
the metrics artifacts."""

from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from statistics import median

from .config import ScenarioConfig
from .coverage import VisitCounts
from .graph import NavGraph, Position, Rect, build_grid_graph
from .metrics import (
    ExperimentSummary,
    RoundRecord,
    summarize,
    write_round_table,
    write_summary,
    write_visit_grid,
)
from .sim import Simulation

log = logging.getLogger(__name__)

_LAYOUT_ATTEMPTS = 200


@dataclass(frozen=True)
class RunResult:
    beta: float
    seed: int
    summary: ExperimentSummary
    records: tuple[RoundRecord, ...]
    tally: VisitCounts
    graph: NavGraph


def _build_graph(cfg: ScenarioConfig, obstacles: tuple[Rect, ...]) -> NavGraph:
    return build_grid_graph(
        width=cfg.map.width,
        height=cfg.map.height,
        spacing=cfg.map.spacing,
        base=Position(*cfg.map.base),
        obstacles=obstacles,
        d_comm_max=cfg.comm.d_comm_max * cfg.comm.d_comm_margin,
        c_comm_max=cfg.comm.c_comm_max,
        obstacle_weight=cfg.comm.obstacle_weight,
        clutter_radius=cfg.comm.clutter_radius,
    )


def realize_obstacles(cfg: ScenarioConfig, run_seed: int) -> tuple[Rect, ...]:
    """Obstacle layout for one run: explicit rectangles pass through, random
    layouts are seeded by (obstacle seed, run seed) and rejected until they
    neither displace the base node nor cut off any lattice node."""
    if cfg.random_obstacles is None:
        return cfg.obstacles
    ro = cfg.random_obstacles
    if ro.count == 0:
        return ()
    bare = _build_graph(cfg, ())
    rng = random.Random(ro.seed * 1_000_003 + run_seed)
    base = Position(*cfg.map.base)
    for _ in range(_LAYOUT_ATTEMPTS):
        rects = []
        for _ in range(ro.count):
            w = rng.uniform(ro.min_size, ro.max_size)
            h = rng.uniform(ro.min_size, ro.max_size)
            x = rng.uniform(0.0, cfg.map.width - w)
            y = rng.uniform(0.0, cfg.map.height - h)
            rects.append(Rect(x, y, x + w, y + h))
        if any(r.contains(base) for r in rects):
            continue
        g = _build_graph(cfg, tuple(rects))
        if g.base_node != bare.base_node:
            continue
        free = set(range(g.node_count)) - g.obstacle_nodes
        if free <= g.reachable_nodes:
            return tuple(rects)
    raise RuntimeError(
        f"no connected obstacle layout found in {_LAYOUT_ATTEMPTS} attempts "
        f"(count={ro.count}, sizes {ro.min_size}-{ro.max_size})"
    )


def run_single(cfg: ScenarioConfig, beta: float, seed: int) -> RunResult:
    """One simulation run to k-coverage or the round cap."""
    g = _build_graph(cfg, realize_obstacles(cfg, seed))
    sim = Simulation(
        g,
        fleet_size=cfg.fleet_size,
        beta=beta,
        seed=seed,
        targets=cfg.targets,
        window=cfg.window,
        events=cfg.events,
    )
    records = sim.run(cfg.k, cfg.max_rounds)
    summary = summarize(records, sim.tally, g, cfg.k)
    return RunResult(
        beta=beta,
        seed=seed,
        summary=summary,
        records=tuple(records),
        tally=sim.tally,
        graph=g,
    )


def _run_dir(out_dir: Path, beta: float, seed: int) -> Path:
    return out_dir / f"beta{beta:g}_seed{seed}"


def write_comparison(path: Path | str, results: list[RunResult]) -> None:
    """Per-beta medians across seeds. Runs that never reached k-coverage are
    excluded from the iteration median and counted in covered_runs."""
    betas = sorted({r.beta for r in results})
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "beta",
                "runs",
                "covered_runs",
                "median_iterations",
                "median_visit_max",
                "median_visit_mean",
                "median_comm_mean",
                "median_comm_max",
            ]
        )
        for beta in betas:
            group = [r.summary for r in results if r.beta == beta]
            iters = [s.iterations_to_k for s in group if s.iterations_to_k is not None]
            writer.writerow(
                [
                    f"{beta:g}",
                    len(group),
                    len(iters),
                    f"{median(iters):g}" if iters else "",
                    f"{median(s.visit_max for s in group):g}",
                    f"{median(s.visit_mean for s in group):.6f}",
                    f"{median(s.comm_cost_mean for s in group):.6f}",
                    f"{median(s.comm_cost_max for s in group):.6f}",
                ]
            )


def run_experiment(cfg: ScenarioConfig, out_dir: Path | str) -> list[RunResult]:
    """Run every (beta, seed) pair, write per-run CSVs and the cross-run
    comparison table; returns results in sweep order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results: list[RunResult] = []
    for beta in cfg.betas:
        for seed in cfg.seeds:
            result = run_single(cfg, beta, seed)
            results.append(result)
            run_dir = _run_dir(out, beta, seed)
            run_dir.mkdir(parents=True, exist_ok=True)
            write_visit_grid(run_dir / "visits.csv", result.tally, result.graph)
            write_round_table(run_dir / "rounds.csv", result.records)
            write_summary(run_dir / "summary.txt", result.summary)
            s = result.summary
            log.info(
                "beta=%g seed=%d rounds=%d iterations_to_k=%s visit_max=%d comm_mean=%.2f",
                beta,
                seed,
                len(result.records),
                s.iterations_to_k,
                s.visit_max,
                s.comm_cost_mean,
            )
    write_comparison(out / "comparison.csv", results)
    return results
