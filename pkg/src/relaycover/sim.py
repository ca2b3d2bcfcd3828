"""Round-based swarm engine: the master moves, the swarm re-forms the chain.

Each round runs in a fixed order: the master commits a move, the hybrid
relay-coverage chain is solved for it (with veto-and-retry if no chain fits
the budget), chain UAVs occupy the chain interior, every occupied node
records a visit, and secondary-task / membership events are processed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .coverage import VisitCounts, hybrid_edge_cost, node_count_step, record_visit
from .graph import NavGraph, NodeId, comm_cost
from .metrics import RoundRecord, coverage_targets
from .relay import Chain, chain_cost, dual_ascent_chain

MASTER = "master"
CHAIN = "chain"
DETACHED = "detached"
DEPARTED = "departed"

TARGET_PENDING = "pending"
TARGET_ACTIVE = "active"
TARGET_DONE = "done"


@dataclass
class Uav:
    id: int
    node: NodeId
    role: str = CHAIN
    busy_rounds_remaining: int = 0
    # Stale knowledge a detached UAV navigates by until it rejoins.
    local_counts: VisitCounts | None = None


@dataclass(frozen=True)
class TargetSpec:
    node: NodeId
    service_rounds: int

    def __post_init__(self) -> None:
        if self.service_rounds < 1:
            raise ValueError("service_rounds must be positive")


@dataclass
class TargetState:
    spec: TargetSpec
    status: str = TARGET_PENDING
    uav_id: int | None = None


@dataclass
class SwarmState:
    uavs: list[Uav]
    master_target: NodeId
    round: int = 1
    chain: Chain | None = None
    halted: bool = False

    def uav(self, uav_id: int) -> Uav:
        for u in self.uavs:
            if u.id == uav_id:
                return u
        raise KeyError(f"no UAV with id {uav_id}")

    @property
    def master(self) -> Uav:
        masters = [u for u in self.uavs if u.role == MASTER]
        if len(masters) != 1:
            raise RuntimeError(f"expected exactly one master, found {len(masters)}")
        return masters[0]

    @property
    def n_uav_available(self) -> int:
        """Supporting-UAV budget: chain-role members."""
        return sum(1 for u in self.uavs if u.role == CHAIN)

    def active_uavs(self) -> list[Uav]:
        return [u for u in self.uavs if u.role in (MASTER, CHAIN)]


def make_swarm(g: NavGraph, fleet_size: int) -> SwarmState:
    """Fleet parked on the base node; UAV 0 starts as master."""
    if fleet_size < 1:
        raise ValueError("fleet_size must be at least 1")
    uavs = [Uav(id=i, node=g.base_node, role=MASTER if i == 0 else CHAIN) for i in range(fleet_size)]
    return SwarmState(uavs=uavs, master_target=g.base_node, chain=Chain((g.base_node,)))


def assign_chain_positions(chain: Chain, swarm: SwarmState, g: NavGraph) -> dict[int, NodeId]:
    """Match chain-interior slots to chain UAVs, greedy nearest pair first.

    Ties break by UAV id, then slot order. UAVs left without a slot hold
    position (they still count as visitors where they stand).
    """
    interior = chain.interior()
    movers = [u for u in swarm.uavs if u.role == CHAIN and u.busy_rounds_remaining == 0]
    if len(movers) < len(interior):
        raise RuntimeError(
            f"chain needs {len(interior)} interior UAVs but only {len(movers)} available"
        )
    pairs = sorted(
        (g.position(u.node).distance_to(g.position(slot)), u.id, idx)
        for u in movers
        for idx, slot in enumerate(interior)
    )
    assignment: dict[int, NodeId] = {}
    taken_slots: set[int] = set()
    for _, uav_id, idx in pairs:
        if uav_id in assignment or idx in taken_slots:
            continue
        assignment[uav_id] = interior[idx]
        taken_slots.add(idx)
        if len(taken_slots) == len(interior):
            break
    return assignment


def promote_master(swarm: SwarmState, uav_id: int) -> SwarmState:
    """Hand the master role to uav_id; the old master joins the chain pool."""
    u = swarm.uav(uav_id)
    if u.role == MASTER:
        return swarm
    if u.role != CHAIN:
        raise ValueError(f"cannot promote {u.role} UAV {uav_id}")
    swarm.master.role = CHAIN
    u.role = MASTER
    swarm.master_target = u.node
    return swarm


def _promote_replacement(swarm: SwarmState, g: NavGraph, old_node: NodeId) -> bool:
    """Promote the chain UAV nearest old_node; False if none is left."""
    pool = [u for u in swarm.uavs if u.role == CHAIN]
    if not pool:
        return False
    pos = g.position(old_node)
    nearest = min(pool, key=lambda u: (pos.distance_to(g.position(u.node)), u.id))
    nearest.role = MASTER
    swarm.master_target = nearest.node
    return True


def remove_uav(swarm: SwarmState, uav_id: int, g: NavGraph) -> SwarmState:
    """Mark a UAV departed; a departed master is replaced by the nearest
    chain UAV. Losing the last in-contact UAV halts the simulation."""
    u = swarm.uav(uav_id)
    if u.role == DEPARTED:
        raise ValueError(f"UAV {uav_id} already departed")
    was_master = u.role == MASTER
    u.role = DEPARTED
    u.busy_rounds_remaining = 0
    u.local_counts = None
    if was_master and not _promote_replacement(swarm, g, u.node):
        swarm.halted = True
    if not swarm.active_uavs():
        swarm.halted = True
    return swarm


def detach_uav(swarm: SwarmState, uav_id: int, g: NavGraph, vc: VisitCounts) -> SwarmState:
    """Take a UAV out of contact; it keeps roaming on a snapshot of the
    current counts until reintegrated."""
    u = swarm.uav(uav_id)
    if u.role not in (MASTER, CHAIN):
        raise ValueError(f"cannot detach {u.role} UAV {uav_id}")
    was_master = u.role == MASTER
    u.role = DETACHED
    u.busy_rounds_remaining = 0
    u.local_counts = vc.copy()
    if was_master and not _promote_replacement(swarm, g, u.node):
        swarm.halted = True
    if not swarm.active_uavs():
        swarm.halted = True
    return swarm


def reintegrate_uav(
    swarm: SwarmState, uav_id: int, node: NodeId, g: NavGraph, vc: VisitCounts
) -> SwarmState:
    """Bring a departed or detached UAV back into the chain pool at node.

    A detached UAV's locally gathered counts merge into the swarm's by
    element-wise max, so neither party's knowledge is undercounted.
    """
    u = swarm.uav(uav_id)
    if u.role not in (DEPARTED, DETACHED):
        raise ValueError(f"UAV {uav_id} is {u.role}, nothing to reintegrate")
    if node < 0 or node >= g.node_count:
        raise ValueError(f"node {node} not in graph")
    if node in g.obstacle_nodes:
        raise ValueError(f"node {node} is an obstacle node")
    if u.role == DETACHED and u.local_counts is not None:
        vc.merge_max(u.local_counts)
    u.role = CHAIN
    u.node = node
    u.busy_rounds_remaining = 0
    u.local_counts = None
    swarm.halted = False
    return swarm


def run_round(
    g: NavGraph,
    swarm: SwarmState,
    vc: VisitCounts,
    beta: float,
    rng_seed: int,
    targets: list[TargetState] | None = None,
    forced_move: NodeId | None = None,
    external_events: tuple[str, ...] = (),
) -> tuple[SwarmState, VisitCounts, RoundRecord]:
    """Execute one interleaved round; mutates swarm and vc in place.

    The chain solver runs with the counts as they stand at round start; the
    recorded total cost uses that same snapshot.
    """
    if swarm.halted:
        raise RuntimeError("simulation is halted")
    if not swarm.active_uavs():
        raise ValueError("swarm has no active UAVs")
    targets = targets if targets is not None else []
    master = swarm.master
    rng = random.Random(rng_seed)
    events: list[str] = list(external_events)
    edge_cost = hybrid_edge_cost(g, vc, beta)
    budget = swarm.n_uav_available + 1  # chain slots: supporters plus the master itself
    busy_at_start = [u.id for u in swarm.active_uavs() if u.busy_rounds_remaining > 0]

    if master.busy_rounds_remaining > 0:
        candidates = [master.node]
        events.append("master_busy")
    elif forced_move is not None:
        candidates = [forced_move]
    else:
        nbrs = g.neighbors[master.node]
        if not nbrs:
            raise ValueError(f"master node {master.node} has no neighbors")
        pick = node_count_step(g, master.node, vc, rng.getrandbits(32))
        rest = sorted((n for n in nbrs if n != pick), key=lambda n: (vc.count(n), n))
        candidates = [pick, *rest]

    solved = None
    for cand in candidates:
        result = dual_ascent_chain(g, cand, budget, edge_cost)
        if result.ok:
            solved = result
            break
        events.append(f"veto={cand}:{result.failure_reason}")

    if solved is None:
        # Master stays put and the previous chain is retained.
        events.append("stall")
        chain = swarm.chain
    else:
        chain = solved.chain
        swarm.chain = chain
        swarm.master_target = chain.target
        master.node = chain.target
        for uav_id, node in assign_chain_positions(chain, swarm, g).items():
            swarm.uav(uav_id).node = node

    if chain is not None:
        round_comm = chain_cost(g, chain, lambda u, v: comm_cost(g, u, v))
        round_total = chain_cost(g, chain, edge_cost)
    else:
        round_comm = 0.0
        round_total = 0.0

    occupied = tuple(sorted(u.node for u in swarm.active_uavs()))
    for n in occupied:
        record_visit(vc, n)

    # Detached UAVs roam on their own stale knowledge.
    for u in swarm.uavs:
        if u.role == DETACHED and u.local_counts is not None:
            if g.neighbors[u.node]:
                u.node = node_count_step(g, u.node, u.local_counts, rng.getrandbits(32))
            record_visit(u.local_counts, u.node)

    # Secondary tasks: at most one busy UAV at a time; the one that engages
    # is promoted to master and hovers until its timer runs out.
    busy = any(u.busy_rounds_remaining > 0 for u in swarm.active_uavs())
    for u in sorted(swarm.active_uavs(), key=lambda u: u.id):
        for t in targets:
            if t.status != TARGET_PENDING or t.spec.node != u.node:
                continue
            if busy:
                events.append(f"target_deferred={t.spec.node}")
                continue
            promote_master(swarm, u.id)
            u.busy_rounds_remaining = t.spec.service_rounds
            t.status = TARGET_ACTIVE
            t.uav_id = u.id
            busy = True
            events.append(f"target_engaged={t.spec.node}:uav{u.id}")

    # Tick timers of UAVs that were already busy when the round began.
    for uav_id in busy_at_start:
        u = swarm.uav(uav_id)
        if u.role not in (MASTER, CHAIN) or u.busy_rounds_remaining == 0:
            continue
        u.busy_rounds_remaining -= 1
        if u.busy_rounds_remaining == 0:
            for t in targets:
                if t.status == TARGET_ACTIVE and t.uav_id == uav_id:
                    t.status = TARGET_DONE
                    events.append(f"target_complete={t.spec.node}")

    record = RoundRecord(
        round=swarm.round,
        chain=chain,
        comm_cost=round_comm,
        total_cost=round_total,
        occupied=occupied,
        events=tuple(events),
    )
    swarm.round += 1
    return swarm, vc, record


@dataclass
class EventDirective:
    """Membership event applied at the start of a round."""

    round: int
    action: str  # remove | detach | reintegrate
    uav: int
    node: NodeId | None = None  # reintegration point

    def __post_init__(self) -> None:
        if self.action not in ("remove", "detach", "reintegrate"):
            raise ValueError(f"unknown event action {self.action!r}")
        if self.action == "reintegrate" and self.node is None:
            raise ValueError("reintegrate event needs a node")


class Simulation:
    """Deterministic engine: applies scheduled events, runs rounds, tracks
    both the planning counts (possibly windowed) and a cumulative tally for
    metrics and coverage completion."""

    def __init__(
        self,
        g: NavGraph,
        fleet_size: int,
        beta: float,
        seed: int,
        targets: tuple[TargetSpec, ...] = (),
        window: int = 0,
        events: tuple[EventDirective, ...] = (),
        master_script: dict[int, NodeId] | None = None,
    ):
        self.g = g
        self.beta = beta
        self.swarm = make_swarm(g, fleet_size)
        self.vc = VisitCounts(g.node_count, window=window)
        self.tally = self.vc if window == 0 else VisitCounts(g.node_count)
        self.targets = [TargetState(t) for t in targets]
        self.events = tuple(events)
        self.master_script = master_script or {}
        self.records: list[RoundRecord] = []
        self._rng = random.Random(seed)
        self._coverage_targets = coverage_targets(g)

    def _apply_events(self, round_index: int) -> list[str]:
        tags = []
        for ev in self.events:
            if ev.round != round_index:
                continue
            if ev.action == "remove":
                # A removed UAV abandons any secondary task it was serving.
                for t in self.targets:
                    if t.status == TARGET_ACTIVE and t.uav_id == ev.uav:
                        t.status = TARGET_PENDING
                        t.uav_id = None
                remove_uav(self.swarm, ev.uav, self.g)
            elif ev.action == "detach":
                for t in self.targets:
                    if t.status == TARGET_ACTIVE and t.uav_id == ev.uav:
                        t.status = TARGET_PENDING
                        t.uav_id = None
                detach_uav(self.swarm, ev.uav, self.g, self.vc)
            else:
                reintegrate_uav(self.swarm, ev.uav, ev.node, self.g, self.vc)
            tags.append(f"{ev.action}=uav{ev.uav}")
        return tags

    def step(self) -> RoundRecord:
        round_index = self.swarm.round
        tags = self._apply_events(round_index)
        if self.swarm.halted:
            record = RoundRecord(
                round=round_index,
                chain=None,
                comm_cost=0.0,
                total_cost=0.0,
                occupied=(),
                events=tuple(tags) + ("halted",),
            )
            self.records.append(record)
            return record
        _, _, record = run_round(
            self.g,
            self.swarm,
            self.vc,
            self.beta,
            rng_seed=self._rng.getrandbits(32),
            targets=self.targets,
            forced_move=self.master_script.get(round_index),
            external_events=tuple(tags),
        )
        if self.tally is not self.vc:
            for n in record.occupied:
                record_visit(self.tally, n)
        self.vc.commit_round()
        self.records.append(record)
        return record

    def covered(self, k: int) -> bool:
        return all(self.tally.count(n) >= k for n in self._coverage_targets)

    def run(self, k: int, max_rounds: int) -> list[RoundRecord]:
        """Run rounds until k-coverage, the round cap, or a halt."""
        while len(self.records) < max_rounds:
            record = self.step()
            if "halted" in record.events:
                break
            if self.covered(k):
                break
        return self.records
