"""Scenario configuration: YAML schema, validation and round-trip IO."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .graph import Rect
from .sim import EventDirective, TargetSpec


class ConfigError(ValueError):
    """Invalid scenario configuration; collects per-field messages."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("invalid scenario config:\n" + "\n".join(f"  {e}" for e in errors))


@dataclass(frozen=True)
class MapConfig:
    width: float
    height: float
    spacing: float
    base: tuple[float, float]


@dataclass(frozen=True)
class CommConfig:
    d_comm_max: float
    c_comm_max: float
    obstacle_weight: float | None = None  # None = 0.2 * c_comm_max
    clutter_radius: float | None = None  # None = spacing
    d_comm_margin: float = 1.0  # < 1 tightens links to leave slack in chains


@dataclass(frozen=True)
class RandomObstacles:
    count: int
    seed: int
    min_size: float
    max_size: float


@dataclass(frozen=True)
class ScenarioConfig:
    map: MapConfig
    comm: CommConfig
    fleet_size: int
    betas: tuple[float, ...]
    seeds: tuple[int, ...]
    k: int = 1
    max_rounds: int = 1000
    window: int = 0
    obstacles: tuple[Rect, ...] = ()
    random_obstacles: RandomObstacles | None = None
    targets: tuple[TargetSpec, ...] = ()
    events: tuple[EventDirective, ...] = ()


def _require(d: dict, key: str, path: str, errors: list[str]):
    if key not in d:
        errors.append(f"{path}.{key}: missing")
        return None
    return d[key]


def _num(value, path: str, errors: list[str], minimum=None, strict=False) -> float | None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        errors.append(f"{path}: expected a number, got {value!r}")
        return None
    v = float(value)
    if minimum is not None and (v <= minimum if strict else v < minimum):
        op = ">" if strict else ">="
        errors.append(f"{path}: must be {op} {minimum}, got {v}")
        return None
    return v


def _int(value, path: str, errors: list[str], minimum=None) -> int | None:
    if not isinstance(value, int) or isinstance(value, bool):
        errors.append(f"{path}: expected an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        errors.append(f"{path}: must be >= {minimum}, got {value}")
        return None
    return value


def config_from_dict(data: dict) -> ScenarioConfig:
    """Build and validate a ScenarioConfig; raises ConfigError listing every
    bad field by path."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a mapping"])

    map_raw = _require(data, "map", "config", errors) or {}
    width = _num(_require(map_raw, "width", "map", errors), "map.width", errors, 0, strict=True)
    height = _num(_require(map_raw, "height", "map", errors), "map.height", errors, 0, strict=True)
    spacing = _num(_require(map_raw, "spacing", "map", errors), "map.spacing", errors, 0, strict=True)
    base_raw = _require(map_raw, "base", "map", errors)
    base = None
    if base_raw is not None:
        if not (isinstance(base_raw, (list, tuple)) and len(base_raw) == 2):
            errors.append(f"map.base: expected [x, y], got {base_raw!r}")
        else:
            bx = _num(base_raw[0], "map.base[0]", errors, 0)
            by = _num(base_raw[1], "map.base[1]", errors, 0)
            if bx is not None and by is not None:
                base = (bx, by)
    if width and spacing and spacing > width:
        errors.append(f"map.spacing: {spacing} exceeds map.width {width}")
    if height and spacing and spacing > height:
        errors.append(f"map.spacing: {spacing} exceeds map.height {height}")
    if base and width and height and not (base[0] <= width and base[1] <= height):
        errors.append(f"map.base: {base} outside the map")

    comm_raw = _require(data, "comm", "config", errors) or {}
    d_comm_max = _num(
        _require(comm_raw, "d_comm_max", "comm", errors), "comm.d_comm_max", errors, 0, strict=True
    )
    c_comm_max = _num(
        _require(comm_raw, "c_comm_max", "comm", errors), "comm.c_comm_max", errors, 0, strict=True
    )
    obstacle_weight = None
    if comm_raw.get("obstacle_weight") is not None:
        obstacle_weight = _num(comm_raw["obstacle_weight"], "comm.obstacle_weight", errors, 0)
    clutter_radius = None
    if comm_raw.get("clutter_radius") is not None:
        clutter_radius = _num(comm_raw["clutter_radius"], "comm.clutter_radius", errors, 0, strict=True)
    d_comm_margin = _num(comm_raw.get("d_comm_margin", 1.0), "comm.d_comm_margin", errors, 0, strict=True)

    fleet_size = _int(_require(data, "fleet_size", "config", errors), "fleet_size", errors, 1)

    betas_raw = _require(data, "betas", "config", errors)
    betas: list[float] = []
    if isinstance(betas_raw, (list, tuple)) and betas_raw:
        for i, b in enumerate(betas_raw):
            v = _num(b, f"betas[{i}]", errors, 0)
            if v is not None:
                betas.append(v)
    elif betas_raw is not None:
        errors.append("betas: expected a non-empty list")

    seeds_raw = _require(data, "seeds", "config", errors)
    seeds: list[int] = []
    if isinstance(seeds_raw, (list, tuple)) and seeds_raw:
        for i, s in enumerate(seeds_raw):
            v = _int(s, f"seeds[{i}]", errors)
            if v is not None:
                seeds.append(v)
    elif seeds_raw is not None:
        errors.append("seeds: expected a non-empty list")

    k = _int(data.get("k", 1), "k", errors, 1)
    max_rounds = _int(data.get("max_rounds", 1000), "max_rounds", errors, 1)
    window = _int(data.get("window", 0), "window", errors, 0)

    obstacles: list[Rect] = []
    random_obstacles = None
    obs_raw = data.get("obstacles", [])
    if isinstance(obs_raw, dict) and "random" in obs_raw:
        rnd = obs_raw["random"]
        count = _int(rnd.get("count"), "obstacles.random.count", errors, 0)
        seed = _int(rnd.get("seed", 0), "obstacles.random.seed", errors)
        min_size = _num(rnd.get("min_size"), "obstacles.random.min_size", errors, 0, strict=True)
        max_size = _num(rnd.get("max_size"), "obstacles.random.max_size", errors, 0, strict=True)
        if None not in (count, seed, min_size, max_size):
            if max_size < min_size:
                errors.append("obstacles.random.max_size: smaller than min_size")
            else:
                random_obstacles = RandomObstacles(count, seed, min_size, max_size)
    elif isinstance(obs_raw, (list, tuple)):
        for i, r in enumerate(obs_raw):
            path = f"obstacles[{i}]"
            if not isinstance(r, dict):
                errors.append(f"{path}: expected a mapping with x_min/y_min/x_max/y_max")
                continue
            vals = [_num(r.get(kk), f"{path}.{kk}", errors) for kk in ("x_min", "y_min", "x_max", "y_max")]
            if None not in vals:
                try:
                    obstacles.append(Rect(*vals))
                except ValueError as exc:
                    errors.append(f"{path}: {exc}")
    else:
        errors.append("obstacles: expected a list of rectangles or {random: {...}}")

    targets: list[TargetSpec] = []
    for i, t in enumerate(data.get("targets", []) or []):
        path = f"targets[{i}]"
        if not isinstance(t, dict):
            errors.append(f"{path}: expected a mapping with node/service_rounds")
            continue
        node = _int(t.get("node"), f"{path}.node", errors, 0)
        rounds = _int(t.get("service_rounds"), f"{path}.service_rounds", errors, 1)
        if None not in (node, rounds):
            targets.append(TargetSpec(node=node, service_rounds=rounds))

    events: list[EventDirective] = []
    for i, e in enumerate(data.get("events", []) or []):
        path = f"events[{i}]"
        if not isinstance(e, dict):
            errors.append(f"{path}: expected a mapping with round/action/uav")
            continue
        rnd_i = _int(e.get("round"), f"{path}.round", errors, 1)
        uav = _int(e.get("uav"), f"{path}.uav", errors, 0)
        action = e.get("action")
        node = e.get("node")
        if node is not None:
            node = _int(node, f"{path}.node", errors, 0)
        if action not in ("remove", "detach", "reintegrate"):
            errors.append(f"{path}.action: expected remove|detach|reintegrate, got {action!r}")
            continue
        if None not in (rnd_i, uav):
            try:
                events.append(EventDirective(round=rnd_i, action=action, uav=uav, node=node))
            except ValueError as exc:
                errors.append(f"{path}: {exc}")

    if errors:
        raise ConfigError(errors)

    return ScenarioConfig(
        map=MapConfig(width=width, height=height, spacing=spacing, base=base),
        comm=CommConfig(
            d_comm_max=d_comm_max,
            c_comm_max=c_comm_max,
            obstacle_weight=obstacle_weight,
            clutter_radius=clutter_radius,
            d_comm_margin=d_comm_margin,
        ),
        fleet_size=fleet_size,
        betas=tuple(betas),
        seeds=tuple(seeds),
        k=k,
        max_rounds=max_rounds,
        window=window,
        obstacles=tuple(obstacles),
        random_obstacles=random_obstacles,
        targets=tuple(targets),
        events=tuple(events),
    )


def config_to_dict(cfg: ScenarioConfig) -> dict:
    data: dict = {
        "map": {
            "width": cfg.map.width,
            "height": cfg.map.height,
            "spacing": cfg.map.spacing,
            "base": list(cfg.map.base),
        },
        "comm": {
            "d_comm_max": cfg.comm.d_comm_max,
            "c_comm_max": cfg.comm.c_comm_max,
            "d_comm_margin": cfg.comm.d_comm_margin,
        },
        "fleet_size": cfg.fleet_size,
        "betas": list(cfg.betas),
        "seeds": list(cfg.seeds),
        "k": cfg.k,
        "max_rounds": cfg.max_rounds,
        "window": cfg.window,
    }
    if cfg.comm.obstacle_weight is not None:
        data["comm"]["obstacle_weight"] = cfg.comm.obstacle_weight
    if cfg.comm.clutter_radius is not None:
        data["comm"]["clutter_radius"] = cfg.comm.clutter_radius
    if cfg.random_obstacles is not None:
        ro = cfg.random_obstacles
        data["obstacles"] = {
            "random": {
                "count": ro.count,
                "seed": ro.seed,
                "min_size": ro.min_size,
                "max_size": ro.max_size,
            }
        }
    else:
        data["obstacles"] = [
            {"x_min": r.x_min, "y_min": r.y_min, "x_max": r.x_max, "y_max": r.y_max}
            for r in cfg.obstacles
        ]
    data["targets"] = [
        {"node": t.node, "service_rounds": t.service_rounds} for t in cfg.targets
    ]
    data["events"] = [
        {"round": e.round, "action": e.action, "uav": e.uav}
        | ({"node": e.node} if e.node is not None else {})
        for e in cfg.events
    ]
    return data


def dumps_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=True)


def load_config(path: Path | str) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return config_from_dict(data)


def save_config(cfg: ScenarioConfig, path: Path | str) -> None:
    Path(path).write_text(dumps_config(cfg))
