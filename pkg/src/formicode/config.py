"""JSON experiment configuration: schema, parsing and canonical hashing.

Example::

    {
      "schema_version": 1,
      "seed": 7,
      "trials_per_stage": 300,
      "per_symbol_decode_error": 0.02,
      "maze": {"kind": "comb", "layout": "horizontal", "branch_count": 30},
      "time_model": {"a": 6.5, "b": 5.0, "noise_sd": 5.0},
      "stages": [
        {"distribution": {"kind": "uniform"}, "coding": {"policy": "unitary"}},
        {"distribution": {"kind": "anchored", "anchors": [10, 20],
                          "anchor_probability": "1/3"}},
        {"distribution": {"kind": "uniform"},
         "coding": {"policy": "anchor", "anchors": [10, 20]}}
      ]
    }

Probabilities may be numbers or rational strings such as ``"1/84"``.
Unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import jsonschema

from .coding import MessageDistribution, TimeModel
from .maze import COMB_LAYOUTS, BinaryTreeMaze, CombMaze
from .simulation import POLICIES, CodingPolicy, ExperimentConfig, StagePlan

SCHEMA_VERSION = 1

_PROB = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*\d+\s*(/\s*\d+\s*)?$"}]}

_MAZE = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "binary_tree"},
                "depth": {"type": "integer", "minimum": 1},
            },
            "required": ["kind", "depth"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "comb"},
                "layout": {"enum": list(COMB_LAYOUTS)},
                "branch_count": {"type": "integer", "minimum": 2},
                "geometry": {"type": "object"},
            },
            "required": ["kind", "branch_count"],
            "additionalProperties": False,
        },
    ]
}

_DISTRIBUTION = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "uniform"}},
            "required": ["kind"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "anchored"},
                "anchors": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                "anchor_probability": _PROB,
            },
            "required": ["kind", "anchors", "anchor_probability"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "explicit"},
                "probabilities": {
                    "type": "object",
                    "patternProperties": {r"^\d+$": _PROB},
                    "additionalProperties": False,
                    "minProperties": 1,
                },
            },
            "required": ["kind", "probabilities"],
            "additionalProperties": False,
        },
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "trials_per_stage": {"type": "integer", "minimum": 1},
        "per_symbol_decode_error": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "travel_time_s": {"type": "number", "minimum": 0},
        "check_time_s": {"type": "number", "minimum": 0},
        "maze": _MAZE,
        "time_model": {
            "type": "object",
            "properties": {
                "a": {"type": "number", "exclusiveMinimum": 0},
                "b": {"type": "number"},
                "noise_sd": {"type": "number", "minimum": 0},
                "operating_range": {
                    "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2,
                },
            },
            "required": ["a", "b"],
            "additionalProperties": False,
        },
        "stages": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "distribution": _DISTRIBUTION,
                    "coding": {
                        "type": "object",
                        "properties": {
                            "policy": {"enum": list(POLICIES)},
                            "anchors": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                            "anchor_name_length": {"type": "number", "minimum": 0},
                        },
                        "required": ["policy"],
                        "additionalProperties": False,
                    },
                    "maze": _MAZE,
                },
                "required": ["distribution"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema_version", "maze", "time_model", "stages"],
    "additionalProperties": False,
}


class ConfigError(ValueError):
    pass


def _where(path) -> str:
    parts = []
    for p in path:
        parts.append(f"[{p}]" if isinstance(p, int) else f".{p}")
    return "config" + "".join(parts)


def _stage_name(path) -> str | None:
    path = list(path)
    if len(path) >= 2 and path[0] == "stages" and isinstance(path[1], int):
        return f"stage {path[1] + 1}"
    return None


def _maze_from_dict(d: dict):
    if d["kind"] == "binary_tree":
        return BinaryTreeMaze(d["depth"])
    return CombMaze(
        d.get("layout", "horizontal"),
        d["branch_count"],
        geometry=tuple(sorted(d.get("geometry", {}).items())),
    )


def _distribution(d: dict, maze) -> MessageDistribution:
    goals = list(maze.goals())
    if d["kind"] == "uniform":
        return MessageDistribution.uniform(goals)
    if d["kind"] == "anchored":
        return MessageDistribution.anchored(goals, d["anchors"], Fraction(d["anchor_probability"]))
    return MessageDistribution(
        {int(k): Fraction(v) if isinstance(v, str) else v for k, v in d["probabilities"].items()}
    )


def config_from_dict(raw: dict, seed_override: int | None = None) -> ExperimentConfig:
    """Validate ``raw`` against the schema and build an ExperimentConfig.

    Raises ConfigError with a location (and stage number when relevant).
    """
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        stage = _stage_name(err.absolute_path)
        prefix = f"{stage}: " if stage else ""
        raise ConfigError(f"{prefix}{_where(err.absolute_path)}: {err.message}")

    try:
        maze = _maze_from_dict(raw["maze"])
        stages = []
        for n, s in enumerate(raw["stages"], 1):
            try:
                stage_maze = _maze_from_dict(s["maze"]) if "maze" in s else None
                dist = _distribution(s["distribution"], stage_maze or maze)
                c = s.get("coding", {"policy": "unitary"})
                policy = CodingPolicy(
                    c["policy"], c.get("anchors"), c.get("anchor_name_length", 1.0)
                )
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"stage {n}: {exc}") from None
            stages.append(StagePlan(dist, policy, stage_maze))
        tm = raw["time_model"]
        time_model = TimeModel(
            tm["a"], tm["b"], tm.get("noise_sd", 10.0),
            tuple(tm["operating_range"]) if "operating_range" in tm else None,
        )
        seed = raw.get("seed", 0) if seed_override is None else seed_override
        return ExperimentConfig(
            maze=maze,
            stages=stages,
            time_model=time_model,
            per_symbol_decode_error=raw.get("per_symbol_decode_error", 0.02),
            trials_per_stage=raw.get("trials_per_stage", 100),
            seed=seed,
            travel_time_s=raw.get("travel_time_s", 60.0),
            check_time_s=raw.get("check_time_s", 15.0),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, seed_override: int | None = None):
    """Read a JSON config file; returns ``(raw_dict, ExperimentConfig)``."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return raw, config_from_dict(raw, seed_override)


def maze_to_dict(maze) -> dict:
    if isinstance(maze, BinaryTreeMaze):
        return {"kind": "binary_tree", "depth": maze.depth}
    d = {"kind": "comb", "layout": maze.layout, "branch_count": maze.branch_count}
    if maze.geometry:
        d["geometry"] = dict(maze.geometry)
    return d


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(raw: dict) -> str:
    return hashlib.sha256(canonical_json(raw).encode("utf-8")).hexdigest()
