"""Scout/forager trial simulation.

A trial: draw the goal from the stage distribution, let the scout encode
it, time the contact with the team, pass the message through a noisy
channel, and let the team search from wherever it decoded.

Each trial draws from its own generator seeded by ``(seed, trial_id)``, so
any subset of trials can be rerun, or run in any order, with identical
results.
"""

from __future__ import annotations

import bisect
import itertools
import math
import statistics
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import coding
from .coding import AnchorScheme, MessageDistribution, TimeModel
from .maze import BinaryTreeMaze, CombMaze, Maze, leaf_to_route, route_to_leaf

POLICIES = ("unitary", "raw-route", "compressed-route", "anchor", "optimal-prefix")
SEARCH_BUDGET_S = 30 * 60.0


@dataclass(frozen=True)
class CodingPolicy:
    """Which scheme the scout uses in a stage.

    For ``anchor`` with ``anchors=None`` the anchors are taken from the most
    recent earlier stage with a non-uniform goal distribution: its most
    probable goals.
    """

    name: str = "unitary"
    anchors: tuple | None = None
    anchor_name_length: float = 1.0

    def __post_init__(self):
        if self.name not in POLICIES:
            raise ValueError(f"unknown coding policy {self.name!r}; expected one of {POLICIES}")
        if self.anchors is not None:
            object.__setattr__(self, "anchors", tuple(self.anchors))
            if self.name != "anchor":
                raise ValueError(f"anchors given for non-anchor policy {self.name!r}")


@dataclass(frozen=True)
class StagePlan:
    goal_distribution: MessageDistribution
    coding: CodingPolicy = CodingPolicy()
    maze: Maze | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    maze: Maze
    stages: tuple
    time_model: TimeModel
    per_symbol_decode_error: float = 0.02
    trials_per_stage: int = 100
    seed: int = 0
    travel_time_s: float = 60.0
    check_time_s: float = 15.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ValueError("experiment needs at least one stage")
        if not 0 <= self.per_symbol_decode_error < 1:
            raise ValueError(
                f"per_symbol_decode_error must be in [0, 1), got {self.per_symbol_decode_error}"
            )
        if self.trials_per_stage < 1:
            raise ValueError("trials_per_stage must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.travel_time_s < 0 or self.check_time_s < 0:
            raise ValueError("search times must be non-negative")
        contexts = []
        for idx in range(len(self.stages)):
            try:
                contexts.append(_build_context(self, idx))
            except ValueError as exc:
                raise ValueError(f"stage {idx + 1}: {exc}") from None
        object.__setattr__(self, "_contexts", tuple(contexts))

    def stage_maze(self, stage_index: int) -> Maze:
        return self.stages[stage_index].maze or self.maze

    def trial_ids(self, stage_index: int) -> range:
        start = stage_index * self.trials_per_stage + 1
        return range(start, start + self.trials_per_stage)


@dataclass(frozen=True)
class _StageContext:
    maze: Maze
    goals: tuple
    cumulative: tuple
    policy: str
    scheme: AnchorScheme | None = None
    prefix_codes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    stage: int
    goal: int
    code_length: float
    contact_duration: float
    decoded_goal: int
    success: bool
    search_time: float


@dataclass(frozen=True)
class SearchComparison:
    informed_times: list
    naive_times: list
    informed_positions: list
    naive_positions: list


def _is_uniform(dist: MessageDistribution) -> bool:
    return len(set(dist.probabilities.values())) == 1


def _learned_anchors(config: ExperimentConfig, stage_index: int) -> tuple:
    for prev in reversed(config.stages[:stage_index]):
        dist = prev.goal_distribution
        if not _is_uniform(dist):
            top = max(dist.probabilities.values())
            return tuple(sorted(g for g, p in dist.probabilities.items() if p == top))
    raise ValueError("anchor policy without anchors needs an earlier non-uniform stage")


def _build_context(config, stage_index) -> _StageContext:
    stage = config.stages[stage_index]
    maze = stage.maze or config.maze
    dist = stage.goal_distribution
    valid = set(maze.goals())
    outside = [g for g in dist.probabilities if g not in valid]
    if outside:
        raise ValueError(f"goal distribution has goals outside the maze: {sorted(outside)[:5]}")
    goals = tuple(dist.support())
    weights = [float(dist.probabilities[g]) for g in goals]
    cumulative = tuple(itertools.accumulate(weights))

    policy = stage.coding.name
    scheme = None
    prefix_codes = {}
    if policy in ("unitary", "anchor") and not isinstance(maze, CombMaze):
        raise ValueError(f"{policy} coding needs a comb maze")
    if policy in ("raw-route", "compressed-route") and not isinstance(maze, BinaryTreeMaze):
        raise ValueError(f"{policy} coding needs a binary-tree maze")
    if policy == "anchor":
        anchors = stage.coding.anchors or _learned_anchors(config, stage_index)
        scheme = AnchorScheme(anchors, stage.coding.anchor_name_length)
        scheme.check_range(maze.branch_count)
    if policy == "optimal-prefix":
        positive = MessageDistribution({g: dist.probabilities[g] for g in goals})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", coding.DegenerateCodeWarning)
            prefix_codes = coding.canonical_code(coding.optimal_prefix_lengths(positive))
    return _StageContext(maze, goals, cumulative, policy, scheme, prefix_codes)


def trial_rng(seed: int, trial_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_id,)))


def encode_goal(goal: int, ctx: _StageContext) -> coding.CodeWord:
    if ctx.policy == "unitary":
        return coding.unitary_encode(goal)
    if ctx.policy == "anchor":
        return coding.anchor_encode(goal, ctx.scheme)
    if ctx.policy == "optimal-prefix":
        return coding.prefix_encode(goal, ctx.prefix_codes)
    route = leaf_to_route(BinaryTreeMaze(ctx.maze.depth, goal))
    if ctx.policy == "compressed-route":
        return coding.compress_route(route)
    return coding.CodeWord(tuple(route.turns), len(route), "raw")


def decode_word(word: coding.CodeWord, ctx: _StageContext) -> int:
    if ctx.policy == "unitary":
        return coding.unitary_decode(word)
    if ctx.policy == "anchor":
        return coding.anchor_decode(word)
    if ctx.policy == "optimal-prefix":
        return coding.prefix_decode(word, ctx.prefix_codes)
    if ctx.policy == "compressed-route":
        return route_to_leaf(coding.decompress(word))
    return route_to_leaf(word.text)


def scan_order(start: int, goals) -> list:
    """Positions visited searching outward from ``start``: 0, +1, -1, +2, -2, ..."""
    lo, hi = min(goals), max(goals)
    order = [start]
    for step in range(1, hi - lo + 1):
        for pos in (start + step, start - step):
            if lo <= pos <= hi:
                order.append(pos)
    return order


def positions_checked(decoded: int, goal: int, goals) -> int:
    return scan_order(decoded, goals).index(goal) + 1


def _search_time(config: ExperimentConfig, positions: int) -> float:
    return config.travel_time_s + (positions - 1) * config.check_time_s


def _transmit(goal, ctx, config, rng):
    """Encode, time and decode one message; returns (word, duration, decoded)."""
    word = encode_goal(goal, ctx)
    duration = coding.transmission_time(word, config.time_model, rng)
    n_symbols = math.ceil(word.length)
    corrupted = bool(np.any(rng.random(n_symbols) < config.per_symbol_decode_error))
    if corrupted:
        # a garbled message leaves the team guessing among all positions
        decoded = int(rng.choice(list(ctx.maze.goals())))
    else:
        decoded = decode_word(word, ctx)
    return word, duration, decoded


def _sample_goal(ctx: _StageContext, rng) -> int:
    u = rng.random() * ctx.cumulative[-1]
    idx = min(bisect.bisect_right(ctx.cumulative, u), len(ctx.goals) - 1)
    return ctx.goals[idx]


def run_trial(config: ExperimentConfig, stage_index: int, trial_id: int, rng=None) -> TrialRecord:
    """Run one trial. Without ``rng`` the generator comes from ``(seed, trial_id)``."""
    if not 0 <= stage_index < len(config.stages):
        raise IndexError(f"stage index {stage_index} out of range")
    ctx = config._contexts[stage_index]
    if rng is None:
        rng = trial_rng(config.seed, trial_id)
    goal = _sample_goal(ctx, rng)
    word, duration, decoded = _transmit(goal, ctx, config, rng)
    positions = positions_checked(decoded, goal, ctx.maze.goals())
    return TrialRecord(
        trial_id=trial_id,
        stage=stage_index + 1,
        goal=goal,
        code_length=float(word.length),
        contact_duration=float(duration),
        decoded_goal=decoded,
        success=decoded == goal,
        search_time=_search_time(config, positions),
    )


def run_experiment(config: ExperimentConfig) -> list:
    return [
        run_trial(config, s, tid)
        for s in range(len(config.stages))
        for tid in config.trial_ids(s)
    ]


def expected_naive_positions(k: int) -> float:
    """Mean positions a searcher visits in uniform random order before the goal."""
    return (k + 1) / 2


def naive_vs_informed(config: ExperimentConfig, rng=None, n_pairs=None, stage_index=0):
    """Search times of informed foragers against naive ones, capped at 30 min.

    Informed foragers decode the scout's message (errors included) and scan
    outward from the decoded position. Naive foragers visit positions in a
    uniformly random order without repeats.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0, stage_index)))
    ctx = config._contexts[stage_index]
    n_pairs = n_pairs or config.trials_per_stage
    goals = list(ctx.maze.goals())
    out = SearchComparison([], [], [], [])
    for _ in range(n_pairs):
        goal = _sample_goal(ctx, rng)
        _, _, decoded = _transmit(goal, ctx, config, rng)
        informed = positions_checked(decoded, goal, goals)
        naive = int(np.flatnonzero(rng.permutation(goals) == goal)[0]) + 1
        out.informed_positions.append(informed)
        out.naive_positions.append(naive)
        out.informed_times.append(min(_search_time(config, informed), SEARCH_BUDGET_S))
        out.naive_times.append(min(_search_time(config, naive), SEARCH_BUDGET_S))
    return out


def summarize(records) -> dict:
    """Per-stage means, success rates and time fits."""
    from .stats import linear_fit

    out = {}
    for stage, group in itertools.groupby(sorted(records, key=lambda r: r.stage), key=lambda r: r.stage):
        group = list(group)
        times = [r.contact_duration for r in group]
        entry = {
            "trials": len(group),
            "mean_contact_duration_s": statistics.fmean(times),
            "success_rate": sum(r.success for r in group) / len(group),
            "mean_search_time_s": statistics.fmean(r.search_time for r in group),
            "mean_code_length": statistics.fmean(r.code_length for r in group),
        }
        for key, xs in (("fit_time_vs_goal", [r.goal for r in group]),
                        ("fit_time_vs_code_length", [r.code_length for r in group])):
            try:
                fit = linear_fit(xs, times)
            except ValueError:
                entry[key] = None
            else:
                entry[key] = {"a": fit.a, "b": fit.b, "r": fit.r, "n": fit.n,
                              "degenerate": fit.degenerate}
        out[str(stage)] = entry
    return out
