"""Maze geometries treated as information sources.

A binary-tree maze with ``depth`` forks hides its goal among ``2**depth``
leaves, so locating it takes exactly ``depth`` bits. A comb ("counting")
maze hides it among ``branch_count`` numbered branches.

Leaves are numbered so that a route reads as a binary number: ``L`` is 0,
``R`` is 1, and the first fork is the most significant digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

TURNS = ("L", "R")
COMB_LAYOUTS = ("horizontal", "vertical", "circle")


@dataclass(frozen=True)
class BinaryTreeMaze:
    depth: int
    goal_leaf: int = 0

    def __post_init__(self):
        if isinstance(self.depth, bool) or not isinstance(self.depth, int):
            raise TypeError(f"depth must be an integer, got {self.depth!r}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if not 0 <= self.goal_leaf < 2**self.depth:
            raise ValueError(
                f"goal_leaf {self.goal_leaf} outside [0, {2**self.depth})"
            )

    @property
    def leaf_count(self) -> int:
        return 2**self.depth

    def goals(self) -> range:
        """All goal positions (leaf indices)."""
        return range(self.leaf_count)


@dataclass(frozen=True)
class CombMaze:
    """Trunk with ``branch_count`` equally spaced branches numbered from 1.

    ``geometry`` holds descriptive metadata (branch length, spacing). It is
    never used when computing times.
    """

    layout: str
    branch_count: int
    goal_branch: int = 1
    geometry: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.layout not in COMB_LAYOUTS:
            raise ValueError(f"layout must be one of {COMB_LAYOUTS}, got {self.layout!r}")
        if isinstance(self.branch_count, bool) or not isinstance(self.branch_count, int):
            raise TypeError(f"branch_count must be an integer, got {self.branch_count!r}")
        if self.branch_count < 2:
            raise ValueError(f"branch_count must be >= 2, got {self.branch_count}")
        if not 1 <= self.goal_branch <= self.branch_count:
            raise ValueError(
                f"goal_branch {self.goal_branch} outside [1, {self.branch_count}]"
            )

    def goals(self) -> range:
        return range(1, self.branch_count + 1)


Maze = Union[BinaryTreeMaze, CombMaze]


@dataclass(frozen=True)
class Route:
    turns: str = ""

    def __post_init__(self):
        bad = set(self.turns) - set(TURNS)
        if bad:
            raise ValueError(f"route may only contain L and R, found {sorted(bad)}")

    def __len__(self):
        return len(self.turns)

    def __str__(self):
        return self.turns


def as_route(route) -> Route:
    return route if isinstance(route, Route) else Route(str(route))


def leaf_to_route(maze: BinaryTreeMaze) -> Route:
    bits = format(maze.goal_leaf, f"0{maze.depth}b")
    return Route(bits.replace("0", "L").replace("1", "R"))


def route_to_leaf(route) -> int:
    turns = as_route(route).turns
    if not turns:
        return 0
    return int(turns.replace("L", "0").replace("R", "1"), 2)


def information_bits(maze: Maze) -> float:
    if isinstance(maze, BinaryTreeMaze):
        return float(maze.depth)
    return math.log2(maze.branch_count)


def total_routes(max_depth: int, int_bits: int | None = None) -> int:
    """Number of distinct routes over all trees of depth 1..max_depth.

    Python integers never wrap; pass ``int_bits`` to check that the count
    fits a signed integer of that width (e.g. 64 for export) and raise
    OverflowError otherwise.
    """
    if isinstance(max_depth, bool) or not isinstance(max_depth, int):
        raise TypeError(f"max_depth must be an integer, got {max_depth!r}")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    count = sum(2**i for i in range(1, max_depth + 1))
    if int_bits is not None and count >= 2 ** (int_bits - 1):
        raise OverflowError(
            f"total_routes({max_depth}) = {count} does not fit a signed {int_bits}-bit integer"
        )
    return count


def chance_probability(maze: Maze) -> Fraction:
    """Probability that a searcher without information picks the goal first try."""
    if isinstance(maze, BinaryTreeMaze):
        return Fraction(1, 2**maze.depth)
    return Fraction(1, maze.branch_count)
