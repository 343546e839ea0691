"""Recompute published values from the embedded tables and compare.

Each check returns a dict with the published value, the recomputed value,
the acceptance rule and a pass flag.
"""

from __future__ import annotations

from fractions import Fraction

from . import data, stats
from .coding import complexity_class, smallest_period
from .maze import total_routes

TABLE3_R = (0.92, 0.94)
TABLE3_A = (6.8, 8.0)
TABLE3_B = (-40.0, -20.0)
TABLE5_MIN_R = 0.7
BINOMIAL_BOUND = 1e-10
TABLE5_ANCHORS = (10, 20)


def _within(x, bounds) -> bool:
    lo, hi = bounds
    return lo <= x <= hi


def check_routes_126() -> dict:
    value = total_routes(6)
    return {
        "name": "routes_126",
        "published": 126,
        "recomputed": value,
        "rule": "exact",
        "pass": value == 126,
    }


def table2_groups() -> list:
    """Six-turn sequences of Table 2 grouped as constant, alternating, irregular.

    Returns a list of three lists of ``(sequence, mean_s)`` in that order.
    """
    table = data.load_table(2)
    groups = [[], [], []]
    for _, seq, mean_s, _ in table.rows:
        if len(seq) != 6:
            continue
        period = smallest_period(seq)
        groups[0 if period == 1 else 1 if period == 2 else 2].append((seq, mean_s))
    return groups


def check_table2_ordering() -> dict:
    groups = table2_groups()
    sizes = [len(g) for g in groups]
    p = stats.permutation_order_test(sizes)
    complexity_ordered = stats.groups_strictly_ordered(
        [[complexity_class(s) for s, _ in g] for g in groups]
    )
    times_ordered = stats.groups_strictly_ordered([[t for _, t in g] for g in groups])
    return {
        "name": "table2_ordering",
        "published": "1/210",
        "recomputed": str(p),
        "p_value": float(p),
        "group_sizes": sizes,
        "groups": [[s for s, _ in g] for g in groups],
        "complexity_ordered": complexity_ordered,
        "durations_ordered": times_ordered,
        "rule": "exact rational; observed durations and complexity ranks both ordered",
        "pass": p == Fraction(1, 210) and complexity_ordered and times_ordered,
    }


def check_binomial_152_117() -> dict:
    p = stats.binomial_tail(152, 117, Fraction(1, 25))
    return {
        "name": "binomial_152_117",
        "published": "< 1e-10",
        "recomputed": p,
        "rule": f"recomputed < {BINOMIAL_BOUND}",
        "pass": p < BINOMIAL_BOUND,
    }


def table3_fit() -> stats.FitResult:
    ds = data.table_to_dataset(data.load_table(3), {"x": "branch", "t": "seconds"})
    return stats.linear_fit(ds.xs, ds.ts)


def check_table3_fit() -> dict:
    fit = table3_fit()
    ok = _within(fit.r, TABLE3_R) and _within(fit.a, TABLE3_A) and _within(fit.b, TABLE3_B)
    return {
        "name": "table3_fit",
        "published": {"r": 0.93, "a": 7.3, "b": -28.9},
        "recomputed": {"r": fit.r, "a": fit.a, "b": fit.b, "n": fit.n},
        "rule": f"r in {list(TABLE3_R)}, a in {list(TABLE3_A)}, b in {list(TABLE3_B)}",
        "pass": ok,
    }


def table5_records() -> list:
    ds = data.table_to_dataset(data.load_table(5), {"x": "branch", "t": "seconds"})
    return [(int(o.x), o.t) for o in ds.records]


def check_table5_correlation() -> dict:
    table = data.load_table(5)
    printed_ok = all(
        stats.distance_to_nearest_anchor(branch, TABLE5_ANCHORS) == dist
        for branch, dist, _ in table.rows
    )
    fit = stats.anchor_distance_correlation(table5_records(), TABLE5_ANCHORS, exclude_below=4)
    return {
        "name": "table5_correlation",
        "published": {"r_third_stage": 0.80, "sample_size": 150},
        "recomputed": {"r": fit.r, "n": fit.n},
        "printed_distances_match": printed_ok,
        "rule": f"r >= {TABLE5_MIN_R} over the printed observations",
        "pass": printed_ok and fit.r >= TABLE5_MIN_R,
    }


CHECKS = {
    "routes_126": check_routes_126,
    "table2_ordering": check_table2_ordering,
    "binomial_152_117": check_binomial_152_117,
    "table3_fit": check_table3_fit,
    "table5_correlation": check_table5_correlation,
}


def replicate(selector: str = "all") -> list:
    if selector == "all":
        return [check() for check in CHECKS.values()]
    if selector not in CHECKS:
        raise KeyError(f"unknown selector {selector!r}; expected 'all' or one of {sorted(CHECKS)}")
    return [CHECKS[selector]()]
