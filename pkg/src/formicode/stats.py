"""Statistical procedures for the ant-communication experiments.

Exact arithmetic is used wherever it is cheap: binomial tails for small
``n`` are summed as rationals, permutation probabilities are factorial
ratios, and small rank-sum tests count every rank assignment.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

EXACT_BINOMIAL_MAX_N = 30
EXACT_RANKSUM_MAX_N = 24

# bits per minute, from the binary-tree experiments
REFERENCE_RATES = {
    "Formica sanguinea": 0.738,
    "Formica polyctena": 1.094,
}


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    r: float
    n: int
    degenerate: bool = False

    @property
    def r_squared(self) -> float:
        return self.r * self.r


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str
    exact: bool
    degenerate: bool = False
    p_rational: Fraction | None = None

    __test__ = False  # keep pytest from collecting this


# -- binomial ----------------------------------------------------------------


def _check_binomial(n, k, p):
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if not 0 < p < 1:
        raise ValueError(f"need 0 < p < 1, got {p}")


def binomial_tail_rational(n: int, k: int, p) -> Fraction:
    """Exact P(X >= k) for X ~ Binomial(n, p) with rational ``p``."""
    _check_binomial(n, k, p)
    p = Fraction(p)
    q = 1 - p
    return sum(
        (math.comb(n, j) * p**j * q ** (n - j) for j in range(k, n + 1)), Fraction(0)
    )


def binomial_cdf_rational(n: int, k: int, p) -> Fraction:
    """Exact P(X <= k); ``k = -1`` gives 0."""
    if k < 0:
        return Fraction(0)
    _check_binomial(n, k, p)
    p = Fraction(p)
    q = 1 - p
    return sum((math.comb(n, j) * p**j * q ** (n - j) for j in range(0, k + 1)), Fraction(0))


def _log(x) -> float:
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def binomial_tail_log(n: int, k: int, p) -> float:
    """P(X >= k) summed in log space; safe for tails far below float range."""
    _check_binomial(n, k, p)
    log_p = _log(p)
    log_q = _log(1 - Fraction(p)) if isinstance(p, Fraction) else math.log1p(-p)
    terms = [math.log(math.comb(n, j)) + j * log_p + (n - j) * log_q for j in range(k, n + 1)]
    top = max(terms)
    return math.exp(top) * math.fsum(math.exp(t - top) for t in terms)


def binomial_tail(n: int, k: int, p, method: str = "auto") -> float:
    """P(X >= k) for X ~ Binomial(n, p).

    ``method`` is ``"rational"``, ``"log"``, or ``"auto"`` (rational up to
    ``EXACT_BINOMIAL_MAX_N`` trials, log space beyond).
    """
    if method == "auto":
        method = "rational" if n <= EXACT_BINOMIAL_MAX_N else "log"
    if method == "rational":
        return float(binomial_tail_rational(n, k, p))
    if method == "log":
        return binomial_tail_log(n, k, p)
    raise ValueError(f"unknown method {method!r}")


# -- permutation ordering ----------------------------------------------------


def permutation_order_test(group_sizes: Sequence[int]) -> Fraction:
    """Chance that a random order of all items puts the groups in a fixed order.

    Items within a group may appear in any order, so the probability is
    ``prod(size!) / n!``.
    """
    sizes = list(group_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError(f"group sizes must all be >= 1, got {sizes}")
    favourable = math.prod(math.factorial(s) for s in sizes)
    return Fraction(favourable, math.factorial(sum(sizes)))


def groups_strictly_ordered(groups: Sequence[Sequence[float]]) -> bool:
    """True when every value of each group is below every value of the next."""
    return all(max(lo) < min(hi) for lo, hi in zip(groups, groups[1:]))


# -- rank-sum ----------------------------------------------------------------


def midranks(values: Sequence[float]) -> list:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _rank_sum_counts(doubled_ranks: Sequence[int], n: int) -> Counter:
    """Number of size-``n`` subsets for each achievable sum of doubled ranks."""
    # table[j] maps subset sum -> number of j-element subsets
    table = [Counter() for _ in range(n + 1)]
    table[0][0] = 1
    for r in doubled_ranks:
        for j in range(n, 0, -1):
            prev = table[j - 1]
            if prev:
                cur = table[j]
                for s, c in prev.items():
                    cur[s + r] += c
    return table[n]


def rank_sum_test(
    sample_u: Sequence[float],
    sample_i: Sequence[float],
    alternative: str = "less",
    method: str = "auto",
) -> TestResult:
    """Wilcoxon rank-sum test of informed (``sample_i``) against uninformed.

    The statistic is the midrank sum of ``sample_i``. ``alternative="less"``
    tests whether informed values tend to be smaller; ``"two-sided"`` is
    also accepted. Exact p-values come from counting every assignment of
    the pooled ranks, used when the pooled size is at most
    ``EXACT_RANKSUM_MAX_N`` unless ``method`` forces ``"exact"`` or
    ``"normal"``.
    """
    if not sample_u or not sample_i:
        raise ValueError("both samples must be nonempty")
    if alternative not in ("less", "two-sided"):
        raise ValueError(f"unknown alternative {alternative!r}")
    pooled = list(sample_i) + list(sample_u)
    n, m = len(sample_i), len(sample_u)
    total = n + m
    ranks = midranks(pooled)
    w = sum(ranks[:n])

    if len(set(pooled)) == 1:
        return TestResult(w, 1.0, "rank-sum", True, degenerate=True, p_rational=Fraction(1))

    if method == "auto":
        method = "exact" if total <= EXACT_RANKSUM_MAX_N else "normal"

    if method == "exact":
        doubled = [int(round(2 * r)) for r in ranks]
        w2 = sum(doubled[:n])
        counts = _rank_sum_counts(doubled, n)
        n_assign = math.comb(total, n)
        lower = Fraction(sum(c for s, c in counts.items() if s <= w2), n_assign)
        if alternative == "less":
            p = lower
        else:
            upper = Fraction(sum(c for s, c in counts.items() if s >= w2), n_assign)
            p = min(Fraction(1), 2 * min(lower, upper))
        return TestResult(w, float(p), "rank-sum exact", True, p_rational=p)

    if method != "normal":
        raise ValueError(f"unknown method {method!r}")
    mean = n * (total + 1) / 2
    ties = sum(t**3 - t for t in Counter(pooled).values())
    var = n * m / 12 * ((total + 1) - ties / (total * (total - 1)))
    sd = math.sqrt(var)
    if alternative == "less":
        z = (w - mean + 0.5) / sd
        p = _normal_cdf(z)
    else:
        z = (abs(w - mean) - 0.5) / sd
        p = min(1.0, 2 * (1 - _normal_cdf(max(z, 0.0))))
    return TestResult(w, p, "rank-sum normal", False)


def _normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2))


# -- regression --------------------------------------------------------------


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    """Least-squares line ``y = a x + b`` with Pearson r."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} xs vs {len(ys)} ys")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    if len(set(xs)) == 1:
        raise ValueError("xs have zero variance; slope undefined")
    if len(set(ys)) == 1:
        return FitResult(0.0, ys[0], 0.0, len(xs), degenerate=True)
    a, b = statistics.linear_regression(xs, ys)
    r = statistics.correlation(xs, ys)
    return FitResult(a, b, max(-1.0, min(1.0, r)), len(xs))


def transmission_rate(depths: Sequence[float], times: Sequence[float]) -> float:
    """Bits per minute from contact times (seconds) against bits conveyed."""
    fit = linear_fit(depths, times)
    if fit.a <= 0:
        raise ValueError(f"non-physical fit: slope {fit.a} s/bit is not positive")
    return 60.0 / fit.a


# -- anchors -----------------------------------------------------------------


def distance_to_nearest_anchor(i: int, anchors: Sequence[int]) -> int:
    if not anchors:
        raise ValueError("need at least one anchor")
    return min(abs(i - a) for a in anchors)


def anchor_distance_correlation(records, anchors, exclude_below: int = 4) -> FitResult:
    """Fit contact time against distance to the nearest anchor.

    ``records`` are ``(branch, seconds)`` pairs. Branches numbered
    ``exclude_below`` or lower are dropped.
    """
    kept = [(b, t) for b, t in records if b > exclude_below]
    if len(kept) < 3:
        raise ValueError(f"need >= 3 records after exclusion, got {len(kept)}")
    dist = [distance_to_nearest_anchor(b, anchors) for b, _ in kept]
    times = [t for _, t in kept]
    if len(set(dist)) == 1:
        return FitResult(0.0, statistics.fmean(times), 0.0, len(kept), degenerate=True)
    return linear_fit(dist, times)
