"""Message coding schemes and the contact-time model.

Every scheme produces a :class:`CodeWord` whose ``length`` is measured in
abstract symbol units. Contact duration is affine in that length,
``t = a * length + b``.

Schemes:

* unitary: branch ``i`` costs ``i`` identical tokens.
* period compression: a route made of ``k`` copies of a shorter pattern is
  written as the count followed by the pattern (``LLLLLLLL`` -> ``8L``).
  This is the computable stand-in used for description complexity.
* anchor-offset: name the nearest anchor, then count the remaining
  distance in unit tokens.
* optimal prefix: Huffman code lengths for a known message distribution.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Mapping, Sequence

from .maze import Route, as_route

UNIT = "|"
TIME_FLOOR_S = 1.0


@dataclass(frozen=True)
class CodeWord:
    description: tuple
    length: float
    scheme: str = "raw"

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"code length must be >= 0, got {self.length}")

    @property
    def text(self) -> str:
        return "".join(str(tok) for tok in self.description)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class MessageDistribution:
    """Probability of each message (goal index)."""

    probabilities: Mapping[int, float]

    def __post_init__(self):
        probs = dict(self.probabilities)
        if not probs:
            raise ValueError("distribution is empty")
        for key, p in probs.items():
            if p < 0:
                raise ValueError(f"negative probability {p} for message {key}")
        total = math.fsum(float(p) for p in probs.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def uniform(cls, messages) -> "MessageDistribution":
        messages = list(messages)
        p = Fraction(1, len(messages))
        return cls({m: p for m in messages})

    @classmethod
    def anchored(cls, messages, anchors, anchor_probability) -> "MessageDistribution":
        """``anchor_probability`` on each anchor, the rest spread evenly."""
        messages = list(messages)
        anchors = list(anchors)
        missing = set(anchors) - set(messages)
        if missing:
            raise ValueError(f"anchors {sorted(missing)} are not valid messages")
        p_anchor = Fraction(anchor_probability)
        others = [m for m in messages if m not in anchors]
        rest = 1 - p_anchor * len(anchors)
        if rest < 0 or (rest > 0 and not others):
            raise ValueError(
                f"anchor probability {p_anchor} cannot be spread over {len(anchors)} anchors"
            )
        probs = {m: p_anchor for m in anchors}
        for m in others:
            probs[m] = rest / len(others)
        return cls(dict(sorted(probs.items())))

    def support(self) -> list:
        return sorted(m for m, p in self.probabilities.items() if p > 0)

    def __len__(self):
        return len(self.probabilities)


@dataclass(frozen=True)
class TimeModel:
    """Contact duration ``a * length + b`` seconds, plus optional noise.

    ``operating_range`` is the span of code lengths the model is meant for.
    When given, the noiseless prediction must be non-negative over it.
    """

    a: float
    b: float
    noise_sd: float = 0.0
    operating_range: tuple | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be > 0 seconds per symbol, got {self.a}")
        if not self.noise_sd >= 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if self.operating_range is not None:
            lo, hi = self.operating_range
            if lo > hi:
                raise ValueError(f"operating_range {self.operating_range} is reversed")
            if self.predict(lo) < 0:
                raise ValueError(
                    f"predicted time {self.predict(lo)} s is negative at length {lo}"
                )

    def predict(self, length: float) -> float:
        return self.a * length + self.b


@dataclass(frozen=True)
class AnchorScheme:
    anchors: tuple
    anchor_name_length: float = 1.0

    def __post_init__(self):
        anchors = tuple(self.anchors)
        if not anchors:
            raise ValueError("anchor scheme needs at least one anchor")
        if any(b <= a for a, b in zip(anchors, anchors[1:])):
            raise ValueError(f"anchors must be strictly increasing, got {anchors}")
        if anchors[0] < 1:
            raise ValueError(f"anchors must be branch indices >= 1, got {anchors}")
        if self.anchor_name_length < 0:
            raise ValueError("anchor_name_length must be >= 0")
        object.__setattr__(self, "anchors", anchors)

    def check_range(self, branch_count: int):
        if self.anchors[-1] > branch_count:
            raise ValueError(
                f"anchor {self.anchors[-1]} outside maze with {branch_count} branches"
            )


@dataclass(frozen=True)
class CodeStats:
    entropy_bits: float
    expected_length_bits: float


class DegenerateCodeWarning(UserWarning):
    """A code over fewer than two messages carries no information."""


# -- unitary -----------------------------------------------------------------


def unitary_encode(i: int) -> CodeWord:
    if i < 1:
        raise ValueError(f"branch index must be >= 1, got {i}")
    return CodeWord((UNIT,) * i, i, "unitary")


def unitary_decode(word: CodeWord) -> int:
    return sum(1 for tok in word.description if tok == UNIT)


# -- period compression ------------------------------------------------------


def smallest_period(turns: str) -> int:
    n = len(turns)
    for p in range(1, n + 1):
        if n % p == 0 and turns[:p] * (n // p) == turns:
            return p
    return n


def compress_route(route) -> CodeWord:
    turns = as_route(route).turns
    if not turns:
        raise ValueError("cannot compress an empty route")
    p = smallest_period(turns)
    if p < len(turns):
        return CodeWord((str(len(turns) // p),) + tuple(turns[:p]), 1 + p, "compressed")
    return CodeWord(tuple(turns), len(turns), "compressed")


def decompress(word: CodeWord) -> Route:
    desc = word.description
    if desc and str(desc[0]).isdigit():
        return Route(int(desc[0]) * "".join(desc[1:]))
    return Route("".join(desc))


def complexity_class(route) -> float:
    """Description length of ``route`` under period compression."""
    return compress_route(route).length


# -- anchor-offset -----------------------------------------------------------


def nearest_anchor(i: int, anchors: Sequence[int]) -> int:
    # min() keeps the first of equal keys, so sorted order breaks ties low
    return min(sorted(anchors), key=lambda a: abs(i - a))


def anchor_encode(i: int, scheme: AnchorScheme) -> CodeWord:
    if i < 1:
        raise ValueError(f"branch index must be >= 1, got {i}")
    anchor = nearest_anchor(i, scheme.anchors)
    offset = i - anchor
    sign = "-" if offset < 0 else "+"
    desc = (f"A{anchor}", sign) + (UNIT,) * abs(offset)
    return CodeWord(desc, scheme.anchor_name_length + abs(offset), "anchor")


def anchor_decode(word: CodeWord) -> int:
    name, sign, *units = word.description
    anchor = int(name[1:])
    offset = len(units)
    return anchor - offset if sign == "-" else anchor + offset


# -- optimal prefix codes ----------------------------------------------------


def optimal_prefix_lengths(dist: MessageDistribution) -> dict:
    """Huffman code lengths in bits for each message of ``dist``."""
    probs = dist.probabilities
    if any(p <= 0 for p in probs.values()):
        raise ValueError("optimal prefix code needs strictly positive probabilities")
    if len(probs) < 2:
        warnings.warn("fewer than two messages: zero-length code", DegenerateCodeWarning)
        return {m: 0 for m in probs}

    lengths = {m: 0 for m in probs}
    tiebreak = count()
    heap = [(p, next(tiebreak), [m]) for m, p in sorted(probs.items())]
    heapq.heapify(heap)
    while len(heap) > 1:
        p1, _, group1 = heapq.heappop(heap)
        p2, _, group2 = heapq.heappop(heap)
        for m in group1 + group2:
            lengths[m] += 1
        heapq.heappush(heap, (p1 + p2, next(tiebreak), group1 + group2))
    return lengths


def kraft_sum(lengths: Mapping) -> Fraction:
    return sum((Fraction(1, 2**int(l)) for l in lengths.values()), Fraction(0))


def canonical_code(lengths: Mapping) -> dict:
    """Assign canonical prefix code words (bit strings) to the given lengths."""
    if kraft_sum(lengths) > 1:
        raise ValueError("lengths violate the Kraft inequality")
    codes = {}
    code = 0
    prev = 0
    for m, l in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
        code <<= l - prev
        codes[m] = format(code, f"0{l}b") if l else ""
        code += 1
        prev = l
    return codes


def prefix_encode(message, codes: Mapping) -> CodeWord:
    bits = codes[message]
    return CodeWord(tuple(bits), len(bits), "prefix")


def prefix_decode(word: CodeWord, codes: Mapping):
    bits = word.text
    for m, c in codes.items():
        if c == bits:
            return m
    raise KeyError(f"no message has code word {bits!r}")


def code_stats(lengths: Mapping, dist: MessageDistribution) -> CodeStats:
    entropy = 0.0
    expected = 0.0
    for m, p in dist.probabilities.items():
        if p == 0:
            continue
        if m not in lengths:
            raise KeyError(f"no code length for message {m}")
        p = float(p)
        entropy -= p * math.log2(p)
        expected += p * lengths[m]
    return CodeStats(entropy_bits=entropy, expected_length_bits=expected)


# -- timing ------------------------------------------------------------------


def transmission_time(word, model: TimeModel, rng=None) -> float:
    """Contact duration in seconds for a code word (or a bare length).

    With ``rng`` (a numpy Generator) Gaussian noise of ``model.noise_sd`` is
    added and the result clamped to at least one second.
    """
    length = word.length if isinstance(word, CodeWord) else float(word)
    t = model.predict(length)
    if rng is None:
        return t
    if model.noise_sd > 0:
        t += rng.normal(0.0, model.noise_sd)
    return max(t, TIME_FLOOR_S)
