import itertools
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from formicode.coding import (
    AnchorScheme,
    CodeWord,
    DegenerateCodeWarning,
    MessageDistribution,
    TimeModel,
    anchor_decode,
    anchor_encode,
    canonical_code,
    code_stats,
    complexity_class,
    compress_route,
    decompress,
    kraft_sum,
    optimal_prefix_lengths,
    prefix_decode,
    prefix_encode,
    transmission_time,
    unitary_decode,
    unitary_encode,
)

VERT1 = TimeModel(a=7.3, b=-28.9)
VERT2 = TimeModel(a=5.88, b=-17.11)

routes = st.text(alphabet="LR", min_size=1, max_size=24)


def has_proper_period(r: str) -> bool:
    # a string is a nontrivial repetition iff it occurs inside its doubled self
    return r in (r + r)[1:-1]


# -- unitary -----------------------------------------------------------------


def test_unitary_examples():
    assert unitary_encode(1).length == 1
    assert unitary_encode(10).length == 10
    assert unitary_encode(40).length == 40
    assert transmission_time(unitary_encode(10), VERT1) == pytest.approx(44.1)
    assert transmission_time(unitary_encode(40), VERT1) == pytest.approx(263.1)


def test_unitary_predictions_near_observed_vertical_trunk_times():
    # observed 40-45 s at branch 10 and 280-300 s at branch 40
    assert 40 <= transmission_time(unitary_encode(10), VERT1) <= 45
    assert abs(transmission_time(unitary_encode(40), VERT1) - 290) < 30


@given(st.integers(1, 500))
def test_unitary_length_equals_index(i):
    word = unitary_encode(i)
    assert word.length == i == len(word.description)
    assert unitary_decode(word) == i


def test_unitary_rejects_zero():
    with pytest.raises(ValueError):
        unitary_encode(0)


# -- period compression --------------------------------------------------------


@pytest.mark.parametrize("route, text, length", [
    ("LLLLLLLL", "8L", 2),
    ("LRLRLRLR", "4LR", 3),
    ("LRRLRL", "LRRLRL", 6),
])
def test_compress_examples(route, text, length):
    word = compress_route(route)
    assert word.text == text
    assert word.length == length


@pytest.mark.parametrize("route, expected", [("LLLLLL", 2), ("LRLRLR", 3), ("RRLRRR", 6)])
def test_complexity_class_examples(route, expected):
    assert complexity_class(route) == expected


@given(routes)
def test_compression_round_trip_and_bound(r):
    word = compress_route(r)
    assert decompress(word).turns == r
    assert word.length <= len(r) + 1
    assert (word.description == tuple(r)) == (not has_proper_period(r))


def aperiodic(n):
    return st.text(alphabet="LR", min_size=n, max_size=n).filter(lambda s: not has_proper_period(s))


@given(st.integers(2, 10).map(lambda k: 2 * k), st.data())
def test_complexity_ordering_equal_length(n, data):
    r = data.draw(aperiodic(n))
    assert complexity_class("R" * n) < complexity_class("LR" * (n // 2)) < complexity_class(r)


@given(st.integers(4, 21), st.data())
def test_constant_run_simpler_than_aperiodic(n, data):
    assert complexity_class("L" * n) < complexity_class(data.draw(aperiodic(n)))


def test_compress_empty_rejected():
    with pytest.raises(ValueError):
        compress_route("")


# -- anchors -------------------------------------------------------------------


@pytest.mark.parametrize("i, anchor, offset, length", [(26, 20, 6, 7), (20, 20, 0, 1), (15, 10, 5, 6)])
def test_anchor_examples(i, anchor, offset, length):
    word = anchor_encode(i, AnchorScheme((10, 20)))
    assert word.description[0] == f"A{anchor}"
    assert word.description.count("|") == offset
    assert word.length == length
    assert anchor_decode(word) == i


@given(st.lists(st.integers(1, 60), min_size=1, max_size=5, unique=True), st.integers(1, 60),
       st.floats(0, 3))
def test_anchor_length_rule(anchors, i, name_len):
    scheme = AnchorScheme(tuple(sorted(anchors)), name_len)
    word = anchor_encode(i, scheme)
    assert word.length == pytest.approx(name_len + min(abs(i - a) for a in anchors))
    assert anchor_decode(word) == i
    if i in anchors:
        assert word.description.count("|") == 0


def test_anchor_scheme_validation():
    with pytest.raises(ValueError):
        AnchorScheme(())
    with pytest.raises(ValueError):
        AnchorScheme((20, 10))
    with pytest.raises(ValueError):
        AnchorScheme((10, 31)).check_range(30)


# -- optimal prefix codes ---------------------------------------------------------


def stage2_distribution():
    return MessageDistribution.anchored(range(1, 31), (10, 20), Fraction(1, 3))


def brute_force_min_expected_length(probs):
    n = len(probs)
    best = math.inf
    for lengths in itertools.product(range(1, n), repeat=n):
        if sum(Fraction(1, 2**l) for l in lengths) <= 1:
            best = min(best, sum(p * l for p, l in zip(probs, lengths)))
    return best


def test_prefix_examples():
    assert sorted(optimal_prefix_lengths(MessageDistribution.uniform([1, 2])).values()) == [1, 1]
    lengths = optimal_prefix_lengths(MessageDistribution({1: 0.5, 2: 0.25, 3: 0.25}))
    assert lengths == {1: 1, 2: 2, 3: 2}


def test_prefix_stage2_entropy_bound():
    dist = stage2_distribution()
    assert dist.probabilities[10] == Fraction(1, 3)
    assert dist.probabilities[1] == Fraction(1, 84)
    h = (2 / 3) * math.log2(3) + (1 / 3) * math.log2(84)
    lengths = optimal_prefix_lengths(dist)
    s = code_stats(lengths, dist)
    assert s.entropy_bits == pytest.approx(h, abs=1e-12)
    assert round(h, 3) == 3.187
    assert h <= s.expected_length_bits < h + 1
    assert kraft_sum(lengths) <= 1


def test_prefix_degenerate_flagged():
    with pytest.warns(DegenerateCodeWarning):
        assert optimal_prefix_lengths(MessageDistribution({7: 1.0})) == {7: 0}


def test_prefix_rejects_zero_probability():
    with pytest.raises(ValueError):
        optimal_prefix_lengths(MessageDistribution({1: 1.0, 2: 0.0}))


@st.composite
def positive_distributions(draw, min_size=2, max_size=12):
    weights = draw(st.lists(st.integers(1, 1000), min_size=min_size, max_size=max_size))
    total = sum(weights)
    return MessageDistribution({i + 1: Fraction(w, total) for i, w in enumerate(weights)})


@settings(max_examples=300)
@given(positive_distributions())
def test_kraft_and_entropy_bound(dist):
    lengths = optimal_prefix_lengths(dist)
    assert kraft_sum(lengths) <= 1
    s = code_stats(lengths, dist)
    assert s.entropy_bits - 1e-12 <= s.expected_length_bits < s.entropy_bits + 1


@settings(max_examples=60, deadline=None)
@given(positive_distributions(max_size=5))
def test_huffman_matches_brute_force_optimum(dist):
    probs = [dist.probabilities[k] for k in sorted(dist.probabilities)]
    lengths = optimal_prefix_lengths(dist)
    expected = sum(dist.probabilities[k] * lengths[k] for k in lengths)
    assert expected == brute_force_min_expected_length(probs)


@given(positive_distributions())
def test_canonical_code_is_prefix_free_and_decodes(dist):
    codes = canonical_code(optimal_prefix_lengths(dist))
    words = list(codes.values())
    for a, b in itertools.permutations(words, 2):
        assert not b.startswith(a)
    for m in codes:
        assert prefix_decode(prefix_encode(m, codes), codes) == m


def test_code_stats_examples():
    uni = MessageDistribution.uniform(range(1, 31))
    s = code_stats({i: i for i in range(1, 31)}, uni)
    assert s.entropy_bits == pytest.approx(math.log2(30))
    assert s.expected_length_bits == pytest.approx(15.5)

    dy = MessageDistribution({1: 0.5, 2: 0.25, 3: 0.25})
    s = code_stats({1: 1, 2: 2, 3: 2}, dy)
    assert s.entropy_bits == s.expected_length_bits == 1.5

    assert code_stats({1: 0}, MessageDistribution({1: 1.0})).entropy_bits == 0


def test_code_stats_skips_zero_probability():
    s = code_stats({1: 1}, MessageDistribution({1: 1.0, 2: 0.0}))
    assert s.entropy_bits == 0


def test_distribution_validation():
    with pytest.raises(ValueError):
        MessageDistribution({1: 0.5, 2: 0.4})
    with pytest.raises(ValueError):
        MessageDistribution({1: 1.2, 2: -0.2})


# -- timing ---------------------------------------------------------------------


def test_transmission_time_examples():
    assert transmission_time(CodeWord(("|",) * 10, 10), VERT1) == pytest.approx(44.1)
    assert transmission_time(0, TimeModel(5, 20)) == 20
    assert transmission_time(60, VERT2) == pytest.approx(335.69)


@given(st.floats(0, 100), st.floats(0, 100))
def test_transmission_time_affine(l1, l2):
    m = TimeModel(a=6.25, b=3.5)
    assert transmission_time(l1, m) - transmission_time(l2, m) == pytest.approx(m.a * (l1 - l2))


def test_noise_floor_and_spread():
    m = TimeModel(a=7.3, b=-28.9, noise_sd=10)
    rng = np.random.default_rng(3)
    low = [transmission_time(1, m, rng) for _ in range(2000)]
    assert min(low) >= 1.0
    high = [transmission_time(40, m, rng) for _ in range(4000)]
    assert np.mean(high) == pytest.approx(263.1, abs=1.0)
    assert np.std(high) == pytest.approx(10, rel=0.1)


def test_time_model_validation():
    with pytest.raises(ValueError):
        TimeModel(a=0, b=1)
    with pytest.raises(ValueError):
        TimeModel(a=1, b=1, noise_sd=-1)
    with pytest.raises(ValueError):
        TimeModel(a=7.3, b=-28.9, operating_range=(1, 40))
    TimeModel(a=7.3, b=-28.9, operating_range=(10, 40))


def test_codeword_rejects_negative_length():
    with pytest.raises(ValueError):
        CodeWord((), -1)


def test_warning_free_for_normal_codes():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        optimal_prefix_lengths(stage2_distribution())
