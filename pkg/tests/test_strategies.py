from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from allocgame.errors import ArgumentError
from allocgame.strategies import (
    as_probs,
    as_strategy,
    dice_probs,
    enumerate_compositions,
    enumerate_monotone,
    enumerate_respecting_ties,
    format_strategy,
    parse_probs,
    parse_strategy,
    zipf_probs,
)


def brute_force(n, k):
    return [s for s in itertools.product(range(n + 1), repeat=k) if sum(s) == n]


def respects(s, probs):
    return all(s[i] >= s[j] for i in range(len(s)) for j in range(len(s)) if probs[i] > probs[j])


@pytest.mark.parametrize("n,k", [(0, 1), (3, 3), (5, 2), (7, 4), (4, 5)])
def test_compositions_count_and_order(n, k):
    comps = enumerate_compositions(n, k)
    assert len(comps) == math.comb(n + k - 1, k - 1)
    assert sorted(comps, reverse=True) == comps
    assert set(comps) == set(brute_force(n, k))


@pytest.mark.parametrize("n,k,count", [(7, 4, 11), (7, 3, 8), (3, 3, 3), (5, 2, 3)])
def test_monotone_counts(n, k, count):
    mono = enumerate_monotone(n, k)
    assert len(mono) == count
    assert set(mono) <= set(enumerate_compositions(n, k))
    assert all(all(a >= b for a, b in zip(s, s[1:])) for s in mono)


def test_monotone_extremes():
    mono = enumerate_monotone(7, 4)
    assert mono[0] == (7, 0, 0, 0) and mono[-1] == (2, 2, 2, 1)


def test_ties_strict_order_matches_monotone():
    assert enumerate_respecting_ties(3, (0.5, 0.3, 0.2)) == enumerate_monotone(3, 3)
    assert len(enumerate_respecting_ties(3, (0.5, 0.3, 0.2))) == 3


@pytest.mark.parametrize("n,k", [(7, 4), (5, 3), (6, 2)])
def test_ties_uniform_matches_monotone(n, k):
    assert len(enumerate_respecting_ties(n, [1 / k] * k)) == len(enumerate_monotone(n, k))


def test_dice_enumeration():
    probs = dice_probs()
    strategies = enumerate_respecting_ties(11, probs)
    assert len(strategies) == 56
    assert (0, 0, 1, 1, 2, 3, 2, 1, 1, 0, 0) in strategies
    assert all(respects(s, probs) for s in strategies)


@given(st.integers(0, 6), st.lists(st.sampled_from([0.1, 0.2, 0.3]), min_size=2, max_size=4))
def test_ties_against_brute_force(n, weights):
    total = sum(weights)
    probs = [w / total for w in weights]
    got = enumerate_respecting_ties(n, probs)
    # brute force: respect the order, and within tied boxes keep counts
    # nonincreasing in box index
    expected = []
    for s in brute_force(n, len(probs)):
        if not respects(s, probs):
            continue
        tied_ok = all(s[i] >= s[j] for i in range(len(s)) for j in range(i + 1, len(s))
                      if probs[i] == probs[j])
        if tied_ok:
            expected.append(s)
    assert sorted(got) == sorted(expected)


def test_dice_probs_sum_and_shape():
    probs = dice_probs()
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-15)
    assert probs[5] == pytest.approx(6 / 36) and probs[0] == pytest.approx(1 / 36)


def test_zipf_probs():
    h = 1 + 1 / 2 + 1 / 3 + 1 / 4
    assert zipf_probs(4) == pytest.approx([1 / h, 0.5 / h, 1 / 3 / h, 0.25 / h], rel=1e-15)


@pytest.mark.parametrize(
    "text,expected",
    [("0.7,0.2,0.1", (0.7, 0.2, 0.1)), ("3/4, 1/8, 1/8", (0.75, 0.125, 0.125))],
)
def test_parse_probs(text, expected):
    assert parse_probs(text) == pytest.approx(expected)


def test_parse_probs_named():
    assert parse_probs("dice") == dice_probs()
    assert parse_probs("zipf:4") == zipf_probs(4)


@pytest.mark.parametrize("text", ["0.5,0.6", "a,b", "zipf:x", "-0.5,1.5"])
def test_parse_probs_rejects(text):
    with pytest.raises(ArgumentError):
        parse_probs(text)


def test_ordered_flag():
    as_probs((0.5, 0.3, 0.2), ordered=True)
    with pytest.raises(ArgumentError):
        as_probs((0.2, 0.3, 0.5), ordered=True)


@given(st.lists(st.integers(0, 20), min_size=1, max_size=8))
def test_format_parse_round_trip(counts):
    assert parse_strategy(format_strategy(counts)) == tuple(counts)


def test_format_strategy():
    assert format_strategy((2, 1, 0)) == "<2,1,0>"
    assert parse_strategy("10,0,0") == (10, 0, 0)


@pytest.mark.parametrize("bad", [[], [-1, 2], [1.5, 2]])
def test_as_strategy_rejects(bad):
    with pytest.raises(ArgumentError):
        as_strategy(bad)
