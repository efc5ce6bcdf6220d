"""Strategies (compositions of the quota) and box probability vectors.

A strategy is a plain tuple of nonnegative ints, one entry per box.
Enumerations are always in lexicographically descending order so that
tie-breaks by "first in enumeration" are deterministic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

from allocgame.errors import ArgumentError

Strategy = tuple[int, ...]
ProbVector = tuple[float, ...]

__all__ = [
    "Strategy",
    "ProbVector",
    "as_strategy",
    "as_probs",
    "format_strategy",
    "parse_strategy",
    "parse_probs",
    "dice_probs",
    "zipf_probs",
    "enumerate_compositions",
    "enumerate_monotone",
    "enumerate_respecting_ties",
]


def as_strategy(counts: Sequence[int]) -> Strategy:
    """Validate and normalise an allocation to a tuple of ints."""
    out = tuple(int(c) for c in counts)
    if not out:
        raise ArgumentError("a strategy needs at least one box")
    if any(c < 0 for c in out) or any(c != x for c, x in zip(out, counts)):
        raise ArgumentError(f"counts must be nonnegative integers, got {list(counts)}")
    return out


def as_probs(probs: Sequence[float], ordered: bool = False, atol: float = 1e-9) -> ProbVector:
    """Validate a box probability vector.

    Entries must lie in [0, 1] and sum to 1 within ``atol``. Zero entries
    are allowed here; the engines reject them only where a box holding
    counters could never be drawn. With ``ordered`` the entries must also
    be nonincreasing.
    """
    out = tuple(float(p) for p in probs)
    if not out:
        raise ArgumentError("empty probability vector")
    if any(not (0.0 <= p <= 1.0) for p in out):
        raise ArgumentError(f"probabilities must lie in [0, 1], got {out}")
    if abs(math.fsum(out) - 1.0) > atol:
        raise ArgumentError(f"probabilities sum to {math.fsum(out)!r}, not 1")
    if ordered and any(x < y for x, y in zip(out, out[1:])):
        raise ArgumentError(f"probabilities must be nonincreasing, got {out}")
    return out


def format_strategy(s: Sequence[int]) -> str:
    """Render a strategy as ``<2,1,0>``."""
    return "<" + ",".join(str(int(c)) for c in s) + ">"


def parse_strategy(text: str) -> Strategy:
    """Parse ``2,1,0`` or ``<2,1,0>`` into a strategy."""
    body = text.strip().lstrip("<").rstrip(">")
    try:
        return as_strategy([int(tok) for tok in body.split(",") if tok.strip()])
    except ValueError as exc:
        raise ArgumentError(f"cannot parse strategy {text!r}") from exc


def dice_probs() -> ProbVector:
    """Probabilities of the totals 2..12 of two fair six-sided dice."""
    return tuple(min(i - 1, 13 - i) / 36 for i in range(2, 13))


def zipf_probs(k: int) -> ProbVector:
    """Probabilities proportional to 1, 1/2, ..., 1/k."""
    if k < 1:
        raise ArgumentError(f"zipf needs k >= 1, got {k}")
    weights = [Fraction(1, i) for i in range(1, k + 1)]
    total = sum(weights)
    return tuple(float(w / total) for w in weights)


def parse_probs(text: str) -> ProbVector:
    """Parse a comma list, ``dice``, or ``zipf:K`` into a probability vector."""
    text = text.strip()
    if text == "dice":
        return dice_probs()
    if text.startswith("zipf:"):
        try:
            return zipf_probs(int(text[5:]))
        except ValueError as exc:
            raise ArgumentError(f"cannot parse {text!r}") from exc
    try:
        values = [float(Fraction(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgumentError(f"cannot parse probabilities {text!r}") from exc
    return as_probs(values)


def _compositions(n: int, k: int) -> Iterator[Strategy]:
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_compositions(n: int, k: int) -> list[Strategy]:
    """All C(n+k-1, k-1) allocations of ``n`` counters to ``k`` boxes.

    Lexicographically descending: ``(n, 0, ..., 0)`` first.
    """
    if n < 0 or k < 1:
        raise ArgumentError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    return list(_compositions(n, k))


def _partitions(n: int, k: int, cap: int) -> Iterator[Strategy]:
    # nonincreasing k-tuples summing to n with every part <= cap
    if k == 1:
        if n <= cap:
            yield (n,)
        return
    for first in range(min(n, cap), -1, -1):
        if first * k < n:
            break
        for rest in _partitions(n - first, k - 1, first):
            yield (first,) + rest


def enumerate_monotone(n: int, k: int) -> list[Strategy]:
    """Nonincreasing allocations n1 >= n2 >= ... >= nk, descending order."""
    if n < 0 or k < 1:
        raise ArgumentError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    return list(_partitions(n, k, n))


def enumerate_respecting_ties(n: int, probs: Sequence[float]) -> list[Strategy]:
    """Allocations that never put fewer counters on a likelier box.

    Requires a_i >= a_j whenever p_i > p_j. Boxes with equal probability
    are interchangeable, so within a tie class only the representative
    with counts nonincreasing in box index is kept.
    """
    probs = as_probs(probs)
    k = len(probs)
    # box indices grouped by probability level, highest level first
    levels = sorted(set(probs), reverse=True)
    classes = [[i for i in range(k) if probs[i] == lvl] for lvl in levels]

    out: list[Strategy] = []

    def fill(level: int, remaining: int, cap: int, counts: list[int]):
        if level == len(classes):
            if remaining == 0:
                out.append(tuple(counts))
            return
        boxes = classes[level]
        for block in _partitions_upto(remaining, len(boxes), cap):
            for box, c in zip(boxes, block):
                counts[box] = c
            fill(level + 1, remaining - sum(block), block[-1], counts)
        for box in boxes:
            counts[box] = 0

    fill(0, n, n, [0] * k)
    return sorted(out, reverse=True)


def _partitions_upto(n: int, k: int, cap: int) -> Iterator[Strategy]:
    # nonincreasing k-tuples with parts <= cap and sum <= n
    for total in range(min(n, k * cap), -1, -1):
        yield from _partitions(total, k, cap)
