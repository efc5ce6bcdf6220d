"""Payoffs when each player draws her own box every turn.

The game is an absorbing Markov chain on the joint remaining-counter
state. A turn in which neither player can remove a counter changes
nothing, so the value is computed on the chain conditioned to make
progress; every progressing transition strictly shrinks the state and
the recursion runs over a finite DAG.
"""

from __future__ import annotations

import functools
from typing import Sequence

from allocgame.common_game import _validate_pair
from allocgame.config import DEFAULT_STATE_CAP, PayoffBreakdown
from allocgame.errors import ArgumentError, NonTerminationError
from allocgame.strategies import Strategy, as_probs

__all__ = [
    "separate_race",
    "payoff_separate",
    "payoff_2011_closed",
    "payoff_10_01",
    "payoff_20_01",
    "payoff_20_10",
]


def _moves(state: Strategy, probs):
    """Possible next states for one player: (prob, state) for each box with
    counters left, plus the lumped probability of a wasted draw."""
    out = []
    waste = 0.0
    for i, c in enumerate(state):
        if c:
            out.append((probs[i], state[:i] + (c - 1,) + state[i + 1:]))
        else:
            waste = waste + probs[i]
    return out, waste


def separate_race(me: Strategy, them: Strategy, my_probs, their_probs):
    """(win, draw, lose) probabilities for ``me`` under separate throws.

    Probability entries may be numpy arrays, evaluated pointwise.
    """

    @functools.cache
    def go(u: Strategy, v: Strategy):
        mine, my_waste = _moves(u, my_probs)
        theirs, their_waste = _moves(v, their_probs)
        options = [(pm * pt, um, vt) for pm, um in mine for pt, vt in theirs]
        options += [(pm * their_waste, um, v) for pm, um in mine]
        options += [(my_waste * pt, u, vt) for pt, vt in theirs]
        mass = 0.0
        win = draw = lose = 0.0
        for q, u2, v2 in options:
            du, dv = not any(u2), not any(v2)
            if du and dv:
                w, d, l = 0.0, 1.0, 0.0
            elif du:
                w, d, l = 1.0, 0.0, 0.0
            elif dv:
                w, d, l = 0.0, 0.0, 1.0
            else:
                w, d, l = go(u2, v2)
            mass = mass + q
            win = win + q * w
            draw = draw + q * d
            lose = lose + q * l
        return win / mass, draw / mass, lose / mass

    return go(tuple(me), tuple(them))


def payoff_separate(me: Sequence[int], them: Sequence[int], my_probs: Sequence[float],
                    their_probs: Sequence[float] | None = None,
                    state_cap: int = DEFAULT_STATE_CAP) -> PayoffBreakdown:
    """Exact separate-throw payoff to ``me`` against ``them``.

    Args:
        me, them: allocations with the same number of boxes.
        my_probs: box probabilities for ``me``'s draws.
        their_probs: box probabilities for the opponent's draws;
            defaults to ``my_probs``.
        state_cap: refuse games with more joint states than this.

    Raises:
        NonTerminationError: a player has counters in a box she can never draw.
        CapacityError: the joint state space exceeds ``state_cap``.
    """
    my_probs = as_probs(my_probs)
    their_probs = my_probs if their_probs is None else as_probs(their_probs)
    if len(my_probs) != len(their_probs):
        raise ArgumentError("both players need the same number of boxes")
    me, them = _validate_pair(me, them, len(my_probs), state_cap)
    for owner, strat, probs in (("I", me, my_probs), ("II", them, their_probs)):
        for i, (c, q) in enumerate(zip(strat, probs)):
            if c and q == 0.0:
                raise NonTerminationError(
                    f"player {owner} has {c} counters in box {i + 1}, which she never draws"
                )
    win, draw, lose = separate_race(me, them, my_probs, their_probs)
    return PayoffBreakdown(float(win), float(draw), float(lose))


def payoff_10_01(p):
    """<1,0> vs <0,1>, both with probabilities (p, 1-p)."""
    return (2 * p - 1) / (1 - p * (1 - p))


def payoff_20_01(p):
    """<2,0> vs <0,1>, both with probabilities (p, 1-p)."""
    return (3 * p**3 - 3 * p**2 + 2 * p - 1) / (1 - p * (1 - p)) ** 2


def payoff_20_10(p):
    """<2,0> vs <1,0>, both with probabilities (p, 1-p)."""
    return 1 / (p - 2)


def payoff_2011_closed(p):
    """<2,0> vs <1,1> as a single rational function of p.

    Kept as an independent check on the general engine; it is the first
    throw expansion over the four outcomes, with <1,0> vs <1,0> worth 0.
    """
    return (p**5 - 4 * p**3 + 3 * p**2 - 2 * p + 1) / (
        p**5 - 4 * p**4 + 7 * p**3 - 8 * p**2 + 5 * p - 2
    )
