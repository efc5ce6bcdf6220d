"""Payoffs when a single box is drawn for both players each turn."""

from __future__ import annotations

import functools
import math
from typing import Sequence

from allocgame.config import DEFAULT_STATE_CAP, PayoffBreakdown
from allocgame.errors import ArgumentError, CapacityError, NonTerminationError
from allocgame.removal import bisect_root
from allocgame.specfun import reg_inc_beta
from allocgame.strategies import Strategy, as_probs, as_strategy

__all__ = [
    "PayoffBreakdown",
    "payoff_common_two_box",
    "payoff_common_general",
    "common_race",
    "critical_p_common",
    "margin_mean_two_box",
    "state_count",
    "three_counter_formulas",
]

WIN = PayoffBreakdown(1.0, 0.0, 0.0)
DRAW = PayoffBreakdown(0.0, 1.0, 0.0)


def _draw_or_win(draw: float) -> PayoffBreakdown:
    return PayoffBreakdown(1.0 - draw, draw, 0.0)


def _never_loses(me: Strategy, them: Strategy, p: float) -> PayoffBreakdown:
    # me <= them componentwise, me != them
    (x1, x2), (y1, y2) = me, them
    if x1 < y1 and x2 < y2:
        return WIN
    if x2 == y2:
        # both clear on the same box-2 throw iff the b-th box-2 throw
        # comes after the opponent's last needed box-1 throw
        return WIN if x2 == 0 else _draw_or_win(reg_inc_beta(p, y1, x2))
    return WIN if x1 == 0 else _draw_or_win(reg_inc_beta(1.0 - p, y2, x1))


def payoff_common_two_box(me: Sequence[int], them: Sequence[int], p: float) -> PayoffBreakdown:
    """Closed-form payoff to ``me`` in the two-box common-throw game.

    Cases: identical strategies always draw; if ``me`` needs no more of
    either box than ``them`` it can only win or draw; in the crossing case
    me = <a+n, b>, them = <a, b+m> nobody can draw and ``me`` wins with
    probability I_p(a+n, b+m). The remaining cases follow by swapping
    roles.

    Raises:
        ArgumentError: strategies are not two-box, or ``p`` lies outside
            the open interval (0, 1).
    """
    me, them = as_strategy(me), as_strategy(them)
    if len(me) != 2 or len(them) != 2:
        raise ArgumentError("two-box payoff needs two-box strategies")
    if not 0.0 < p < 1.0:
        raise ArgumentError(f"p must lie strictly inside (0, 1), got {p}")
    if sum(me) == 0 or sum(them) == 0:
        raise ArgumentError("both strategies must hold counters")
    if me == them:
        return DRAW
    if me[0] <= them[0] and me[1] <= them[1]:
        return _never_loses(me, them, p)
    if them[0] <= me[0] and them[1] <= me[1]:
        return _never_loses(them, me, p).flipped()
    if me[0] > them[0]:
        win = reg_inc_beta(p, me[0], them[1])
        return PayoffBreakdown(win, 0.0, 1.0 - win)
    lose = reg_inc_beta(p, them[0], me[1])
    return PayoffBreakdown(1.0 - lose, 0.0, lose)


def state_count(me: Sequence[int], them: Sequence[int]) -> int:
    """Upper bound on the joint remaining-counter states of a race."""
    return math.prod(c + 1 for c in me) * math.prod(c + 1 for c in them)


def _validate_pair(me, them, k: int, state_cap: int) -> tuple[Strategy, Strategy]:
    me, them = as_strategy(me), as_strategy(them)
    if len(me) != k or len(them) != k:
        raise ArgumentError(f"strategies {me}, {them} do not have {k} boxes")
    if sum(me) == 0 or sum(them) == 0:
        raise ArgumentError("both strategies must hold counters")
    states = state_count(me, them)
    if states > state_cap:
        raise CapacityError(
            f"{states} joint states exceed the cap of {state_cap}; "
            "use the Monte Carlo engine (simulate) instead"
        )
    return me, them


def common_race(me: Strategy, them: Strategy, probs):
    """(win, draw, lose) probabilities by recursion on the joint state.

    Boxes that are empty for both players are self-loops and are removed
    by renormalising over the boxes that still make progress. ``probs``
    entries may be numpy arrays, evaluated pointwise.
    """
    k = len(probs)

    def terminal(u, v):
        du, dv = not any(u), not any(v)
        if du and dv:
            return (0.0, 1.0, 0.0)
        if du:
            return (1.0, 0.0, 0.0)
        if dv:
            return (0.0, 0.0, 1.0)
        return None

    @functools.cache
    def go(u: Strategy, v: Strategy):
        mass = 0.0
        win = draw = lose = 0.0
        for i in range(k):
            if not (u[i] or v[i]):
                continue
            u2 = u[:i] + (u[i] - 1,) + u[i + 1:] if u[i] else u
            v2 = v[:i] + (v[i] - 1,) + v[i + 1:] if v[i] else v
            w, d, l = terminal(u2, v2) or go(u2, v2)
            q = probs[i]
            mass = mass + q
            win = win + q * w
            draw = draw + q * d
            lose = lose + q * l
        return win / mass, draw / mass, lose / mass

    return go(tuple(me), tuple(them))


def payoff_common_general(me: Sequence[int], them: Sequence[int], probs: Sequence[float],
                          state_cap: int = DEFAULT_STATE_CAP) -> PayoffBreakdown:
    """Exact common-throw payoff for any number of boxes.

    Raises:
        NonTerminationError: a box holding counters has zero probability.
        CapacityError: the joint state space exceeds ``state_cap``.
    """
    probs = as_probs(probs)
    me, them = _validate_pair(me, them, len(probs), state_cap)
    for i, q in enumerate(probs):
        if q == 0.0 and (me[i] or them[i]):
            raise NonTerminationError(f"box {i + 1} holds counters but has zero probability")
    if me == them:
        return DRAW
    win, draw, lose = common_race(me, them, probs)
    return PayoffBreakdown(float(win), float(draw), float(lose))


def critical_p_common(n: int) -> list[float]:
    """Roots of I_p(r, n + 1 - r) = 1/2 for r = 1..n, ascending.

    These are the probabilities at which the best pure strategy of the
    two-box common-throw game changes.
    """
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    roots = [
        bisect_root(lambda p, r=r: reg_inc_beta(p, r, n + 1 - r) - 0.5, 0.0, 1.0, xtol=1e-13)
        for r in range(1, n + 1)
    ]
    return sorted(roots)


def margin_mean_two_box(a: int, b: int, p: float) -> float:
    """Mean margin of victory of <a+1, b> over <a, b+1> under a common throw.

    The margin is the number of further throws the loser needs after the
    winner clears (negative when <a+1, b> loses). Both conditional
    margins are geometric, giving
    I_p(a+1, b+1) / (1 - p) - (1 - I_p(a+1, b+1)) / p.
    """
    win = reg_inc_beta(p, a + 1, b + 1)
    return win / (1.0 - p) - (1.0 - win) / p


def three_counter_formulas(p1, p2, p3) -> dict[tuple[Strategy, Strategy], float]:
    """Printed closed forms for the three-box, three-counter common game.

    Keys are (row, column) pairs over <3,0,0>, <2,1,0>, <1,1,1>. The
    <2,1,0> vs <1,1,1> expression does not match the exact engine and is
    kept only so the mismatch can be reported.
    """
    a = 2 * p1**3 / (1 - p3) ** 3 - 1
    b = 2 * p1**3 * (1 / (1 - p2) ** 3 + 1 / (1 - p3) ** 3 - 1) - 1
    c = p2**2 * (2 / (1 - p2) ** 2 + 1 / (1 - p3) ** 2 + p2 / (1 - p1) - 2) - 1
    s300, s210, s111 = (3, 0, 0), (2, 1, 0), (1, 1, 1)
    return {(s300, s210): a, (s300, s111): b, (s210, s111): c}
