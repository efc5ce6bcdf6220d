from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def forward_excess_pmf(strategy: Sequence[int], probs: Sequence[float], r_max: int) -> np.ndarray:
    """P(X = r) for r = 0..r_max by pushing state probabilities forward one
    throw at a time. Independent of the engines' formulas and recursions."""
    strategy = tuple(strategy)
    n = sum(strategy)
    dist = {strategy: 1.0}
    out = np.zeros(r_max + 1)
    for t in range(1, n + r_max + 1):
        nxt: dict = {}
        for state, w in dist.items():
            for i, q in enumerate(probs):
                if state[i]:
                    s2 = state[:i] + (state[i] - 1,) + state[i + 1:]
                else:
                    s2 = state
                nxt[s2] = nxt.get(s2, 0.0) + w * q
        done = nxt.pop(tuple(0 for _ in strategy), 0.0)
        if t >= n:
            out[t - n] = done
        dist = nxt
    return out


def forward_race(me, them, probs, their_probs=None, turns: int = 2000):
    """(win, draw, lose) by forward propagation of the joint state.

    With ``their_probs`` the players draw separately; otherwise one shared
    draw. Truncated after ``turns`` throws.
    """
    me, them = tuple(me), tuple(them)
    k = len(probs)
    zero = (0,) * k

    def step(state, i):
        return state[:i] + (state[i] - 1,) + state[i + 1:] if state[i] else state

    if their_probs is None:
        moves = [((i,), probs[i]) for i in range(k)]
    else:
        moves = [((i, j), probs[i] * their_probs[j]) for i, j in itertools.product(range(k), range(k))]
    dist = {(me, them): 1.0}
    win = draw = lose = 0.0
    for _ in range(turns):
        nxt: dict = {}
        for (u, v), w in dist.items():
            for idx, q in moves:
                i, j = (idx[0], idx[0]) if len(idx) == 1 else idx
                key = (step(u, i), step(v, j))
                nxt[key] = nxt.get(key, 0.0) + w * q
        dist = {}
        for (u, v), w in nxt.items():
            if u == zero and v == zero:
                draw += w
            elif u == zero:
                win += w
            elif v == zero:
                lose += w
            else:
                dist[(u, v)] = w
        if not dist:
            break
    return win, draw, lose


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
