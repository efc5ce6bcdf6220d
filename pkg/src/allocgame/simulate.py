"""Seeded Monte Carlo oracle that plays the game rules literally.

Random numbers come from numpy's Philox4x32-10 counter-based generator.
Trials are grouped in fixed blocks of ``BLOCK`` trials; block ``b`` of a
run with seed ``s`` uses ``Philox(SeedSequence([s, b]))``, so a result
depends only on (seed, trials, parameters), never on thread count or
completion order. Each turn draws one uniform per live trial (two under
separate throws) and maps it to a box by inverse CDF lookup.

Sums are accumulated as exact Python integers, so the reduction is
order-independent.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import math
import os
from typing import Callable, Sequence

import numpy as np

from allocgame.config import COMMON, GameConfig
from allocgame.errors import ArgumentError, NonTerminationError
from allocgame.strategies import Strategy, as_probs, as_strategy

__all__ = [
    "SimResult",
    "BLOCK",
    "TURN_CAP",
    "max_workers",
    "simulate_race",
    "simulate_margin",
    "estimate_expectation",
]

BLOCK = 8192
TURN_CAP = 10**6


def max_workers() -> int:
    """Thread count for internal parallelism; ALLOC_GAME_THREADS caps it."""
    default = os.cpu_count() or 1
    try:
        return max(1, int(os.environ.get("ALLOC_GAME_THREADS", default)))
    except ValueError:
        return default


@dataclasses.dataclass(frozen=True)
class SimResult:
    """Summary of a batch of simulated trials.

    ``trials`` counts completed trials; trials that hit the turn cap are
    reported in ``cap_hits`` and excluded from the statistics. For races,
    ``wins + draws + losses == trials``.
    """

    trials: int
    mean: float
    std_error: float
    wins: int = 0
    draws: int = 0
    losses: int = 0
    cap_hits: int = 0

    def within(self, target: float, n_se: float) -> bool:
        """Whether ``target`` lies within ``n_se`` standard errors of the mean."""
        return abs(self.mean - target) <= n_se * self.std_error

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class _Tally:
    n: int = 0
    s1: int = 0
    s2: int = 0
    wins: int = 0
    draws: int = 0
    losses: int = 0
    cap_hits: int = 0

    def add(self, values: np.ndarray):
        values = values.astype(np.int64)
        self.n += len(values)
        self.s1 += int(values.sum())
        self.s2 += int((values * values).sum())

    def merge(self, other: "_Tally"):
        for f in dataclasses.fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def result(self) -> SimResult:
        n = self.n
        if n == 0:
            return SimResult(0, math.nan, math.nan, cap_hits=self.cap_hits)
        mean = self.s1 / n
        if n > 1:
            var = (n * self.s2 - self.s1 * self.s1) / (n * (n - 1))
            se = math.sqrt(max(var, 0.0) / n)
        else:
            se = math.nan
        return SimResult(n, mean, se, self.wins, self.draws, self.losses, self.cap_hits)


def _cdf(probs: Sequence[float]) -> np.ndarray:
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    cdf[-1] = 1.0
    return cdf


def _draw(rng: np.random.Generator, cdf: np.ndarray, m: int) -> np.ndarray:
    return np.minimum(np.searchsorted(cdf, rng.random(m), side="right"), len(cdf) - 1)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _clear_times(strategies: Sequence[Strategy], cdfs: Sequence[np.ndarray], common: bool,
                 m: int, rng: np.random.Generator, until_all: bool, cap: int) -> np.ndarray:
    """Play ``m`` trials turn by turn; return the turn on which each player
    cleared, shape (players, m), with 0 meaning "not cleared".

    With ``until_all`` play continues until every player has cleared,
    otherwise a trial stops as soon as any player clears.
    """
    players = len(strategies)
    k = len(strategies[0])
    rem = [np.tile(np.asarray(s, dtype=np.int64), (m, 1)) for s in strategies]
    left = [np.full(m, sum(s), dtype=np.int64) for s in strategies]
    done_at = np.zeros((players, m), dtype=np.int64)
    live = np.arange(m)
    turn = 0
    while len(live) and turn < cap:
        turn += 1
        shared = _draw(rng, cdfs[0], len(live)) if common else None
        for j in range(players):
            box = shared if common else _draw(rng, cdfs[j], len(live))
            flat = rem[j].reshape(-1)
            pos = live * k + box
            hit = (flat[pos] > 0) & (left[j][live] > 0)
            flat[pos[hit]] -= 1
            left[j][live[hit]] -= 1
            newly = hit & (left[j][live] == 0)
            done_at[j, live[newly]] = turn
        cleared = done_at[:, live] > 0
        finished = cleared.all(axis=0) if until_all else cleared.any(axis=0)
        live = live[~finished]
    return done_at


def _run_blocks(trials: int, seed: int, work: Callable[[int, int], _Tally]) -> SimResult:
    if trials < 1:
        raise ArgumentError(f"trials must be positive, got {trials}")
    blocks = [(b, min(BLOCK, trials - b * BLOCK)) for b in range(math.ceil(trials / BLOCK))]
    total = _Tally()
    workers = max_workers()
    if workers == 1 or len(blocks) == 1:
        parts = [work(b, m) for b, m in blocks]
    else:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda bm: work(*bm), blocks))
    for part in parts:
        total.merge(part)
    return total.result()


def _check_reachable(strategy: Strategy, probs: Sequence[float]):
    for c, q in zip(strategy, probs):
        if c and q == 0.0:
            raise NonTerminationError("a box holding counters has zero probability")


def _race_setup(me, them, config: GameConfig):
    me, them = as_strategy(me), as_strategy(them)
    if len(me) != config.k or len(them) != config.k:
        raise ArgumentError("strategies and probabilities disagree on the number of boxes")
    if sum(me) == 0 or sum(them) == 0:
        raise ArgumentError("both strategies must hold counters")
    _check_reachable(me, config.probs)
    _check_reachable(them, config.opponent_probs)
    cdfs = [_cdf(config.probs), _cdf(config.opponent_probs)]
    return me, them, cdfs, config.regime == COMMON


def simulate_race(me: Sequence[int], them: Sequence[int], config: GameConfig,
                  trials: int, seed: int, turn_cap: int = TURN_CAP) -> SimResult:
    """Estimate the payoff to ``me`` by playing ``trials`` games.

    The mean is the average payoff (+1 win, 0 draw, -1 loss).
    """
    me, them, cdfs, common = _race_setup(me, them, config)

    def work(block: int, m: int) -> _Tally:
        done = _clear_times([me, them], cdfs, common, m, _block_rng(seed, block),
                            until_all=False, cap=turn_cap)
        mine, theirs = done
        stuck = (mine == 0) & (theirs == 0)
        mine = np.where(mine == 0, np.iinfo(np.int64).max, mine)[~stuck]
        theirs = np.where(theirs == 0, np.iinfo(np.int64).max, theirs)[~stuck]
        payoff = np.sign(theirs - mine)
        tally = _Tally(wins=int((payoff > 0).sum()), draws=int((payoff == 0).sum()),
                       losses=int((payoff < 0).sum()), cap_hits=int(stuck.sum()))
        tally.add(payoff)
        return tally

    return _run_blocks(trials, seed, work)


def simulate_margin(me: Sequence[int], them: Sequence[int], config: GameConfig,
                    trials: int, seed: int, turn_cap: int = TURN_CAP) -> SimResult:
    """Estimate the mean margin of victory of ``me``.

    The margin is the number of turns ``them`` needs to clear after ``me``
    has cleared (negative when ``me`` loses). Play continues past the end
    of the race until both have cleared.
    """
    me, them, cdfs, common = _race_setup(me, them, config)

    def work(block: int, m: int) -> _Tally:
        done = _clear_times([me, them], cdfs, common, m, _block_rng(seed, block),
                            until_all=True, cap=turn_cap)
        ok = (done > 0).all(axis=0)
        margin = done[1, ok] - done[0, ok]
        tally = _Tally(wins=int((margin > 0).sum()), draws=int((margin == 0).sum()),
                       losses=int((margin < 0).sum()), cap_hits=int((~ok).sum()))
        tally.add(margin)
        return tally

    return _run_blocks(trials, seed, work)


def estimate_expectation(strategy: Sequence[int], probs: Sequence[float], trials: int,
                         seed: int, turn_cap: int = TURN_CAP) -> SimResult:
    """Estimate E[X_S], the excess throws needed to clear ``strategy``."""
    strategy = as_strategy(strategy)
    probs = as_probs(probs)
    if len(strategy) != len(probs):
        raise ArgumentError("strategy and probabilities disagree on the number of boxes")
    if sum(strategy) == 0:
        raise ArgumentError("strategy must hold counters")
    _check_reachable(strategy, probs)
    cdfs = [_cdf(probs)]
    n = sum(strategy)

    def work(block: int, m: int) -> _Tally:
        done = _clear_times([strategy], cdfs, True, m, _block_rng(seed, block),
                            until_all=True, cap=turn_cap)[0]
        ok = done > 0
        tally = _Tally(cap_hits=int((~ok).sum()))
        tally.add(done[ok] - n)
        return tally

    return _run_blocks(trials, seed, work)
