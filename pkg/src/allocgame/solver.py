"""Payoff matrices over a strategy set and zero-sum game solutions."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from allocgame.config import GameConfig
from allocgame.errors import ArgumentError, CapacityError, SolverError
from allocgame.removal import expect_general
from allocgame.strategies import Strategy, as_strategy, format_strategy, parse_strategy

__all__ = [
    "PayoffMatrix",
    "GameSolution",
    "build_matrix",
    "solve_zero_sum",
    "best_expectation",
    "WEIGHT_FLOOR",
]

# mixed-strategy weights below this are treated as zero
WEIGHT_FLOOR = 1e-7
SADDLE_TOL = 1e-12
CERTIFICATE_TOL = 1e-8


@dataclasses.dataclass
class PayoffMatrix:
    """Expected payoff to the row player for every ordered strategy pair."""

    strategies: list[Strategy]
    values: np.ndarray

    def __post_init__(self):
        self.strategies = [as_strategy(s) for s in self.strategies]
        self.values = np.asarray(self.values, dtype=float)
        m = len(self.strategies)
        if self.values.shape != (m, m):
            raise ArgumentError(f"expected a {m}x{m} matrix, got shape {self.values.shape}")

    @property
    def labels(self) -> list[str]:
        return [format_strategy(s) for s in self.strategies]

    def antisymmetry_error(self) -> float:
        return float(np.abs(self.values + self.values.T).max())

    def to_csv(self, digits: int = 10) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["I\\II"] + self.labels)
        for label, row in zip(self.labels, self.values):
            writer.writerow([label] + [f"{x:.{digits}g}" for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PayoffMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        strategies = [parse_strategy(h) for h in header[1:]]
        if [parse_strategy(r[0]) for r in body] != strategies:
            raise ArgumentError("row and column strategy labels differ")
        return cls(strategies, [[float(x) for x in r[1:]] for r in body])

    def to_json(self) -> str:
        return json.dumps({"strategies": self.labels, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "PayoffMatrix":
        data = json.loads(text)
        return cls([parse_strategy(s) for s in data["strategies"]], data["values"])


@dataclasses.dataclass
class GameSolution:
    """Value and optimal mixtures of a zero-sum matrix game.

    ``support`` lists strategy indices carrying positive weight in
    ``row_mix``; ``pure`` is set when a saddle point was found.
    """

    value: float
    row_mix: np.ndarray
    col_mix: np.ndarray
    pure: bool
    support: list[int]
    strategies: list[Strategy]

    def weights(self) -> dict[Strategy, float]:
        return {self.strategies[i]: float(self.row_mix[i]) for i in self.support}

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "pure": self.pure,
            "support": [format_strategy(self.strategies[i]) for i in self.support],
            "weights": [float(self.row_mix[i]) for i in self.support],
            "row_mix": {format_strategy(s): float(w)
                        for s, w in zip(self.strategies, self.row_mix)},
            "col_mix": {format_strategy(s): float(w)
                        for s, w in zip(self.strategies, self.col_mix)},
        }


def build_matrix(strategies: Sequence[Sequence[int]], config: GameConfig) -> PayoffMatrix:
    """Payoff matrix of every ordered pair under ``config``.

    Only pairs i < j are evaluated; the lower triangle is filled by
    negation, so the result is exactly antisymmetric. With asymmetric
    probability vectors (separate régime) the game is not symmetric and
    every ordered pair is evaluated.

    Raises:
        CapacityError: an exact evaluation is too large; the message names
            the offending pair.
    """
    strategies = [as_strategy(s) for s in strategies]
    if not strategies:
        raise ArgumentError("empty strategy list")
    quotas = {sum(s) for s in strategies}
    sizes = {len(s) for s in strategies}
    if len(quotas) != 1 or sizes != {config.k}:
        raise ArgumentError("strategies must share one quota and match the box count")
    m = len(strategies)
    symmetric = config.opponent_probs == config.probs
    values = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i == j and symmetric or (symmetric and j < i):
                continue
            try:
                values[i, j] = config.payoff(strategies[i], strategies[j]).value
            except CapacityError as exc:
                raise CapacityError(
                    f"{format_strategy(strategies[i])} vs {format_strategy(strategies[j])}: {exc}"
                ) from exc
            if symmetric:
                values[j, i] = -values[i, j]
    return PayoffMatrix(strategies, values)


def _saddle(a: np.ndarray):
    row_min = a.min(axis=1)
    col_max = a.max(axis=0)
    lower, upper = row_min.max(), col_max.min()
    if upper - lower <= SADDLE_TOL:
        return int(np.argmax(row_min)), int(np.argmin(col_max)), float(lower)
    return None


def _lp_mix(a: np.ndarray) -> np.ndarray:
    """Optimal mixture for the row player of ``a`` (rows maximise)."""
    shift = 1.0 - a.min()
    b = a + shift  # strictly positive, so the game value is positive
    m, n = b.shape
    # min sum(y) s.t. B^T y >= 1, y >= 0; then x = y / sum(y)
    res = linprog(np.ones(m), A_ub=-b.T, b_ub=-np.ones(n), bounds=[(0, None)] * m,
                  method="highs-ds")
    if res.status != 0:
        raise SolverError(f"linear program failed: status {res.status}, {res.message}")
    y = np.clip(res.x, 0.0, None)
    return y / y.sum()


def _clean(mix: np.ndarray) -> np.ndarray:
    mix = np.where(mix < WEIGHT_FLOOR, 0.0, mix)
    return mix / mix.sum()


def solve_zero_sum(matrix: PayoffMatrix | np.ndarray) -> GameSolution:
    """Solve the zero-sum game for the row player.

    A pure saddle point is returned when one exists (first row and
    column in order on ties). Otherwise both players' linear programs are
    solved with a dense simplex method, weights below ``WEIGHT_FLOOR`` are
    dropped, and each mixture is checked against the other: the row mix
    must guarantee at least the value and the column mix at most the
    value, within 1e-8. If the floored mixtures fail that check the
    unfloored ones are returned instead.

    Raises:
        SolverError: the LP fails or the duality certificate does not hold.
    """
    if isinstance(matrix, PayoffMatrix):
        a, strategies = matrix.values, matrix.strategies
    else:
        a = np.asarray(matrix, dtype=float)
        strategies = [(i,) for i in range(a.shape[0])]
    if not np.all(np.isfinite(a)):
        raise ArgumentError("payoff matrix has non-finite entries")
    m, n = a.shape

    saddle = _saddle(a)
    if saddle is not None:
        i, j, value = saddle
        row_mix, col_mix = np.zeros(m), np.zeros(n)
        row_mix[i] = col_mix[j] = 1.0
        return GameSolution(value, row_mix, col_mix, True, [i], list(strategies))

    raw_row, raw_col = _lp_mix(a), _lp_mix(-a.T)
    row_mix, col_mix = _clean(raw_row), _clean(raw_col)
    guaranteed = float((row_mix @ a).min())
    conceded = float((a @ col_mix).max())
    if conceded - guaranteed > 2 * CERTIFICATE_TOL:
        # dropping tiny weights can cost more than the certificate allows
        # when payoffs are large relative to the floor; keep the raw mix then
        row_mix, col_mix = raw_row, raw_col
        guaranteed = float((row_mix @ a).min())
        conceded = float((a @ col_mix).max())
    if conceded - guaranteed > 2 * CERTIFICATE_TOL:
        raise SolverError(
            f"duality gap {conceded - guaranteed:.3g}: row mix guarantees {guaranteed!r}, "
            f"column mix concedes {conceded!r}"
        )
    value = 0.5 * (guaranteed + conceded)
    support = [int(i) for i in np.flatnonzero(row_mix > 0)]
    return GameSolution(value, row_mix, col_mix, len(support) == 1, support, list(strategies))


def best_expectation(strategies: Sequence[Sequence[int]], probs: Sequence[float],
                     method: str = "integral") -> Strategy:
    """Strategy with the smallest expected excess throws.

    Ties (within 1e-12 relative) go to the first strategy in the list.
    """
    strategies = [as_strategy(s) for s in strategies]
    if not strategies:
        raise ArgumentError("empty strategy list")
    values = [expect_general(s, probs, method=method) for s in strategies]
    best = min(values)
    slack = 1e-12 * max(1.0, abs(best))
    for s, v in zip(strategies, values):
        if v <= best + slack:
            return s
    raise AssertionError("unreachable")  # pragma: no cover
