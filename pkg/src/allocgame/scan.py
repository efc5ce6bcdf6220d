"""Parameter sweeps: two-box cut-off staircases and ternary strategy maps.

Ternary scans cover the restricted simplex p1 >= p2 >= p3 with corners
(1, 0, 0), (1/2, 1/2, 0) and (1/3, 1/3, 1/3). A grid point with integer
barycentric weights (a, b, c), a + b + c = R, sits at
(a * (1,0,0) + b * (1/2,1/2,0) + c * (1/3,1/3,1/3)) / R, and points are
emitted in increasing (a, b) order.

The exact engines are evaluated for all grid points at once: their
recursions only use arithmetic, so they accept numpy arrays of
probabilities directly.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

import numpy as np

from allocgame.common_game import common_race, state_count
from allocgame.config import COMMON, DEFAULT_STATE_CAP, SEPARATE
from allocgame.errors import AllocGameError, ArgumentError, CapacityError
from allocgame.removal import bisect_root, cutoff_two_box, expect_recursion
from allocgame.separate_game import separate_race
from allocgame.solver import solve_zero_sum
from allocgame.strategies import Strategy, enumerate_monotone, format_strategy

__all__ = [
    "scan_cutoffs",
    "ternary_grid",
    "scan_ternary",
    "matrices_on_grid",
    "boundary_on_rays",
    "chord_deviation",
    "rows_to_csv",
    "MODES",
    "DEFAULT_RESOLUTION",
]

MODES = ("expectation", "minimax-separate", "minimax-common")
DEFAULT_RESOLUTION = 200
PERTURB = 1e-9
# a minimax mix counts as mixed when its second-largest weight exceeds this
MIXED_THRESHOLD = 1e-4

CORNERS = np.array([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [1 / 3, 1 / 3, 1 / 3]])


def scan_cutoffs(n_max: int) -> list[dict]:
    """Cut-off probabilities between adjacent two-box allocations.

    One row per n = 1..n_max and a = 1..n: the box-1 probability above
    which <a, n-a> beats <a-1, n-a+1> in expectation.
    """
    if not 1 <= n_max <= 12:
        raise ArgumentError(f"n_max must lie in 1..12, got {n_max}")
    rows = []
    for n in range(1, n_max + 1):
        for a in range(1, n + 1):
            rows.append({"n": n, "a": a, "b": n - a, "p_cutoff": cutoff_two_box(a, n - a)})
    return rows


def ternary_grid(resolution: int = DEFAULT_RESOLUTION):
    """Grid points of the restricted simplex.

    Returns:
        (probs, perturbed): ``probs`` has shape (G, 3); ``perturbed`` flags
        points where a zero probability was raised to 1e-9 before
        rescaling to sum 1.
    """
    if resolution < 1:
        raise ArgumentError(f"resolution must be positive, got {resolution}")
    weights = [(a, b, resolution - a - b)
               for a in range(resolution + 1) for b in range(resolution + 1 - a)]
    w = np.array(weights, dtype=float) / resolution
    probs = w @ CORNERS
    zero = probs < PERTURB
    probs = np.where(zero, PERTURB, probs)
    # rescaling keeps the order p1 >= p2 >= p3 intact
    probs /= probs.sum(axis=1, keepdims=True)
    return probs, zero.any(axis=1)


def _columns(probs: np.ndarray) -> tuple[np.ndarray, ...]:
    return tuple(probs[:, i] for i in range(probs.shape[1]))


def matrices_on_grid(strategies: Sequence[Strategy], regime: str, probs: np.ndarray,
                     state_cap: int = DEFAULT_STATE_CAP) -> np.ndarray:
    """Payoff matrices at every grid point, shape (G, m, m).

    Both players use the same probability vector at each point, so only
    the upper triangle is computed.
    """
    cols = _columns(probs)
    m = len(strategies)
    out = np.zeros((len(probs), m, m))
    for i in range(m):
        for j in range(i + 1, m):
            me, them = strategies[i], strategies[j]
            if state_count(me, them) > state_cap:
                raise CapacityError(f"{format_strategy(me)} vs {format_strategy(them)} "
                                    f"exceeds the state cap of {state_cap}")
            if regime == COMMON:
                win, _, lose = common_race(me, them, cols)
            else:
                win, _, lose = separate_race(me, them, cols, cols)
            out[:, i, j] = win - lose
            out[:, j, i] = lose - win
    return out


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _minimax_row(matrix: np.ndarray, strategies: Sequence[Strategy]) -> dict:
    sol = solve_zero_sum(matrix)
    order = sorted(sol.support, key=lambda i: -sol.row_mix[i])
    weights = [float(sol.row_mix[i]) for i in order]
    mixed = len(order) > 1 and weights[1] > MIXED_THRESHOLD
    return {
        "result": "MIXED" if mixed else format_strategy(strategies[order[0]]),
        "value": _fmt(sol.value),
        "support": ";".join(format_strategy(strategies[i]) for i in order),
        "weights": ";".join(_fmt(w) for w in weights),
    }


def scan_ternary(n: int, mode: str, resolution: int = DEFAULT_RESOLUTION,
                 strategies: Sequence[Strategy] | None = None) -> list[dict]:
    """Best strategy (or minimax solution) at every ternary grid point.

    Args:
        n: quota.
        mode: ``"expectation"``, ``"minimax-separate"`` or ``"minimax-common"``.
        resolution: number of grid steps along each barycentric axis.
        strategies: candidate set; defaults to the monotone allocations.

    Returns:
        One dict per grid point with keys p1, p2, p3, perturbed, result,
        value, support, weights, error. Engine failures are recorded in
        ``error`` and the scan carries on.
    """
    if mode not in MODES:
        raise ArgumentError(f"mode must be one of {MODES}, got {mode!r}")
    strategies = list(strategies or enumerate_monotone(n, 3))
    probs, perturbed = ternary_grid(resolution)
    rows = [{"p1": _fmt(p[0]), "p2": _fmt(p[1]), "p3": _fmt(p[2]),
             "perturbed": int(f), "result": "", "value": "", "support": "",
             "weights": "", "error": ""} for p, f in zip(probs, perturbed)]

    if mode == "expectation":
        cols = _columns(probs)
        values = np.array([np.broadcast_to(expect_recursion(s, cols), len(probs))
                           for s in strategies])
        best = values.min(axis=0)
        # first strategy within rounding of the minimum wins ties
        first = np.argmax(values <= best + 1e-12 * np.maximum(1.0, np.abs(best)), axis=0)
        for row, i, v in zip(rows, first, best):
            row["result"] = format_strategy(strategies[i])
            row["value"] = _fmt(v)
            row["support"] = row["result"]
            row["weights"] = "1"
        return rows

    regime = COMMON if mode == "minimax-common" else SEPARATE
    try:
        mats = matrices_on_grid(strategies, regime, probs)
    except AllocGameError as exc:
        for row in rows:
            row["error"] = str(exc)
        return rows
    for row, mat in zip(rows, mats):
        try:
            row.update(_minimax_row(mat, strategies))
        except AllocGameError as exc:
            row["error"] = str(exc)
    return rows


def rows_to_csv(rows: Iterable[dict]) -> str:
    """Render scan rows as CSV with a header."""
    rows = list(rows)
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def boundary_on_rays(first: Strategy, second: Strategy, rays: int = 11,
                     value=expect_recursion) -> np.ndarray:
    """Points where two strategies have equal expectation.

    Searches along rays from the uniform point (1/3, 1/3, 1/3) to the
    edge p3 = 0 of the restricted simplex, one ray per edge point
    (1 - s/2, s/2, 0) for s evenly spaced in [0, 1]. Rays without a sign
    change are skipped.

    Returns:
        Array of shape (found, 3).
    """
    uniform = CORNERS[2]
    found = []
    for s in np.linspace(0.0, 1.0, rays):
        edge = np.array([1 - s / 2, s / 2, 0.0])

        def at(t: float) -> tuple[float, ...]:
            return tuple((1 - t) * uniform + t * edge)

        def gap(t: float) -> float:
            return float(value(first, at(t)) - value(second, at(t)))

        try:
            t = bisect_root(gap, 1e-9, 1 - 1e-9, xtol=1e-14)
        except AllocGameError:
            continue
        found.append(at(t))
    return np.array(found)


def chord_deviation(points: np.ndarray) -> float:
    """Largest distance from an interior point to the chord joining the
    first and last points, measured in the (p1, p2) plane."""
    a, c = points[0, :2], points[-1, :2]
    chord = c - a
    length = math.hypot(*chord)
    return max(abs(chord[0] * (p[1] - a[1]) - chord[1] * (p[0] - a[0])) / length
               for p in points[1:-1, :2])
