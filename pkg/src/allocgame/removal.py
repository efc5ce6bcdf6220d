"""Distribution of the excess-throw count X_S for a single player.

X_S is the number of throws needed to clear strategy S, minus the quota
n. Everything here concerns one player in isolation, so the throw régime
is irrelevant.

Three independent routes to E[X_S] are provided for a general strategy:

* ``"integral"``: embed the throws in a unit-rate Poisson process, so box
  i is cleared at an independent Gamma(n_i, rate p_i) time and
  E[t_S] = int_0^inf P(max_i Gamma_i > s) ds.
* ``"series"``: sum r * P(X_S = r) using the exact PMF.
* ``"recursion"``: first-step analysis on the remaining-counter state.
  This one accepts numpy arrays of probabilities and is used by the scans.
"""

from __future__ import annotations

import functools
import math
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from allocgame.errors import ArgumentError, NoRootError, NonTerminationError
from allocgame.specfun import DEFAULT_TOLERANCE, Tolerance, hyp2f1, log_factorial
from allocgame.specfun import log_multinomial, reg_inc_gamma_upper
from allocgame.strategies import Strategy, as_probs, as_strategy

__all__ = [
    "pmf_two_box",
    "expect_two_box",
    "pmf_three_box",
    "pmf_three_box_direct",
    "pmf_three_box_hyper",
    "expect_three_closed",
    "pmf_general",
    "pmf_general_table",
    "pmf_until_converged",
    "expect_general",
    "expect_integral",
    "expect_series",
    "expect_recursion",
    "bisect_root",
    "cutoff_two_box",
]

# PMF truncation: cumulative mass and last-term thresholds.
PMF_MASS_TARGET = 1.0 - 1e-12
PMF_LAST_TERM = 1e-15
# bound on the neglected part of sum(r * pmf) for the series expectation
SERIES_TAIL = 1e-12


def _check_two_box(a: int, b: int, p: float):
    if a < 0 or b < 0 or a + b < 1:
        raise ArgumentError(f"need a, b >= 0 and a + b >= 1, got a={a}, b={b}")
    if not 0.0 < p < 1.0:
        raise ArgumentError(f"p must lie strictly inside (0, 1), got {p}")


def pmf_two_box(a: int, b: int, p: float, r: int) -> float:
    """P(X = r) for strategy <a, b> with box probabilities (p, 1 - p).

    The two terms are "last counter from box 1" and "last counter from
    box 2"; a term whose box is empty has a zero coefficient and vanishes.
    """
    _check_two_box(a, b, p)
    if r < 0:
        return 0.0
    lp, lq = math.log(p), math.log1p(-p)
    total = a + b + r - 1
    base = a * lp + b * lq
    last_one = log_multinomial(total, [a - 1, b + r]) + r * lq
    last_two = log_multinomial(total, [a + r, b - 1]) + r * lp
    return math.exp(base + last_one) + math.exp(base + last_two)


def expect_two_box(a: int, b: int, p: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """E[X] for strategy <a, b> through the hypergeometric closed form."""
    _check_two_box(a, b, p)
    q = 1.0 - p
    out = 0.0
    if a >= 1:
        coef = math.exp(a * math.log(p) + (b + 1) * math.log(q)
                        + log_multinomial(a + b, [a - 1, b + 1]))
        out += coef * hyp2f1(a + b + 1, 2, b + 2, q, tol)
    if b >= 1:
        coef = math.exp((a + 1) * math.log(p) + b * math.log(q)
                        + log_multinomial(a + b, [a + 1, b - 1]))
        out += coef * hyp2f1(a + b + 1, 2, a + 2, p, tol)
    return out


def _check_three(counts, probs):
    if len(counts) != 3 or len(probs) != 3:
        raise ArgumentError("three-box formulas need exactly three boxes")
    if min(counts) < 0 or sum(counts) < 1:
        raise ArgumentError(f"invalid three-box allocation {counts}")
    if min(probs) <= 0.0 or abs(math.fsum(probs) - 1.0) > 1e-9:
        raise ArgumentError(f"three-box probabilities must be positive and sum to 1: {probs}")


def _others(i: int, probs) -> tuple[int, int]:
    j, l = [x for x in range(3) if x != i]
    # keep |p_j / p_l| <= 1 in the hypergeometric argument
    return (j, l) if probs[j] <= probs[l] else (l, j)


def pmf_three_box_direct(counts: Sequence[int], probs: Sequence[float], r: int) -> float:
    """Triple-term sum over the last-cleared box and the wasted throws.

    In the term for box i, the prefix contains n_i - 1 box-i throws and
    n_j + r_j throws of each other box, with r_j summing to r.
    """
    counts, probs = tuple(counts), tuple(probs)
    _check_three(counts, probs)
    n = sum(counts)
    logs = [math.log(x) for x in probs]
    terms = []
    for i in range(3):
        if counts[i] == 0:
            continue
        j, l = [x for x in range(3) if x != i]
        for rj in range(r + 1):
            rl = r - rj
            parts = [0, 0, 0]
            parts[i], parts[j], parts[l] = counts[i] - 1, counts[j] + rj, counts[l] + rl
            lw = (log_multinomial(n + r - 1, parts) + counts[i] * logs[i]
                  + (counts[j] + rj) * logs[j] + (counts[l] + rl) * logs[l])
            terms.append(math.exp(lw))
    return math.fsum(terms)


def pmf_three_box_hyper(counts: Sequence[int], probs: Sequence[float], r: int) -> float:
    """Same PMF with each inner sum written as a difference of two
    terminating 2F1 polynomials in -p_j/p_l."""
    counts, probs = tuple(counts), tuple(probs)
    _check_three(counts, probs)
    n = sum(counts)
    total = 0.0
    for i in range(3):
        ni = counts[i]
        if ni == 0:
            continue
        j, l = _others(i, probs)
        nj, nl = counts[j], counts[l]
        pj, pl = probs[j], probs[l]
        z = -pj / pl
        pre = ni * math.log(probs[i]) + nj * math.log(pj) + nl * math.log(pl)
        parts = [0, 0, 0]
        parts[i], parts[j], parts[l] = ni - 1, nj, nl + r
        full = math.exp(pre + r * math.log(pl) + log_multinomial(n + r - 1, parts)) \
            * hyp2f1(1, -nl - r, nj + 1, z)
        overshoot = 0.0
        if nl >= 1:
            parts[i], parts[j], parts[l] = ni - 1, nj + r + 1, nl - 1
            overshoot = math.exp(pre + (r + 1) * math.log(pj) - math.log(pl)
                                 + log_multinomial(n + r - 1, parts)) \
                * hyp2f1(1, 1 - nl, nj + r + 2, z)
        total += full - overshoot
    return total


def pmf_three_box(n1: int, n2: int, n3: int, p1: float, p2: float, p3: float, r: int,
                  debug: bool = False):
    """P(X = r) for a three-box strategy.

    Returns the hypergeometric evaluation. With ``debug`` returns the
    pair ``(hypergeometric, direct)`` so the two can be compared.
    """
    counts, probs = (n1, n2, n3), (p1, p2, p3)
    hyper = pmf_three_box_hyper(counts, probs, r)
    if debug:
        return hyper, pmf_three_box_direct(counts, probs, r)
    return hyper


_CLOSED_FORMS: dict[Strategy, Callable[[float, float, float], float]] = {
    (3, 0, 0): lambda p1, p2, p3: 3 * (1 - p1) / p1,
    (2, 1, 0): lambda p1, p2, p3: -3 + 1 / p2 + p2 * (3 * p1 + 2 * p2) / (p1 * (p1 + p2) ** 2),
    (1, 1, 1): lambda p1, p2, p3: (-2 + 1 / p1 + 1 / p2 + 1 / p3
                                   - 1 / (1 - p1) - 1 / (1 - p2) - 1 / (1 - p3)),
}


def expect_three_closed(strategy: Sequence[int], probs: Sequence[float]) -> float:
    """Closed-form E[X] for <3,0,0>, <2,1,0> and <1,1,1>.

    Works elementwise if the probabilities are numpy arrays.

    Raises:
        ArgumentError: for any other strategy.
    """
    key = tuple(int(c) for c in strategy)
    if key not in _CLOSED_FORMS:
        raise ArgumentError(f"no closed form for strategy {key}")
    if len(probs) != 3:
        raise ArgumentError("closed forms need three probabilities")
    return _CLOSED_FORMS[key](*probs)


def _check_general(strategy, probs) -> tuple[Strategy, tuple[float, ...]]:
    s = as_strategy(strategy)
    p = as_probs(probs)
    if len(s) != len(p):
        raise ArgumentError(f"strategy has {len(s)} boxes but {len(p)} probabilities")
    if sum(s) < 1:
        raise ArgumentError("strategy must hold at least one counter")
    for c, q in zip(s, p):
        if c > 0 and q == 0.0:
            raise NonTerminationError(f"box with {c} counters has zero probability")
    return s, p


def _log_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # out[r] = log sum_s exp(x[s] + y[r - s])
    out = np.full(len(x), -np.inf)
    y_rev = y[::-1]
    size = len(x)
    for r in range(size):
        v = x[: r + 1] + y_rev[size - 1 - r:]
        m = v.max()
        if m > -np.inf:
            out[r] = m + math.log(np.exp(v - m).sum())
    return out


def pmf_general_table(strategy: Sequence[int], probs: Sequence[float], r_max: int) -> np.ndarray:
    """P(X = r) for r = 0..r_max, any number of boxes.

    Outer sum over the box whose counter goes last; the inner sum over
    distributions of the r wasted throws among the other boxes factorises
    into a convolution of per-box weights p_j^(n_j+s) / (n_j+s)!, which is
    done in log space.
    """
    s, p = _check_general(strategy, probs)
    n, k = sum(s), len(s)
    size = r_max + 1
    lf = np.array([log_factorial(m) for m in range(n + size + 1)])
    with np.errstate(divide="ignore"):
        logp = np.log(np.array(p))
    steps = np.arange(size)

    per_box = []
    for j in range(k):
        if p[j] == 0.0:
            w = np.full(size, -np.inf)
            w[0] = 0.0  # empty box that is never drawn contributes nothing
        else:
            w = (s[j] + steps) * logp[j] - lf[s[j] + steps]
        per_box.append(w)

    # prefix/suffix convolutions give each "all boxes but i" product cheaply
    unit = np.full(size, -np.inf)
    unit[0] = 0.0
    prefix = [unit]
    for j in range(k):
        prefix.append(_log_convolve(prefix[-1], per_box[j]))
    suffix = [unit]
    for j in reversed(range(k)):
        suffix.append(_log_convolve(suffix[-1], per_box[j]))
    suffix.reverse()

    total = np.zeros(size)
    for i in range(k):
        if s[i] == 0:
            continue
        rest = _log_convolve(prefix[i], suffix[i + 1])
        lead = lf[n - 1 + steps] - lf[s[i] - 1] + s[i] * logp[i]
        total += np.exp(lead + rest)
    return total


def pmf_general(strategy: Sequence[int], probs: Sequence[float], r: int) -> float:
    """P(X = r) for any strategy and box probabilities."""
    if r < 0:
        return 0.0
    return float(pmf_general_table(strategy, probs, r)[r])


def _geometric_tail(pmf: np.ndarray) -> tuple[float, float]:
    """Envelope bounds on the neglected mass and first moment past the
    end of ``pmf``, using the last observed decay ratio."""
    last, prev = pmf[-1], pmf[-2]
    if last == 0.0:
        return 0.0, 0.0
    q = last / prev if prev > 0 else 1.0
    if q >= 1.0:
        return math.inf, math.inf
    big_r = len(pmf) - 1
    mass = last * q / (1 - q)
    moment = last * (big_r * q / (1 - q) + q / (1 - q) ** 2)
    return mass, moment


def pmf_until_converged(strategy: Sequence[int], probs: Sequence[float],
                        max_r: int = 200_000) -> np.ndarray:
    """PMF table long enough that the truncated tail is negligible.

    Stops once the cumulative mass reaches 1 - 1e-12, the last term is
    below 1e-15, and the envelope bound on the neglected part of
    sum(r * pmf) is below 1e-12.
    """
    s, p = _check_general(strategy, probs)
    active = [q for c, q in zip(s, p) if c > 0]
    r_max = max(64, int(4 * sum(s) / min(active)))
    while True:
        table = pmf_general_table(s, p, r_max)
        _, moment = _geometric_tail(table)
        if (math.fsum(table) >= PMF_MASS_TARGET and table[-1] < PMF_LAST_TERM
                and moment < SERIES_TAIL):
            return table
        if r_max >= max_r:
            raise NonTerminationError(f"PMF tail still heavy at r={r_max}")
        r_max *= 2


def expect_series(strategy: Sequence[int], probs: Sequence[float]) -> float:
    """E[X] as a truncated sum of r * P(X = r)."""
    table = pmf_until_converged(strategy, probs)
    return math.fsum(np.arange(len(table)) * table)


def expect_integral(strategy: Sequence[int], probs: Sequence[float]) -> float:
    """E[X] from the Poisson embedding.

    Box i is cleared at an independent Gamma(n_i, rate p_i) time, so
    E[t] = int_0^inf (1 - prod_i P(Gamma_i <= s)) ds, and E[X] = E[t] - n.
    """
    s, p = _check_general(strategy, probs)
    boxes = [(c, q) for c, q in zip(s, p) if c > 0]

    def survival(t: float) -> float:
        log_all_done = 0.0
        for c, q in boxes:
            left = reg_inc_gamma_upper(c, q * t)
            if left >= 1.0:
                return 1.0
            log_all_done += math.log1p(-left)
        return -math.expm1(log_all_done)

    def tail(t: float) -> float:
        return math.fsum(reg_inc_gamma_upper(c, q * t) for c, q in boxes)

    upper = 2.0 * max(c / q for c, q in boxes)
    while tail(upper) >= 1e-14:
        upper *= 1.5
    mean_guess = max(c / q for c, q in boxes)
    value, _ = integrate.quad(survival, 0.0, upper, points=[mean_guess],
                              epsabs=1e-11, epsrel=1e-13, limit=2000)
    return value - sum(s)


def expect_recursion(strategy: Sequence[int], probs):
    """E[X] by first-step analysis on the remaining-counter vector.

    From state u, a throw of a box with counters left moves to u - e_i;
    other throws are self-loops, so
    E(u) = (1 + sum_i p_i E(u - e_i)) / sum_i p_i over nonempty boxes.
    ``probs`` may hold numpy arrays (one value per grid point).
    """
    s = as_strategy(strategy)
    if len(s) != len(probs):
        raise ArgumentError(f"strategy has {len(s)} boxes but {len(probs)} probabilities")
    for c, q in zip(s, probs):
        if c > 0 and np.any(np.asarray(q) <= 0.0):
            raise NonTerminationError(f"box with {c} counters has zero probability")

    @functools.cache
    def go(u: Strategy):
        if not any(u):
            return 0.0
        mass = 0.0
        acc = 1.0
        for i, c in enumerate(u):
            if c:
                mass = mass + probs[i]
                acc = acc + probs[i] * go(u[:i] + (c - 1,) + u[i + 1:])
        return acc / mass

    return go(s) - sum(s)


_METHODS = {
    "integral": expect_integral,
    "series": expect_series,
    "recursion": expect_recursion,
}


def expect_general(strategy: Sequence[int], probs: Sequence[float],
                   method: str = "integral") -> float:
    """Expected excess throws E[X] for any strategy.

    Args:
        strategy: counters per box.
        probs: box probabilities; boxes holding counters must have p > 0.
        method: ``"integral"`` (default), ``"series"`` or ``"recursion"``.

    Raises:
        NonTerminationError: a box with counters has zero probability.
    """
    if method not in _METHODS:
        raise ArgumentError(f"unknown method {method!r}; choose from {sorted(_METHODS)}")
    _check_general(strategy, probs)
    return float(_METHODS[method](strategy, probs))


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                xtol: float = 1e-12, max_iter: int = 200) -> float:
    """Plain bisection for a sign change of ``f`` on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoRootError(f"no sign change on [{lo}, {hi}]: f={flo!r}, {fhi!r}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0 or hi - lo < xtol:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cutoff_two_box(a: int, b: int, eps: float = 1e-6) -> float:
    """Box-1 probability at which <a, b> and <a-1, b+1> have equal E[X].

    Above the cut-off <a, b> is the better of the two.
    """
    if a < 1 or b < 0:
        raise ArgumentError(f"need a >= 1 and b >= 0, got a={a}, b={b}")
    return bisect_root(
        lambda p: expect_two_box(a, b, p) - expect_two_box(a - 1, b + 1, p),
        eps, 1.0 - eps, xtol=1e-12,
    )
