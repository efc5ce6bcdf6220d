"""Special functions on the restricted domains the game formulas need.

Everything here is scalar, pure and deterministic. Combinatorial weights
are carried as logarithms and only exponentiated at the last step, so
that coefficients like (n+r-1)!/(n1-1)!... stay representable for the
quotas and excess counts that occur in practice.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

from allocgame.errors import ArgumentError, ConvergenceError

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "log_factorial",
    "log_multinomial",
    "reg_inc_beta",
    "reg_inc_gamma_upper",
    "hyp2f1",
]

# Above this total, exact integer factorials get slow; fall back to lgamma.
_EXACT_FACTORIAL_LIMIT = 1000


@dataclasses.dataclass(frozen=True)
class Tolerance:
    """Stopping rule for infinite series.

    Attributes:
        rel_eps: stop once a term is smaller than ``rel_eps`` times the
            magnitude accumulated so far.
        max_terms: hard cap on the number of terms.
    """

    rel_eps: float = 1e-13
    max_terms: int = 100_000

    def __post_init__(self):
        if not 0.0 < self.rel_eps < 1e-6:
            raise ArgumentError(f"rel_eps must lie in (0, 1e-6), got {self.rel_eps}")
        if self.max_terms < 1000:
            raise ArgumentError(f"max_terms must be >= 1000, got {self.max_terms}")


DEFAULT_TOLERANCE = Tolerance()


def log_factorial(m: int) -> float:
    """Return ln(m!) for a nonnegative integer m."""
    if m < 0:
        raise ArgumentError(f"factorial of negative integer {m}")
    if m <= _EXACT_FACTORIAL_LIMIT:
        return math.log(math.factorial(m))
    return math.lgamma(m + 1)


def log_multinomial(total: int, parts: Sequence[int]) -> float:
    """Log of the multinomial coefficient total! / prod(part!).

    A negative part means the coefficient is zero, so ``-inf`` is
    returned. This lets formula terms with a ``n_i - 1`` lower index for
    an empty box drop out without special casing.

    Raises:
        ArgumentError: if ``sum(parts) != total`` or ``total < 0``.
    """
    parts = [int(x) for x in parts]
    if total < 0:
        raise ArgumentError(f"total must be nonnegative, got {total}")
    if sum(parts) != total:
        raise ArgumentError(f"parts {parts} do not sum to {total}")
    if any(x < 0 for x in parts):
        return -math.inf
    if total <= _EXACT_FACTORIAL_LIMIT:
        coef = math.factorial(total)
        for x in parts:
            coef //= math.factorial(x)
        return math.log(coef)
    return math.lgamma(total + 1) - math.fsum(math.lgamma(x + 1) for x in parts)


def _check_positive_int(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ArgumentError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def reg_inc_beta(x: float, alpha: int, beta_: int) -> float:
    """Regularized incomplete beta I_x(alpha, beta) for integer parameters.

    Uses the identity I_x(a, b) = P(Bin(a + b - 1, x) >= a), summing the
    binomial tail term by term in log space.
    """
    a = _check_positive_int("alpha", alpha)
    b = _check_positive_int("beta_", beta_)
    if not 0.0 <= x <= 1.0:
        raise ArgumentError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    trials = a + b - 1
    lx, l1x = math.log(x), math.log1p(-x)
    terms = [
        math.exp(log_multinomial(trials, [j, trials - j]) + j * lx + (trials - j) * l1x)
        for j in range(a, trials + 1)
    ]
    return min(1.0, math.fsum(terms))


def reg_inc_gamma_upper(n: int, x: float) -> float:
    """Upper regularized gamma Q(n, x) = P(Poisson(x) < n), integer n >= 1.

    This is also the survival function P(Gamma(n, 1) > x).
    """
    n = _check_positive_int("n", n)
    if x < 0:
        raise ArgumentError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 1.0
    lx = math.log(x)
    terms = [math.exp(j * lx - x - log_factorial(j)) for j in range(n)]
    return min(1.0, math.fsum(terms))


def _nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def _poly_series(a: float, b: float, c: float, z: float, degree: int) -> float:
    term, terms = 1.0, [1.0]
    for k in range(degree):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        terms.append(term)
    return math.fsum(terms)


def _power_series(a, b, c, z, tol: Tolerance) -> float:
    term, terms = 1.0, [1.0]
    acc = 1.0
    # the remaining tail is roughly term / (1 - z) once the ratio settles near z
    eps = tol.rel_eps * (1.0 - abs(z))
    for k in range(tol.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        terms.append(term)
        acc += abs(term)
        if abs(term) < eps * acc:
            return math.fsum(terms)
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {tol.max_terms} terms",
        partial=math.fsum(terms),
        terms=tol.max_terms,
    )


def hyp2f1(a: float, b: float, c: float, z: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) by its defining series.

    Supported domains:

    * ``a`` or ``b`` a nonpositive integer: the series is a polynomial and
      is summed exactly to its degree, for any real ``z``.
    * ``0 <= z < 1`` and ``c > 0``: the series is summed until the current
      term drops below ``tol.rel_eps`` of the accumulated magnitude.

    For ``z > 0.9`` a linear transformation is applied first. Euler's
    transformation is used when it makes the series terminate; otherwise
    the z -> 1 - z connection formula is used when c - a - b is not an
    integer, and the plain series (slow but convergent) when it is.

    Raises:
        ArgumentError: outside the supported domains, or ``c`` a
            nonpositive integer that the series would hit.
        ConvergenceError: the term cap was reached; carries the partial sum.
    """
    if z == 0.0:
        return 1.0
    for top in (a, b):
        if _nonpositive_int(top):
            degree = int(-top)
            if _nonpositive_int(c) and -c < degree:
                raise ArgumentError(f"c={c} hits a pole before the series terminates")
            return _poly_series(a, b, c, z, degree)
    if not (0.0 <= z < 1.0 and c > 0):
        raise ArgumentError(f"2F1({a}, {b}; {c}; {z}) is outside the supported domain")
    if z <= 0.9:
        return _power_series(a, b, c, z, tol)

    excess = c - a - b
    for top in (c - a, c - b):
        if _nonpositive_int(top):
            other = c - b if top == c - a else c - a
            return (1.0 - z) ** excess * _poly_series(top, other, c, z, int(-top))
    if not float(excess).is_integer():
        w = 1.0 - z
        first = (
            math.gamma(c) * math.gamma(excess) / (math.gamma(c - a) * math.gamma(c - b))
        ) * _power_series(a, b, 1.0 - excess, w, tol)
        second = (
            w**excess
            * math.gamma(c) * math.gamma(-excess) / (math.gamma(a) * math.gamma(b))
        ) * _power_series(c - a, c - b, 1.0 + excess, w, tol)
        return first + second
    return _power_series(a, b, c, z, tol)
