"""Game configuration and payoff record shared by the engines."""

from __future__ import annotations

import dataclasses
from typing import Optional, Sequence

from allocgame.errors import ArgumentError
from allocgame.specfun import DEFAULT_TOLERANCE, Tolerance
from allocgame.strategies import ProbVector, as_probs

COMMON = "common"
SEPARATE = "separate"
REGIMES = (COMMON, SEPARATE)

DEFAULT_STATE_CAP = 10**7


@dataclasses.dataclass(frozen=True)
class PayoffBreakdown:
    """Outcome probabilities for the row player, and the game value."""

    p_win: float
    p_draw: float
    p_lose: float

    @property
    def value(self) -> float:
        return self.p_win - self.p_lose

    def flipped(self) -> "PayoffBreakdown":
        """The same game seen from the other player's side."""
        return PayoffBreakdown(self.p_lose, self.p_draw, self.p_win)

    def to_dict(self) -> dict:
        return {"p_win": self.p_win, "p_draw": self.p_draw,
                "p_lose": self.p_lose, "value": self.value}


@dataclasses.dataclass(frozen=True)
class GameConfig:
    """Régime plus per-player box probabilities.

    Under the common régime only ``probs`` is used. Under the separate
    régime player II uses ``their_probs`` when given, else ``probs``.
    """

    regime: str
    probs: ProbVector
    their_probs: Optional[ProbVector] = None
    state_cap: int = DEFAULT_STATE_CAP
    tol: Tolerance = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ArgumentError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        object.__setattr__(self, "probs", as_probs(self.probs))
        if self.their_probs is not None:
            theirs = as_probs(self.their_probs)
            if len(theirs) != len(self.probs):
                raise ArgumentError("both players need the same number of boxes")
            if self.regime == COMMON and theirs != self.probs:
                raise ArgumentError("a common throw needs a single probability vector")
            object.__setattr__(self, "their_probs", theirs)

    @property
    def k(self) -> int:
        return len(self.probs)

    @property
    def opponent_probs(self) -> ProbVector:
        return self.their_probs if self.their_probs is not None else self.probs

    def payoff(self, me: Sequence[int], them: Sequence[int]) -> PayoffBreakdown:
        """Exact payoff of ``me`` against ``them`` under this configuration."""
        # local imports: the engines import this module
        if self.regime == COMMON:
            from allocgame.common_game import payoff_common_general
            return payoff_common_general(me, them, self.probs, state_cap=self.state_cap)
        from allocgame.separate_game import payoff_separate
        return payoff_separate(me, them, self.probs, self.opponent_probs,
                               state_cap=self.state_cap)
