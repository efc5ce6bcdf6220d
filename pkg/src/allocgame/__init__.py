"""Exact and Monte Carlo analysis of the two-player counter-removal game.

Each player spreads a quota of counters over k boxes. Every turn a box is
drawn at random (one draw shared by both players, or one each), and a
player holding a counter in the drawn box removes it. The first player to
clear all counters wins.
"""

from __future__ import annotations

from allocgame.common_game import (
    common_race,
    critical_p_common,
    margin_mean_two_box,
    payoff_common_general,
    payoff_common_two_box,
)
from allocgame.config import COMMON, SEPARATE, GameConfig, PayoffBreakdown
from allocgame.errors import (
    AllocGameError,
    ArgumentError,
    CapacityError,
    ConvergenceError,
    NoRootError,
    NonTerminationError,
    SolverError,
)
from allocgame.removal import (
    cutoff_two_box,
    expect_general,
    expect_three_closed,
    expect_two_box,
    pmf_general,
    pmf_three_box,
    pmf_two_box,
)
from allocgame.scan import scan_cutoffs, scan_ternary
from allocgame.separate_game import payoff_separate
from allocgame.simulate import SimResult, estimate_expectation, simulate_margin, simulate_race
from allocgame.solver import GameSolution, PayoffMatrix, best_expectation, build_matrix, solve_zero_sum
from allocgame.specfun import Tolerance, hyp2f1, reg_inc_beta, reg_inc_gamma_upper
from allocgame.strategies import (
    enumerate_compositions,
    enumerate_monotone,
    enumerate_respecting_ties,
    format_strategy,
    parse_probs,
    parse_strategy,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AllocGameError",
    "ArgumentError",
    "best_expectation",
    "build_matrix",
    "CapacityError",
    "COMMON",
    "common_race",
    "ConvergenceError",
    "critical_p_common",
    "cutoff_two_box",
    "enumerate_compositions",
    "enumerate_monotone",
    "enumerate_respecting_ties",
    "estimate_expectation",
    "expect_general",
    "expect_three_closed",
    "expect_two_box",
    "format_strategy",
    "GameConfig",
    "GameSolution",
    "hyp2f1",
    "margin_mean_two_box",
    "NonTerminationError",
    "NoRootError",
    "parse_probs",
    "parse_strategy",
    "payoff_common_general",
    "payoff_common_two_box",
    "payoff_separate",
    "PayoffBreakdown",
    "PayoffMatrix",
    "pmf_general",
    "pmf_three_box",
    "pmf_two_box",
    "reg_inc_beta",
    "reg_inc_gamma_upper",
    "scan_cutoffs",
    "scan_ternary",
    "SEPARATE",
    "SimResult",
    "simulate_margin",
    "simulate_race",
    "solve_zero_sum",
    "SolverError",
    "Tolerance",
]
