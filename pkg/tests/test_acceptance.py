"""One test per acceptance criterion, each at its stated tolerance.

Every test prints a single PASS/FAIL line (also collected into the pytest
terminal summary) before asserting, so a failing criterion still reports
what it measured.
"""

from __future__ import annotations

import itertools
import json
import math
import time

import numpy as np
import pytest

from allocgame import reference as ref
from allocgame.cli import main
from allocgame.common_game import critical_p_common, payoff_common_general, payoff_common_two_box
from allocgame.config import COMMON, SEPARATE, GameConfig
from allocgame.removal import bisect_root, expect_general, expect_recursion, pmf_until_converged
from allocgame.separate_game import (
    payoff_10_01,
    payoff_20_01,
    payoff_20_10,
    payoff_2011_closed,
    payoff_separate,
)
from allocgame.simulate import estimate_expectation, simulate_race
from allocgame.solver import best_expectation, build_matrix, solve_zero_sum
from allocgame.strategies import (
    dice_probs,
    enumerate_compositions,
    enumerate_monotone,
    enumerate_respecting_ties,
    format_strategy,
    zipf_probs,
)

from .conftest import ACCEPTANCE_LINES


def verdict(number: int, title: str, clauses: dict[str, bool], detail: str = ""):
    ok = all(clauses.values())
    failed = [name for name, good in clauses.items() if not good]
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {title}"
    if failed:
        line += f" [failed: {', '.join(failed)}]"
    if detail:
        line += f" ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_two_box_matrix():
    start = time.perf_counter()
    matrix = build_matrix(ref.TABLE1_STRATEGIES, GameConfig(COMMON, (ref.TABLE1_P, 1 - ref.TABLE1_P)))
    sol = solve_zero_sum(matrix)
    elapsed = time.perf_counter() - start
    diff = float(np.abs(matrix.values - np.array(ref.TABLE1)).max())
    verdict(1, "five-counter two-box matrix", {
        "entries within 0.005": diff <= 0.005,
        "saddle at <2,3>": sol.pure and matrix.strategies[sol.support[0]] == (2, 3),
        "runtime < 1 s": elapsed < 1.0,
    }, f"max diff {diff:.4f}, {elapsed:.3f} s")


@pytest.mark.slow
def test_criterion_2_ten_counter_expectations():
    start = time.perf_counter()
    probs = ref.TABLE4_PROBS
    worst_print = worst_series = 0.0
    mc_ok = True
    for i, (strategy, printed) in enumerate(ref.TABLE4.items()):
        integral = expect_general(strategy, probs, method="integral")
        series = expect_general(strategy, probs, method="series")
        mc = estimate_expectation(strategy, probs, 10**6, seed=7000 + i)
        worst_print = max(worst_print, abs(integral - printed))
        worst_series = max(worst_series, abs(integral - series))
        mc_ok &= mc.within(integral, 3.0)
    elapsed = time.perf_counter() - start
    verdict(2, "three-box ten-counter expectations", {
        "printed values within 1e-4": worst_print <= 1e-4,
        "series vs integral within 1e-8": worst_series <= 1e-8,
        "Monte Carlo within 3 SE": mc_ok,
        "runtime < 2 min": elapsed < 120,
    }, f"printed diff {worst_print:.4f}, series diff {worst_series:.1e}, {elapsed:.1f} s")


def test_criterion_3_separate_closed_forms():
    grid = [i / 20 for i in range(1, 20)]
    cases = [((1, 0), (0, 1), payoff_10_01), ((2, 0), (0, 1), payoff_20_01),
             ((2, 0), (1, 0), payoff_20_10), ((2, 0), (1, 1), payoff_2011_closed)]
    worst = max(abs(payoff_separate(me, them, (p, 1 - p)).value - f(p))
                for me, them, f in cases for p in grid)

    def value(p):
        return payoff_separate((2, 0), (1, 1), (p, 1 - p)).value

    root = bisect_root(value, 0.3, 0.9)
    xs = np.linspace(0.05, 0.6, 5501)
    ys = np.array([payoff_2011_closed(x) for x in xs])
    i = int(ys.argmin())
    # refine on the engine around the grid minimum
    fine = np.linspace(xs[i] - 1e-4, xs[i] + 1e-4, 201)
    fvals = [value(x) for x in fine]
    j = int(np.argmin(fvals))
    verdict(3, "separate-throw closed forms", {
        "engine within 1e-10": worst <= 1e-10,
        "numerator root near 0.643": abs(root - 0.643) <= 1e-3,
        "minimum at 0.225 +- 0.01": abs(fine[j] - 0.225) <= 0.01,
        "minimum value -0.543 +- 0.005": abs(fvals[j] + 0.543) <= 0.005,
    }, f"max diff {worst:.1e}, root {root:.5f}, min {fvals[j]:.5f} at {fine[j]:.5f}")


def test_criterion_4_asymmetric_game():
    got = payoff_separate((2, 0), (1, 1), (1.0, 0.0), (0.5, 0.5)).value
    verdict(4, "asymmetric probabilities", {"value 0.5": abs(got - 0.5) <= 1e-9}, f"value {got!r}")


def test_criterion_5_critical_points():
    roots = critical_p_common(5)
    verdict(5, "critical probabilities", {
        "I_p(4,2) root near 0.686": abs(roots[3] - 0.686) <= 1e-3,
        "I_p(5,1) root near 0.871": abs(roots[4] - 0.871) <= 1e-3,
        "I_p(5,1) root is 2^(-1/5)": abs(roots[4] - 2 ** -0.2) <= 1e-9,
    }, f"roots {roots[3]:.6f}, {roots[4]:.10f}")


def test_criterion_6_mixed_minimax():
    strategies = enumerate_monotone(7, 3)
    matrix = build_matrix(strategies, GameConfig(COMMON, ref.MIXED7_PROBS))
    sol = solve_zero_sum(matrix)
    found = {strategies[i]: float(sol.row_mix[i]) for i in sol.support}
    err = max(abs(found.get(s, 0.0) - w) for s, w in ref.MIXED7.items())
    guaranteed = float((sol.row_mix @ matrix.values).min())
    verdict(6, "mixed minimax, seven counters", {
        "support": set(found) == set(ref.MIXED7),
        "weights within 0.01": err <= 0.01,
        "value certificate": abs(sol.value) <= 1e-8 and guaranteed >= -1e-8,
    }, ", ".join(f"{format_strategy(s)} {w:.4f}" for s, w in found.items()))


def test_criterion_7_zipf():
    probs = zipf_probs(4)
    strategies = enumerate_monotone(7, 4)
    best = best_expectation(strategies, probs)
    sep = solve_zero_sum(build_matrix(strategies, GameConfig(SEPARATE, probs)))
    com = solve_zero_sum(build_matrix(strategies, GameConfig(COMMON, probs)))
    found = {strategies[i]: float(com.row_mix[i]) for i in com.support}
    err = max(abs(found.get(s, 0.0) - w) for s, w in ref.ZIPF_COMMON.items())
    verdict(7, "Zipf four-box case", {
        "expectation argmin <5,1,1,0>": best == ref.ZIPF_EXPECTATION_BEST,
        "separate minimax pure <4,2,1,0>": sep.pure and strategies[sep.support[0]] == ref.ZIPF_SEPARATE_SADDLE,
        "common support exactly {<4,1,1,1>,<3,2,1,1>}": set(found) == set(ref.ZIPF_COMMON),
        "common weights within 0.02": err <= 0.02,
        "mix sums to 1": abs(com.row_mix.sum() - 1) <= 1e-9,
    }, "common mix " + ", ".join(f"{format_strategy(s)} {w:.5f}" for s, w in found.items()))


@pytest.mark.slow
def test_criterion_8_dice():
    start = time.perf_counter()
    probs = dice_probs()
    strategies = enumerate_respecting_ties(11, probs)
    best = best_expectation(strategies, probs)
    config = GameConfig(SEPARATE, probs)
    beaten = []
    worst_z = math.inf
    for i, rival in enumerate(s for s in strategies if s != ref.DICE_BEST):
        sim = simulate_race(ref.DICE_BEST, rival, config, 10**5, seed=8000 + i)
        worst_z = min(worst_z, sim.mean / sim.std_error)
        if sim.mean < -3 * sim.std_error:
            beaten.append(format_strategy(rival))
    elapsed = time.perf_counter() - start
    verdict(8, "two-dice case", {
        "56 strategies": len(strategies) == 56,
        "expectation argmin": best == ref.DICE_BEST,
        "no rival beyond 3 SE": not beaten,
        "runtime < 10 min": elapsed < 600,
    }, f"smallest champion z-score {worst_z:.1f}, {elapsed:.1f} s")


def _random_cases(count, seed):
    rng = np.random.default_rng(seed)
    for i in range(count):
        k = int(rng.integers(2, 5))
        probs = tuple(float(x) for x in rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k)
        n = int(rng.integers(1, 6))
        me = tuple(int(x) for x in rng.multinomial(n, np.ones(k) / k))
        them = tuple(int(x) for x in rng.multinomial(n, np.ones(k) / k))
        yield i, (COMMON, SEPARATE)[i % 2], probs, me, them


def test_criterion_9_property_suites():
    rng = np.random.default_rng(9)
    # PMF normalisation
    pmf_ok = True
    for _ in range(30):
        k = int(rng.integers(2, 6))
        probs = tuple(float(x) for x in rng.dirichlet(np.ones(k)) * 0.95 + 0.05 / k)
        strategy = tuple(int(x) for x in rng.multinomial(int(rng.integers(1, 10)), np.ones(k) / k))
        pmf_ok &= math.fsum(pmf_until_converged(strategy, probs)) >= 1 - 1e-10
    # antisymmetry
    anti = 0.0
    for regime in (COMMON, SEPARATE):
        for probs in [(0.5, 0.3, 0.2), (0.4, 0.4, 0.2)]:
            anti = max(anti, build_matrix(enumerate_compositions(4, 3), GameConfig(regime, probs))
                       .antisymmetry_error())
        for me, them in itertools.combinations(enumerate_compositions(3, 3), 2):
            forward = GameConfig(regime, (0.5, 0.3, 0.2)).payoff(me, them).value
            back = GameConfig(regime, (0.5, 0.3, 0.2)).payoff(them, me).value
            anti = max(anti, abs(forward + back))
    # two-box closed form vs general recursion
    closed_gap = max(
        abs(payoff_common_two_box(me, them, p).value - payoff_common_general(me, them, (p, 1 - p)).value)
        for n in range(1, 8) for p in (0.1, 0.35, 0.5, 0.8)
        for me in enumerate_compositions(n, 2) for them in enumerate_compositions(n, 2)
    )
    # engines vs Monte Carlo
    mc_ok = True
    for i, regime, probs, me, them in _random_cases(25, seed=99):
        config = GameConfig(regime, probs)
        exact = config.payoff(me, them).value
        sim = simulate_race(me, them, config, 100_000, seed=9000 + i)
        mc_ok &= sim.mean == exact if sim.std_error == 0 else sim.within(exact, 4.0)
        expectation = estimate_expectation(me, probs, 50_000, seed=9500 + i)
        mc_ok &= expectation.within(expect_general(me, probs), 4.0)
    # monotone transfer
    grid = [(a / 12, b / 12, (12 - a - b) / 12) for a in range(1, 12) for b in range(1, 12 - a)]
    transfer_ok = True
    for n in range(1, 8):
        for s in enumerate_compositions(n, 3):
            for probs in grid:
                for i, j in itertools.permutations(range(3), 2):
                    if s[i] < s[j] and probs[i] > probs[j]:
                        t = list(s)
                        t[j] -= 1
                        t[i] += 1
                        transfer_ok &= expect_recursion(tuple(t), probs) < expect_recursion(s, probs)
    verdict(9, "property suites", {
        "PMF mass >= 1-1e-10": pmf_ok,
        "antisymmetry <= 1e-9": anti <= 1e-9,
        "two-box closed form vs recursion <= 1e-10": closed_gap <= 1e-10,
        "engines vs Monte Carlo within 4 SE": mc_ok,
        "monotone transfer": transfer_ok,
    }, f"antisymmetry {anti:.1e}, closed-form gap {closed_gap:.1e}")


def test_criterion_10_inconsistencies_reported(capsys):
    notes = []
    codes = {}
    for target in ("table1", "table2check", "table3"):
        codes[target] = main(["reproduce", target])
        notes += json.loads(capsys.readouterr().out)["notes"]
    entries = {n.get("entry") or n.get("regime") for n in notes if n["kind"] == "paper-inconsistency"}
    verdict(10, "known inconsistencies reported, not asserted", {
        "reproduce exits 0": all(c == 0 for c in codes.values()),
        "three-counter left table": "common" in entries,
        "<2,1,0> v <1,1,1> formula": "<2,1,0> v <1,1,1>" in entries,
        "payoff orientation": "crossing-case payoff orientation" in entries,
        "draw probability index": "one-sided draw probability index" in entries,
    }, f"{len(notes)} notes")
