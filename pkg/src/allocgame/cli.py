"""Command-line front end.

Numeric results go to stdout as JSON; tabular commands also accept
``--out FILE.csv``. Exit status: 0 success, 1 a ``reproduce`` comparison
failed, 2 usage error, 3 engine error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from allocgame import reference as ref
from allocgame.common_game import critical_p_common, three_counter_formulas
from allocgame.config import COMMON, REGIMES, SEPARATE, GameConfig
from allocgame.errors import AllocGameError, ArgumentError
from allocgame.removal import (
    expect_general,
    expect_three_closed,
    expect_two_box,
    pmf_until_converged,
)
from allocgame.scan import DEFAULT_RESOLUTION, MODES, rows_to_csv, scan_cutoffs, scan_ternary
from allocgame.simulate import estimate_expectation, simulate_margin, simulate_race
from allocgame.solver import PayoffMatrix, best_expectation, build_matrix, solve_zero_sum
from allocgame.specfun import DEFAULT_TOLERANCE, Tolerance, reg_inc_beta
from allocgame.strategies import (
    dice_probs,
    enumerate_compositions,
    enumerate_monotone,
    enumerate_respecting_ties,
    format_strategy,
    parse_probs,
    parse_strategy,
    zipf_probs,
)

__all__ = ["main", "build_parser", "TARGETS"]

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_ENGINE = 0, 1, 2, 3
STRATEGY_SETS = ("compositions", "monotone", "ties")


class _UsageError(Exception):
    pass


def _emit(data, out: str | None = None, csv_text: str | None = None):
    if out is not None:
        if csv_text is None:
            raise _UsageError("this command has no tabular output for --out")
        Path(out).write_text(csv_text)
        data = {"written": out} if not isinstance(data, dict) else {**data, "written": out}
    print(json.dumps(data, indent=2, default=_json_default))


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _table_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{x:.10g}" if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def _strategy_set(name: str, n: int, probs) -> list:
    if name == "compositions":
        return enumerate_compositions(n, len(probs))
    if name == "monotone":
        return enumerate_monotone(n, len(probs))
    return enumerate_respecting_ties(n, probs)


def _config(args) -> GameConfig:
    their = parse_probs(args.their_probs) if getattr(args, "their_probs", None) else None
    return GameConfig(args.regime, parse_probs(args.probs), their)


def _tolerance(args) -> Tolerance:
    return Tolerance(rel_eps=args.tol) if args.tol is not None else DEFAULT_TOLERANCE


# ---------------------------------------------------------------- commands


def cmd_expect(args) -> int:
    strategy, probs = parse_strategy(args.strategy), parse_probs(args.probs)
    if len(strategy) != len(probs):
        raise ArgumentError("strategy and probabilities disagree on the number of boxes")
    if args.method == "closed":
        if len(probs) == 2:
            value = expect_two_box(strategy[0], strategy[1], probs[0], _tolerance(args))
        elif len(probs) == 3:
            value = float(expect_three_closed(strategy, probs))
        else:
            raise ArgumentError("closed forms exist for two and three boxes only")
    else:
        value = expect_general(strategy, probs, method=args.method)
    _emit({"strategy": format_strategy(strategy), "probs": list(probs),
           "method": args.method, "expectation": value})
    return EXIT_OK


def cmd_pmf(args) -> int:
    strategy, probs = parse_strategy(args.strategy), parse_probs(args.probs)
    table = pmf_until_converged(strategy, probs)
    if args.r_max is not None:
        table = table[: args.r_max + 1]
    rows = [(r, float(q)) for r, q in enumerate(table)]
    _emit({"strategy": format_strategy(strategy), "probs": list(probs),
           "mass": math.fsum(q for _, q in rows),
           "pmf": [{"r": r, "p": q} for r, q in rows]},
          args.out, _table_csv(["r", "p"], rows))
    return EXIT_OK


def cmd_payoff(args) -> int:
    config = _config(args)
    me, them = parse_strategy(args.me), parse_strategy(args.them)
    result = config.payoff(me, them)
    _emit({"me": format_strategy(me), "them": format_strategy(them),
           "regime": config.regime, **result.to_dict()})
    return EXIT_OK


def _matrix_from_args(args) -> PayoffMatrix:
    config = _config(args)
    if args.strategies:
        strategies = [parse_strategy(s) for s in args.strategies.split(";")]
    else:
        if args.n is None:
            raise ArgumentError("give --strategies or --n")
        strategies = _strategy_set(args.set, args.n, config.probs)
    return build_matrix(strategies, config)


def cmd_matrix(args) -> int:
    matrix = _matrix_from_args(args)
    _emit(json.loads(matrix.to_json()), args.out, matrix.to_csv())
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.matrix:
        text = Path(args.matrix).read_text()
        matrix = (PayoffMatrix.from_json(text) if text.lstrip().startswith("{")
                  else PayoffMatrix.from_csv(text))
    else:
        matrix = _matrix_from_args(args)
    _emit(solve_zero_sum(matrix).to_dict())
    return EXIT_OK


def cmd_cutoffs(args) -> int:
    rows = scan_cutoffs(args.n_max)
    _emit(rows, args.out, rows_to_csv(rows))
    return EXIT_OK


def cmd_scan(args) -> int:
    rows = scan_ternary(args.n, args.mode, args.resolution)
    text = rows_to_csv(rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        _emit({"written": args.out, "points": len(rows)})
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.kind == "expectation":
        result = estimate_expectation(parse_strategy(args.me), parse_probs(args.probs),
                                      args.trials, args.seed)
    else:
        if not args.them:
            raise ArgumentError(f"--them is required for a {args.kind} simulation")
        run = simulate_race if args.kind == "race" else simulate_margin
        result = run(parse_strategy(args.me), parse_strategy(args.them), _config(args),
                     args.trials, args.seed)
    _emit({"kind": args.kind, "seed": args.seed, **result.to_dict()})
    return EXIT_OK


# ---------------------------------------------------------------- reproduce


class Report:
    """Collects named checks and informational notes for one target."""

    def __init__(self, target: str):
        self.target = target
        self.checks: list[dict] = []
        self.notes: list[dict] = []
        self.data: dict = {}

    def check(self, name: str, ok: bool, **detail) -> bool:
        self.checks.append({"check": name, "pass": bool(ok), **detail})
        return ok

    def note(self, kind: str, **detail):
        self.notes.append({"kind": kind, **detail})

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"target": self.target, "pass": self.passed, "checks": self.checks,
                "notes": self.notes, "data": self.data}


def _labels(strategies) -> list[str]:
    return [format_strategy(s) for s in strategies]


def reproduce_table1(args, rep: Report):
    config = GameConfig(COMMON, (ref.TABLE1_P, 1 - ref.TABLE1_P))
    matrix = build_matrix(ref.TABLE1_STRATEGIES, config)
    tol = args.tol or 0.005
    diff = np.abs(matrix.values - np.array(ref.TABLE1))
    rep.data["matrix"] = {"strategies": matrix.labels, "values": matrix.values.round(6).tolist()}
    rep.check("entries within tolerance", diff.max() <= tol, max_abs_diff=float(diff.max()),
              tolerance=tol)
    sol = solve_zero_sum(matrix)
    saddle = matrix.strategies[sol.support[0]]
    rep.check("pure saddle point", sol.pure and saddle == ref.TABLE1_SADDLE,
              found=format_strategy(saddle), expected=format_strategy(ref.TABLE1_SADDLE))
    _orientation_notes(args, rep, config)


def _orientation_notes(args, rep: Report, config: GameConfig):
    """Engine values against the two conflicting printed expressions."""
    p = config.probs[0]
    trials = min(args.trials, 200_000)
    # crossing case <a+n, b> vs <a, b+m> with a=1, n=2, b=2, m=1
    me, them = (3, 2), (1, 3)
    engine = config.payoff(me, them)
    sim = simulate_race(me, them, config, trials, args.seed)
    rep.note("paper-inconsistency", entry="crossing-case payoff orientation",
             me=format_strategy(me), them=format_strategy(them), p=p,
             engine_value=engine.value, win_expression=2 * reg_inc_beta(p, 3, 3) - 1,
             printed_expression=2 * reg_inc_beta(1 - p, 3, 3) - 1,
             mc_mean=sim.mean, mc_std_error=sim.std_error)
    # one-sided case <a, b> vs <a+m, b> with a=1, m=2, b=2
    me, them = (1, 2), (3, 2)
    engine = config.payoff(me, them)
    sim = simulate_race(me, them, config, trials, args.seed + 1)
    rep.note("paper-inconsistency", entry="one-sided draw probability index",
             me=format_strategy(me), them=format_strategy(them), p=p,
             engine_draw=engine.p_draw, printed_expression=reg_inc_beta(1 - p, 4, 1),
             mc_draw=sim.draws / sim.trials,
             mc_std_error=math.sqrt(sim.draws / sim.trials * (1 - sim.draws / sim.trials) / sim.trials))


def reproduce_table2check(args, rep: Report):
    engine_cfg = lambda probs: GameConfig(COMMON, probs)  # noqa: E731
    rng = np.random.Generator(np.random.Philox(args.seed))
    points = [ref.TABLE3_STATED_PROBS, ref.TABLE4_PROBS]
    for _ in range(8):
        x = np.sort(rng.dirichlet(np.ones(3)))[::-1]
        points.append(tuple(float(v) for v in x))
    tol = args.tol or 1e-12
    worst: dict = {}
    for probs in points:
        config = engine_cfg(probs)
        for (me, them), formula in three_counter_formulas(*probs).items():
            engine = config.payoff(me, them).value
            key = f"{format_strategy(me)} v {format_strategy(them)}"
            worst.setdefault(key, []).append(
                {"probs": list(probs), "formula": formula, "engine": engine})
    for key, rows in worst.items():
        err = max(abs(r["formula"] - r["engine"]) for r in rows)
        if key == "<2,1,0> v <1,1,1>":
            rep.note("paper-inconsistency", entry=key, max_abs_diff=err,
                     detail="printed expression disagrees with the exact engine",
                     values=rows[:2])
        else:
            rep.check(f"closed form {key}", err <= tol, max_abs_diff=err, tolerance=tol)


def _upper(matrix: PayoffMatrix) -> list[float]:
    v = matrix.values
    return [float(v[0, 1]), float(v[0, 2]), float(v[1, 2])]


def reproduce_table3(args, rep: Report):
    strategies = ref.THREE_COUNTER_STRATEGIES
    tol = args.tol or 0.0005 + 1e-9
    computed_at = ref.TABLE4_PROBS
    for regime, printed in ((SEPARATE, ref.TABLE3_SEPARATE), (COMMON, ref.TABLE3_COMMON)):
        stated = _upper(build_matrix(strategies, GameConfig(regime, ref.TABLE3_STATED_PROBS)))
        actual = _upper(build_matrix(strategies, GameConfig(regime, computed_at)))
        rep.data[regime] = {"printed": list(printed),
                            "at_stated_probs": stated, "at_" + "_".join(map(str, computed_at)): actual}
        err = max(abs(a - b) for a, b in zip(actual, printed))
        if regime == SEPARATE:
            rep.check("separate-throw entries at (0.7,0.2,0.1)", err <= tol,
                      max_abs_diff=err, tolerance=tol)
        else:
            rep.note("engine-agreement", regime=regime, probs=list(computed_at),
                     max_abs_diff=err, detail="common-throw half, informational")
        stated_err = max(abs(a - b) for a, b in zip(stated, printed))
        rep.note("paper-inconsistency", regime=regime, probs=list(ref.TABLE3_STATED_PROBS),
                 max_abs_diff=stated_err,
                 detail="printed entries do not match the stated probabilities; "
                        "they match (0.7, 0.2, 0.1)")
    seps = build_matrix(strategies, GameConfig(SEPARATE, computed_at))
    coms = build_matrix(strategies, GameConfig(COMMON, computed_at))
    rep.data["saddles"] = {
        SEPARATE: format_strategy(strategies[solve_zero_sum(seps).support[0]]),
        COMMON: format_strategy(strategies[solve_zero_sum(coms).support[0]]),
    }


def reproduce_table4(args, rep: Report):
    probs = ref.TABLE4_PROBS
    tol = args.tol or 1e-4
    rows = []
    worst_print = worst_series = 0.0
    mc_ok = True
    for i, (strategy, printed) in enumerate(ref.TABLE4.items()):
        integral = expect_general(strategy, probs, method="integral")
        series = expect_general(strategy, probs, method="series")
        mc = estimate_expectation(strategy, probs, args.trials, args.seed + i)
        worst_print = max(worst_print, abs(integral - printed))
        worst_series = max(worst_series, abs(integral - series))
        mc_ok &= mc.within(integral, 3.0)
        rows.append({"strategy": format_strategy(strategy), "printed": printed,
                     "integral": integral, "series": series, "mc_mean": mc.mean,
                     "mc_std_error": mc.std_error})
    rep.data["rows"] = rows
    rep.check("integral engine vs printed values", worst_print <= tol,
              max_abs_diff=worst_print, tolerance=tol)
    rep.check("series vs integral engine", worst_series <= 1e-8, max_abs_diff=worst_series,
              tolerance=1e-8)
    rep.check("Monte Carlo within 3 standard errors of the integral engine", mc_ok,
              trials=args.trials)


def reproduce_dice(args, rep: Report):
    probs = dice_probs()
    strategies = enumerate_respecting_ties(ref.DICE_N, probs)
    rep.check("strategy count", len(strategies) == ref.DICE_STRATEGY_COUNT,
              found=len(strategies), expected=ref.DICE_STRATEGY_COUNT)
    best = best_expectation(strategies, probs)
    rep.check("expectation argmin", best == ref.DICE_BEST, found=format_strategy(best),
              expected=format_strategy(ref.DICE_BEST))
    config = GameConfig(SEPARATE, probs)
    beaten = []
    results = []
    for i, rival in enumerate(s for s in strategies if s != ref.DICE_BEST):
        sim = simulate_race(ref.DICE_BEST, rival, config, args.trials, args.seed + i)
        results.append({"rival": format_strategy(rival), "mean": sim.mean,
                        "std_error": sim.std_error})
        if sim.mean < -3.0 * sim.std_error:
            beaten.append(format_strategy(rival))
    rep.data["round_robin"] = results
    rep.check("no rival beats the champion beyond 3 standard errors (separate throws)",
              not beaten, beaten_by=beaten, trials_per_pair=args.trials)


def _support_weights(sol, strategies) -> dict[str, float]:
    return {format_strategy(strategies[i]): float(sol.row_mix[i]) for i in sol.support}


def reproduce_zipf(args, rep: Report):
    probs = zipf_probs(ref.ZIPF_K)
    strategies = enumerate_monotone(ref.ZIPF_N, ref.ZIPF_K)
    best = best_expectation(strategies, probs)
    rep.check("expectation argmin", best == ref.ZIPF_EXPECTATION_BEST,
              found=format_strategy(best), expected=format_strategy(ref.ZIPF_EXPECTATION_BEST))
    sep = solve_zero_sum(build_matrix(strategies, GameConfig(SEPARATE, probs)))
    rep.check("separate-throw minimax is pure",
              sep.pure and strategies[sep.support[0]] == ref.ZIPF_SEPARATE_SADDLE,
              found=_support_weights(sep, strategies))
    com = solve_zero_sum(build_matrix(strategies, GameConfig(COMMON, probs)))
    found = _support_weights(com, strategies)
    expected = {format_strategy(s): w for s, w in ref.ZIPF_COMMON.items()}
    rep.check("common-throw support", set(found) == set(expected), found=found,
              expected=sorted(expected))
    tol = args.tol or 0.02
    err = max(abs(found.get(k, 0.0) - w) for k, w in expected.items())
    rep.check("common-throw weights", err <= tol, max_abs_diff=err, tolerance=tol)
    rep.check("mix sums to one", abs(sum(com.row_mix) - 1.0) <= 1e-9)
    rep.note("paper-inconsistency", detail="printed weights 0.26 and 0.73 sum to 0.99",
             printed={format_strategy(s): w for s, w in ref.ZIPF_COMMON_PRINTED.items()})


def reproduce_mixed7(args, rep: Report):
    strategies = enumerate_monotone(7, 3)
    matrix = build_matrix(strategies, GameConfig(COMMON, ref.MIXED7_PROBS))
    sol = solve_zero_sum(matrix)
    found = _support_weights(sol, strategies)
    expected = {format_strategy(s): w for s, w in ref.MIXED7.items()}
    rep.check("support", set(found) == set(expected), found=found)
    tol = args.tol or 0.01
    err = max(abs(found.get(k, 0.0) - w) for k, w in expected.items())
    rep.check("weights", err <= tol, max_abs_diff=err, tolerance=tol)
    rep.check("value certificate", abs(sol.value) <= 1e-8, value=sol.value)
    roots = critical_p_common(5)
    rep.data["critical_p_n5"] = roots


TARGETS: dict[str, Callable[[argparse.Namespace, Report], None]] = {
    "table1": reproduce_table1,
    "table2check": reproduce_table2check,
    "table3": reproduce_table3,
    "table4": reproduce_table4,
    "dice": reproduce_dice,
    "zipf": reproduce_zipf,
    "mixed7": reproduce_mixed7,
}


def cmd_reproduce(args) -> int:
    rep = Report(args.target)
    start = time.perf_counter()
    TARGETS[args.target](args, rep)
    out = rep.to_dict()
    out["seconds"] = round(time.perf_counter() - start, 3)
    _emit(out)
    for c in rep.checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {args.target}: {c['check']}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_MISMATCH


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_game(p, need_probs: bool = True):
    p.add_argument("--probs", required=need_probs,
                   help="comma list, 'dice' or 'zipf:K'")
    p.add_argument("--their-probs", help="opponent probabilities (separate throws)")
    p.add_argument("--regime", choices=REGIMES, default=COMMON)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="allocgame", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=20240601, help="Monte Carlo seed")
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trials")
    parser.add_argument("--tol", type=float, default=None,
                        help="comparison tolerance (reproduce) or series tolerance (expect)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expect", help="expected excess throws of a strategy")
    p.add_argument("--strategy", required=True)
    p.add_argument("--probs", required=True)
    p.add_argument("--method", choices=("integral", "series", "recursion", "closed"),
                   default="integral")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("pmf", help="distribution of excess throws")
    p.add_argument("--strategy", required=True)
    p.add_argument("--probs", required=True)
    p.add_argument("--r-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("payoff", help="exact payoff of one strategy pair")
    p.add_argument("--me", required=True)
    p.add_argument("--them", required=True)
    _add_game(p)
    p.set_defaults(func=cmd_payoff)

    for name, func, help_ in (("matrix", cmd_matrix, "payoff matrix over a strategy set"),
                              ("solve", cmd_solve, "minimax solution")):
        p = sub.add_parser(name, help=help_)
        _add_game(p, need_probs=name == "matrix")
        p.add_argument("--strategies", help="semicolon-separated list, e.g. '3,0;2,1'")
        p.add_argument("--n", type=int, help="quota, used with --set")
        p.add_argument("--k", type=int, help="box count (must match --probs)")
        p.add_argument("--set", choices=STRATEGY_SETS, default="monotone")
        if name == "matrix":
            p.add_argument("--out")
        else:
            p.add_argument("--matrix", help="CSV or JSON payoff matrix file")
        p.set_defaults(func=func)

    p = sub.add_parser("cutoffs", help="two-box cut-off probabilities")
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cutoffs)

    p = sub.add_parser("scan", help="ternary map over the restricted simplex (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default="expectation")
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", help="Monte Carlo estimate")
    p.add_argument("--kind", choices=("race", "margin", "expectation"), default="race")
    p.add_argument("--me", required=True)
    p.add_argument("--them")
    _add_game(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="regenerate a reference table and compare")
    p.add_argument("target", choices=sorted(TARGETS))
    p.set_defaults(func=cmd_reproduce)
    return parser


_DEFAULT_TRIALS = {"simulate": 10**6, "table4": 10**6, "dice": 10**5}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.trials is None:
            key = getattr(args, "target", args.command)
            args.trials = _DEFAULT_TRIALS.get(key, _DEFAULT_TRIALS["simulate"])
        if getattr(args, "k", None) is not None and args.probs is not None \
                and len(parse_probs(args.probs)) != args.k:
            raise ArgumentError("--k does not match the number of probabilities")
        if args.command == "solve" and not args.matrix and args.probs is None:
            raise ArgumentError("solve needs --matrix or a game (--probs and --n or --strategies)")
        return args.func(args)
    except (_UsageError, ArgumentError) as exc:
        print(f"allocgame: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AllocGameError, OSError) as exc:
        print(f"allocgame: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
