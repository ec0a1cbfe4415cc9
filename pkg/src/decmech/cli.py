"""Command-line interface.

Subcommands::

    decmech solve <spec> [--covert]        optimal generator LP
    decmech concavify <spec> [--samples N] prior utility and concave closure
    decmech partition <spec>               best-response partition
    decmech design <spec> --c-grid G       two-stage mechanism design
    decmech case-study --figure ID [--grid R] [--out DIR]
    decmech bounds <spec>                  design-capacity bounds
    decmech stats [--grid R]               case-study headline statistics

Global flags: ``--tol`` (IC slack tolerance), ``--seed`` (sampling seed),
``--format csv`` (the only format; CSV goes to stdout unless ``--out`` is
given).  Exit codes: 0 success, 2 validation/parse error, 3 numerical
failure in the solver.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .design import design_gmm
from .errors import NumericalFailure, ParseError, ValidationError
from .gamespec import parse_game_spec
from .geometry import (
    belief_partition,
    concavify,
    prior_utility_pwl,
    region_measure,
    sample_partition,
)
from .insider import BENCHMARK, figure_data, headline_stats
from .lp import design_capacity_bounds, optimal_generator
from .model import BeliefProfile
from .tables import Table, emit_csv, format_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _emit(table: Table, args, filename: str) -> None:
    if getattr(args, "out", None):
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, filename)
        emit_csv(table, path)
        print(path)
    else:
        sys.stdout.write(format_csv(table))


def _load(args):
    game, beliefs, mod = parse_game_spec(args.spec)
    if not getattr(args, "covert", False):
        beliefs = BeliefProfile.overt(beliefs.b, beliefs.b_D)
    return game, beliefs, mod


def _cmd_solve(args) -> int:
    game, beliefs, mod = _load(args)
    report = optimal_generator(game, beliefs, mod)
    rows = [("status", report.status), ("objective", report.objective_value)]
    rows += [("lower_bound", report.bounds[0]), ("upper_bound", report.bounds[1])]
    _emit(Table(columns=("key", "value"), rows=rows), args, "solve_summary.csv")
    if report.generator is not None:
        gen = report.generator
        pi_rows = [
            (x, s, float(gen.pi[x, s]))
            for x in range(gen.n_states)
            for s in range(gen.n_signals)
            if gen.pi[x, s] > args.tol
        ]
        _emit(Table(columns=("state", "policy", "prob"), rows=pi_rows), args, "solve_pi.csv")
    return EXIT_OK


def _cmd_concavify(args) -> int:
    game, beliefs, mod = _load(args)
    f = prior_utility_pwl(game, beliefs.b_D, mod)
    env = concavify(f)
    if args.samples:
        rows = [
            (float(p), f.value(float(p)), env.value(float(p)))
            for p in np.linspace(0.0, 1.0, args.samples)
        ]
    else:
        rows = [
            (float(t), f.value(float(t)), env.value(float(t)))
            for t in f.breakpoints
        ]
    _emit(Table(columns=("p", "v_prior", "v_closure"), rows=rows), args, "concavify.csv")
    return EXIT_OK


def _cmd_partition(args) -> int:
    game, beliefs, mod = _load(args)
    if game.n_states in (2, 3):
        part = belief_partition(game, mod)
        rows = [
            ("-".join(str(a) for a in combo), region_measure([cell], game.n_states))
            for combo, cell in part.nonempty_joint().items()
        ]
    else:
        res = sample_partition(game, mod, seed=args.seed)
        total = sum(res.label_counts.values())
        rows = [
            ("-".join(str(a) for a in combo), count / total)
            for combo, count in sorted(res.label_counts.items())
        ]
    _emit(Table(columns=("policy", "measure"), rows=rows), args, "partition.csv")
    return EXIT_OK


def _parse_c_grid(text: str, n_actions: int):
    """One grid per non-drop-out action, ';'-separated.  Each grid is either
    'start:stop:num' or a comma-separated value list.  A single grid is
    reused for every action."""
    grids = []
    for part in text.split(";"):
        part = part.strip()
        if ":" in part:
            start, stop, num = part.split(":")
            grids.append(np.linspace(float(start), float(stop), int(num)).tolist())
        else:
            grids.append([float(v) for v in part.split(",")])
    if len(grids) == 1:
        grids = grids * (n_actions - 1)
    return grids


def _cmd_design(args) -> int:
    game, beliefs, mod = _load(args)
    grids = _parse_c_grid(args.c_grid, game.n_actions)
    result = design_gmm(game, beliefs.b_D, grids, gamma=args.gamma)
    rows = [("value", result.value)]
    rows += [(f"c_{game.actions[a]}", float(result.modulator.c[a])) for a in range(game.n_actions)]
    rows += [
        (f"b_{game.states[x]}", float(result.manipulated_beliefs.b[x]))
        for x in range(game.n_states)
    ]
    _emit(Table(columns=("key", "value"), rows=rows), args, "design.csv")
    return EXIT_OK


def _cmd_case_study(args) -> int:
    table = figure_data(args.figure, BENCHMARK, grid=args.grid)
    _emit(table, args, f"{args.figure}.csv")
    return EXIT_OK


def _cmd_bounds(args) -> int:
    game, beliefs, mod = _load(args)
    lo, hi = design_capacity_bounds(game, beliefs.b_D, mod)
    _emit(
        Table(columns=("key", "value"), rows=[("lower", lo), ("upper", hi)]),
        args,
        "bounds.csv",
    )
    return EXIT_OK


def _cmd_stats(args) -> int:
    stats = headline_stats(BENCHMARK, grid=args.grid or 101)
    rows = [
        ("near_threshold_ratio", stats.near_threshold_ratio),
        ("avg_gain_fig5_ratio_of_means", stats.avg_gain_fig5_ratio_of_means),
        ("avg_gain_fig5_mean_of_ratios", stats.avg_gain_fig5_mean_of_ratios),
        ("fig5_excluded_points", stats.fig5_excluded_points),
        ("avg_gain_fig8_ratio_of_means", stats.avg_gain_fig8_ratio_of_means),
        ("avg_gain_fig8_mean_of_ratios", stats.avg_gain_fig8_mean_of_ratios),
        ("fig8_excluded_points", stats.fig8_excluded_points),
    ]
    _emit(Table(columns=("key", "value"), rows=rows), args, "stats.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decmech",
        description="Optimal deception mechanisms for finite defender-user games.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--tol", type=float, default=1e-9, help="IC slack tolerance")
    parser.add_argument("--seed", type=int, default=0, help="sampling seed")
    parser.add_argument("--format", choices=("csv",), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal generator LP for a game spec")
    p.add_argument("spec")
    p.add_argument("--covert", action="store_true", help="use the spec's b_U as the reported belief")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("concavify", help="prior utility and its concave closure")
    p.add_argument("spec")
    p.add_argument("--samples", type=int, default=0, help="equispaced sample count (default: breakpoints)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_concavify, covert=False)

    p = sub.add_parser("partition", help="best-response partition of the simplex")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_partition, covert=False)

    p = sub.add_parser("design", help="two-stage transfer + manipulation design")
    p.add_argument("spec")
    p.add_argument("--c-grid", required=True, help="'start:stop:num' or 'v1,v2,...'; ';' separates per-action grids")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_design, covert=False)

    p = sub.add_parser("case-study", help="insider case-study figure data")
    p.add_argument("--figure", required=True)
    p.add_argument("--grid", type=int, default=None, help="grid resolution override")
    p.add_argument("--out", default=os.environ.get("DECMECH_OUT"))
    p.set_defaults(func=_cmd_case_study)

    p = sub.add_parser("bounds", help="design-capacity value bounds")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bounds, covert=False)

    p = sub.add_parser("stats", help="case-study headline statistics")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
