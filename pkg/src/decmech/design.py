"""Full mechanism-design pipeline.

Stage one searches a grid of utility transfers for the one whose prior
utility has the largest global maximum; stage two manipulates the common
prior to that maximizer, after which a zero-information generator is
optimal.  Covert designs fix mismatched beliefs and optimize the
generator alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyGrid
from .geometry import (
    ManipulationResult,
    concavify,
    optimal_manipulation,
    prior_utility_pwl,
)
from .lp import SolveReport, optimal_generator
from .model import (
    BasicGame,
    BeliefProfile,
    Generator,
    Modulator,
    best_response,
)
from .policies import enumerate_policies


@dataclass
class StageLogEntry:
    c: Tuple[float, ...]
    value: float
    belief: float


@dataclass
class GMMDesign:
    """Assembled mechanism: transfer, manipulated beliefs, generator, value."""

    modulator: Modulator
    manipulated_beliefs: BeliefProfile
    generator: Generator
    value: float
    stage_log: List[StageLogEntry]


def _candidate_transfers(n_actions: int, c_grid: Sequence[Sequence[float]]):
    """Cartesian product of per-action transfer grids for actions 1..K-1,
    in lexicographic order.  The drop-out transfer is fixed at zero."""
    if len(c_grid) != n_actions - 1:
        raise EmptyGrid(
            f"need one grid per non-drop-out action ({n_actions - 1}), got {len(c_grid)}"
        )
    grids = [sorted(set(float(v) for v in g)) for g in c_grid]
    if any(len(g) == 0 for g in grids):
        raise EmptyGrid("every per-action grid must be nonempty")
    for combo in itertools.product(*grids):
        yield np.concatenate([[0.0], combo])


def design_modulator(
    game: BasicGame,
    b_D: np.ndarray,
    c_grid: Sequence[Sequence[float]],
    gamma: float = 0.0,
) -> Tuple[Modulator, float, List[StageLogEntry]]:
    """Exhaustive grid search for the transfer maximizing the global
    maximum of the prior utility.  Ties keep the lexicographically
    smallest transfer (the first encountered)."""
    best: Optional[Tuple[Modulator, float, ManipulationResult]] = None
    log: List[StageLogEntry] = []
    for c in _candidate_transfers(game.n_actions, c_grid):
        mod = Modulator(c=c, gamma=gamma)
        res = optimal_manipulation(game, b_D, mod)
        log.append(StageLogEntry(c=tuple(c), value=res.value, belief=res.belief))
        if best is None or res.value > best[1]:
            best = (mod, res.value, res)
    assert best is not None
    return best[0], best[1], log


def design_gmm(
    game: BasicGame,
    b_D: np.ndarray,
    c_grid: Sequence[Sequence[float]],
    gamma: float = 0.0,
) -> GMMDesign:
    """Two-stage design: transfer search, then overt belief manipulation.

    The returned generator contains zero information: it concentrates on
    the policy prescribing each type's best response at the manipulated
    prior, which is incentive compatible by construction.
    """
    mod, value, log = design_modulator(game, b_D, c_grid, gamma=gamma)
    res = optimal_manipulation(game, b_D, mod)
    b = np.array([res.belief, 1.0 - res.belief])
    beliefs = BeliefProfile.overt(b, b_D)
    space = enumerate_policies(game.n_types, game.n_actions)
    assignment = tuple(
        best_response(b, m, game, mod, b_D=beliefs.b_D) for m in range(game.n_types)
    )
    pi = np.zeros((game.n_states, len(space)))
    pi[:, space.index_of(assignment)] = 1.0
    generator = Generator(policy_space=space, pi=pi)
    return GMMDesign(
        modulator=mod,
        manipulated_beliefs=beliefs,
        generator=generator,
        value=res.value,
        stage_log=log,
    )


@dataclass
class EquivalenceReport:
    max_joint: float
    max_manipulator_only: float
    gap: float


def verify_equivalence(
    game: BasicGame, b_D: np.ndarray, mod: Modulator
) -> EquivalenceReport:
    """Global maximum of the concave closure vs. the prior utility.

    The two coincide for piecewise-linear prior utilities: signaling adds
    nothing once the prior itself can be chosen."""
    f = prior_utility_pwl(game, b_D, mod)
    env = concavify(f)
    max_joint = float(env.knot_values.max())
    max_manip = optimal_manipulation(game, b_D, mod).value
    return EquivalenceReport(
        max_joint=max_joint,
        max_manipulator_only=max_manip,
        gap=max_joint - max_manip,
    )


def covert_design(
    game: BasicGame,
    b: np.ndarray,
    b_U: np.ndarray,
    b_D: np.ndarray,
    mod: Modulator,
) -> SolveReport:
    """Optimal generator when the reported belief differs from the truth.

    Incentive compatibility is evaluated under the users' reported belief
    while the objective weighs states by the true distribution."""
    b = np.asarray(b, dtype=float)
    b_U = np.atleast_2d(np.asarray(b_U, dtype=float))
    if b_U.shape[0] == 1 and game.n_types > 1:
        b_U = np.tile(b_U, (game.n_types, 1))
    beliefs = BeliefProfile(b=b, b_U=b_U, b_D=np.atleast_2d(b_D))
    return optimal_generator(game, beliefs, mod)


def best_covert_report(
    game: BasicGame,
    b: np.ndarray,
    b_D: np.ndarray,
    mod: Modulator,
    grid_points: int = 101,
) -> Tuple[np.ndarray, float]:
    """Grid search (two states) over reported beliefs shared by all types;
    returns the best report and its covert value."""
    best_report, best_value = None, -np.inf
    for p in np.linspace(0.0, 1.0, grid_points):
        report = np.array([p, 1.0 - p])
        res = covert_design(game, b, report, b_D, mod)
        if res.objective_value is not None and res.objective_value > best_value:
            best_report, best_value = report, float(res.objective_value)
    return best_report, best_value
