"""Honeypot / insider-threat case study.

A two-state (honeypot, normal server), two-type (selfish, adversarial),
two-action (drop out, access) game with ratio-parameterized payoffs, the
closed-form decision thresholds, figure-data generation, and the headline
statistics of the numerical study.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .design import covert_design
from .errors import DegenerateDenominator, InvalidParams, UnknownFigure
from .geometry import PWLFunction, concavify, prior_utility_pwl
from .model import (
    BasicGame,
    BeliefProfile,
    Modulator,
    best_response,
    modulated_utilities,
)
from .tables import Table

GEOM_TOL = 1e-12


@dataclass(frozen=True)
class InsiderParams:
    """Ratio parameterization of the honeypot game.

    Signs encode the scenario: selfish honeypot access hurts both sides,
    adversarial honeypot access helps the defender and hurts the insider,
    adversarial normal-server access does the opposite.
    """

    r_U: float = 1.0
    r_D: float = 1.0
    phi_g_U: float = -0.3
    phi_g_D: float = -0.3
    phi_H_U: float = -1.0
    phi_H_D: float = 1.0
    phi_N_U: float = 0.9
    phi_N_D: float = -0.9
    phi0: float = 0.0
    q_g: float = 0.32
    q_b: float = 0.68
    p_D0H: float = 0.2
    p_U0H: float = 0.2

    def __post_init__(self):
        checks = [
            (self.r_U > 0, "r_U must be positive"),
            (self.r_D > 0, "r_D must be positive"),
            (self.phi_g_U < 0, "phi_g_U must be negative"),
            (self.phi_g_D < 0, "phi_g_D must be negative"),
            (self.phi_H_U < 0, "phi_H_U must be negative"),
            (self.phi_H_D > 0, "phi_H_D must be positive"),
            (self.phi_N_U > 0, "phi_N_U must be positive"),
            (self.phi_N_D < 0, "phi_N_D must be negative"),
            (0.0 <= self.q_g <= 1.0, "q_g must lie in [0, 1]"),
            (0.0 <= self.q_b <= 1.0, "q_b must lie in [0, 1]"),
            (abs(self.q_g + self.q_b - 1.0) <= 1e-12, "q_g + q_b must equal 1"),
            (0.0 <= self.p_D0H <= 1.0, "p_D0H must lie in [0, 1]"),
            (0.0 <= self.p_U0H <= 1.0, "p_U0H must lie in [0, 1]"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidParams(message)


BENCHMARK = InsiderParams()

STATE_LABELS = ("honeypot", "normal")
TYPE_LABELS = ("selfish", "adversarial")
ACTION_LABELS = ("DO", "AC")


def insider_game(params: InsiderParams = BENCHMARK) -> Tuple[BasicGame, BeliefProfile, Modulator]:
    """Build the case-study game, beliefs, and authentication-cost transfer."""
    v_U = np.zeros((2, 2, 2))
    v_D = np.zeros((2, 2, 2))
    v_U[0, 0, 1] = params.r_U * params.phi_g_U
    v_U[1, 0, 1] = params.r_U
    v_U[0, 1, 1] = params.r_U * params.phi_H_U
    v_U[1, 1, 1] = params.r_U * params.phi_N_U
    v_D[0, 0, 1] = params.r_D * params.phi_g_D
    v_D[1, 0, 1] = params.r_D
    v_D[0, 1, 1] = params.r_D * params.phi_H_D
    v_D[1, 1, 1] = params.r_D * params.phi_N_D
    game = BasicGame(
        states=STATE_LABELS,
        types=TYPE_LABELS,
        actions=ACTION_LABELS,
        utility_D=v_D,
        utility_U=v_U,
    )
    beliefs = BeliefProfile(
        b=np.array([params.p_D0H, 1.0 - params.p_D0H]),
        b_U=np.tile([params.p_U0H, 1.0 - params.p_U0H], (2, 1)),
        b_D=np.tile([params.q_g, params.q_b], (2, 1)),
    )
    mod = Modulator(c=np.array([0.0, params.r_U * params.phi0]), gamma=0.0)
    return game, beliefs, mod


def decision_thresholds(params: InsiderParams = BENCHMARK, phi0: Optional[float] = None) -> Tuple[float, float]:
    """Posterior honeypot probabilities below which the selfish / the
    adversarial insider accesses, clamped to [0, 1]."""
    p0 = params.phi0 if phi0 is None else phi0
    t_g = (1.0 - p0) / (1.0 - params.phi_g_U)
    t_b = (params.phi_N_U - p0) / (params.phi_N_U - params.phi_H_U)
    clamp = lambda t: max(min(t, 1.0), 0.0)
    return clamp(t_g), clamp(t_b)


def motive_threshold(params: InsiderParams = BENCHMARK) -> float:
    """Selfish fraction below which the insider population is on average
    destructive."""
    num = params.phi_N_D - params.phi_H_D
    den = params.phi_g_D - 1.0 + params.phi_N_D - params.phi_H_D
    if abs(den) <= 1e-15:
        raise DegenerateDenominator("motive threshold denominator is zero")
    return num / den


def deterrence_threshold(params: InsiderParams = BENCHMARK) -> float:
    """Honeypot fraction below which no access deterrence is credible."""
    t_g0, t_b0 = decision_thresholds(params, phi0=0.0)
    return min(t_b0, t_g0)


# ---------------------------------------------------------------------------
# Figure data


def _pwl_pair(params: InsiderParams) -> Tuple[PWLFunction, PWLFunction]:
    game, beliefs, mod = insider_game(params)
    f = prior_utility_pwl(game, beliefs.b_D, mod)
    return f, concavify(f)


def _user_prior_values(params: InsiderParams, p: float) -> Tuple[float, float, float]:
    """(defender, selfish, adversarial) expected utilities at a common
    prior p with no signal.

    Insider columns report the gross payoff (before the authentication
    cost); the cost still shapes the decisions through the thresholds.
    """
    game, beliefs, mod = insider_game(replace(params, p_D0H=p, p_U0H=p))
    v_D_hat, _ = modulated_utilities(game, mod)
    prior = np.array([p, 1.0 - p])
    values = []
    v_def = 0.0
    for m in range(2):
        a = best_response(prior, m, game, mod, b_D=beliefs.b_D)
        values.append(float(prior @ game.utility_U[:, m, a]))
        v_def += float(np.dot(prior, beliefs.b_D[:, m] * v_D_hat[:, m, a]))
    return v_def, values[0], values[1]


def _posterior_mixture(f: PWLFunction, env: PWLFunction, p: float):
    """Posterior support of the canonical optimal generator at prior p:
    either p itself (envelope touches) or the two contact points of the
    envelope segment containing p, with their mixing weights."""
    if env.value(p) <= f.value(p) + 1e-9:
        return [(p, 1.0)]
    i = env.segment_of(p)
    lo, hi = float(env.breakpoints[i]), float(env.breakpoints[i + 1])
    w_lo = (hi - p) / (hi - lo)
    return [(lo, w_lo), (hi, 1.0 - w_lo)]


def _user_posterior_values(params: InsiderParams, p: float) -> Tuple[float, float, float]:
    """(defender, selfish, adversarial) expected utilities under the
    canonical optimal generator at common prior p."""
    f, env = _pwl_pair(params)
    game, beliefs, mod = insider_game(replace(params, p_D0H=p, p_U0H=p))
    mixture = _posterior_mixture(f, env, p)
    v_users = [0.0, 0.0]
    for q, weight in mixture:
        post = np.array([q, 1.0 - q])
        for m in range(2):
            a = best_response(post, m, game, mod, b_D=beliefs.b_D)
            v_users[m] += weight * float(post @ game.utility_U[:, m, a])
    return float(env.value(p)), v_users[0], v_users[1]


def _covert_prior_value(params: InsiderParams, p_D: float, p_U: float) -> float:
    """Defender value without a generator when insiders believe p_U while
    the true honeypot fraction is p_D."""
    game, beliefs, mod = insider_game(replace(params, p_D0H=p_D, p_U0H=p_U))
    v_D_hat, _ = modulated_utilities(game, mod)
    report = np.array([p_U, 1.0 - p_U])
    total = 0.0
    for m in range(2):
        a = best_response(report, m, game, mod, b_D=beliefs.b_D)
        total += float(np.dot(beliefs.b, beliefs.b_D[:, m] * v_D_hat[:, m, a]))
    return total


def _covert_optimal_value(params: InsiderParams, p_D: float, p_U: float) -> float:
    game, beliefs, mod = insider_game(replace(params, p_D0H=p_D, p_U0H=p_U))
    report = covert_design(game, beliefs.b, beliefs.b_U, beliefs.b_D, mod)
    return float(report.objective_value)


FIGURES = ("fig5a", "fig5b", "fig6", "fig7a", "fig7b", "fig8a", "fig8b")


def figure_data(
    figure: str, params: InsiderParams = BENCHMARK, grid: Optional[int] = None
) -> Table:
    """Tabular data behind the numerical-study figures.

    Surfaces (fig5*, fig8*) default to 101x101 grids; curves (fig6, fig7*)
    default to 201 points.  fig7* evaluates at the configured true
    honeypot fraction ``params.p_D0H`` (default 0.2).
    """
    if figure not in FIGURES:
        raise UnknownFigure(f"unknown figure id {figure!r}; expected one of {FIGURES}")
    surface = figure in ("fig5a", "fig5b", "fig8a", "fig8b")
    n = grid if grid is not None else (101 if surface else 201)
    rows = []
    if figure in ("fig5a", "fig5b"):
        qs = np.linspace(0.0, 1.0, n)
        ps = np.linspace(0.0, 1.0, n)
        for q in qs:
            f, env = _pwl_pair(replace(params, q_g=float(q), q_b=1.0 - float(q)))
            for p in ps:
                if figure == "fig5a":
                    rows.append((float(q), float(p), f.value(float(p))))
                else:
                    rows.append(
                        (float(q), float(p), env.value(float(p)) - f.value(float(p)))
                    )
        name = "v_prior" if figure == "fig5a" else "max_trust_margin"
        return Table(columns=("q_g", "p_D", name), rows=rows)
    if figure == "fig6":
        for phi0 in np.linspace(-1.0, 1.0, n):
            t_g, t_b = decision_thresholds(params, phi0=float(phi0))
            rows.append((float(phi0), t_g, t_b, t_g - t_b))
        return Table(columns=("phi0", "t_g", "t_b", "diff"), rows=rows)
    if figure in ("fig7a", "fig7b"):
        value_fn = _user_prior_values if figure == "fig7a" else _user_posterior_values
        for phi0 in np.linspace(-1.0, 1.0, n):
            p = replace(params, phi0=float(phi0))
            v_def, v_g, v_b = value_fn(p, params.p_D0H)
            rows.append((float(phi0), v_def, v_g, v_b))
        return Table(columns=("phi0", "v_D", "v_selfish", "v_adversarial"), rows=rows)
    # fig8a / fig8b
    value_fn = _covert_prior_value if figure == "fig8a" else _covert_optimal_value
    for p_D in np.linspace(0.0, 1.0, n):
        for p_U in np.linspace(0.0, 1.0, n):
            rows.append((float(p_D), float(p_U), value_fn(params, float(p_D), float(p_U))))
    name = "v_prior" if figure == "fig8a" else "v_opt"
    return Table(columns=("p_D", "p_U", name), rows=rows)


# ---------------------------------------------------------------------------
# Headline statistics


@dataclass
class HeadlineStats:
    near_threshold_ratio: float
    avg_gain_fig5_ratio_of_means: float
    avg_gain_fig5_mean_of_ratios: float
    fig5_excluded_points: int
    avg_gain_fig8_ratio_of_means: float
    avg_gain_fig8_mean_of_ratios: float
    fig8_excluded_points: int


def _gain_pair(base: np.ndarray, improved: np.ndarray) -> Tuple[float, float, int]:
    """Average relative improvement under both interpretations: ratio of
    grid means, and mean of pointwise ratios over points with positive
    base value (others counted as excluded)."""
    ratio_of_means = float(improved.mean() / base.mean()) - 1.0
    mask = base > 1e-12
    mean_of_ratios = float(np.mean(improved[mask] / base[mask])) - 1.0
    return ratio_of_means, mean_of_ratios, int((~mask).sum())


def headline_stats(params: InsiderParams = BENCHMARK, grid: int = 101) -> HeadlineStats:
    """Reproduction statistics of the numerical study."""
    # Best-case multiplier near the selfish threshold with only selfish insiders.
    f, env = _pwl_pair(replace(params, q_g=1.0, q_b=0.0))
    best_ratio = 0.0
    for p in np.arange(0.0, 1.0 + 1e-9, 1e-3):
        base = f.value(float(p))
        if base > 1e-12:
            best_ratio = max(best_ratio, env.value(float(p)) / base)

    fig5a = figure_data("fig5a", params, grid)
    fig5b = figure_data("fig5b", params, grid)
    base5 = np.array(fig5a.column("v_prior"))
    improved5 = base5 + np.array(fig5b.column("max_trust_margin"))
    g5_rom, g5_mor, g5_excl = _gain_pair(base5, improved5)

    fig8a = figure_data("fig8a", params, grid)
    fig8b = figure_data("fig8b", params, grid)
    base8 = np.array(fig8a.column("v_prior"))
    improved8 = np.array(fig8b.column("v_opt"))
    g8_rom, g8_mor, g8_excl = _gain_pair(base8, improved8)

    return HeadlineStats(
        near_threshold_ratio=best_ratio,
        avg_gain_fig5_ratio_of_means=g5_rom,
        avg_gain_fig5_mean_of_ratios=g5_mor,
        fig5_excluded_points=g5_excl,
        avg_gain_fig8_ratio_of_means=g8_rom,
        avg_gain_fig8_mean_of_ratios=g8_mor,
        fig8_excluded_points=g8_excl,
    )
