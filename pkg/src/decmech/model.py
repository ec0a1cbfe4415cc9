"""Core domain objects for finite defender-user deception games.

A game has N states (privately known to the defender), M user types
(privately known to the user), and K actions where action 0 is the
designated drop-out action.  Utility transfers, Bayesian posterior
updates, user best responses, and the defender's prior / expected
posterior utilities all live here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    InconsistentSupport,
    OffSupportSignalWarning,
    ValidationError,
    ZeroProbabilitySignal,
)

if TYPE_CHECKING:
    from .policies import PolicySpace

PROB_TOL = 1e-9
SUM_TOL = 1e-12
UTIL_TOL = 1e-9

DROP_OUT = 0


def _as_readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_distribution(vec: np.ndarray, name: str, tol: float = SUM_TOL) -> None:
    if np.any(vec < -PROB_TOL):
        raise ValidationError(f"{name} must be nonnegative")
    if abs(float(vec.sum()) - 1.0) > tol:
        raise ValidationError(f"{name} must sum to 1 (normalization)")


@dataclass(frozen=True, eq=False)
class BasicGame:
    """Finite state/type/action sets with both players' utility tables.

    ``utility_D`` and ``utility_U`` are indexed ``[state, type, action]``.
    Action index 0 is the drop-out action.
    """

    states: Tuple[str, ...]
    types: Tuple[str, ...]
    actions: Tuple[str, ...]
    utility_D: np.ndarray
    utility_U: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "utility_D", _as_readonly(self.utility_D))
        object.__setattr__(self, "utility_U", _as_readonly(self.utility_U))
        if self.n_states < 1 or self.n_types < 1:
            raise ValidationError("need at least one state and one type")
        if self.n_actions < 2:
            raise ValidationError(
                "need at least two actions (drop-out plus one substantive)"
            )
        shape = (self.n_states, self.n_types, self.n_actions)
        for name, table in (("utility_D", self.utility_D), ("utility_U", self.utility_U)):
            if table.shape != shape:
                raise ValidationError(
                    f"{name} has shape {table.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(table)):
                raise ValidationError(f"{name} entries must be finite")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_types(self) -> int:
        return len(self.types)

    @property
    def n_actions(self) -> int:
        return len(self.actions)


@dataclass(frozen=True, eq=False)
class BeliefProfile:
    """Belief statistics of both players.

    ``b`` is the true (or designed) state distribution, ``b_U[m]`` is the
    type-m user's initial state belief, and ``b_D[x]`` is the defender's
    type belief at state x.
    """

    b: np.ndarray          # (N,)
    b_U: np.ndarray        # (M, N)
    b_D: np.ndarray        # (N, M)

    def __post_init__(self):
        object.__setattr__(self, "b", _as_readonly(self.b))
        object.__setattr__(self, "b_U", _as_readonly(np.atleast_2d(self.b_U)))
        object.__setattr__(self, "b_D", _as_readonly(np.atleast_2d(self.b_D)))
        _check_distribution(self.b, "b")
        for m in range(self.b_U.shape[0]):
            _check_distribution(self.b_U[m], f"b_U(.|type {m})")
        for x in range(self.b_D.shape[0]):
            _check_distribution(self.b_D[x], f"b_D(.|state {x})")
        if self.b_U.shape[1] != self.b.shape[0] or self.b_D.shape[0] != self.b.shape[0]:
            raise ValidationError("belief dimensions are inconsistent")

    def is_overt(self, tol: float = PROB_TOL) -> bool:
        """True when every type's initial belief equals the true distribution."""
        return bool(np.all(np.abs(self.b_U - self.b[None, :]) <= tol))

    @classmethod
    def overt(cls, b, b_D) -> "BeliefProfile":
        b = np.asarray(b, dtype=float)
        b_D = np.atleast_2d(np.asarray(b_D, dtype=float))
        m = b_D.shape[1]
        return cls(b=b, b_U=np.tile(b, (m, 1)), b_D=b_D)


@dataclass(frozen=True, eq=False)
class Modulator:
    """Per-action utility transfer ``c`` with a nonnegative scaling ``gamma``.

    ``c[0]`` (the drop-out action) must be exactly zero: a non-participating
    user cannot be charged or paid.
    """

    c: np.ndarray
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", _as_readonly(self.c))
        object.__setattr__(self, "gamma", float(self.gamma))
        if self.c.ndim != 1:
            raise ValidationError("c must be a vector with one entry per action")
        if self.c[DROP_OUT] != 0.0:
            raise ValidationError(
                "c(a_DO) must be exactly zero (modulation-feasibility constraint)"
            )
        if not np.all(np.isfinite(self.c)):
            raise ValidationError("c entries must be finite")
        if self.gamma < 0.0:
            raise ValidationError("gamma must be nonnegative")

    @classmethod
    def zero(cls, n_actions: int, gamma: float = 0.0) -> "Modulator":
        return cls(c=np.zeros(n_actions), gamma=gamma)


@dataclass(frozen=True, eq=False)
class Generator:
    """Per-state distribution ``pi[x, s]`` over the enumerated policy space."""

    policy_space: "PolicySpace"
    pi: np.ndarray          # (N, |S|)

    def __post_init__(self):
        object.__setattr__(self, "pi", _as_readonly(self.pi))
        if self.pi.ndim != 2 or self.pi.shape[1] != len(self.policy_space):
            raise ValidationError("pi must have one column per security policy")
        if np.any(self.pi < -PROB_TOL):
            raise ValidationError("pi entries must be nonnegative")
        rows = self.pi.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-9):
            raise ValidationError("each row of pi must sum to 1 (normalization)")

    @property
    def n_states(self) -> int:
        return self.pi.shape[0]

    @property
    def n_signals(self) -> int:
        return self.pi.shape[1]

    def is_zero_information(self, tol: float = PROB_TOL) -> bool:
        return bool(np.all(np.abs(self.pi - self.pi[0][None, :]) <= tol))


def modulated_utilities(game: BasicGame, mod: Modulator) -> Tuple[np.ndarray, np.ndarray]:
    """Utility tables after the transfer: defender gains ``gamma*c(a)``,
    the user pays ``c(a)``."""
    shift = mod.c[None, None, :]
    return game.utility_D + mod.gamma * shift, game.utility_U - shift


def bayes_update(belief_over_states: np.ndarray, gen: Generator, signal: int) -> np.ndarray:
    """Posterior state distribution after observing ``signal``.

    Raises :class:`ZeroProbabilitySignal` when the signal has probability
    zero under the given belief.
    """
    belief = np.asarray(belief_over_states, dtype=float)
    joint = belief * gen.pi[:, signal]
    total = float(joint.sum())
    if total <= 0.0:
        raise ZeroProbabilitySignal(
            f"signal {signal} has probability 0 under the given belief"
        )
    return joint / total


def _defender_score(
    posterior: np.ndarray, type_index: int, beliefs_b_D: np.ndarray, v_D_hat: np.ndarray
) -> np.ndarray:
    # Defender's contribution from this type for each candidate action,
    # weighted by her per-state belief that she faces this type.
    return np.einsum(
        "x,x,xa->a", posterior, beliefs_b_D[:, type_index], v_D_hat[:, type_index, :]
    )


def best_response(
    posterior: np.ndarray,
    type_index: int,
    game: BasicGame,
    mod: Modulator,
    b_D: Optional[np.ndarray] = None,
) -> int:
    """The type's expected-utility-maximizing action at the posterior.

    Ties are broken in the defender's favor (under ``b_D``; uniform type
    weights when omitted), then by lowest action index.
    """
    posterior = np.asarray(posterior, dtype=float)
    v_D_hat, v_U_hat = modulated_utilities(game, mod)
    util = posterior @ v_U_hat[:, type_index, :]
    best = float(util.max())
    tied = np.nonzero(util >= best - UTIL_TOL)[0]
    if tied.size == 1:
        return int(tied[0])
    if b_D is None:
        b_D = np.full((game.n_states, game.n_types), 1.0 / game.n_types)
    score = _defender_score(posterior, type_index, np.atleast_2d(b_D), v_D_hat)[tied]
    top = float(score.max())
    tied = tied[score >= top - UTIL_TOL]
    return int(tied.min())


def prior_utility(game: BasicGame, beliefs: BeliefProfile, mod: Modulator) -> float:
    """Defender's expected utility when each type best-responds to his own
    initial belief with no signal."""
    v_D_hat, _ = modulated_utilities(game, mod)
    total = 0.0
    for m in range(game.n_types):
        a_star = best_response(beliefs.b_U[m], m, game, mod, b_D=beliefs.b_D)
        total += float(
            np.dot(beliefs.b, beliefs.b_D[:, m] * v_D_hat[:, m, a_star])
        )
    return total


def _signal_responses(
    game: BasicGame, beliefs: BeliefProfile, mod: Modulator, gen: Generator, signal: int
) -> list:
    """Best response of every type to a signal with positive probability
    under ``b``.  Types whose belief puts zero mass on the signal respond
    to their prior (reported via a warning)."""
    responses = []
    supported = 0
    for m in range(game.n_types):
        denom = float(np.dot(beliefs.b_U[m], gen.pi[:, signal]))
        if denom > PROB_TOL:
            post = bayes_update(beliefs.b_U[m], gen, signal)
            supported += 1
        else:
            post = beliefs.b_U[m]
        responses.append((denom > PROB_TOL, best_response(post, m, game, mod, b_D=beliefs.b_D)))
    if supported == 0:
        raise InconsistentSupport(
            f"signal {signal} has positive probability under b but zero "
            "probability under every type's belief"
        )
    for m, (on_support, _) in enumerate(responses):
        if not on_support:
            warnings.warn(
                f"signal {signal} is off-support for type {m}; using the "
                "prior best response",
                OffSupportSignalWarning,
                stacklevel=3,
            )
    return [a for _, a in responses]


def expected_posterior_utility(
    game: BasicGame, beliefs: BeliefProfile, mod: Modulator, gen: Generator
) -> float:
    """Defender's expected utility when the user best-responds to the
    Bayesian posterior induced by each realized signal."""
    v_D_hat, _ = modulated_utilities(game, mod)
    total = 0.0
    for s in range(gen.n_signals):
        weight = beliefs.b * gen.pi[:, s]
        if float(weight.sum()) <= PROB_TOL:
            continue
        actions = _signal_responses(game, beliefs, mod, gen, s)
        for m, a in enumerate(actions):
            total += float(np.dot(weight, beliefs.b_D[:, m] * v_D_hat[:, m, a]))
    return total


def expected_posterior_belief(
    beliefs: BeliefProfile, gen: Generator, type_index: int, tol: float = PROB_TOL
) -> Tuple[np.ndarray, bool]:
    """The type's expected posterior belief and whether it equals his prior.

    Raises :class:`InconsistentSupport` when a signal has positive
    probability under ``b`` but zero under this type's belief.
    """
    m = type_index
    expected = np.zeros_like(beliefs.b)
    for s in range(gen.n_signals):
        p_s = float(np.dot(beliefs.b, gen.pi[:, s]))
        if p_s <= tol:
            continue
        denom = float(np.dot(beliefs.b_U[m], gen.pi[:, s]))
        if denom <= tol:
            raise InconsistentSupport(
                f"signal {s} has positive probability under b but zero "
                f"probability under type {m}'s belief"
            )
        expected += p_s * bayes_update(beliefs.b_U[m], gen, s)
    plausible = bool(np.all(np.abs(expected - beliefs.b_U[m]) <= tol))
    return expected, plausible
