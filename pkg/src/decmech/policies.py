"""Enumeration of the K^M security-policy signal space and the
incentive-compatibility checks that decide which policies a generator may
credibly emit.

A security policy assigns one action to each user type.  Policies are
indexed by their mixed-radix encoding with type 0 as the most significant
digit, so ``index = sum_l assignment[l] * K**(M-1-l)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import SpaceTooLarge
from .model import BasicGame, BeliefProfile, Generator, Modulator, modulated_utilities

POLICY_SPACE_CAP = 10**6
IC_TOL = 1e-9


@dataclass(frozen=True)
class SecurityPolicy:
    """Action required of each type: entry l is the action for type l."""

    assignment: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.assignment)


@dataclass(frozen=True)
class PolicySpace:
    """The full ordered list of K^M security policies."""

    n_types: int
    n_actions: int
    policies: Tuple[SecurityPolicy, ...]

    def __len__(self) -> int:
        return len(self.policies)

    def __getitem__(self, index: int) -> SecurityPolicy:
        return self.policies[index]

    def __iter__(self):
        return iter(self.policies)

    def index_of(self, assignment: Sequence[int]) -> int:
        """Mixed-radix index of an assignment (type 0 most significant)."""
        idx = 0
        for a in assignment:
            if not 0 <= a < self.n_actions:
                raise ValueError(f"action index {a} out of range")
            idx = idx * self.n_actions + a
        return idx

    def actions_matrix(self) -> np.ndarray:
        """(|S|, M) array of required actions, one row per policy."""
        return np.array([p.assignment for p in self.policies], dtype=int)


def enumerate_policies(n_types: int, n_actions: int) -> PolicySpace:
    """All K^M policies in canonical mixed-radix order."""
    count = n_actions**n_types
    if count > POLICY_SPACE_CAP:
        raise SpaceTooLarge(
            f"policy space of size {n_actions}^{n_types} exceeds cap {POLICY_SPACE_CAP}"
        )
    policies = []
    for idx in range(count):
        digits = []
        rem = idx
        for _ in range(n_types):
            digits.append(rem % n_actions)
            rem //= n_actions
        policies.append(SecurityPolicy(tuple(reversed(digits))))
    return PolicySpace(n_types=n_types, n_actions=n_actions, policies=tuple(policies))


@dataclass(frozen=True)
class ICViolation:
    policy_index: int
    type_index: int
    deviation_action: int
    slack: float


def ic_lhs(
    game: BasicGame, beliefs: BeliefProfile, mod: Modulator, space: PolicySpace
) -> np.ndarray:
    """Incentive-compatibility sums for every (policy, type, deviation).

    Entry [s, l, h] is
    ``sum_x (v_U_hat(x,l,a^l(s)) - v_U_hat(x,l,h)) * pi(s|x) * b_U(x|l)``
    divided through by pi, i.e. the coefficient row to be combined with the
    generator columns; here it is returned already contracted with nothing,
    as the (|S|, M, K, N) coefficient tensor.
    """
    _, v_U_hat = modulated_utilities(game, mod)
    acts = space.actions_matrix()              # (S, M)
    # diff[s, l, h, x] = (v_U_hat(x, l, a^l(s)) - v_U_hat(x, l, h)) * b_U(x|l)
    enforced = v_U_hat.transpose(1, 2, 0)[np.arange(game.n_types)[None, :], acts, :]
    # enforced: (S, M, N)
    diff = enforced[:, :, None, :] - v_U_hat.transpose(1, 2, 0)[None, :, :, :]
    return diff * beliefs.b_U[None, :, None, :]


def check_ic(
    gen: Generator,
    game: BasicGame,
    beliefs: BeliefProfile,
    mod: Modulator,
    tol: float = IC_TOL,
) -> List[ICViolation]:
    """All (policy, type, deviation) triples whose IC sum falls below -tol."""
    space = gen.policy_space
    coeff = ic_lhs(game, beliefs, mod, space)          # (S, M, K, N)
    sums = np.einsum("slhx,xs->slh", coeff, gen.pi)
    violations = []
    acts = space.actions_matrix()
    for s, l, h in zip(*np.nonzero(sums < -tol)):
        if h == acts[s, l]:
            continue
        violations.append(
            ICViolation(
                policy_index=int(s),
                type_index=int(l),
                deviation_action=int(h),
                slack=float(sums[s, l, h]),
            )
        )
    return violations


def enforceable_policies(gen: Generator, tol: float = IC_TOL) -> List[int]:
    """Indices of policies receiving positive probability in some state."""
    return [int(s) for s in np.nonzero(gen.pi.max(axis=0) > tol)[0]]
