"""Dense linear programming: a deterministic two-phase simplex solver and
the assembly of the policy-design programs built on top of it.

``optimal_generator`` maximizes the defender's expected posterior utility
over incentive-compatible generators for fixed beliefs and modulator.
``joint_belief_lp`` implements the substitution that also treats the joint
signal/state masses as decision variables, which relaxes the shared-
generator coupling; the residual coupling gap is always reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NumericalFailure, PreconditionViolated
from .model import (
    BasicGame,
    BeliefProfile,
    Generator,
    Modulator,
    modulated_utilities,
)
from .policies import PolicySpace, check_ic, enumerate_policies, ic_lhs

FEAS_TOL = 1e-9
RESIDUAL_TOL = 1e-6

LEQ, EQ, GEQ = "<=", "=", ">="

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


@dataclass
class LinearProgram:
    """Maximize ``objective @ x`` subject to row constraints and bounds.

    Each constraint is ``(coefficients, relation, rhs)`` with relation one
    of ``"<="``, ``"="``, ``">="``.  Default variable bounds are [0, inf).
    """

    objective: np.ndarray
    constraints: List[Tuple[np.ndarray, str, float]]
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective coefficients must be finite")
        rows = []
        for coeffs, rel, rhs in self.constraints:
            coeffs = np.asarray(coeffs, dtype=float)
            if coeffs.shape != (n,):
                raise ValueError("constraint row width must equal variable count")
            if not (np.all(np.isfinite(coeffs)) and np.isfinite(rhs)):
                raise ValueError("constraint coefficients must be finite")
            if rel not in (LEQ, EQ, GEQ):
                raise ValueError(f"unknown relation {rel!r}")
            rows.append((coeffs, rel, float(rhs)))
        self.constraints = rows
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, float)


@dataclass
class LPSolution:
    status: str
    x: Optional[np.ndarray]
    objective: Optional[float]


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _run_simplex(T: np.ndarray, basis: np.ndarray, tol: float) -> str:
    """Minimize the last tableau row.  Dantzig pricing with a permanent
    switch to Bland's rule after a degenerate stall; deterministic."""
    m = T.shape[0] - 1
    bland = False
    stall = 0
    last = T[-1, -1]
    max_iter = 500 * (T.shape[0] + T.shape[1])
    for _ in range(max_iter):
        cost = T[-1, :-1]
        if bland:
            entering = np.nonzero(cost < -tol)[0]
            if entering.size == 0:
                return OPTIMAL
            j = int(entering[0])
        else:
            j = int(np.argmin(cost))
            if cost[j] >= -tol:
                return OPTIMAL
        col = T[:m, j]
        positive = col > tol
        if not positive.any():
            return UNBOUNDED
        ratios = np.full(m, np.inf)
        ratios[positive] = T[:m, -1][positive] / col[positive]
        best = float(ratios.min())
        tied = np.nonzero(ratios <= best + 1e-12)[0]
        # lowest leaving-variable index on ties (anti-cycling friendly)
        i = int(tied[np.argmin(basis[tied])])
        _pivot(T, i, j)
        basis[i] = j
        if abs(T[-1, -1] - last) <= 1e-12:
            stall += 1
            if stall > 40:
                bland = True
        else:
            stall = 0
        last = T[-1, -1]
    raise NumericalFailure("simplex iteration limit exceeded")


def _solve_standard(c: np.ndarray, A: np.ndarray, rels: Sequence[str], b: np.ndarray,
                    tol: float) -> LPSolution:
    """Minimize c@x s.t. A x (rel) b, x >= 0, via two-phase tableau simplex."""
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    rels = list(rels)
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            rels[i] = {LEQ: GEQ, GEQ: LEQ, EQ: EQ}[rels[i]]
    slack_cols = [i for i, r in enumerate(rels) if r != EQ]
    n_slack = len(slack_cols)
    art_rows = [i for i, r in enumerate(rels) if r == EQ or r == GEQ]
    n_art = len(art_rows)
    width = n + n_slack + n_art
    M = np.zeros((m, width))
    M[:, :n] = A
    for k, i in enumerate(slack_cols):
        M[i, n + k] = 1.0 if rels[i] == LEQ else -1.0
    basis = np.full(m, -1, dtype=int)
    for k, i in enumerate(slack_cols):
        if rels[i] == LEQ:
            basis[i] = n + k
    for k, i in enumerate(art_rows):
        M[i, n + n_slack + k] = 1.0
        basis[i] = n + n_slack + k

    if n_art > 0:
        T = np.zeros((m + 1, width + 1))
        T[:m, :width] = M
        T[:m, -1] = b
        T[-1, n + n_slack : n + n_slack + n_art] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        status = _run_simplex(T, basis, tol)
        if status != OPTIMAL:
            raise NumericalFailure("phase-1 simplex did not terminate optimally")
        if T[-1, -1] < -1e-7:
            return LPSolution(INFEASIBLE, None, None)
        # Drive any remaining artificials out of the basis.
        for i in range(m):
            if basis[i] >= n + n_slack:
                candidates = np.nonzero(np.abs(T[i, : n + n_slack]) > tol)[0]
                if candidates.size:
                    _pivot(T, i, int(candidates[0]))
                    basis[i] = int(candidates[0])
        keep = [i for i in range(m) if basis[i] < n + n_slack]
        T = np.vstack(
            [
                np.hstack([T[keep][:, : n + n_slack], T[keep][:, -1:]]),
                np.zeros((1, n + n_slack + 1)),
            ]
        )
        basis = basis[keep]
        m = len(keep)
    else:
        T = np.zeros((m + 1, n + n_slack + 1))
        T[:m, : n + n_slack] = M[:, : n + n_slack]
        T[:m, -1] = b

    T[-1, :n] = c
    for i in range(m):
        if T[-1, basis[i]] != 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    status = _run_simplex(T, basis, tol)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, None, None)
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    return LPSolution(OPTIMAL, x, float(c @ x))


def solve_lp(lp: LinearProgram, tol: float = FEAS_TOL) -> LPSolution:
    """Solve a maximization LP; deterministic given identical input.

    The solution is a primal-feasible basic solution.  Raises
    :class:`NumericalFailure` if the feasibility residual of a reported
    optimum exceeds 1e-6.
    """
    n = lp.objective.shape[0]
    # Map general bounds onto x >= 0: shift finite lower bounds, split free
    # variables, and add rows for finite upper bounds.
    shift = np.where(np.isfinite(lp.lower), lp.lower, 0.0)
    free = ~np.isfinite(lp.lower)
    n_free = int(free.sum())
    idx_free = np.nonzero(free)[0]

    def expand(row: np.ndarray) -> np.ndarray:
        return np.concatenate([row, -row[idx_free]])

    rows, rels, rhs = [], [], []
    for coeffs, rel, r in lp.constraints:
        rows.append(expand(coeffs))
        rels.append(rel)
        rhs.append(r - float(coeffs @ shift))
    for j in np.nonzero(np.isfinite(lp.upper))[0]:
        e = np.zeros(n)
        e[j] = 1.0
        rows.append(expand(e))
        rels.append(LEQ)
        rhs.append(lp.upper[j] - shift[j])
    A = np.array(rows) if rows else np.zeros((0, n + n_free))
    c_int = expand(lp.objective)

    sol = _solve_standard(-c_int, A, rels, np.array(rhs), tol)
    if sol.status != OPTIMAL:
        return sol
    x_int = sol.x
    x = x_int[:n].copy()
    x[idx_free] -= x_int[n:]
    x += shift
    residual = _feasibility_residual(lp, x)
    if residual > RESIDUAL_TOL:
        raise NumericalFailure(f"feasibility residual {residual:.3e} exceeds 1e-6")
    return LPSolution(OPTIMAL, x, float(lp.objective @ x))


def _feasibility_residual(lp: LinearProgram, x: np.ndarray) -> float:
    res = 0.0
    for coeffs, rel, rhs in lp.constraints:
        val = float(coeffs @ x)
        if rel == LEQ:
            res = max(res, val - rhs)
        elif rel == GEQ:
            res = max(res, rhs - val)
        else:
            res = max(res, abs(val - rhs))
    res = max(res, float(np.max(lp.lower - x, initial=0.0)))
    res = max(res, float(np.max(x - lp.upper, initial=0.0)))
    return res


@dataclass
class SolveReport:
    """Result of a policy-design solve."""

    status: str
    objective_value: Optional[float]
    generator: Optional[Generator] = None
    recovered_beliefs: Optional[BeliefProfile] = None
    consistency_gap: Optional[float] = None
    bounds: Optional[Tuple[float, float]] = None
    eta: Optional[np.ndarray] = None
    eta_U: Optional[np.ndarray] = None


def design_capacity_bounds(
    game: BasicGame, b_D: np.ndarray, mod: Modulator
) -> Tuple[float, float]:
    """Lower and upper bounds on the achievable objective value.

    Lower: worst per-state expected defender payoff.  Upper: the larger of
    the best drop-out payoff and the best per-state payoff plus the scaled
    maximal participation surplus the modulator can extract.
    """
    b_D = np.atleast_2d(np.asarray(b_D, dtype=float))
    v_D, v_U = game.utility_D, game.utility_U
    r_hi = float(np.max(np.einsum("xm,xm->x", b_D, v_D.max(axis=2))))
    r_lo = float(np.min(np.einsum("xm,xm->x", b_D, v_D.min(axis=2))))
    drop = float(np.max(np.einsum("xm,xm->x", b_D, v_D[:, :, 0])))
    c_part = np.max(v_U - v_U[:, :, 0:1], axis=0)    # (M, K): max_x gain over drop-out
    upper = max(drop, r_hi + mod.gamma * float(c_part.max()))
    return r_lo, upper


def _objective_weights(
    game: BasicGame, b_D: np.ndarray, mod: Modulator, space: PolicySpace
) -> np.ndarray:
    """w[x, s] = sum_l b_D(l|x) v_D_hat(x, l, a^l(s))."""
    v_D_hat, _ = modulated_utilities(game, mod)
    acts = space.actions_matrix()                       # (S, M)
    per_type = v_D_hat.transpose(1, 2, 0)               # (M, K, N)
    chosen = per_type[np.arange(game.n_types)[None, :], acts, :]  # (S, M, N)
    return np.einsum("xm,smx->xs", np.atleast_2d(b_D), chosen)


def optimal_generator(
    game: BasicGame, beliefs: BeliefProfile, mod: Modulator
) -> SolveReport:
    """Best incentive-compatible generator for fixed beliefs and modulator.

    Decision variables are the N*K^M probabilities pi(s|x).  The program is
    always feasible (a one-policy zero-information generator satisfies IC).
    """
    space = enumerate_policies(game.n_types, game.n_actions)
    n_s = len(space)
    n_x = game.n_states
    w = _objective_weights(game, beliefs.b_D, mod, space)
    coeff = ic_lhs(game, beliefs, mod, space)            # (S, M, K, N)
    acts = space.actions_matrix()

    n_var = n_x * n_s                                    # var index = x * n_s + s
    objective = (beliefs.b[:, None] * w).reshape(n_var)

    constraints: List[Tuple[np.ndarray, str, float]] = []
    for s in range(n_s):
        for l in range(game.n_types):
            for h in range(game.n_actions):
                if h == acts[s, l]:
                    continue
                row = np.zeros(n_var)
                row[s::n_s] = coeff[s, l, h, :]
                if np.all(row == 0.0):
                    continue
                constraints.append((row, GEQ, 0.0))
    for x in range(n_x):
        row = np.zeros(n_var)
        row[x * n_s : (x + 1) * n_s] = 1.0
        constraints.append((row, EQ, 1.0))

    sol = solve_lp(LinearProgram(objective=objective, constraints=constraints))
    bounds = design_capacity_bounds(game, beliefs.b_D, mod)
    if sol.status != OPTIMAL:
        return SolveReport(status=sol.status, objective_value=None, bounds=bounds)
    pi = np.clip(sol.x.reshape(n_x, n_s), 0.0, None)
    pi /= pi.sum(axis=1, keepdims=True)
    gen = Generator(policy_space=space, pi=pi)
    return SolveReport(
        status=OPTIMAL,
        objective_value=sol.objective,
        generator=gen,
        bounds=bounds,
    )


def joint_belief_lp(
    game: BasicGame, b_D: np.ndarray, mod: Modulator
) -> SolveReport:
    """Relaxation in which the joint masses eta(s,x) = b(x)pi(s|x) and
    eta_U(theta,s,x) = b_U(x|theta)pi(s|x) are free decision variables.

    Only valid for a zero transfer.  The relaxation drops the requirement
    that both mass tables come from one shared generator; the reported
    ``consistency_gap`` measures that residual coupling.
    """
    if np.any(mod.c != 0.0):
        raise PreconditionViolated("the joint-belief transform requires c == 0")
    b_D = np.atleast_2d(np.asarray(b_D, dtype=float))
    space = enumerate_policies(game.n_types, game.n_actions)
    n_s, n_x, n_m = len(space), game.n_states, game.n_types
    w = _objective_weights(game, b_D, mod, space)        # (N, S)
    _, v_U_hat = modulated_utilities(game, mod)
    acts = space.actions_matrix()

    # Variable layout: eta (n_s * n_x) then eta_U (n_m * n_s * n_x).
    n_eta = n_s * n_x
    n_var = n_eta + n_m * n_s * n_x

    def eta_idx(s: int, x: int) -> int:
        return s * n_x + x

    def etau_idx(l: int, s: int, x: int) -> int:
        return n_eta + (l * n_s + s) * n_x + x

    objective = np.zeros(n_var)
    for s in range(n_s):
        for x in range(n_x):
            objective[eta_idx(s, x)] = w[x, s]

    constraints: List[Tuple[np.ndarray, str, float]] = []
    row = np.zeros(n_var)
    row[:n_eta] = 1.0
    constraints.append((row, EQ, 1.0))
    for l in range(n_m):
        row = np.zeros(n_var)
        for s in range(n_s):
            for x in range(n_x):
                row[etau_idx(l, s, x)] = 1.0
        constraints.append((row, EQ, 1.0))
    for s in range(n_s):
        for l in range(n_m):
            for h in range(game.n_actions):
                if h == acts[s, l]:
                    continue
                row = np.zeros(n_var)
                for x in range(n_x):
                    row[etau_idx(l, s, x)] = (
                        v_U_hat[x, l, acts[s, l]] - v_U_hat[x, l, h]
                    )
                if np.all(row == 0.0):
                    continue
                constraints.append((row, GEQ, 0.0))

    sol = solve_lp(LinearProgram(objective=objective, constraints=constraints))
    bounds = design_capacity_bounds(game, b_D, mod)
    if sol.status != OPTIMAL:
        return SolveReport(status=sol.status, objective_value=None, bounds=bounds)

    eta = np.zeros((n_s, n_x))
    eta_U = np.zeros((n_m, n_s, n_x))
    for s in range(n_s):
        for x in range(n_x):
            eta[s, x] = sol.x[eta_idx(s, x)]
            for l in range(n_m):
                eta_U[l, s, x] = sol.x[etau_idx(l, s, x)]
    b = eta.sum(axis=0)
    b_U = eta_U.sum(axis=1)

    gap = 0.0
    for l in range(n_m):
        for s in range(n_s):
            for x in range(n_x):
                if b[x] > FEAS_TOL and b_U[l, x] > FEAS_TOL:
                    gap = max(
                        gap,
                        abs(eta[s, x] / b[x] - eta_U[l, s, x] / b_U[l, x]),
                    )

    generator = None
    if np.all(b > FEAS_TOL):
        pi = np.clip((eta / b[None, :]).T, 0.0, None)
        pi /= pi.sum(axis=1, keepdims=True)
        generator = Generator(policy_space=space, pi=pi)
    beliefs = BeliefProfile(b=b / b.sum(), b_U=_normalize_rows(b_U), b_D=b_D)
    return SolveReport(
        status=OPTIMAL,
        objective_value=sol.objective,
        generator=generator,
        recovered_beliefs=beliefs,
        consistency_gap=gap,
        bounds=bounds,
        eta=eta,
        eta_U=eta_U,
    )


def _normalize_rows(a: np.ndarray) -> np.ndarray:
    a = np.clip(a, 0.0, None)
    sums = a.sum(axis=1, keepdims=True)
    sums[sums == 0.0] = 1.0
    return a / sums
