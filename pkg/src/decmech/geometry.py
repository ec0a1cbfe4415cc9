"""Belief-simplex analysis.

Best-response partition of the belief simplex, the piecewise-linear prior
utility of the defender (two-state games use the probability of the first
state as the scalar belief parameter), its least concave majorant, trust
margins, manageability, type identifiability, and utility-alignment
classification.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateFitWarning,
    NotCredible,
    UnsupportedDimension,
)
from .model import (
    BasicGame,
    BeliefProfile,
    Generator,
    Modulator,
    best_response,
    expected_posterior_utility,
    modulated_utilities,
    prior_utility,
)
from .policies import check_ic

GEOM_TOL = 1e-12
VALUE_TOL = 1e-9


# ---------------------------------------------------------------------------
# Piecewise-linear functions on [0, 1]


@dataclass(frozen=True, eq=False)
class PWLFunction:
    """Piecewise-linear, possibly discontinuous function of the scalar
    belief parameter.

    ``breakpoints`` is strictly increasing from 0 to 1.  Segment i is the
    affine map ``slopes[i] * p + intercepts[i]`` on the open interval
    between breakpoints i and i+1.  ``knot_values`` stores the attained
    value at each breakpoint (fixed by the best-response tie-break), which
    may differ from either one-sided limit.
    """

    breakpoints: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray
    knot_values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "slopes", np.asarray(self.slopes, dtype=float))
        object.__setattr__(self, "intercepts", np.asarray(self.intercepts, dtype=float))
        object.__setattr__(self, "knot_values", np.asarray(self.knot_values, dtype=float))
        if bp[0] != 0.0 or bp[-1] != 1.0 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must increase strictly from 0 to 1")
        if len(self.slopes) != len(bp) - 1 or len(self.knot_values) != len(bp):
            raise ValueError("inconsistent piece counts")

    @property
    def n_segments(self) -> int:
        return len(self.slopes)

    def segment_of(self, p: float) -> int:
        i = int(np.searchsorted(self.breakpoints, p, side="right") - 1)
        return min(max(i, 0), self.n_segments - 1)

    def value(self, p: float) -> float:
        """Attained value, honoring the stored knot values at breakpoints."""
        hit = np.nonzero(np.abs(self.breakpoints - p) <= GEOM_TOL)[0]
        if hit.size:
            return float(self.knot_values[hit[0]])
        i = self.segment_of(p)
        return float(self.slopes[i] * p + self.intercepts[i])

    def left_limit(self, knot: int) -> float:
        if knot == 0:
            return float(self.knot_values[0])
        i = knot - 1
        return float(self.slopes[i] * self.breakpoints[knot] + self.intercepts[i])

    def right_limit(self, knot: int) -> float:
        if knot == len(self.breakpoints) - 1:
            return float(self.knot_values[-1])
        i = knot
        return float(self.slopes[i] * self.breakpoints[knot] + self.intercepts[i])

    def upper_value(self, knot: int) -> float:
        """Supremum of attained value and both one-sided limits at a knot."""
        return max(self.knot_values[knot], self.left_limit(knot), self.right_limit(knot))

    def is_continuous(self, tol: float = VALUE_TOL) -> bool:
        for k in range(len(self.breakpoints)):
            if abs(self.left_limit(k) - self.knot_values[k]) > tol:
                return False
            if abs(self.right_limit(k) - self.knot_values[k]) > tol:
                return False
        return True

    @classmethod
    def from_points(cls, xs: Sequence[float], ys: Sequence[float]) -> "PWLFunction":
        """Continuous piecewise-linear interpolant through (xs, ys)."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        slopes = np.diff(ys) / np.diff(xs)
        intercepts = ys[:-1] - slopes * xs[:-1]
        return cls(breakpoints=xs, slopes=slopes, intercepts=intercepts, knot_values=ys)


def concavify(f: PWLFunction) -> PWLFunction:
    """Least concave majorant of ``f``.

    The envelope is computed over the segment endpoints, taking at each
    breakpoint the supremum of the attained value and both one-sided
    limits, so discontinuities are handled per the closure of the
    hypograph.  The result is continuous and concave.
    """
    xs = f.breakpoints
    ys = np.array([f.upper_value(k) for k in range(len(xs))])
    hull_x: List[float] = []
    hull_y: List[float] = []
    for x, y in zip(xs, ys):
        hull_x.append(float(x))
        hull_y.append(float(y))
        while len(hull_x) >= 3:
            x0, x1, x2 = hull_x[-3], hull_x[-2], hull_x[-1]
            y0, y1, y2 = hull_y[-3], hull_y[-2], hull_y[-1]
            # drop the middle point when it lies on or below the chord
            if (y1 - y0) * (x2 - x1) <= (y2 - y1) * (x1 - x0) + GEOM_TOL:
                del hull_x[-2], hull_y[-2]
            else:
                break
    return PWLFunction.from_points(hull_x, hull_y)


# ---------------------------------------------------------------------------
# Best-response cells


def _polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _clip_halfplane(poly: np.ndarray, a: float, b: float, c: float) -> np.ndarray:
    """Clip polygon to {(u, v) : a*u + b*v + c >= 0} (Sutherland-Hodgman)."""
    if len(poly) == 0:
        return poly
    out: List[np.ndarray] = []
    n = len(poly)
    vals = a * poly[:, 0] + b * poly[:, 1] + c
    for i in range(n):
        j = (i + 1) % n
        pi, pj = poly[i], poly[j]
        vi, vj = vals[i], vals[j]
        if vi >= -GEOM_TOL:
            out.append(pi)
        if (vi > GEOM_TOL and vj < -GEOM_TOL) or (vi < -GEOM_TOL and vj > GEOM_TOL):
            t = vi / (vi - vj)
            out.append(pi + t * (pj - pi))
    if not out:
        return np.zeros((0, 2))
    return np.array(out)


def _interval_intersect(a: Optional[Tuple[float, float]], b: Optional[Tuple[float, float]]):
    if a is None or b is None:
        return None
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if lo > hi + GEOM_TOL:
        return None
    return (lo, min(max(lo, hi), 1.0))


def _type_cells_1d(v_U_hat: np.ndarray, type_index: int) -> Dict[int, Optional[Tuple[float, float]]]:
    """Closed interval of the scalar belief p (weight on state 0) on which
    each action is weakly optimal for the type; None when empty."""
    n_actions = v_U_hat.shape[2]
    cells: Dict[int, Optional[Tuple[float, float]]] = {}
    for a in range(n_actions):
        lo, hi = 0.0, 1.0
        empty = False
        for other in range(n_actions):
            if other == a:
                continue
            d1 = v_U_hat[0, type_index, a] - v_U_hat[0, type_index, other]
            d2 = v_U_hat[1, type_index, a] - v_U_hat[1, type_index, other]
            alpha, beta = d1 - d2, d2          # constraint alpha*p + beta >= 0
            if abs(alpha) <= GEOM_TOL:
                if beta < -GEOM_TOL:
                    empty = True
                    break
                continue
            bound = -beta / alpha
            if alpha > 0:
                lo = max(lo, bound)
            else:
                hi = min(hi, bound)
        if empty or lo > hi + GEOM_TOL:
            cells[a] = None
        else:
            cells[a] = (max(lo, 0.0), min(hi, 1.0))
    return cells


def _type_cells_2d(v_U_hat: np.ndarray, type_index: int) -> Dict[int, Optional[np.ndarray]]:
    """Best-response polygons in (p1, p2) coordinates on the 3-state simplex."""
    n_actions = v_U_hat.shape[2]
    simplex = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    cells: Dict[int, Optional[np.ndarray]] = {}
    for a in range(n_actions):
        poly = simplex
        for other in range(n_actions):
            if other == a:
                continue
            d = v_U_hat[:, type_index, a] - v_U_hat[:, type_index, other]
            # p.d >= 0 with p3 = 1 - p1 - p2
            poly = _clip_halfplane(poly, d[0] - d[2], d[1] - d[2], d[2])
            if len(poly) == 0:
                break
        cells[a] = poly if _polygon_area(poly) > GEOM_TOL else None
    return cells


@dataclass
class BeliefPartition:
    """Per-type best-response cells and their joint intersections.

    For two states, cells are closed intervals of the weight on state 0.
    For three states, cells are convex polygons in (p1, p2) coordinates.
    Empty cells are stored as None.
    """

    n_states: int
    type_cells: List[Dict[int, object]]
    joint_cells: Dict[Tuple[int, ...], object]

    def nonempty_joint(self) -> Dict[Tuple[int, ...], object]:
        return {k: v for k, v in self.joint_cells.items() if v is not None}


def belief_partition(game: BasicGame, mod: Modulator) -> BeliefPartition:
    """Exact best-response partition for games with two or three states."""
    _, v_U_hat = modulated_utilities(game, mod)
    if game.n_states == 2:
        type_cells = [_type_cells_1d(v_U_hat, m) for m in range(game.n_types)]
        combine = _interval_intersect
        nonempty = lambda c: c is not None
    elif game.n_states == 3:
        type_cells = [_type_cells_2d(v_U_hat, m) for m in range(game.n_types)]

        def combine(a, b):
            if a is None or b is None:
                return None
            poly = a
            # clip polygon a by the edges of polygon b
            nb = len(b)
            for i in range(nb):
                p, q = b[i], b[(i + 1) % nb]
                # interior is to the left of each CCW edge
                poly = _clip_halfplane(poly, p[1] - q[1], q[0] - p[0], p[0] * q[1] - p[1] * q[0])
                if len(poly) == 0:
                    return None
            return poly if _polygon_area(poly) > GEOM_TOL else None

        nonempty = lambda c: c is not None
    else:
        raise UnsupportedDimension(
            f"exact partition requires 2 or 3 states, got {game.n_states}; "
            "use sample_partition instead"
        )
    joint: Dict[Tuple[int, ...], object] = {}
    for combo in itertools.product(range(game.n_actions), repeat=game.n_types):
        cell = type_cells[0][combo[0]]
        for m in range(1, game.n_types):
            if cell is None:
                break
            cell = combine(cell, type_cells[m][combo[m]])
        joint[combo] = cell if (cell is not None and nonempty(cell)) else None
    return BeliefPartition(n_states=game.n_states, type_cells=type_cells, joint_cells=joint)


def chi_bound(n_actions: int, n_types: int, n_states: int) -> int:
    """Closed-form cap on the number of enforceable policies (regions of
    the best-response partition) for two- and three-state games."""
    pairs = n_types * n_actions * (n_actions - 1) // 2
    if n_states == 2:
        return pairs + 1
    if n_states == 3:
        return pairs * (pairs + 1) // 2
    raise UnsupportedDimension("closed form available only for 2 or 3 states")


def identifiable_region(
    game: BasicGame, mod: Modulator, l: int, h: int
):
    """Beliefs at which types l and h take different best responses.

    Returns a list of intervals (two states) or polygons (three states);
    the region may be disconnected.
    """
    if l == h:
        raise ValueError("types must differ")
    part = belief_partition(game, mod)
    regions = []
    for a_l in range(game.n_actions):
        for a_h in range(game.n_actions):
            if a_l == a_h:
                continue
            if game.n_states == 2:
                cell = _interval_intersect(part.type_cells[l][a_l], part.type_cells[h][a_h])
                if cell is not None and cell[1] - cell[0] > GEOM_TOL:
                    regions.append(cell)
            else:
                ca, cb = part.type_cells[l][a_l], part.type_cells[h][a_h]
                if ca is None or cb is None:
                    continue
                poly = ca
                nb = len(cb)
                for i in range(nb):
                    p, q = cb[i], cb[(i + 1) % nb]
                    poly = _clip_halfplane(
                        poly, p[1] - q[1], q[0] - p[0], p[0] * q[1] - p[1] * q[0]
                    )
                    if len(poly) == 0:
                        break
                if _polygon_area(poly) > GEOM_TOL:
                    regions.append(poly)
    if game.n_states == 2:
        return _merge_intervals(regions)
    return regions


def _merge_intervals(intervals: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    if not intervals:
        return []
    intervals = sorted(intervals)
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1] + GEOM_TOL:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def region_measure(region, n_states: int) -> float:
    if n_states == 2:
        return sum(hi - lo for lo, hi in region)
    return sum(_polygon_area(p) for p in region)


# ---------------------------------------------------------------------------
# Utility alignment


class Alignment(enum.Enum):
    COMPLETELY_ALIGNED = "CompletelyAligned"
    COMPLETELY_MISALIGNED = "CompletelyMisaligned"
    NEITHER = "Neither"


@dataclass
class AlignmentReport:
    rho_s: Optional[float]
    rho_t: Optional[np.ndarray]
    classification: Alignment
    residual: float


def classify_alignment(
    game: BasicGame, mod: Modulator, l: int, h: int, tol: float = VALUE_TOL
) -> AlignmentReport:
    """Fit type l's utility as a scaled and per-state translated copy of
    type h's; classify by the sign of the scale when the fit is exact."""
    _, v_U_hat = modulated_utilities(game, mod)
    n, k = game.n_states, game.n_actions
    ref = v_U_hat[:, h, :]
    target = v_U_hat[:, l, :]
    if float(np.max(ref.max(axis=1) - ref.min(axis=1))) <= tol:
        warnings.warn(
            "reference type's utility is constant per state; scaling factor "
            "unidentifiable, falling back to the identifiability test",
            DegenerateFitWarning,
            stacklevel=2,
        )
        return AlignmentReport(
            rho_s=None,
            rho_t=None,
            classification=_alignment_by_region(game, mod, l, h),
            residual=float("inf"),
        )
    # unknowns: rho_s, rho_t[0..n-1]; equations: target = rho_s * ref + rho_t(x)
    A = np.zeros((n * k, n + 1))
    y = np.zeros(n * k)
    for x in range(n):
        for a in range(k):
            row = x * k + a
            A[row, 0] = ref[x, a]
            A[row, 1 + x] = 1.0
            y[row] = target[x, a]
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.max(np.abs(A @ coef - y)))
    rho_s = float(coef[0])
    rho_t = coef[1:]
    if residual > tol:
        classification = Alignment.NEITHER
    elif rho_s >= 0:
        classification = Alignment.COMPLETELY_ALIGNED
    else:
        classification = Alignment.COMPLETELY_MISALIGNED
    return AlignmentReport(rho_s=rho_s, rho_t=rho_t, classification=classification, residual=residual)


def _alignment_by_region(game: BasicGame, mod: Modulator, l: int, h: int) -> Alignment:
    if game.n_states in (2, 3):
        region = identifiable_region(game, mod, l, h)
        measure = region_measure(region, game.n_states)
        total = 1.0 if game.n_states == 2 else 0.5
    else:
        res = sample_partition(game, mod, samples=4096, seed=0)
        differing = sum(
            c for label, c in res.label_counts.items() if label[l] != label[h]
        )
        measure, total = differing, sum(res.label_counts.values())
    if measure <= VALUE_TOL:
        return Alignment.COMPLETELY_ALIGNED
    if measure >= total - VALUE_TOL:
        return Alignment.COMPLETELY_MISALIGNED
    return Alignment.NEITHER


# ---------------------------------------------------------------------------
# Prior utility, concave closure, trust margin


def _scalar_beliefs(p: float) -> np.ndarray:
    return np.array([p, 1.0 - p])


def prior_utility_pwl(
    game: BasicGame, b_D: np.ndarray, mod: Modulator
) -> PWLFunction:
    """Defender's prior utility as a function of the weight on state 0,
    for two-state games under a common (overt) prior."""
    if game.n_states != 2:
        raise UnsupportedDimension("the scalar representation requires 2 states")
    b_D = np.atleast_2d(np.asarray(b_D, dtype=float))
    _, v_U_hat = modulated_utilities(game, mod)
    v_D_hat, _ = modulated_utilities(game, mod)

    cut_set = {0.0, 1.0}
    for m in range(game.n_types):
        for cell in _type_cells_1d(v_U_hat, m).values():
            if cell is None:
                continue
            for t in cell:
                if GEOM_TOL < t < 1.0 - GEOM_TOL:
                    cut_set.add(round(t, 15))
    breakpoints = np.array(sorted(cut_set))
    # collapse breakpoints closer than the geometric tolerance
    keep = [0]
    for i in range(1, len(breakpoints)):
        if breakpoints[i] - breakpoints[keep[-1]] > GEOM_TOL:
            keep.append(i)
    breakpoints = breakpoints[keep]
    breakpoints[0], breakpoints[-1] = 0.0, 1.0

    def overt_profile(p: float) -> BeliefProfile:
        return BeliefProfile.overt(_scalar_beliefs(p), b_D)

    slopes, intercepts = [], []
    for i in range(len(breakpoints) - 1):
        mid = 0.5 * (breakpoints[i] + breakpoints[i + 1])
        post = _scalar_beliefs(mid)
        coeff_hi = 0.0   # value at p = 1
        coeff_lo = 0.0   # value at p = 0
        for m in range(game.n_types):
            a = best_response(post, m, game, mod, b_D=b_D)
            coeff_hi += b_D[0, m] * v_D_hat[0, m, a]
            coeff_lo += b_D[1, m] * v_D_hat[1, m, a]
        slopes.append(coeff_hi - coeff_lo)
        intercepts.append(coeff_lo)
    knot_values = np.array(
        [prior_utility(game, overt_profile(float(t)), mod) for t in breakpoints]
    )
    return PWLFunction(
        breakpoints=breakpoints,
        slopes=np.array(slopes),
        intercepts=np.array(intercepts),
        knot_values=knot_values,
    )


def concave_closure(game: BasicGame, b_D: np.ndarray, mod: Modulator) -> PWLFunction:
    """Optimal posterior utility of the defender as a function of the
    common prior (two states): the concave closure of the prior utility."""
    return concavify(prior_utility_pwl(game, b_D, mod))


def trust_margin(
    game: BasicGame, beliefs: BeliefProfile, mod: Modulator, gen: Generator
) -> float:
    """Improvement of the generator over no information at these beliefs."""
    violations = check_ic(gen, game, beliefs, mod)
    if violations:
        v = violations[0]
        raise NotCredible(
            f"generator violates incentive compatibility (policy {v.policy_index}, "
            f"type {v.type_index}, deviation {v.deviation_action}, slack {v.slack:.3e})"
        )
    return expected_posterior_utility(game, beliefs, mod, gen) - prior_utility(
        game, beliefs, mod
    )


def max_trust_margin(game: BasicGame, beliefs: BeliefProfile, mod: Modulator) -> float:
    """Margin of the optimal generator: concave closure minus prior utility."""
    if game.n_states == 2 and beliefs.is_overt():
        p = float(beliefs.b[0])
        f = prior_utility_pwl(game, beliefs.b_D, mod)
        return concavify(f).value(p) - f.value(p)
    from . import lp as _lp  # local import to keep geometry usable standalone

    report = _lp.optimal_generator(game, beliefs, mod)
    return float(report.objective_value) - prior_utility(game, beliefs, mod)


class Manageability(enum.Enum):
    MANAGEABLE = "Manageable"
    UNMANAGEABLE = "Unmanageable"


def manageability(game: BasicGame, beliefs: BeliefProfile, mod: Modulator) -> Manageability:
    if max_trust_margin(game, beliefs, mod) > VALUE_TOL:
        return Manageability.MANAGEABLE
    return Manageability.UNMANAGEABLE


@dataclass
class ManipulationResult:
    belief: float          # maximizing weight on state 0
    value: float           # attained maximum of the prior utility
    sup_value: float       # supremum including one-sided limits
    attainment_gap: bool   # True when the supremum is not attained


def optimal_manipulation(
    game: BasicGame, b_D: np.ndarray, mod: Modulator
) -> ManipulationResult:
    """Global maximizer of the prior utility over the scalar belief.

    The maximum of a piecewise-linear function sits at a cell boundary;
    all breakpoints are evaluated at their attained values and both
    one-sided limits.  Ties break toward the smallest belief.
    """
    f = prior_utility_pwl(game, b_D, mod)
    best_p, best_v = 0.0, -np.inf
    sup = -np.inf
    for k, t in enumerate(f.breakpoints):
        sup = max(sup, f.upper_value(k))
        v = float(f.knot_values[k])
        if v > best_v + GEOM_TOL:
            best_p, best_v = float(t), v
    return ManipulationResult(
        belief=best_p,
        value=best_v,
        sup_value=float(sup),
        attainment_gap=bool(sup > best_v + VALUE_TOL),
    )


# ---------------------------------------------------------------------------
# Empirical partition for any dimension


@dataclass
class SamplePartitionResult:
    n_labels: int
    label_counts: Dict[Tuple[int, ...], int]


def sample_partition(
    game: BasicGame, mod: Modulator, samples: int = 10000, seed: int = 0
) -> SamplePartitionResult:
    """Seeded uniform sampling of the simplex labeled by the joint
    best-response profile; counts the distinct nonempty labels."""
    rng = np.random.default_rng(seed)
    points = rng.dirichlet(np.ones(game.n_states), size=samples)
    counts: Dict[Tuple[int, ...], int] = {}
    for p in points:
        label = tuple(
            best_response(p, m, game, mod) for m in range(game.n_types)
        )
        counts[label] = counts.get(label, 0) + 1
    return SamplePartitionResult(n_labels=len(counts), label_counts=counts)
