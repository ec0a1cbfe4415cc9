"""Acceptance criteria for the solver and the insider case study.

Each test prints one pass/fail line (to the real stdout, so the report
survives pytest's capture).  The headline-average reproduction target is a
soft criterion: its grids are not pinned down, so it is marked xfail and
both computed interpretations are always recorded.
"""

import itertools
import sys
import time

import numpy as np
import pytest

import decmech as dm
from conftest import random_game

T_G = 10.0 / 13.0
T_B = 9.0 / 19.0


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:02d} [{name}]: {status} {detail}".rstrip(), file=sys.__stdout__)


def state_uniform_b_D(rng, n_types):
    row = rng.dirichlet(np.ones(n_types))
    return np.tile(row, (2, 1))


@pytest.fixture(scope="module")
def lp_vs_closure():
    """Shared corpus for criteria 2 and 3: 200 random two-state games
    solved at 11 equispaced priors, with the concave-closure oracle value
    and the capacity bounds of every solve."""
    rng = np.random.default_rng(2024)
    records = []
    t0 = time.perf_counter()
    for _ in range(200):
        game = random_game(rng)
        b_D = rng.dirichlet(np.ones(game.n_types), size=2)
        mod = dm.Modulator.zero(game.n_actions)
        env = dm.concave_closure(game, b_D, mod)
        for p in np.linspace(0.0, 1.0, 11):
            beliefs = dm.BeliefProfile.overt(np.array([p, 1.0 - p]), b_D)
            rep = dm.optimal_generator(game, beliefs, mod)
            records.append(
                (rep.objective_value, env.value(float(p)), rep.bounds[0], rep.bounds[1])
            )
    return records, time.perf_counter() - t0


def test_criterion_01_threshold_closed_forms():
    dm.decision_thresholds()  # warm up
    t0 = time.perf_counter()
    t_g, t_b = dm.decision_thresholds(phi0=0.0)
    motive = dm.motive_threshold()
    deterrence = dm.deterrence_threshold()
    elapsed = time.perf_counter() - t0
    ok = (
        abs(t_g - 10.0 / 13.0) <= 1e-12
        and abs(t_b - 9.0 / 19.0) <= 1e-12
        and abs(motive - 0.59375) <= 1e-12
        and abs(deterrence - 9.0 / 19.0) <= 1e-12
        and elapsed < 1e-3
    )
    report(1, "threshold closed forms", ok, f"({elapsed * 1e6:.0f} us)")
    assert ok


def test_criterion_02_concavification_lp_equivalence(lp_vs_closure):
    records, elapsed = lp_vs_closure
    worst = max(abs(lp - oracle) for lp, oracle, _, _ in records)
    ok = worst <= 1e-6 and elapsed < 30.0
    report(
        2,
        "concavification-LP equivalence",
        ok,
        f"(max gap {worst:.2e} over {len(records)} solves, {elapsed:.1f}s)",
    )
    assert ok


def test_criterion_03_bound_containment(lp_vs_closure, benchmark):
    records, _ = lp_vs_closure
    contained = all(lo - 1e-6 <= lp <= hi + 1e-6 for lp, _, lo, hi in records)
    game, beliefs, mod = benchmark
    lo, hi = dm.design_capacity_bounds(game, beliefs.b_D, mod)
    bench_ok = abs(lo + 0.612) <= 1e-9 and abs(hi - 0.68) <= 1e-9
    ok = contained and bench_ok
    report(3, "value bound containment", ok, f"(benchmark bounds ({lo:.3f}, {hi:.3f}))")
    assert ok


def test_criterion_04_alignment_dichotomy():
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 1.0, 11)
    checked_positive_margin = 0
    ok = True
    for _ in range(100):
        m = int(rng.integers(1, 4))
        k = int(rng.integers(2, 4))
        v_U = rng.normal(size=(2, m, k))
        rho_s = float(rng.uniform(0.2, 2.0)) * (1 if rng.random() < 0.5 else -1)
        rho_t = rng.normal(size=2)
        v_D = rho_s * v_U + rho_t[:, None, None]
        game = dm.BasicGame(
            states=("x0", "x1"),
            types=tuple(f"t{i}" for i in range(m)),
            actions=tuple(["DO"] + [f"a{i}" for i in range(1, k)]),
            utility_D=v_D,
            utility_U=v_U,
        )
        b_D = state_uniform_b_D(rng, m)
        mod = dm.Modulator.zero(k)
        f = dm.prior_utility_pwl(game, b_D, mod)
        env = dm.concavify(f)
        if rho_s <= 0:
            # misaligned: no credible generator can help at any prior
            ok &= all(env.value(float(p)) - f.value(float(p)) <= 1e-9 for p in grid)
        else:
            # aligned: full information is optimal
            space = dm.enumerate_policies(m, k)
            pi = np.zeros((2, len(space)))
            for x in range(2):
                post = np.zeros(2)
                post[x] = 1.0
                assignment = tuple(
                    dm.best_response(post, l, game, mod, b_D=b_D) for l in range(m)
                )
                pi[x, space.index_of(assignment)] = 1.0
            gen = dm.Generator(policy_space=space, pi=pi)
            for p in (0.25, 0.5, 0.75):
                beliefs = dm.BeliefProfile.overt(np.array([p, 1.0 - p]), b_D)
                full_info = dm.expected_posterior_utility(game, beliefs, mod, gen)
                ok &= abs(full_info - env.value(p)) <= 1e-9
            # a type without a dominant action makes information valuable
            kinked = any(
                dm.best_response(np.array([1.0, 0.0]), l, game, mod, b_D=b_D)
                != dm.best_response(np.array([0.0, 1.0]), l, game, mod, b_D=b_D)
                for l in range(m)
            )
            slope_jump = float(np.max(np.abs(np.diff(f.slopes)))) if f.n_segments > 1 else 0.0
            if kinked and slope_jump > 1e-6:
                checked_positive_margin += 1
                ok &= all(
                    env.value(float(p)) - f.value(float(p)) > 1e-9
                    for p in grid[1:-1]
                )
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60.0 and checked_positive_margin > 10
    report(
        4,
        "alignment dichotomy",
        ok,
        f"({checked_positive_margin} kinked aligned games, {elapsed:.1f}s)",
    )
    assert ok


def test_criterion_05_equivalence_and_separation():
    rng = np.random.default_rng(505)
    ok = True
    worst = 0.0
    for _ in range(100):
        game = random_game(rng)
        b_D = rng.dirichlet(np.ones(game.n_types), size=2)
        rep = dm.verify_equivalence(game, b_D, dm.Modulator.zero(game.n_actions))
        worst = max(worst, abs(rep.gap))
        ok &= abs(rep.gap) <= 1e-9
        grid = [np.linspace(-0.5, 0.5, 3).tolist()] * (game.n_actions - 1)
        _, value, _ = dm.design_modulator(game, b_D, grid)
        design = dm.design_gmm(game, b_D, grid)
        ok &= design.value == value
    report(5, "equivalence and separation", ok, f"(max manipulation gap {worst:.2e})")
    assert ok


def test_criterion_06_flat_region():
    t0 = time.perf_counter()
    table = dm.figure_data("fig5b", grid=101)
    flat_ok = True
    outside_max = 0.0
    for q, p, margin in table.rows:
        if q <= 0.59375 and p <= T_B:
            flat_ok &= margin <= 1e-9
        else:
            outside_max = max(outside_max, margin)
    elapsed = time.perf_counter() - t0
    ok = flat_ok and outside_max > 1e-6 and elapsed < 120.0
    report(
        6,
        "flat-region reproduction",
        ok,
        f"(outside max margin {outside_max:.3f}, {elapsed:.1f}s)",
    )
    assert ok


def test_criterion_07_near_threshold_ratio():
    params = dm.InsiderParams(q_g=1.0, q_b=0.0)
    game, beliefs, mod = dm.insider_game(params)
    f = dm.prior_utility_pwl(game, beliefs.b_D, mod)
    env = dm.concavify(f)
    best = 0.0
    for p in np.arange(0.0, 1.0 + 1e-9, 1e-3):
        if 0.7677 <= p < T_G and f.value(float(p)) > 1e-12:
            best = max(best, env.value(float(p)) / f.value(float(p)))
    ok = best >= 114.0
    report(7, "near-threshold ratio", ok, f"(best ratio {best:.1f}x)")
    assert ok


@pytest.fixture(scope="module")
def headline():
    return dm.headline_stats(grid=101)


def test_criterion_08_headline_hard(headline):
    s = headline
    positive = (
        s.avg_gain_fig5_ratio_of_means > 0.0
        and s.avg_gain_fig5_mean_of_ratios > 0.0
        and s.avg_gain_fig8_ratio_of_means > 0.0
        and s.avg_gain_fig8_mean_of_ratios > 0.0
    )
    # covert value peaks at 0.32 when there are no honeypots and the
    # insiders' reported belief lies between the two access thresholds
    game, beliefs, mod = dm.insider_game()
    slice_ok = True
    truth = np.array([0.0, 1.0])
    for p_U in np.linspace(T_B + 0.01, T_G - 0.01, 7):
        rep = dm.covert_design(
            game, truth, np.array([p_U, 1.0 - p_U]), beliefs.b_D, mod
        )
        slice_ok &= abs(rep.objective_value - 0.32) <= 1e-9
    ok = positive and slice_ok
    report(
        8,
        "headline averages (hard part)",
        ok,
        f"(fig5 {s.avg_gain_fig5_ratio_of_means:+.3f}/{s.avg_gain_fig5_mean_of_ratios:+.3f}, "
        f"fig8 {s.avg_gain_fig8_ratio_of_means:+.3f}/{s.avg_gain_fig8_mean_of_ratios:+.3f})",
    )
    assert ok


@pytest.mark.xfail(
    strict=False,
    reason="soft reproduction target: the reference grids are unstated; "
    "both interpretations are recorded either way",
)
def test_criterion_08_headline_reproduction(headline):
    s = headline
    fig5_ok = (
        abs(s.avg_gain_fig5_ratio_of_means - 0.356) <= 0.05
        or abs(s.avg_gain_fig5_mean_of_ratios - 0.356) <= 0.05
    )
    fig8_ok = (
        abs(s.avg_gain_fig8_ratio_of_means - 0.593) <= 0.05
        or abs(s.avg_gain_fig8_mean_of_ratios - 0.593) <= 0.05
    )
    report(
        8,
        "headline averages (reproduction tag)",
        fig5_ok and fig8_ok,
        f"(fig5 ratio-of-means {s.avg_gain_fig5_ratio_of_means:.4f} "
        f"mean-of-ratios {s.avg_gain_fig5_mean_of_ratios:.4f} vs 0.356; "
        f"fig8 ratio-of-means {s.avg_gain_fig8_ratio_of_means:.4f} "
        f"mean-of-ratios {s.avg_gain_fig8_mean_of_ratios:.4f} vs 0.593)",
    )
    assert fig5_ok and fig8_ok


def test_criterion_09_unenforceable_policy():
    space = dm.enumerate_policies(2, 2)
    forbidden = space.index_of((0, 1))   # selfish drop-out, adversarial access
    ok = True
    worst_prob = 0.0
    for i, phi0 in enumerate(np.linspace(-1.0, 1.0, 1000)):
        game, beliefs, mod = dm.insider_game(dm.InsiderParams(phi0=float(phi0)))
        part = dm.belief_partition(game, mod)
        ok &= part.joint_cells[(0, 1)] is None
        bel = dm.BeliefProfile.overt(np.array([0.6, 0.4]), beliefs.b_D)
        rep = dm.optimal_generator(game, bel, mod)
        prob = float(rep.generator.pi[:, forbidden].max())
        worst_prob = max(worst_prob, prob)
        ok &= prob <= 1e-9
    report(9, "unenforceable policy", ok, f"(max assigned prob {worst_prob:.1e})")
    assert ok


def test_criterion_10_expected_posterior_beliefs():
    rng = np.random.default_rng(1010)
    ok = True
    for trial in range(100):
        m = int(rng.integers(1, 3))
        k = int(rng.integers(2, 4))
        space = dm.enumerate_policies(m, k)
        equal = trial % 2 == 0
        b = rng.dirichlet(np.ones(2))
        if equal:
            b_U = np.tile(b, (m, 1))
            pi = rng.dirichlet(np.ones(len(space)), size=2)
        else:
            # clearly distinct beliefs and a clearly informative generator
            b = np.array([0.2, 0.8])
            b_U = np.tile([0.7, 0.3], (m, 1))
            pi = np.zeros((2, len(space)))
            pi[0, 0] = pi[1, 1] = 0.9
            pi[0, 1] = pi[1, 0] = 0.1
        gen = dm.Generator(policy_space=space, pi=pi)
        beliefs = dm.BeliefProfile(b=b, b_U=b_U, b_D=np.full((2, m), 1.0 / m))
        for l in range(m):
            expected, plausible = dm.expected_posterior_belief(beliefs, gen, l)
            ok &= abs(float(expected.sum()) - 1.0) <= 1e-9
            ok &= bool(np.all(expected >= -1e-9))
            ok &= plausible == equal
    report(10, "expected posterior beliefs", ok)
    assert ok


def _brute_force_value(game, beliefs, mod, gen):
    """Independent enumeration oracle for the generator's realized value."""
    v_D_hat, v_U_hat = dm.modulated_utilities(game, mod)
    total = 0.0
    for s in range(gen.n_signals):
        p_s = float(np.dot(beliefs.b, gen.pi[:, s]))
        if p_s <= 1e-9:
            continue
        joint = beliefs.b * gen.pi[:, s]
        post = joint / joint.sum()
        for l in range(game.n_types):
            a = int(np.argmax(post @ v_U_hat[:, l, :]))
            total += float(np.dot(joint, beliefs.b_D[:, l] * v_D_hat[:, l, a]))
    return total


def test_criterion_11_brute_force_equivalence():
    rng = np.random.default_rng(1111)
    ok = True
    for n in (1, 2):
        for m in (1, 2):
            for _ in range(3):
                game = random_game(rng, n_states=n, n_types=m, n_actions=2)
                b = rng.dirichlet(np.ones(n))
                b_D = rng.dirichlet(np.ones(m), size=n)
                beliefs = dm.BeliefProfile.overt(b, b_D)
                mod = dm.Modulator.zero(2)
                space = dm.enumerate_policies(m, 2)
                n_s = len(space)
                row_choices = [
                    np.array(c) / 4.0
                    for c in itertools.product(range(5), repeat=n_s)
                    if sum(c) == 4
                ]
                rep = dm.optimal_generator(game, beliefs, mod)
                for rows in itertools.product(row_choices, repeat=n):
                    gen = dm.Generator(policy_space=space, pi=np.vstack(rows))
                    value = dm.expected_posterior_utility(game, beliefs, mod, gen)
                    ok &= abs(value - _brute_force_value(game, beliefs, mod, gen)) <= 1e-12
                    if not dm.check_ic(gen, game, beliefs, mod):
                        ok &= rep.objective_value >= value - 1e-9
    report(11, "brute-force equivalence", ok)
    assert ok
