import dataclasses

import numpy as np
import pytest

import decmech as dm
from decmech.insider import FIGURES

T_G = 10.0 / 13.0
T_B = 9.0 / 19.0


class TestParams:
    def test_benchmark_defaults(self):
        p = dm.InsiderParams()
        assert p.q_g == 0.32 and p.q_b == 0.68
        assert p.phi_H_D == 1.0 and p.phi_N_D == -0.9

    def test_sign_constraints(self):
        with pytest.raises(dm.InvalidParams, match="phi_g_U"):
            dm.InsiderParams(phi_g_U=0.3)
        with pytest.raises(dm.InvalidParams, match="phi_H_D"):
            dm.InsiderParams(phi_H_D=-1.0)
        with pytest.raises(dm.InvalidParams, match="q_g"):
            dm.InsiderParams(q_g=1.2, q_b=-0.2)
        with pytest.raises(dm.InvalidParams, match="equal 1"):
            dm.InsiderParams(q_g=0.4, q_b=0.4)


class TestGameConstruction:
    def test_tables(self, benchmark):
        game, beliefs, mod = benchmark
        assert game.actions == ("DO", "AC")
        # drop-out pays zero for everyone
        assert np.all(game.utility_U[:, :, 0] == 0.0)
        assert np.all(game.utility_D[:, :, 0] == 0.0)
        # selfish access: same payoff for both players
        np.testing.assert_array_equal(game.utility_U[:, 0, 1], game.utility_D[:, 0, 1])
        # adversarial access: zero-sum
        np.testing.assert_array_equal(game.utility_U[:, 1, 1], -game.utility_D[:, 1, 1])
        assert np.all(mod.c == 0.0)

    def test_authentication_cost_transfer(self):
        _, _, mod = dm.insider_game(dm.InsiderParams(phi0=0.4))
        np.testing.assert_allclose(mod.c, [0.0, 0.4], atol=1e-15)


class TestThresholds:
    def test_closed_forms(self):
        t_g, t_b = dm.decision_thresholds()
        assert t_g == pytest.approx(T_G, abs=1e-12)
        assert t_b == pytest.approx(T_B, abs=1e-12)

    def test_match_partition(self, benchmark):
        game, _, mod = benchmark
        part = dm.belief_partition(game, mod)
        cells = part.nonempty_joint()
        t_g, t_b = dm.decision_thresholds()
        assert cells[(1, 0)][0] == pytest.approx(t_b, abs=1e-9)
        assert cells[(1, 0)][1] == pytest.approx(t_g, abs=1e-9)

    def test_clamping(self):
        t_g, t_b = dm.decision_thresholds(phi0=1.5)
        assert t_g == 0.0
        t_g, t_b = dm.decision_thresholds(phi0=-2.0)
        assert t_g == 1.0 and t_b == 1.0

    def test_transfer_shifts_thresholds(self, benchmark):
        # raising the access cost must lower both access thresholds
        t_g0, t_b0 = dm.decision_thresholds(phi0=0.0)
        t_g1, t_b1 = dm.decision_thresholds(phi0=0.5)
        assert t_g1 < t_g0 and t_b1 < t_b0

    def test_motive_threshold(self):
        assert dm.motive_threshold() == pytest.approx(0.59375, abs=1e-12)

    def test_motive_degenerate_guard(self):
        # unreachable under the sign constraints, so exercise the guard
        # with a duck-typed parameter object
        from types import SimpleNamespace

        fake = SimpleNamespace(phi_g_D=1.0, phi_H_D=1.0, phi_N_D=1.0)
        with pytest.raises(dm.DegenerateDenominator):
            dm.motive_threshold(fake)

    def test_deterrence_threshold(self):
        assert dm.deterrence_threshold() == pytest.approx(T_B, abs=1e-12)


class TestFigureData:
    def test_unknown_figure(self):
        with pytest.raises(dm.UnknownFigure):
            dm.figure_data("fig9")

    def test_schemas(self):
        expected = {
            "fig5a": ("q_g", "p_D", "v_prior"),
            "fig5b": ("q_g", "p_D", "max_trust_margin"),
            "fig6": ("phi0", "t_g", "t_b", "diff"),
            "fig7a": ("phi0", "v_D", "v_selfish", "v_adversarial"),
            "fig7b": ("phi0", "v_D", "v_selfish", "v_adversarial"),
            "fig8a": ("p_D", "p_U", "v_prior"),
            "fig8b": ("p_D", "p_U", "v_opt"),
        }
        assert set(FIGURES) == set(expected)
        for fig in ("fig5a", "fig6", "fig7a", "fig8a"):
            table = dm.figure_data(fig, grid=5)
            assert table.columns == expected[fig]

    def test_fig6_matches_closed_form(self):
        table = dm.figure_data("fig6", grid=9)
        for phi0, t_g, t_b, diff in table.rows:
            tg, tb = dm.decision_thresholds(phi0=phi0)
            assert t_g == pytest.approx(tg, abs=1e-12)
            assert t_b == pytest.approx(tb, abs=1e-12)
            assert diff == pytest.approx(tg - tb, abs=1e-12)

    def test_fig5_flat_region_sample(self):
        table = dm.figure_data("fig5b", grid=9)
        for q, p, margin in table.rows:
            if q <= 0.59375 and p <= T_B:
                assert margin <= 1e-9
        assert max(m for _, _, m in table.rows) > 1e-6

    def test_fig7b_dominates_fig7a_for_defender(self):
        a = dm.figure_data("fig7a", grid=21)
        b = dm.figure_data("fig7b", grid=21)
        for ra, rb in zip(a.rows, b.rows):
            assert rb[1] >= ra[1] - 1e-9   # posterior value majorizes prior value

    def test_fig8a_zero_rows_above_selfish_threshold(self):
        table = dm.figure_data("fig8a", grid=21)
        for p_D, p_U, v in table.rows:
            if p_U >= T_G:
                assert abs(v) <= 1e-12

    def test_fig8b_dominates_fig8a(self):
        a = dm.figure_data("fig8a", grid=6)
        b = dm.figure_data("fig8b", grid=6)
        for ra, rb in zip(a.rows, b.rows):
            assert rb[2] >= ra[2] - 1e-7


class TestHeadlineStats:
    def test_small_grid_stats(self):
        stats = dm.headline_stats(grid=21)
        assert stats.near_threshold_ratio >= 114.0
        assert stats.avg_gain_fig5_ratio_of_means > 0.0
        assert stats.avg_gain_fig8_ratio_of_means > 0.0
        assert stats.fig5_excluded_points > 0
