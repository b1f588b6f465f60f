import math

import numpy as np
import pytest

from pege import algorithms as alg
from pege.bounds import theorem1_bound
from pege.environments import RankingGame
from pege.simulator import (ConfigError, ExperimentConfig, RecoveryBoundViolation, RecoveryMonitor,
                            RegretCurve, aggregate, fit_scaling_exponent, geometric_schedule,
                            run_single)


def ranking_config(**kw):
    base = dict(env="ranking", n=3, algo="pege-t1", horizon=1000, seeds=[0], means=[0.9, 0.5, 0.1])
    base.update(kw)
    return ExperimentConfig(**base)


def fake_curve(values, rounds=None):
    values = np.asarray(values, dtype=float)
    rounds = np.arange(1, len(values) + 1) if rounds is None else np.asarray(rounds)
    return RegretCurve(rounds, values, 0, "x", {}, 1.0, ())


class TestRunSingle:
    @pytest.mark.parametrize("algo,h", [("pege-t1", None), ("pege-t2", 0.5), ("pege-t5", 0.5)])
    def test_point_mass_regret_only_in_exploration(self, algo, h):
        cfg = ranking_config(n=4, algo=algo, h=h, horizon=10**4, adversary="point",
                             means=[0.2, 0.9, 0.4, 0.6])
        curve = run_single(cfg, 0, keep_trace=True)
        assert curve.exploit_fraction_optimal == 1.0
        game = RankingGame(4)
        theta = np.array(cfg.means)
        best = game.expected_reward((1, 3, 2, 0), theta)
        explore_cost = sum(s.length * (best - game.expected_reward(s.action, theta))
                           for s in curve.trace.segments if s.tag == alg.EXPLORE)
        assert curve.final_regret == pytest.approx(explore_cost, rel=1e-12)
        assert curve.max_recovery_error <= 1e-12

    def test_zero_gap_gives_zero_regret(self):
        curve = run_single(ranking_config(means=[0.5, 0.5, 0.5]), 1)
        assert np.all(curve.cum_regret == 0.0)

    def test_curve_monotone_and_on_schedule(self):
        cfg = ranking_config(horizon=5000)
        curve = run_single(cfg, 7)
        assert list(curve.rounds) == geometric_schedule(5000)
        assert np.all(np.diff(curve.cum_regret) >= 0)

    def test_snapshot_matches_exact_recount(self):
        cfg = ranking_config(horizon=3000, snapshots=list(range(1, 3001)))
        curve = run_single(cfg, 4, keep_trace=True)
        theta = np.array(cfg.means)
        gains = 1 / np.log2(np.arange(2, 5))
        best = gains @ np.sort(theta)[::-1]
        regret, out = 0.0, []
        for _, x, _ in curve.trace.rounds():
            regret += best - gains @ theta[list(x)]
            out.append(regret)
        np.testing.assert_allclose(curve.cum_regret, out, atol=1e-9)

    def test_same_seed_same_curve(self):
        cfg = ranking_config(horizon=20_000, means=[0.55, 0.5, 0.45])
        a, b = run_single(cfg, 11), run_single(cfg, 11)
        assert np.array_equal(a.cum_regret, b.cum_regret)
        assert not np.array_equal(a.cum_regret, run_single(cfg, 12).cum_regret)

    def test_theorem1_envelope(self):
        cfg = ranking_config(horizon=10**5)
        curves = [run_single(cfg, s) for s in range(50)]
        rounds, mean, _ = aggregate(curves)
        c = curves[0]
        R = math.sqrt(sum((1 / math.log2(k + 1)) ** 2 for k in (1, 2, 3)))
        Rmax = sum(1 / math.log2(k + 1) for k in (1, 2, 3))
        ceiling = [theorem1_bound(t, R, c.beta_sigma, len(c.sigma), Rmax) for t in rounds]
        assert np.all(mean <= ceiling)

    def test_pege2_large_gap_h_in_range(self):
        cfg = ExperimentConfig(env="tabular", n=2, algo="pege2", horizon=10**5, seeds=[0],
                               reward_rows=[[1.0, 0.0], [0.0, 1.0]], means=[0.9, 0.1])
        gap, R, beta = 0.8, 1.0, math.sqrt(2)
        lo, hi = gap**2 / 36 / (R * beta) ** 2, gap**2 / 4 / (R * beta) ** 2
        hs = [run_single(cfg, s).h for s in range(200)]
        inside = [h is not None and lo <= h <= hi for h in hs]
        assert np.mean(inside) >= 0.95

    def test_score_ranking_runs(self):
        cfg = ExperimentConfig(env="score-ranking", n=3, algo="pege-t1", horizon=2000, seeds=[0],
                               means=[0.8, 0.2, 0.5])
        curve = run_single(cfg, 0)
        assert curve.gap is None
        assert curve.final_regret >= 0


class TestConfigValidation:
    def test_negative_horizon(self):
        with pytest.raises(ConfigError) as err:
            ranking_config(horizon=-5)
        assert err.value.field == "horizon"

    def test_t2_needs_h(self):
        with pytest.raises(ConfigError) as err:
            ranking_config(algo="pege-t2")
        assert err.value.field == "h"

    def test_means_length(self):
        with pytest.raises(ConfigError) as err:
            ranking_config(means=[0.5, 0.5])
        assert err.value.field == "means"

    def test_score_game_rejects_gap_estimation(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(env="score-ranking", n=2, algo="pege2", horizon=10, seeds=[0], means=[0.5, 0.5])

    def test_fingerprint_ignores_seeds(self):
        assert ranking_config(seeds=[1]).fingerprint() == ranking_config(seeds=[2, 3]).fingerprint()
        assert ranking_config().fingerprint() != ranking_config(horizon=999).fingerprint()


class TestRecoveryMonitor:
    def test_raises_beyond_beta(self):
        mon = RecoveryMonitor([0.5, 0.5], beta_sigma=1.0)
        mon(np.array([[0.5, 1.4]]))
        with pytest.raises(RecoveryBoundViolation):
            mon(np.array([[0.5, 1.6]]))

    def test_tracks_max(self):
        mon = RecoveryMonitor([0.0], beta_sigma=2.0)
        mon(np.array([[0.5], [-1.0]]))
        assert mon.max_error == 1.0 and mon.count == 2


class TestAggregate:
    def test_single(self):
        rounds, mean, se = aggregate([fake_curve([1, 2, 3])])
        np.testing.assert_array_equal(mean, [1, 2, 3])
        np.testing.assert_array_equal(se, 0)

    def test_identical(self):
        _, mean, se = aggregate([fake_curve([1, 4, 9])] * 4)
        np.testing.assert_array_equal(mean, [1, 4, 9])
        np.testing.assert_array_equal(se, 0)

    def test_stderr_by_hand(self, rng):
        data = rng.random((5, 10))
        _, mean, se = aggregate([fake_curve(row) for row in data])
        for j in range(10):
            col = data[:, j]
            m = sum(col) / 5
            s = math.sqrt(sum((v - m) ** 2 for v in col) / 4 / 5)
            assert mean[j] == pytest.approx(m, rel=1e-13)
            assert se[j] == pytest.approx(s, rel=1e-12)

    def test_mismatched_schedules(self):
        with pytest.raises(ValueError):
            aggregate([fake_curve([1, 2]), fake_curve([1, 2], rounds=[1, 3])])


class TestScalingExponent:
    def test_power_law(self):
        t = np.array(geometric_schedule(10**6), dtype=float)
        assert fit_scaling_exponent(t, t ** (2 / 3), 10**3) == pytest.approx(2 / 3, abs=1e-6)

    def test_log_curve(self):
        t = np.array(geometric_schedule(10**6), dtype=float)
        assert fit_scaling_exponent(t, np.log(t), 10**3) < 0.2

    def test_constant(self):
        t = np.array(geometric_schedule(10**5), dtype=float)
        assert fit_scaling_exponent(t, np.full_like(t, 3.0), 10) == pytest.approx(0.0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_scaling_exponent([1, 2, 3], [1, 2, 3], 1)


def test_geometric_schedule():
    s = geometric_schedule(100)
    assert s[0] == 1 and s[-1] == 100
    assert s == sorted(set(s))
    assert geometric_schedule(1) == [1]
