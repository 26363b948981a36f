import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from restartbandits.arms import (
    ArmSpec,
    BernoulliReward,
    ConfigError,
    ConstantReset,
    ConstantReward,
    Deterministic,
    Empirical,
    Exponential,
    InfiniteMeanError,
    Pareto,
    PowerCoupledReward,
    ProportionalReset,
    Uniform,
    ZeroReset,
    arm_from_dict,
    censor,
    empirical_from_samples,
    recensor,
    reward_mean,
    sample_arm,
    sample_censored_block,
    truncated_reward_mean,
    truncated_time_mean,
)

RNG = lambda s=0: np.random.default_rng(s)


class TestDistributions:
    def test_deterministic(self):
        d = Deterministic(2.0)
        assert d.quantile(0.3) == 2.0
        assert d.truncated_mean(1.0) == 1.0
        assert d.truncated_mean(math.inf) == 2.0
        assert d.cdf(1.9) == 0.0 and d.cdf(2.0) == 1.0

    def test_uniform_truncated_mean_matches_monte_carlo(self):
        d = Uniform(0.5, 2.5)
        x = d.quantile(RNG(1).random(200000))
        for t in (0.3, 1.0, 2.0, 3.0, math.inf):
            mc = np.minimum(x, t).mean()
            assert d.truncated_mean(t) == pytest.approx(mc, abs=2e-3)

    def test_exponential_truncated_mean(self):
        d = Exponential(2.0)
        # E[X ^ t] = (1 - exp(-rate t)) / rate
        assert d.truncated_mean(1.0) == pytest.approx((1 - math.exp(-2.0)) / 2.0)
        assert d.truncated_mean(math.inf) == pytest.approx(0.5)

    def test_pareto_closed_form(self):
        d = Pareto(1.0, 1.5)
        t = 4.0
        s, a = 1.0, 1.5
        expect = s + s**a * (s ** (1 - a) - t ** (1 - a)) / (a - 1)
        assert d.truncated_mean(t) == pytest.approx(expect)
        assert d.mean() == pytest.approx(3.0)

    def test_pareto_infinite_mean_flagged(self):
        d = Pareto(1.0, 0.9)
        assert d.infinite_mean
        assert d.mean() == math.inf
        with pytest.raises(InfiniteMeanError):
            d.truncated_mean(math.inf)
        # finite cutoffs remain usable
        assert d.truncated_mean(10.0) > 0

    def test_pareto_shape_one_log_branch(self):
        d = Pareto(2.0, 1.0)
        assert d.truncated_mean(2.0 * math.e) == pytest.approx(2.0 * 2.0)

    def test_empirical_inverse_transform(self):
        d = Empirical((1.0, 2.0, 5.0))
        # ceil(q*n)-th order statistic
        assert d.quantile(0.0) == 1.0
        assert d.quantile(0.33) == 1.0
        assert d.quantile(0.34) == 2.0
        assert d.quantile(0.67) == 5.0
        assert d.quantile(1.0) == 5.0

    def test_empirical_validation(self):
        with pytest.raises(ValueError):
            Empirical(())
        with pytest.raises(ValueError):
            Empirical((2.0, 1.0))
        with pytest.raises(ValueError):
            Empirical((0.0, 1.0))
        assert empirical_from_samples([3.0, 1.0]).samples == (1.0, 3.0)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            Uniform(2.0, 1.0)
        with pytest.raises(ValueError):
            Exponential(0.0)
        with pytest.raises(ValueError):
            Pareto(-1.0, 2.0)
        with pytest.raises(ValueError):
            Deterministic(0.0)


class TestRewards:
    def test_constant_and_bernoulli_bounds(self):
        with pytest.raises(ValueError):
            ConstantReward(1.5)
        with pytest.raises(ValueError):
            BernoulliReward(-0.1)

    def test_power_coupled_cap(self):
        r = PowerCoupledReward(2.0, 1.0)
        assert r.sample(3.0, RNG()) == 1.0
        assert r.sample(0.25, RNG()) == 0.5

    def test_samples_lie_in_unit_interval(self):
        arm = ArmSpec(Pareto(1.0, 1.2), PowerCoupledReward(0.7, 1.5), ZeroReset())
        rng = RNG(4)
        for _ in range(200):
            x, r = sample_arm(arm, rng)
            assert x > 0 and 0.0 <= r <= 1.0


class TestResets:
    def test_clamp_to_cutoff(self):
        assert ConstantReset(5.0).cost(2.0) == 2.0
        assert ConstantReset(1.0).cost(2.0) == 1.0
        assert ProportionalReset(0.25).cost(2.0) == 0.5
        assert ZeroReset().cost(7.0) == 0.0

    def test_infinite_cutoff_costs_nothing(self):
        for reset in (ZeroReset(), ConstantReset(1.0), ProportionalReset(0.5)):
            assert reset.cost(math.inf) == 0.0


class TestCensoring:
    def test_completed(self):
        obs = censor(1.5, 0.8, 2.0, ConstantReset(0.4))
        assert obs.completed and obs.u == 1.5 and obs.v == 0.8
        assert obs.raw_elapsed == 1.5

    def test_censored(self):
        obs = censor(3.0, 0.8, 2.0, ConstantReset(0.4))
        assert not obs.completed
        assert obs.u == 2.4 and obs.v == 0.0 and obs.raw_elapsed == 2.0

    def test_infinite_cutoff_always_completes(self):
        obs = censor(1e9, 1.0, math.inf, ProportionalReset(0.5))
        assert obs.completed and obs.u == 1e9 and obs.v == 1.0

    def test_recensor_rejects_larger_cutoff(self):
        obs = censor(1.0, 0.5, 2.0, ZeroReset())
        with pytest.raises(ValueError):
            recensor(obs, 3.0, ZeroReset())

    @given(
        x=st.floats(0.01, 20.0),
        t=st.floats(0.02, 10.0),
        frac=st.floats(0.0, 1.0),
        ratio=st.floats(0.01, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_recensor_equals_direct_censor(self, x, t, frac, ratio):
        # recensoring at t' <= t must reproduce censoring at t' exactly
        t_small = t * ratio
        for reset in (ZeroReset(), ConstantReset(frac), ProportionalReset(min(frac, 1.0))):
            obs = censor(x, 0.7, t, reset)
            direct = censor(x, 0.7, t_small, reset)
            again = recensor(obs, t_small, reset)
            assert again == direct


class TestTruncatedMoments:
    def test_time_mean_includes_reset(self):
        arm = ArmSpec(Exponential(1.0), ConstantReward(1.0), ConstantReset(0.5))
        t = 1.0
        sf = math.exp(-1.0)
        expect = (1 - sf) + 0.5 * sf  # E[X ^ t] + C(t) P(X > t)
        assert truncated_time_mean(arm.completion, arm.reset, t) == pytest.approx(expect)

    def test_reward_mean_bernoulli(self):
        arm = ArmSpec(Exponential(1.0), BernoulliReward(0.6), ZeroReset())
        # E[V(t)] = p * P(X <= t)
        assert truncated_reward_mean(arm, 2.0) == pytest.approx(0.6 * (1 - math.exp(-2.0)))
        assert reward_mean(arm) == pytest.approx(0.6)

    def test_power_coupled_quadrature_against_monte_carlo(self):
        arm = ArmSpec(Pareto(1.0, 1.2), PowerCoupledReward(0.5, 0.5), ZeroReset())
        t = 5.0
        x = Pareto(1.0, 1.2).quantile(RNG(7).random(400000))
        mc = float(np.where(x <= t, np.minimum(0.5 * x**0.5, 1.0), 0.0).mean())
        assert truncated_reward_mean(arm, t) == pytest.approx(mc, abs=2e-3)

    def test_block_sampler_matches_moments(self):
        arm = ArmSpec(Uniform(0.5, 1.5), BernoulliReward(0.5), ConstantReset(0.2))
        u, v = sample_censored_block(arm, 1.0, 200000, RNG(3))
        assert u.mean() == pytest.approx(truncated_time_mean(arm.completion, arm.reset, 1.0), abs=3e-3)
        assert v.mean() == pytest.approx(truncated_reward_mean(arm, 1.0), abs=3e-3)


class TestConfigSchema:
    def test_round_trip(self):
        arm = arm_from_dict(
            {
                "label": "a",
                "completion": {"kind": "pareto", "scale": 1.0, "shape": 1.5},
                "reward": {"kind": "power", "omega": 0.5, "gamma": 1.0},
                "reset": {"kind": "proportional", "fraction": 0.1},
            }
        )
        assert isinstance(arm.completion, Pareto)
        assert isinstance(arm.reward, PowerCoupledReward)
        assert isinstance(arm.reset, ProportionalReset)

    def test_unknown_key_reports_path(self):
        with pytest.raises(ConfigError, match=r"arm\.completion"):
            arm_from_dict(
                {"completion": {"kind": "pareto", "scale": 1.0, "shape": 2.0, "bogus": 1},
                 "reward": {"kind": "constant", "value": 1.0}}
            )

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="kind"):
            arm_from_dict(
                {"completion": {"kind": "gamma", "shape": 2.0},
                 "reward": {"kind": "constant", "value": 1.0}}
            )

    def test_default_reset_is_zero(self):
        arm = arm_from_dict(
            {"completion": {"kind": "exponential", "rate": 1.0},
             "reward": {"kind": "constant", "value": 1.0}}
        )
        assert isinstance(arm.reset, ZeroReset)
