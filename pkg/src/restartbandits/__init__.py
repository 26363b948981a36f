"""Time-constrained bandit learning with controlled restarts."""

__version__ = "0.1.0"

from .arms import (
    ArmSpec,
    BernoulliReward,
    CensoredObservation,
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
    recensor,
    reward_mean,
    sample_arm,
    truncated_reward_mean,
    truncated_time_mean,
)
from .analysis import (
    RateCurve,
    RestartVerdict,
    StaticDecision,
    opt_reference,
    optimal_static_decision,
    rate_sweep,
    restart_condition,
    reward_rate,
)
from .estimators import (
    CoverageReport,
    RadiusParams,
    SampleSet,
    UcbIndex,
    bernstein_radii,
    beta_from_kappa,
    kappa_of_beta,
    median_of_means,
    mom_radii,
    rate_deviation_bound_check,
    rate_ucb,
)
from .policies import (
    Decision,
    DecisionGrid,
    FixedPolicy,
    LubyPolicy,
    Policy,
    StaticOraclePolicy,
    UcbRbPolicy,
    UcbRmPolicy,
    luby_value,
    ucb_rc_build,
)

__all__ = [name for name in dir() if not name.startswith("_")]
