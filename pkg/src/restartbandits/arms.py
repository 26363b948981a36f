"""Arm generative models: completion times, coupled rewards, reset costs, censoring.

An arm produces i.i.d. (completion time, reward) pairs. A trial interrupted at
cutoff t yields the right-censored feedback (u, v): the elapsed time plus the
reset cost when the trial did not complete, and the reward only on completion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate

INF = math.inf


class ConfigError(ValueError):
    """Schema violation in a key-value experiment config; message carries the
    offending key path."""


class InfiniteMeanError(ValueError):
    """Raised when an operation needs a finite completion-time mean."""


class QuadratureError(RuntimeError):
    """Raised when numerical integration fails to reach tolerance."""


_QUAD_ABS_TOL = 1e-9


# ---------------------------------------------------------------------------
# Completion-time distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Deterministic:
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("Deterministic value must be > 0")

    @property
    def infinite_mean(self) -> bool:
        return False

    def mean(self) -> float:
        return self.value

    def cdf(self, x: float) -> float:
        return 1.0 if x >= self.value else 0.0

    def quantile(self, q: float) -> float:
        return self.value

    def truncated_mean(self, t: float) -> float:
        if math.isinf(t):
            return self.value
        return min(self.value, t)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ValueError("Uniform requires 0 <= lo < hi")

    @property
    def infinite_mean(self) -> bool:
        return False

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def cdf(self, x: float) -> float:
        if x <= self.lo:
            return 0.0
        if x >= self.hi:
            return 1.0
        return (x - self.lo) / (self.hi - self.lo)

    def pdf(self, x: float) -> float:
        if self.lo <= x <= self.hi:
            return 1.0 / (self.hi - self.lo)
        return 0.0

    def quantile(self, q: float) -> float:
        return self.lo + q * (self.hi - self.lo)

    def truncated_mean(self, t: float) -> float:
        # E[X ^ t] = int_0^t P(X > x) dx
        if t >= self.hi or math.isinf(t):
            return self.mean()
        if t <= self.lo:
            return t
        w = self.hi - self.lo
        return t - 0.5 * (t - self.lo) ** 2 / w

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("Exponential rate must be > 0")

    @property
    def infinite_mean(self) -> bool:
        return False

    def mean(self) -> float:
        return 1.0 / self.rate

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return -math.expm1(-self.rate * x)

    def pdf(self, x: float) -> float:
        if x < 0:
            return 0.0
        return self.rate * math.exp(-self.rate * x)

    def quantile(self, q: float) -> float:
        return -math.log1p(-q) / self.rate

    def truncated_mean(self, t: float) -> float:
        if math.isinf(t):
            return self.mean()
        return -math.expm1(-self.rate * t) / self.rate

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, INF)


@dataclass(frozen=True)
class Pareto:
    """Pareto with survival (scale/x)^shape on [scale, inf).

    shape <= 1 is permitted but has infinite mean; only finite-cutoff actions
    are then meaningful and callers that need the mean get an error.
    """

    scale: float
    shape: float

    def __post_init__(self):
        if not (self.scale > 0 and self.shape > 0):
            raise ValueError("Pareto requires scale > 0 and shape > 0")

    @property
    def infinite_mean(self) -> bool:
        return self.shape <= 1.0

    def mean(self) -> float:
        if self.infinite_mean:
            return INF
        return self.shape * self.scale / (self.shape - 1.0)

    def cdf(self, x: float) -> float:
        if x <= self.scale:
            return 0.0
        return 1.0 - (self.scale / x) ** self.shape

    def pdf(self, x: float) -> float:
        if x < self.scale:
            return 0.0
        return self.shape * self.scale**self.shape * x ** (-self.shape - 1.0)

    def quantile(self, q: float) -> float:
        return self.scale * (1.0 - q) ** (-1.0 / self.shape)

    def truncated_mean(self, t: float) -> float:
        s, a = self.scale, self.shape
        if math.isinf(t):
            if self.infinite_mean:
                raise InfiniteMeanError("Pareto with shape <= 1 has infinite mean")
            return self.mean()
        if t <= s:
            return t
        if a == 1.0:
            return s * (1.0 + math.log(t / s))
        return s + s**a * (s ** (1.0 - a) - t ** (1.0 - a)) / (a - 1.0)

    @property
    def support(self) -> tuple[float, float]:
        return (self.scale, INF)


@dataclass(frozen=True)
class Empirical:
    """Empirical distribution over observed completion times.

    Sampling is by the inverse transform method: a uniform q maps to the
    ceil(q*n)-th order statistic (right-continuous CDF inverse).
    """

    samples: tuple[float, ...]

    def __post_init__(self):
        if len(self.samples) == 0:
            raise ValueError("Empirical requires at least one sample")
        if any(s <= 0 for s in self.samples):
            raise ValueError("Empirical samples must be > 0")
        if any(a > b for a, b in zip(self.samples, self.samples[1:])):
            raise ValueError("Empirical samples must be sorted ascending")

    @property
    def infinite_mean(self) -> bool:
        return False

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def cdf(self, x: float) -> float:
        return float(np.searchsorted(self.samples, x, side="right")) / len(self.samples)

    def quantile(self, q: float) -> float:
        n = len(self.samples)
        idx = max(math.ceil(q * n), 1) - 1
        return self.samples[min(idx, n - 1)]

    def truncated_mean(self, t: float) -> float:
        arr = np.asarray(self.samples)
        if math.isinf(t):
            return float(arr.mean())
        return float(np.minimum(arr, t).mean())


CompletionDistribution = Union[Deterministic, Uniform, Exponential, Pareto, Empirical]


def empirical_from_samples(samples) -> Empirical:
    """Build an Empirical distribution from raw (unsorted) samples."""
    vals = sorted(float(s) for s in samples)
    if not vals:
        raise ValueError("empty sample list")
    return Empirical(tuple(vals))


# ---------------------------------------------------------------------------
# Reward models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantReward:
    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("reward value must lie in [0, 1]")

    def sample(self, x: float, rng) -> float:
        return self.value


@dataclass(frozen=True)
class BernoulliReward:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def sample(self, x: float, rng) -> float:
        return 1.0 if rng.random() < self.p else 0.0


@dataclass(frozen=True)
class PowerCoupledReward:
    """Reward min(omega * x**gamma, 1), deterministically coupled to the time x.

    The clamp at 1 keeps rewards in [0, 1]; choose omega small enough that the
    clamp is inactive on the range of interest when studying pure power laws.
    """

    omega: float
    gamma: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be > 0")

    def sample(self, x: float, rng) -> float:
        return min(self.omega * x**self.gamma, 1.0)


RewardModel = Union[ConstantReward, BernoulliReward, PowerCoupledReward]


# ---------------------------------------------------------------------------
# Reset costs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroReset:
    def cost(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class ConstantReset:
    c: float

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("reset cost must be >= 0")

    def cost(self, t: float) -> float:
        if math.isinf(t):
            return 0.0
        return min(self.c, t)


@dataclass(frozen=True)
class ProportionalReset:
    fraction: float

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")

    def cost(self, t: float) -> float:
        if math.isinf(t):
            return 0.0
        return self.fraction * t


ResetCost = Union[ZeroReset, ConstantReset, ProportionalReset]


@dataclass(frozen=True)
class ArmSpec:
    completion: CompletionDistribution
    reward: RewardModel
    reset: ResetCost = field(default_factory=ZeroReset)
    label: str = "arm"


@dataclass(frozen=True)
class CensoredObservation:
    """The feedback from one trial interrupted at `cutoff`.

    u is the total elapsed time including any reset cost, v the collected
    reward (0 unless the trial completed), raw_elapsed = min(x, cutoff).
    """

    u: float
    v: float
    completed: bool
    cutoff: float
    raw_elapsed: float


# ---------------------------------------------------------------------------
# Sampling and censoring
# ---------------------------------------------------------------------------


def sample_arm(arm: ArmSpec, rng) -> tuple[float, float]:
    """Draw one (completion time, reward) pair from the arm."""
    q = rng.random()
    x = arm.completion.quantile(q)
    r = arm.reward.sample(x, rng)
    return x, r


def censor(x: float, r: float, cutoff: float, reset: ResetCost) -> CensoredObservation:
    """Right-censor a raw trial (x, r) at the given cutoff."""
    if math.isinf(cutoff) or x <= cutoff:
        return CensoredObservation(u=x, v=r, completed=True, cutoff=cutoff, raw_elapsed=x)
    return CensoredObservation(
        u=cutoff + reset.cost(cutoff),
        v=0.0,
        completed=False,
        cutoff=cutoff,
        raw_elapsed=cutoff,
    )


def recensor(
    obs: CensoredObservation, smaller_cutoff: float, reset: ResetCost
) -> CensoredObservation:
    """Reinterpret feedback censored at obs.cutoff as if censored earlier.

    Valid only for smaller_cutoff <= obs.cutoff: feedback at a larger cutoff
    determines the feedback at any smaller one.
    """
    if smaller_cutoff > obs.cutoff:
        raise ValueError(
            f"cannot recensor at {smaller_cutoff} > original cutoff {obs.cutoff}"
        )
    if obs.completed and obs.raw_elapsed <= smaller_cutoff:
        return CensoredObservation(
            u=obs.raw_elapsed,
            v=obs.v,
            completed=True,
            cutoff=smaller_cutoff,
            raw_elapsed=obs.raw_elapsed,
        )
    return CensoredObservation(
        u=smaller_cutoff + reset.cost(smaller_cutoff),
        v=0.0,
        completed=False,
        cutoff=smaller_cutoff,
        raw_elapsed=smaller_cutoff,
    )


# ---------------------------------------------------------------------------
# Vectorized sampling (block draws for Monte Carlo harnesses)
# ---------------------------------------------------------------------------


def quantile_array(dist: CompletionDistribution, q: np.ndarray) -> np.ndarray:
    """Inverse CDF applied elementwise to an array of uniforms."""
    if isinstance(dist, Deterministic):
        return np.full_like(q, dist.value)
    if isinstance(dist, Uniform):
        return dist.lo + q * (dist.hi - dist.lo)
    if isinstance(dist, Exponential):
        return -np.log1p(-q) / dist.rate
    if isinstance(dist, Pareto):
        return dist.scale * (1.0 - q) ** (-1.0 / dist.shape)
    arr = np.asarray(dist.samples)
    n = len(arr)
    idx = np.maximum(np.ceil(q * n).astype(np.int64), 1) - 1
    return arr[np.minimum(idx, n - 1)]


def sample_pairs_block(arm: ArmSpec, size: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Draw `size` raw (x, r) pairs; consumes uniforms as repeated sample_arm."""
    if isinstance(arm.reward, BernoulliReward):
        # interleaved draws match the sequential x-then-reward consumption
        qs = rng.random(2 * size).reshape(size, 2)
        x = quantile_array(arm.completion, qs[:, 0])
        r = (qs[:, 1] < arm.reward.p).astype(float)
        return x, r
    x = quantile_array(arm.completion, rng.random(size))
    if isinstance(arm.reward, ConstantReward):
        return x, np.full(size, arm.reward.value)
    r = np.minimum(arm.reward.omega * x**arm.reward.gamma, 1.0)
    return x, r


def censor_block(
    x: np.ndarray, r: np.ndarray, cutoff: float, reset: ResetCost
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized censoring: returns (u, v) arrays for a common cutoff."""
    if math.isinf(cutoff):
        return x.copy(), r.copy()
    completed = x <= cutoff
    u = np.where(completed, x, cutoff + reset.cost(cutoff))
    v = np.where(completed, r, 0.0)
    return u, v


def sample_censored_block(
    arm: ArmSpec, cutoff: float, size: int, rng
) -> tuple[np.ndarray, np.ndarray]:
    """Draw `size` censored (u, v) pairs for a static decision at `cutoff`."""
    x, r = sample_pairs_block(arm, size, rng)
    return censor_block(x, r, cutoff, arm.reset)


# ---------------------------------------------------------------------------
# Truncated moment oracles
# ---------------------------------------------------------------------------


def truncated_time_mean(dist: CompletionDistribution, reset: ResetCost, t: float) -> float:
    """E[U(t)] = E[min(X, t)] + C(t) * P(X > t); E[X] when t is infinite."""
    if not (t > 0):
        raise ValueError("cutoff must be > 0")
    if math.isinf(t):
        if dist.infinite_mean:
            raise InfiniteMeanError("infinite-mean distribution with cutoff = inf")
        return dist.mean()
    return dist.truncated_mean(t) + reset.cost(t) * (1.0 - dist.cdf(t))


def _power_reward_integral(dist, omega: float, gamma: float, t: float) -> float:
    """E[min(omega X^gamma, 1) * I{X <= t}] for a continuous distribution."""
    lo, hi = dist.support
    ub = min(t, hi)
    if ub <= lo and dist.cdf(ub) == 0.0:
        return 0.0

    def integrand(x):
        return min(omega * x**gamma, 1.0) * dist.pdf(x)

    # split at the clamp boundary so quad sees smooth pieces
    pieces = [lo, ub]
    if gamma != 0 and omega > 0:
        xc = (1.0 / omega) ** (1.0 / gamma)
        if lo < xc < ub:
            pieces = [lo, xc, ub]
    total = 0.0
    for a, b in zip(pieces, pieces[1:]):
        val, err = integrate.quad(integrand, a, b, epsabs=_QUAD_ABS_TOL / 4, limit=200)
        if err > 1e-6:
            raise QuadratureError(
                f"reward quadrature error {err:.2e} on [{a}, {b}] (gamma={gamma})"
            )
        total += val
    return total


def truncated_reward_mean(arm: ArmSpec, t: float) -> float:
    """E[V(t)] = E[R * I{X <= t}]."""
    if not (t > 0):
        raise ValueError("cutoff must be > 0")
    dist, reward = arm.completion, arm.reward
    if isinstance(reward, ConstantReward):
        return reward.value * dist.cdf(t) if not math.isinf(t) else reward.value
    if isinstance(reward, BernoulliReward):
        return reward.p * dist.cdf(t) if not math.isinf(t) else reward.p

    # power-coupled reward: integrate against the completion distribution
    omega, gamma = reward.omega, reward.gamma
    if isinstance(dist, Deterministic):
        if math.isinf(t) or dist.value <= t:
            return min(omega * dist.value**gamma, 1.0)
        return 0.0
    if isinstance(dist, Empirical):
        arr = np.asarray(dist.samples)
        kept = arr if math.isinf(t) else arr[arr <= t]
        if kept.size == 0:
            return 0.0
        return float(np.minimum(omega * kept**gamma, 1.0).sum()) / len(arr)
    return _power_reward_integral(dist, omega, gamma, t)


def reward_mean(arm: ArmSpec) -> float:
    """Unconditional E[R] (always finite since rewards lie in [0, 1])."""
    reward = arm.reward
    if isinstance(reward, ConstantReward):
        return reward.value
    if isinstance(reward, BernoulliReward):
        return reward.p
    return truncated_reward_mean(arm, INF)


# ---------------------------------------------------------------------------
# Config schema (key-value dicts, used by the CLI and experiment files)
# ---------------------------------------------------------------------------

_DIST_KINDS = {
    "deterministic": (Deterministic, ("value",)),
    "uniform": (Uniform, ("lo", "hi")),
    "exponential": (Exponential, ("rate",)),
    "pareto": (Pareto, ("scale", "shape")),
    "empirical": (Empirical, ("samples",)),
}
_REWARD_KINDS = {
    "constant": (ConstantReward, ("value",)),
    "bernoulli": (BernoulliReward, ("p",)),
    "power": (PowerCoupledReward, ("omega", "gamma")),
}
_RESET_KINDS = {
    "zero": (ZeroReset, ()),
    "constant": (ConstantReset, ("c",)),
    "proportional": (ProportionalReset, ("fraction",)),
}


def _build_variant(table, spec: dict, path: str):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{path}: expected a dict with a 'kind' key")
    kind = spec["kind"]
    if kind not in table:
        raise ConfigError(f"{path}.kind: unknown kind {kind!r} (choices: {sorted(table)})")
    cls, fields = table[kind]
    extra = set(spec) - {"kind"} - set(fields)
    if extra:
        raise ConfigError(f"{path}: unknown keys {sorted(extra)} for kind {kind!r}")
    missing = [f for f in fields if f not in spec]
    if missing:
        raise ConfigError(f"{path}: missing keys {missing} for kind {kind!r}")
    kwargs = {f: spec[f] for f in fields}
    if cls is Empirical:
        kwargs["samples"] = tuple(sorted(float(s) for s in kwargs["samples"]))
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def arm_from_dict(spec: dict, path: str = "arm") -> ArmSpec:
    """Build an ArmSpec from the documented key-value schema."""
    allowed = {"label", "completion", "reward", "reset"}
    extra = set(spec) - allowed
    if extra:
        raise ConfigError(f"{path}: unknown keys {sorted(extra)}")
    if "completion" not in spec or "reward" not in spec:
        raise ConfigError(f"{path}: 'completion' and 'reward' are required")
    completion = _build_variant(_DIST_KINDS, spec["completion"], f"{path}.completion")
    reward = _build_variant(_REWARD_KINDS, spec["reward"], f"{path}.reward")
    reset = _build_variant(_RESET_KINDS, spec.get("reset", {"kind": "zero"}), f"{path}.reset")
    return ArmSpec(completion=completion, reward=reward, reset=reset,
                   label=spec.get("label", "arm"))
