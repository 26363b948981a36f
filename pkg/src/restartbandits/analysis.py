"""Reward rates, optimal static decisions, and the finite-restart criterion."""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass

from .arms import (
    ArmSpec,
    InfiniteMeanError,
    reward_mean,
    truncated_reward_mean,
    truncated_time_mean,
)

INF = math.inf

#: equality margin for the strict inequality in the restart criterion;
#: memoryless (exponential) arms sit exactly on the boundary
BOUNDARY_TOL = 1e-9


def reward_rate(arm: ArmSpec, t: float) -> float:
    """Renewal reward rate r(t) = E[V(t)] / E[U(t)] for the decision cutoff t.

    For t = inf with an infinite-mean completion time the limit value 0 is
    returned (and a warning issued): persistent no-restart play earns reward
    at vanishing rate.
    """
    rate, _ = reward_rate_flagged(arm, t)
    return rate


def reward_rate_flagged(arm: ArmSpec, t: float) -> tuple[float, str]:
    """reward_rate plus a flag: "" normally, "infinite-mean" for the limit case."""
    if math.isinf(t) and arm.completion.infinite_mean:
        return 0.0, "infinite-mean"
    mean_u = truncated_time_mean(arm.completion, arm.reset, t)
    if mean_u <= 0:
        raise ValueError(f"E[U({t})] = {mean_u} is not positive")
    return truncated_reward_mean(arm, t) / mean_u, ""


@dataclass(frozen=True)
class RateCurve:
    label: str
    grid: tuple[float, ...]
    rates: tuple[float, ...]
    flags: tuple[str, ...]
    argmax_index: int

    @property
    def argmax_cutoff(self) -> float:
        return self.grid[self.argmax_index]


def rate_sweep(arm: ArmSpec, grid) -> RateCurve:
    """Pointwise reward rate over a cutoff grid; argmax ties go to smaller t."""
    grid = tuple(float(t) for t in grid)
    if any(a >= b for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    rates, flags = [], []
    for t in grid:
        try:
            rate, flag = reward_rate_flagged(arm, t)
        except InfiniteMeanError:
            rate, flag = 0.0, "infinite-mean"
        rates.append(rate)
        flags.append(flag)
    best = 0
    for i, r in enumerate(rates):
        if r > rates[best]:
            best = i
    return RateCurve(arm.label, grid, tuple(rates), tuple(flags), best)


def rate_curve_to_csv(curve: RateCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "rate", "flag"])
        for t, r, f in zip(curve.grid, curve.rates, curve.flags):
            writer.writerow([repr(t), repr(r), f])


class RestartVerdict(enum.Enum):
    """Outcome of the finite-restart criterion at a single cutoff."""

    RESTART = "restart"        # restarting at this cutoff beats never restarting
    NO_RESTART = "no-restart"
    BOUNDARY = "boundary"      # equality within tolerance (e.g. memoryless arms)


def restart_condition(arm: ArmSpec, t: float, tol: float = BOUNDARY_TOL) -> RestartVerdict:
    """Check whether restarting at cutoff t beats running every task to completion.

    Evaluates the residual reward rate E[R | X > t] / E[X - (t + C(t)) | X > t]
    against the no-restart rate E[R] / E[X]; restarting helps iff the residual
    rate is strictly smaller. Conditional tail expectations are computed from
    unconditional truncated integrals divided by P(X > t).
    """
    dist = arm.completion
    if dist.infinite_mean:
        # residual time diverges: restarting is necessary
        return RestartVerdict.RESTART
    sf = 1.0 - dist.cdf(t)
    if sf <= 0.0:
        raise ValueError(f"P(X > {t}) = 0: restart condition undefined")
    mean_x = dist.mean()
    mean_r = reward_mean(arm)
    mean_u = truncated_time_mean(dist, arm.reset, t)
    mean_v = truncated_reward_mean(arm, t)
    # E[R | X > t] and E[X - (t + C(t)) | X > t], via unconditional integrals
    resid_reward = (mean_r - mean_v) / sf
    resid_time = (mean_x - mean_u) / sf
    rhs = mean_r / mean_x
    if resid_time <= 0:
        # residual time non-positive (large reset cost): restarting trivially helps
        return RestartVerdict.RESTART
    lhs = resid_reward / resid_time
    if abs(lhs - rhs) <= tol:
        return RestartVerdict.BOUNDARY
    return RestartVerdict.RESTART if lhs < rhs else RestartVerdict.NO_RESTART


@dataclass(frozen=True)
class StaticDecision:
    arm_index: int
    cutoff: float
    rate: float
    cutoff_index: int


def optimal_static_decision(arms, grid) -> StaticDecision:
    """Exhaustive argmax of the reward rate over arms x grid.

    Ties break toward the lowest arm index, then the smallest cutoff.
    """
    arms = list(arms)
    grid = tuple(float(t) for t in grid)
    if not arms or not grid:
        raise ValueError("arms and grid must be non-empty")
    best = None
    for k, arm in enumerate(arms):
        for li, t in enumerate(grid):
            try:
                rate, _ = reward_rate_flagged(arm, t)
            except InfiniteMeanError:
                rate = 0.0
            if best is None or rate > best.rate:
                best = StaticDecision(k, t, rate, li)
    if best.rate == 0.0:
        warnings.warn("all decisions have zero reward rate", stacklevel=2)
    return best


def opt_reference(r_star: float, tau: float) -> float:
    """The pseudo-regret baseline r* * tau (the tau-linear part of the
    optimum; the additive O(1) excess term is intentionally not computed)."""
    if r_star < 0:
        raise ValueError("r_star must be >= 0")
    if not tau > 0:
        raise ValueError("tau must be > 0")
    return r_star * tau
