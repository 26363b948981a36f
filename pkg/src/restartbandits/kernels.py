"""Kernel selection: compiled extension when available, pure Python otherwise.

Set RESTARTBANDITS_PURE_PYTHON=1 to force the pure-Python fallback (used by
the kernel benchmark and the equivalence tests).
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import _kernels_py
from .arms import (
    ArmSpec,
    BernoulliReward,
    ConstantReset,
    ConstantReward,
    Deterministic,
    Empirical,
    Exponential,
    Pareto,
    PowerCoupledReward,
    ProportionalReset,
    Uniform,
    ZeroReset,
)

if os.environ.get("RESTARTBANDITS_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

IMPL = _impl.IMPL

walksat_run = _impl.walksat_run
run_fixed_episode_raw = _impl.run_fixed_episode
run_ucb_rb_episode_raw = _impl.run_ucb_rb_episode


def implementations():
    """Both kernel implementations (for benchmarks and equivalence tests)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out


_DIST_CODE = {
    Deterministic: _kernels_py.DIST_DETERMINISTIC,
    Uniform: _kernels_py.DIST_UNIFORM,
    Exponential: _kernels_py.DIST_EXPONENTIAL,
    Pareto: _kernels_py.DIST_PARETO,
    Empirical: _kernels_py.DIST_EMPIRICAL,
}
_REW_CODE = {
    ConstantReward: _kernels_py.REW_CONSTANT,
    BernoulliReward: _kernels_py.REW_BERNOULLI,
    PowerCoupledReward: _kernels_py.REW_POWER,
}
_RESET_CODE = {
    ZeroReset: _kernels_py.RESET_ZERO,
    ConstantReset: _kernels_py.RESET_CONSTANT,
    ProportionalReset: _kernels_py.RESET_PROPORTIONAL,
}


def _dist_params(dist):
    if isinstance(dist, Deterministic):
        return dist.value, 0.0, ()
    if isinstance(dist, Uniform):
        return dist.lo, dist.hi, ()
    if isinstance(dist, Exponential):
        return dist.rate, 0.0, ()
    if isinstance(dist, Pareto):
        return dist.scale, dist.shape, ()
    return 0.0, 0.0, dist.samples


def _reward_params(reward):
    if isinstance(reward, ConstantReward):
        return reward.value, 0.0
    if isinstance(reward, BernoulliReward):
        return reward.p, 0.0
    return reward.omega, reward.gamma


def _reset_params(reset):
    if isinstance(reset, ZeroReset):
        return 0.0
    if isinstance(reset, ConstantReset):
        return reset.c
    return reset.fraction


def encode_arms(arms: list[ArmSpec]) -> dict:
    """Flatten a list of ArmSpecs into the array form the kernels consume."""
    k = len(arms)
    enc = {
        "dist_kind": np.zeros(k, dtype=np.int32),
        "dist_a": np.zeros(k),
        "dist_b": np.zeros(k),
        "rew_kind": np.zeros(k, dtype=np.int32),
        "rew_a": np.zeros(k),
        "rew_b": np.zeros(k),
        "reset_kind": np.zeros(k, dtype=np.int32),
        "reset_a": np.zeros(k),
    }
    emp_parts = []
    emp_off = [0]
    for i, arm in enumerate(arms):
        enc["dist_kind"][i] = _DIST_CODE[type(arm.completion)]
        a, b, emp = _dist_params(arm.completion)
        enc["dist_a"][i] = a
        enc["dist_b"][i] = b
        emp_parts.extend(emp)
        emp_off.append(len(emp_parts))
        enc["rew_kind"][i] = _REW_CODE[type(arm.reward)]
        enc["rew_a"][i], enc["rew_b"][i] = _reward_params(arm.reward)
        enc["reset_kind"][i] = _RESET_CODE[type(arm.reset)]
        enc["reset_a"][i] = _reset_params(arm.reset)
    enc["emp_flat"] = np.asarray(emp_parts, dtype=float)
    enc["emp_off"] = np.asarray(emp_off, dtype=np.int64)
    return enc


def run_fixed_episode(arm: ArmSpec, cutoff: float, tau: float, rng, impl=None):
    """Episode for a single fixed (arm, cutoff) decision; returns (n, rew, s)."""
    impl = impl or _impl
    enc = encode_arms([arm])
    return impl.run_fixed_episode(
        int(enc["dist_kind"][0]), float(enc["dist_a"][0]), float(enc["dist_b"][0]),
        enc["emp_flat"],
        int(enc["rew_kind"][0]), float(enc["rew_a"][0]), float(enc["rew_b"][0]),
        int(enc["reset_kind"][0]), float(enc["reset_a"][0]),
        float(cutoff), float(tau), rng,
    )


def run_ucb_rb_episode(
    arms: list[ArmSpec],
    grid,
    tau: float,
    alpha: float,
    kappa: float,
    init_pulls: int,
    rngs,
    use_union: bool = True,
    record: bool = False,
    impl=None,
):
    """Fast-path UCB-RB episode; rngs supplies one generator per arm."""
    impl = impl or _impl
    enc = encode_arms(arms)
    if math.isinf(grid[-1]):
        raise ValueError("UCB-RB requires a finite cutoff grid")
    return impl.run_ucb_rb_episode(
        enc["dist_kind"], enc["dist_a"], enc["dist_b"], enc["emp_flat"], enc["emp_off"],
        enc["rew_kind"], enc["rew_a"], enc["rew_b"], enc["reset_kind"], enc["reset_a"],
        np.asarray(grid, dtype=float), float(tau), float(alpha), float(kappa),
        int(init_pulls), bool(use_union), list(rngs), bool(record),
    )
