"""Episode simulator and Monte Carlo regret harness.

An episode runs epochs until the cumulative elapsed time first exceeds the
horizon tau; the crossing epoch still counts and its reward is kept. Fast
compiled paths exist for fixed-decision and UCB-RB policies and reproduce
the generic loop bit for bit under the same seeds.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .analysis import opt_reference
from .arms import ArmSpec, censor, sample_arm
from .policies import (
    FixedPolicy,
    LubyPolicy,
    Policy,
    StaticOraclePolicy,
    UcbRbPolicy,
)


def episode_rngs(base_seed: int, n_arms: int, key: tuple[int, ...] = ()):
    """One independent generator per arm, keyed by (base_seed, *key, arm)."""
    return [
        np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=key + (k,)))
        for k in range(n_arms)
    ]


@dataclass(frozen=True)
class EpochRecord:
    n: int
    arm: int
    cutoff: float
    u: float
    v: float
    completed: bool
    s_n: float


@dataclass
class EpisodeTrace:
    policy: str
    tau: float
    n_epochs: int = 0
    reward: float = 0.0
    total_time: float = 0.0
    epochs: list[EpochRecord] = field(default_factory=list)


def run_episode(
    arms: list[ArmSpec],
    policy: Policy,
    tau: float,
    rngs,
    record: bool = False,
) -> EpisodeTrace:
    """Generic episode loop driving an arbitrary policy object."""
    if not tau > 0:
        raise ValueError("horizon must be positive")
    trace = EpisodeTrace(policy=policy.name, tau=float(tau))
    s = 0.0
    rew = 0.0
    n = 0
    while s <= tau:
        d = policy.next()
        arm = arms[d.arm]
        x, r = sample_arm(arm, rngs[d.arm])
        obs = censor(x, r, d.cutoff, arm.reset)
        policy.update(d, obs)
        s += obs.u
        rew += obs.v
        n += 1
        if record:
            trace.epochs.append(
                EpochRecord(n, d.arm, d.cutoff, obs.u, obs.v, obs.completed, s)
            )
    trace.n_epochs = n
    trace.reward = rew
    trace.total_time = s
    return trace


def run_episode_fast(
    arms: list[ArmSpec], policy: Policy, tau: float, rngs, impl=None
) -> tuple[int, float, float]:
    """Compiled episode for policies with a kernel fast path.

    Returns (n_epochs, reward, total_time); raises TypeError for policies
    without one. The policy instance is used as a template only and must be
    fresh (its state is not consumed or updated).
    """
    if isinstance(policy, (FixedPolicy, StaticOraclePolicy)):
        d = policy.decision
        return kernels.run_fixed_episode(
            arms[d.arm], d.cutoff, tau, rngs[d.arm], impl=impl
        )
    if isinstance(policy, UcbRbPolicy):
        n, rew, s, pulls, _ = kernels.run_ucb_rb_episode(
            arms,
            policy.grid.cutoffs,
            tau,
            policy.alpha,
            policy.kappa,
            policy.init_pulls,
            rngs,
            use_union=policy.use_union,
            impl=impl,
        )
        return n, rew, s
    raise TypeError(f"no kernel fast path for policy {policy.name!r}")


def _has_fast_path(policy: Policy) -> bool:
    return isinstance(policy, (FixedPolicy, StaticOraclePolicy, UcbRbPolicy))


@dataclass(frozen=True)
class RegretRow:
    tau: float
    policy: str
    mean_reward: float
    stderr: float
    pseudo_regret: float
    replications: int


@dataclass(frozen=True)
class RegretReport:
    r_star: float
    rows: tuple[RegretRow, ...]


def monte_carlo_regret(
    arms: list[ArmSpec],
    policy_factory,
    horizons,
    replications: int,
    base_seed: int,
    r_star: float,
    use_fast_path: bool = True,
) -> RegretReport:
    """Average episode reward over replications at each horizon.

    policy_factory() must return a fresh policy per episode. Pseudo-regret is
    measured against the optimal static reference r_star * tau. Episode
    (h, j) draws arm k from the stream keyed (base_seed, h, j, k), so results
    do not depend on the fast-path choice or the execution order.
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    rows = []
    n_arms = len(arms)
    for h, tau in enumerate(horizons):
        rewards = np.empty(replications)
        for j in range(replications):
            policy = policy_factory()
            rngs = episode_rngs(base_seed, n_arms, key=(h, j))
            if use_fast_path and _has_fast_path(policy):
                _, rew, _ = run_episode_fast(arms, policy, tau, rngs)
            else:
                rew = run_episode(arms, policy, tau, rngs).reward
            rewards[j] = rew
        mean = float(rewards.mean())
        stderr = (
            float(rewards.std(ddof=1) / math.sqrt(replications))
            if replications > 1
            else 0.0
        )
        rows.append(
            RegretRow(
                tau=float(tau),
                policy=policy.name,
                mean_reward=mean,
                stderr=stderr,
                pseudo_regret=opt_reference(r_star, tau) - mean,
                replications=replications,
            )
        )
    return RegretReport(r_star=float(r_star), rows=tuple(rows))


# ---------------------------------------------------------------------------
# CSV export / import
# ---------------------------------------------------------------------------


def _atomic_writer(path):
    d = os.path.dirname(os.path.abspath(path))
    return tempfile.NamedTemporaryFile(
        "w", dir=d, suffix=".tmp", delete=False, newline=""
    )


def _finish_atomic(tmp, path):
    tmp.flush()
    os.fsync(tmp.fileno())
    tmp.close()
    os.replace(tmp.name, path)


def trace_to_csv(trace: EpisodeTrace, path) -> None:
    tmp = _atomic_writer(path)
    try:
        w = csv.writer(tmp)
        w.writerow(["n", "arm", "cutoff", "u", "v", "completed", "S_n"])
        for e in trace.epochs:
            w.writerow(
                [e.n, e.arm, repr(e.cutoff), repr(e.u), repr(e.v),
                 int(e.completed), repr(e.s_n)]
            )
        _finish_atomic(tmp, path)
    except BaseException:
        tmp.close()
        os.unlink(tmp.name)
        raise


def trace_from_csv(path, policy: str = "", tau: float = 0.0) -> EpisodeTrace:
    trace = EpisodeTrace(policy=policy, tau=tau)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["n", "arm", "cutoff", "u", "v", "completed", "S_n"]
        if reader.fieldnames != expected:
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        for row in reader:
            trace.epochs.append(
                EpochRecord(
                    n=int(row["n"]),
                    arm=int(row["arm"]),
                    cutoff=float(row["cutoff"]),
                    u=float(row["u"]),
                    v=float(row["v"]),
                    completed=bool(int(row["completed"])),
                    s_n=float(row["S_n"]),
                )
            )
    if trace.epochs:
        trace.n_epochs = trace.epochs[-1].n
        trace.reward = sum(e.v for e in trace.epochs)
        trace.total_time = trace.epochs[-1].s_n
    return trace


def regret_report_to_csv(report: RegretReport, path) -> None:
    tmp = _atomic_writer(path)
    try:
        w = csv.writer(tmp)
        w.writerow(["tau", "policy", "mean_reward", "stderr", "pseudo_regret", "reps"])
        for r in report.rows:
            w.writerow(
                [repr(r.tau), r.policy, repr(r.mean_reward), repr(r.stderr),
                 repr(r.pseudo_regret), r.replications]
            )
        _finish_atomic(tmp, path)
    except BaseException:
        tmp.close()
        os.unlink(tmp.name)
        raise
