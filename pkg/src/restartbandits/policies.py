"""Decision policies: fixed, static oracle, Luby, UCB-RB, UCB-RM, UCB-RC.

A policy exposes next() -> Decision and update(decision, observation); next
is deterministic given the internal state, and update consumes only the
feedback of the decision it is paired with (admissibility).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import optimal_static_decision
from .arms import ArmSpec, CensoredObservation, recensor
from .estimators import group_count, kappa_of_beta

INF = math.inf


@dataclass(frozen=True)
class DecisionGrid:
    """Strictly increasing cutoffs t_1 < ... < t_L; the last may be infinite."""

    cutoffs: tuple[float, ...]
    mu_star: float | None = None  # diagnostic floor on E[min(X, t_1)]
    epsilon: float | None = None

    def __post_init__(self):
        c = self.cutoffs
        if not c:
            raise ValueError("grid must be non-empty")
        if not c[0] > 0:
            raise ValueError("t_1 must be > 0")
        if any(a >= b for a, b in zip(c, c[1:])):
            raise ValueError("cutoffs must be strictly increasing")
        if any(math.isinf(t) for t in c[:-1]):
            raise ValueError("only the last cutoff may be infinite")

    def __len__(self) -> int:
        return len(self.cutoffs)

    @property
    def has_infinite_cutoff(self) -> bool:
        return math.isinf(self.cutoffs[-1])


@dataclass(frozen=True)
class Decision:
    arm: int
    cutoff_index: int
    cutoff: float


class PolicyError(RuntimeError):
    pass


class Policy:
    """Base class enforcing the decision/observation pairing contract."""

    name = "policy"

    def __init__(self):
        self._pending: Decision | None = None

    def next(self) -> Decision:
        if self._pending is not None:
            raise PolicyError("next() called twice without update()")
        d = self._next()
        self._pending = d
        return d

    def update(self, decision: Decision, obs: CensoredObservation) -> None:
        if self._pending is None or decision != self._pending:
            raise PolicyError("update() does not match the pending decision")
        if obs.cutoff != decision.cutoff:
            raise PolicyError(
                f"observation cutoff {obs.cutoff} != decision cutoff {decision.cutoff}"
            )
        self._pending = None
        self._update(decision, obs)

    def _next(self) -> Decision:
        raise NotImplementedError

    def _update(self, decision: Decision, obs: CensoredObservation) -> None:
        pass


class FixedPolicy(Policy):
    """Always plays one (arm, cutoff) decision."""

    name = "fixed"

    def __init__(self, arm: int, cutoff: float):
        super().__init__()
        self.decision = Decision(arm, 0, float(cutoff))

    def _next(self) -> Decision:
        return self.decision


class StaticOraclePolicy(Policy):
    """Plays the argmax of the analytic reward rate over arms x grid."""

    name = "static"

    def __init__(self, arms: list[ArmSpec], grid):
        super().__init__()
        best = optimal_static_decision(arms, grid)
        self.static_decision = best
        self.decision = Decision(best.arm_index, best.cutoff_index, best.cutoff)

    def _next(self) -> Decision:
        return self.decision


def luby_value(i: int) -> int:
    """The i-th term (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    if i < 1:
        raise ValueError("index must be >= 1")
    while (i + 1) & i:  # loop until i = 2^k - 1
        i -= (1 << (i.bit_length() - 1)) - 1
    return (i + 1) >> 1


class LubyPolicy(Policy):
    """Plays one arm with cutoffs base * luby(n) on epoch n."""

    name = "luby"

    def __init__(self, arm: int, base_cutoff: float):
        super().__init__()
        if not base_cutoff > 0:
            raise ValueError("base cutoff must be > 0")
        self.arm = arm
        self.base = float(base_cutoff)
        self.epoch = 0

    def _next(self) -> Decision:
        return Decision(self.arm, 0, self.base * luby_value(self.epoch + 1))

    def _update(self, decision, obs) -> None:
        self.epoch += 1


class UcbRbPolicy(Policy):
    """Empirical-Bernstein UCB over a finite cutoff grid with shared
    (union) index sets exploiting the right-censored information structure.

    The arithmetic mirrors the compiled episode kernel exactly.
    """

    name = "ucb-rb"

    def __init__(
        self,
        arms: list[ArmSpec],
        grid: DecisionGrid,
        alpha: float = 2.01,
        kappa: float = 1.01,
        init_pulls: int = 1,
        use_union: bool = True,
    ):
        super().__init__()
        if grid.has_infinite_cutoff:
            raise ValueError("UCB-RB requires a finite cutoff grid")
        if not alpha > 2:
            raise ValueError("alpha must be > 2")
        self.arms = arms
        self.grid = grid
        self.alpha = alpha
        self.kappa = kappa
        self.init_pulls = init_pulls
        self.use_union = use_union
        K, L = len(arms), len(grid)
        self.K, self.L = K, L
        self.tstar = np.zeros((K, L), dtype=np.int64)
        self.mean_u = np.zeros((K, L))
        self.m2_u = np.zeros((K, L))
        self.mean_v = np.zeros((K, L))
        self.m2_v = np.zeros((K, L))
        self.pulls = np.zeros((K, L), dtype=np.int64)
        self.n_done = 0
        self._init_schedule = [
            (k, li) for _ in range(init_pulls) for k in range(K) for li in range(L)
        ]

    @property
    def in_initialization(self) -> bool:
        return self.n_done < len(self._init_schedule)

    def _index_value(self, k: int, li: int, lg: float) -> float:
        cnt = int(self.tstar[k, li])
        if cnt == 0:
            return INF
        var_u = self.m2_u[k, li] / cnt
        var_v = self.m2_v[k, li] / cnt
        t_l = self.grid.cutoffs[li]
        eps = 3.0 * t_l * lg / cnt + math.sqrt(2.0 * var_u * lg / cnt)
        eta = 3.0 * lg / cnt + math.sqrt(2.0 * var_v * lg / cnt)
        r_hat = self.mean_v[k, li] / self.mean_u[k, li]
        return r_hat + self.kappa * (eta + r_hat * eps) / self.mean_u[k, li]

    def _next(self) -> Decision:
        if self.in_initialization:
            k, li = self._init_schedule[self.n_done]
            return Decision(k, li, self.grid.cutoffs[li])
        lg = self.alpha * math.log(max(self.n_done, 2))
        best_idx = -INF
        best_k = best_l = 0
        for k in range(self.K):
            for li in range(self.L):
                idx = self._index_value(k, li, lg)
                if idx > best_idx or (idx == best_idx and k == best_k and li > best_l):
                    best_idx, best_k, best_l = idx, k, li
        return Decision(best_k, best_l, self.grid.cutoffs[best_l])

    def _update(self, decision: Decision, obs: CensoredObservation) -> None:
        k, li = decision.arm, decision.cutoff_index
        self.pulls[k, li] += 1
        self.n_done += 1
        reset = self.arms[k].reset
        lo = 0 if self.use_union else li
        for lj in range(lo, li + 1):
            sub = recensor(obs, self.grid.cutoffs[lj], reset)
            self.tstar[k, lj] += 1
            cnt = self.tstar[k, lj]
            d = sub.u - self.mean_u[k, lj]
            self.mean_u[k, lj] += d / cnt
            self.m2_u[k, lj] += d * (sub.u - self.mean_u[k, lj])
            d = sub.v - self.mean_v[k, lj]
            self.mean_v[k, lj] += d / cnt
            self.m2_v[k, lj] += d * (sub.v - self.mean_v[k, lj])


class _MomCache:
    """Per-(arm, cutoff) median-of-means summary, recomputed lazily."""

    __slots__ = ("count", "m", "mom_u", "mom_v", "vm_u", "vm_v")

    def __init__(self):
        self.count = -1
        self.m = -1


class UcbRmPolicy(Policy):
    """Median-of-means UCB; tolerates infinite cutoffs in the grid.

    Raw per-set samples are retained because the group count grows with the
    epoch; bounded_memory freezes the group count once max_samples is hit.
    """

    name = "ucb-rm"

    def __init__(
        self,
        arms: list[ArmSpec],
        grid: DecisionGrid,
        alpha: float = 2.01,
        kappa: float = 1.01,
        init_pulls: int = 1,
        bounded_memory: int | None = None,
    ):
        super().__init__()
        if not alpha > 2:
            raise ValueError("alpha must be > 2")
        self.arms = arms
        self.grid = grid
        self.alpha = alpha
        self.kappa = kappa
        self.init_pulls = init_pulls
        self.bounded_memory = bounded_memory
        K, L = len(arms), len(grid)
        self.K, self.L = K, L
        cap = 1024
        self._u = [[np.empty(cap) for _ in range(L)] for _ in range(K)]
        self._v = [[np.empty(cap) for _ in range(L)] for _ in range(K)]
        self.tstar = np.zeros((K, L), dtype=np.int64)
        self.pulls = np.zeros((K, L), dtype=np.int64)
        self._cache = [[_MomCache() for _ in range(L)] for _ in range(K)]
        self.n_done = 0
        self._init_schedule = [
            (k, li) for _ in range(init_pulls) for k in range(K) for li in range(L)
        ]

    @property
    def in_initialization(self) -> bool:
        return self.n_done < len(self._init_schedule)

    def _append(self, k, li, u, v):
        cnt = int(self.tstar[k, li])
        buf_u, buf_v = self._u[k][li], self._v[k][li]
        if cnt >= len(buf_u):
            buf_u = np.concatenate([buf_u, np.empty(len(buf_u))])
            buf_v = np.concatenate([buf_v, np.empty(len(buf_v))])
            self._u[k][li], self._v[k][li] = buf_u, buf_v
        buf_u[cnt] = u
        buf_v[cnt] = v
        self.tstar[k, li] = cnt + 1

    def _summaries(self, k, li, m):
        cache = self._cache[k][li]
        cnt = int(self.tstar[k, li])
        m_eff = min(m, cnt)
        if self.bounded_memory is not None and cnt >= self.bounded_memory:
            m_eff = min(cache.m if cache.m > 0 else m_eff, m_eff)
        if cache.count == cnt and cache.m == m_eff:
            return cache
        u = self._u[k][li][:cnt]
        v = self._v[k][li][:cnt]
        size = cnt // m_eff
        gu = u[: m_eff * size].reshape(m_eff, size)
        gv = v[: m_eff * size].reshape(m_eff, size)
        med = (m_eff - 1) // 2
        cache.mom_u = float(np.sort(gu.mean(axis=1))[med])
        cache.mom_v = float(np.sort(gv.mean(axis=1))[med])
        cache.vm_u = float(np.sort(gu.var(axis=1))[med])
        cache.vm_v = float(np.sort(gv.var(axis=1))[med])
        cache.count = cnt
        cache.m = m_eff
        return cache

    def _next(self) -> Decision:
        if self.in_initialization:
            k, li = self._init_schedule[self.n_done]
            return Decision(k, li, self.grid.cutoffs[li])
        n = max(self.n_done, 2)
        lg = self.alpha * math.log(n)
        m = group_count(n, self.alpha)
        best_idx = -INF
        best_k = best_l = 0
        for k in range(self.K):
            for li in range(self.L):
                cnt = int(self.tstar[k, li])
                if cnt == 0:
                    idx = INF
                else:
                    summ = self._summaries(k, li, m)
                    eps = 11.0 * math.sqrt(2.0 * summ.vm_u * lg / cnt)
                    eta = 11.0 * math.sqrt(2.0 * summ.vm_v * lg / cnt)
                    r_hat = summ.mom_v / summ.mom_u
                    idx = r_hat + self.kappa * (eta + r_hat * eps) / summ.mom_u
                if idx > best_idx or (idx == best_idx and k == best_k and li > best_l):
                    best_idx, best_k, best_l = idx, k, li
        return Decision(best_k, best_l, self.grid.cutoffs[best_l])

    def _update(self, decision: Decision, obs: CensoredObservation) -> None:
        k, li = decision.arm, decision.cutoff_index
        self.pulls[k, li] += 1
        self.n_done += 1
        reset = self.arms[k].reset
        for lj in range(li + 1):
            sub = recensor(obs, self.grid.cutoffs[lj], reset)
            self._append(k, lj, sub.u, sub.v)


def ucb_rc_grid(t_min: float, t_max: float, tau: float, q: float) -> DecisionGrid:
    """Quantize [t_min, t_max] with step delta = (sqrt(log(tau)/tau))^(1/q)."""
    if not (0 < t_min <= t_max < INF):
        raise ValueError("need 0 < t_min <= t_max < inf")
    if not tau > math.e:
        raise ValueError("tau must exceed e so that log(tau) > 1")
    if not q > 1:
        raise ValueError("smoothness exponent q must exceed 1")
    delta = math.sqrt(math.log(tau) / tau) ** (1.0 / q)
    rad = t_max - t_min
    if rad == 0:
        return DecisionGrid((t_min,))
    if delta >= rad:
        import warnings

        warnings.warn("quantization step >= decision-set radius; degenerate grid",
                      stacklevel=2)
        return DecisionGrid((t_min, t_max))
    L = math.ceil(rad / delta) + 1
    cutoffs = [min(t_min + (li - 1) * delta, t_max) for li in range(1, L + 1)]
    # the clip can duplicate the final point
    if len(cutoffs) >= 2 and cutoffs[-1] <= cutoffs[-2]:
        cutoffs.pop()
    return DecisionGrid(tuple(cutoffs))


def ucb_rc_build(
    arms: list[ArmSpec],
    t_min: float,
    t_max: float,
    tau: float,
    q: float = 2.0,
    **ucb_kwargs,
) -> tuple[DecisionGrid, UcbRbPolicy]:
    """Build the quantized grid and a ready UCB-RB policy over it."""
    grid = ucb_rc_grid(t_min, t_max, tau, q)
    return grid, UcbRbPolicy(arms, grid, **ucb_kwargs)
