"""Pure-Python reference implementation of the hot inner loops.

The compiled extension (_kernels.pyx) mirrors this module function for
function and consumes random numbers in the identical order, so both
implementations produce bit-identical results for the same seeds. Keep the
two in sync when changing anything here.
"""

from __future__ import annotations

import math

import numpy as np

IMPL = "python"

_BLOCK = 4096

# distribution / reward / reset variant codes shared with the extension
DIST_DETERMINISTIC, DIST_UNIFORM, DIST_EXPONENTIAL, DIST_PARETO, DIST_EMPIRICAL = range(5)
REW_CONSTANT, REW_BERNOULLI, REW_POWER = range(3)
RESET_ZERO, RESET_CONSTANT, RESET_PROPORTIONAL = range(3)


class _UniformBuffer:
    """Buffered uniforms; block draws yield the same stream as scalar draws."""

    def __init__(self, rng):
        self.rng = rng
        self.buf = rng.random(_BLOCK)
        self.pos = 0

    def next(self) -> float:
        if self.pos >= _BLOCK:
            self.buf = self.rng.random(_BLOCK)
            self.pos = 0
        val = self.buf[self.pos]
        self.pos += 1
        return val


def _quantile(kind: int, a: float, b: float, emp: np.ndarray, q: float) -> float:
    if kind == DIST_DETERMINISTIC:
        return a
    if kind == DIST_UNIFORM:
        return a + q * (b - a)
    if kind == DIST_EXPONENTIAL:
        return -math.log1p(-q) / a
    if kind == DIST_PARETO:
        return a * (1.0 - q) ** (-1.0 / b)
    n = len(emp)
    idx = max(int(math.ceil(q * n)), 1) - 1
    return emp[min(idx, n - 1)]


def _reward(kind: int, a: float, b: float, x: float, buf: _UniformBuffer) -> float:
    if kind == REW_CONSTANT:
        return a
    if kind == REW_BERNOULLI:
        return 1.0 if buf.next() < a else 0.0
    return min(a * x**b, 1.0)


def _reset_cost(kind: int, a: float, t: float) -> float:
    if math.isinf(t) or kind == RESET_ZERO:
        return 0.0
    if kind == RESET_CONSTANT:
        return min(a, t)
    return a * t


# ---------------------------------------------------------------------------
# WalkSAT inner loop
# ---------------------------------------------------------------------------


def walksat_run(n_vars, lits, offsets, noise, max_flips, rng):
    """WalkSAT/SKC flip loop over a flattened clause representation.

    lits: int32 array of signed DIMACS literals, clause c spanning
    lits[offsets[c]:offsets[c+1]]. Returns (solved, flips, assignment) with
    assignment an int8 array of 0/1 values (indexed by variable - 1).
    """
    lits = np.asarray(lits, dtype=np.int32)
    offsets = np.asarray(offsets, dtype=np.int64)
    n_clauses = len(offsets) - 1
    buf = _UniformBuffer(rng)

    assignment = np.zeros(n_vars, dtype=np.int8)
    for v in range(n_vars):
        assignment[v] = 1 if buf.next() >= 0.5 else 0

    if n_clauses == 0:
        return True, 0, assignment

    # occurrence lists per signed literal: occ[0][v] = clauses with +v literal
    pos_occ = [[] for _ in range(n_vars)]
    neg_occ = [[] for _ in range(n_vars)]
    for c in range(n_clauses):
        for j in range(offsets[c], offsets[c + 1]):
            lit = lits[j]
            if lit > 0:
                pos_occ[lit - 1].append(c)
            else:
                neg_occ[-lit - 1].append(c)

    num_true = np.zeros(n_clauses, dtype=np.int32)
    for c in range(n_clauses):
        for j in range(offsets[c], offsets[c + 1]):
            lit = lits[j]
            v = abs(lit) - 1
            if (lit > 0) == bool(assignment[v]):
                num_true[c] += 1

    unsat = []
    pos_in_unsat = np.full(n_clauses, -1, dtype=np.int64)
    for c in range(n_clauses):
        if num_true[c] == 0:
            pos_in_unsat[c] = len(unsat)
            unsat.append(c)

    def flip(v):
        new_val = 1 - assignment[v]
        assignment[v] = new_val
        gain_occ = pos_occ[v] if new_val else neg_occ[v]
        lose_occ = neg_occ[v] if new_val else pos_occ[v]
        for c in gain_occ:
            if num_true[c] == 0:
                # clause leaves the unsat set (swap-remove)
                p = pos_in_unsat[c]
                last = unsat[-1]
                unsat[p] = last
                pos_in_unsat[last] = p
                unsat.pop()
                pos_in_unsat[c] = -1
            num_true[c] += 1
        for c in lose_occ:
            num_true[c] -= 1
            if num_true[c] == 0:
                pos_in_unsat[c] = len(unsat)
                unsat.append(c)

    def break_count(v):
        # clauses where v's current literal is the only satisfying one
        occ = pos_occ[v] if assignment[v] else neg_occ[v]
        return sum(1 for c in occ if num_true[c] == 1)

    flips = 0
    while unsat and flips < max_flips:
        c = unsat[int(buf.next() * len(unsat))]
        lo, hi = offsets[c], offsets[c + 1]
        clen = hi - lo
        if buf.next() < noise:
            j = int(buf.next() * clen)
            v = abs(int(lits[lo + j])) - 1
        else:
            best = -1
            n_ties = 0
            tie_vars = []
            for j in range(lo, hi):
                v = abs(int(lits[j])) - 1
                bc = break_count(v)
                if best < 0 or bc < best:
                    best = bc
                    tie_vars = [v]
                elif bc == best:
                    tie_vars.append(v)
            n_ties = len(tie_vars)
            v = tie_vars[int(buf.next() * n_ties)]
        flip(v)
        flips += 1

    return len(unsat) == 0, flips, assignment


# ---------------------------------------------------------------------------
# Fixed-decision episode (static / fixed-cutoff policies)
# ---------------------------------------------------------------------------


def run_fixed_episode(dk, da, db, emp, rk, ra, rb, ck, ca, cutoff, tau, rng):
    """Run one episode pulling a single (arm, cutoff) decision until the
    cumulative time first exceeds tau. Returns (n_epochs, reward, total_time)."""
    buf = _UniformBuffer(rng)
    s = 0.0
    rew = 0.0
    n = 0
    reset = _reset_cost(ck, ca, cutoff)
    while s <= tau:
        x = _quantile(dk, da, db, emp, buf.next())
        r = _reward(rk, ra, rb, x, buf)
        if math.isinf(cutoff) or x <= cutoff:
            s += x
            rew += r
        else:
            s += cutoff + reset
        n += 1
    return n, rew, s


# ---------------------------------------------------------------------------
# UCB-RB episode
# ---------------------------------------------------------------------------


def run_ucb_rb_episode(
    dist_kind, dist_a, dist_b, emp_flat, emp_off,
    rew_kind, rew_a, rew_b, reset_kind, reset_a,
    grid, tau, alpha, kappa, init_pulls, use_union, rngs, record=False,
):
    """Full UCB-RB episode over K arms and an increasing finite cutoff grid.

    Maintains union index-set statistics per (arm, cutoff) with Welford
    accumulators; returns (n, reward, total_time, pull_counts, trace) where
    trace is (arm, cutoff_index, u, v) arrays when record=True, else None.
    """
    K = len(dist_kind)
    L = len(grid)
    grid = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("UCB-RB requires a finite cutoff grid")
    bufs = [_UniformBuffer(r) for r in rngs]
    emps = [np.asarray(emp_flat[emp_off[k]:emp_off[k + 1]]) for k in range(K)]
    resets = np.array(
        [[_reset_cost(reset_kind[k], reset_a[k], grid[li]) for li in range(L)]
         for k in range(K)]
    )

    tstar = np.zeros((K, L), dtype=np.int64)
    mean_u = np.zeros((K, L))
    m2_u = np.zeros((K, L))
    mean_v = np.zeros((K, L))
    m2_v = np.zeros((K, L))
    pulls = np.zeros((K, L), dtype=np.int64)

    tr_arm, tr_cut, tr_u, tr_v = [], [], [], []

    s = 0.0
    rew = 0.0
    n_done = 0

    def pull(k, li):
        nonlocal s, rew, n_done
        buf = bufs[k]
        x = _quantile(dist_kind[k], dist_a[k], dist_b[k], emps[k], buf.next())
        r = _reward(rew_kind[k], rew_a[k], rew_b[k], x, buf)
        t = grid[li]
        if x <= t:
            u = x
            v = r
        else:
            u = t + resets[k, li]
            v = 0.0
        s += u
        rew += v
        pulls[k, li] += 1
        n_done += 1
        lo = 0 if use_union else li
        for lj in range(lo, li + 1):
            tj = grid[lj]
            if x <= tj:
                uu = x
                vv = r
            else:
                uu = tj + resets[k, lj]
                vv = 0.0
            tstar[k, lj] += 1
            cnt = tstar[k, lj]
            d = uu - mean_u[k, lj]
            mean_u[k, lj] += d / cnt
            m2_u[k, lj] += d * (uu - mean_u[k, lj])
            d = vv - mean_v[k, lj]
            mean_v[k, lj] += d / cnt
            m2_v[k, lj] += d * (vv - mean_v[k, lj])
        if record:
            tr_arm.append(k)
            tr_cut.append(li)
            tr_u.append(u)
            tr_v.append(v)

    # initialization: round-robin sweeps over [K] x [L], truncated on budget
    for _ in range(init_pulls):
        for k in range(K):
            for li in range(L):
                if s > tau:
                    break
                pull(k, li)

    while s <= tau:
        lg = alpha * math.log(max(n_done, 2))
        best_idx = -math.inf
        best_k = 0
        best_l = 0
        for k in range(K):
            for li in range(L):
                cnt = tstar[k, li]
                if cnt == 0:
                    idx = math.inf
                else:
                    var_u = m2_u[k, li] / cnt
                    var_v = m2_v[k, li] / cnt
                    eps = 3.0 * grid[li] * lg / cnt + math.sqrt(2.0 * var_u * lg / cnt)
                    eta = 3.0 * lg / cnt + math.sqrt(2.0 * var_v * lg / cnt)
                    r_hat = mean_v[k, li] / mean_u[k, li]
                    idx = r_hat + kappa * (eta + r_hat * eps) / mean_u[k, li]
                if idx > best_idx or (idx == best_idx and k == best_k and li > best_l):
                    best_idx = idx
                    best_k = k
                    best_l = li
        pull(best_k, best_l)

    trace = None
    if record:
        trace = (
            np.asarray(tr_arm, dtype=np.int32),
            np.asarray(tr_cut, dtype=np.int32),
            np.asarray(tr_u),
            np.asarray(tr_v),
        )
    return n_done, rew, s, pulls, trace
