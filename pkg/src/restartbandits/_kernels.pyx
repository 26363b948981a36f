# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot inner loops.

Mirrors _kernels_py.py exactly, including the order in which uniforms are
consumed, so both implementations are bit-identical for the same seeds.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, fabs, log, log1p, pow, sqrt, INFINITY

cnp.import_array()

IMPL = "cython"

DEF BLOCK = 4096

DIST_DETERMINISTIC = 0
DIST_UNIFORM = 1
DIST_EXPONENTIAL = 2
DIST_PARETO = 3
DIST_EMPIRICAL = 4
REW_CONSTANT = 0
REW_BERNOULLI = 1
REW_POWER = 2
RESET_ZERO = 0
RESET_CONSTANT = 1
RESET_PROPORTIONAL = 2


cdef class UniformBuffer:
    cdef object rng
    cdef double[::1] buf
    cdef int pos

    def __init__(self, rng):
        self.rng = rng
        self.buf = rng.random(BLOCK)
        self.pos = 0

    cdef inline double next(self):
        if self.pos >= BLOCK:
            self.buf = self.rng.random(BLOCK)
            self.pos = 0
        cdef double val = self.buf[self.pos]
        self.pos += 1
        return val


cdef inline double _quantile(int kind, double a, double b,
                             const double[::1] emp, double q):
    cdef Py_ssize_t n, idx
    if kind == 0:  # deterministic
        return a
    if kind == 1:  # uniform
        return a + q * (b - a)
    if kind == 2:  # exponential
        return -log1p(-q) / a
    if kind == 3:  # pareto
        return a * pow(1.0 - q, -1.0 / b)
    n = emp.shape[0]
    idx = <Py_ssize_t> ceil(q * n)
    if idx < 1:
        idx = 1
    idx -= 1
    if idx > n - 1:
        idx = n - 1
    return emp[idx]


cdef inline double _reward(int kind, double a, double b, double x,
                           UniformBuffer buf):
    cdef double r
    if kind == 0:
        return a
    if kind == 1:
        return 1.0 if buf.next() < a else 0.0
    r = a * pow(x, b)
    return r if r < 1.0 else 1.0


cdef inline double _reset_cost(int kind, double a, double t):
    if t == INFINITY or kind == 0:
        return 0.0
    if kind == 1:
        return a if a < t else t
    return a * t


# ---------------------------------------------------------------------------
# WalkSAT inner loop
# ---------------------------------------------------------------------------


def walksat_run(int n_vars, lits_in, offsets_in, double noise,
                long long max_flips, rng):
    cdef cnp.int32_t[::1] lits = np.ascontiguousarray(lits_in, dtype=np.int32)
    cdef cnp.int64_t[::1] offsets = np.ascontiguousarray(offsets_in, dtype=np.int64)
    cdef Py_ssize_t n_clauses = offsets.shape[0] - 1
    cdef UniformBuffer buf = UniformBuffer(rng)
    cdef Py_ssize_t v, c, j, p, last, lo, hi, clen, best, bc, n_ties
    cdef int lit

    assignment_arr = np.zeros(n_vars, dtype=np.int8)
    cdef cnp.int8_t[::1] assignment = assignment_arr
    for v in range(n_vars):
        assignment[v] = 1 if buf.next() >= 0.5 else 0

    if n_clauses == 0:
        return True, 0, assignment_arr

    # occurrence lists (CSR layout) per signed literal
    pos_cnt = np.zeros(n_vars + 1, dtype=np.int64)
    neg_cnt = np.zeros(n_vars + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] pcnt = pos_cnt
    cdef cnp.int64_t[::1] ncnt = neg_cnt
    for j in range(lits.shape[0]):
        lit = lits[j]
        if lit > 0:
            pcnt[lit] += 1
        else:
            ncnt[-lit] += 1
    pos_off_arr = np.cumsum(pos_cnt)
    neg_off_arr = np.cumsum(neg_cnt)
    cdef cnp.int64_t[::1] pos_off = np.concatenate(([0], pos_off_arr[1:]))
    cdef cnp.int64_t[::1] neg_off = np.concatenate(([0], neg_off_arr[1:]))
    cdef cnp.int64_t[::1] pos_fill = np.zeros(n_vars, dtype=np.int64)
    cdef cnp.int64_t[::1] neg_fill = np.zeros(n_vars, dtype=np.int64)
    cdef cnp.int64_t[::1] pos_occ = np.zeros(max(pos_off[n_vars], 1), dtype=np.int64)
    cdef cnp.int64_t[::1] neg_occ = np.zeros(max(neg_off[n_vars], 1), dtype=np.int64)
    for c in range(n_clauses):
        for j in range(offsets[c], offsets[c + 1]):
            lit = lits[j]
            if lit > 0:
                v = lit - 1
                pos_occ[pos_off[v] + pos_fill[v]] = c
                pos_fill[v] += 1
            else:
                v = -lit - 1
                neg_occ[neg_off[v] + neg_fill[v]] = c
                neg_fill[v] += 1

    cdef cnp.int32_t[::1] num_true = np.zeros(n_clauses, dtype=np.int32)
    for c in range(n_clauses):
        for j in range(offsets[c], offsets[c + 1]):
            lit = lits[j]
            v = (lit if lit > 0 else -lit) - 1
            if (lit > 0) == (assignment[v] != 0):
                num_true[c] += 1

    cdef cnp.int64_t[::1] unsat = np.zeros(n_clauses, dtype=np.int64)
    cdef cnp.int64_t[::1] pos_in_unsat = np.full(n_clauses, -1, dtype=np.int64)
    cdef Py_ssize_t n_unsat = 0
    for c in range(n_clauses):
        if num_true[c] == 0:
            pos_in_unsat[c] = n_unsat
            unsat[n_unsat] = c
            n_unsat += 1

    cdef cnp.int64_t[::1] tie_vars = np.zeros(64, dtype=np.int64)
    cdef long long flips = 0
    cdef Py_ssize_t new_val, cc, k

    while n_unsat > 0 and flips < max_flips:
        c = unsat[<Py_ssize_t>(buf.next() * n_unsat)]
        lo = offsets[c]
        hi = offsets[c + 1]
        clen = hi - lo
        if buf.next() < noise:
            j = <Py_ssize_t>(buf.next() * clen)
            lit = lits[lo + j]
            v = (lit if lit > 0 else -lit) - 1
        else:
            best = -1
            n_ties = 0
            if clen > tie_vars.shape[0]:
                tie_vars = np.zeros(clen, dtype=np.int64)
            for j in range(lo, hi):
                lit = lits[j]
                v = (lit if lit > 0 else -lit) - 1
                # break count: clauses critically satisfied by v's literal
                bc = 0
                if assignment[v]:
                    for k in range(pos_off[v], pos_off[v + 1]):
                        if num_true[pos_occ[k]] == 1:
                            bc += 1
                else:
                    for k in range(neg_off[v], neg_off[v + 1]):
                        if num_true[neg_occ[k]] == 1:
                            bc += 1
                if best < 0 or bc < best:
                    best = bc
                    tie_vars[0] = v
                    n_ties = 1
                elif bc == best:
                    tie_vars[n_ties] = v
                    n_ties += 1
            v = tie_vars[<Py_ssize_t>(buf.next() * n_ties)]
        # flip v
        new_val = 1 - assignment[v]
        assignment[v] = <cnp.int8_t> new_val
        if new_val:
            for k in range(pos_off[v], pos_off[v + 1]):
                cc = pos_occ[k]
                if num_true[cc] == 0:
                    p = pos_in_unsat[cc]
                    last = unsat[n_unsat - 1]
                    unsat[p] = last
                    pos_in_unsat[last] = p
                    n_unsat -= 1
                    pos_in_unsat[cc] = -1
                num_true[cc] += 1
            for k in range(neg_off[v], neg_off[v + 1]):
                cc = neg_occ[k]
                num_true[cc] -= 1
                if num_true[cc] == 0:
                    pos_in_unsat[cc] = n_unsat
                    unsat[n_unsat] = cc
                    n_unsat += 1
        else:
            for k in range(neg_off[v], neg_off[v + 1]):
                cc = neg_occ[k]
                if num_true[cc] == 0:
                    p = pos_in_unsat[cc]
                    last = unsat[n_unsat - 1]
                    unsat[p] = last
                    pos_in_unsat[last] = p
                    n_unsat -= 1
                    pos_in_unsat[cc] = -1
                num_true[cc] += 1
            for k in range(pos_off[v], pos_off[v + 1]):
                cc = pos_occ[k]
                num_true[cc] -= 1
                if num_true[cc] == 0:
                    pos_in_unsat[cc] = n_unsat
                    unsat[n_unsat] = cc
                    n_unsat += 1
        flips += 1

    return n_unsat == 0, int(flips), assignment_arr


# ---------------------------------------------------------------------------
# Fixed-decision episode
# ---------------------------------------------------------------------------


def run_fixed_episode(int dk, double da, double db, emp_in,
                      int rk, double ra, double rb, int ck, double ca,
                      double cutoff, double tau, rng):
    cdef const double[::1] emp = np.ascontiguousarray(emp_in, dtype=float)
    cdef UniformBuffer buf = UniformBuffer(rng)
    cdef double s = 0.0, rew = 0.0, x, r
    cdef long long n = 0
    cdef double reset = _reset_cost(ck, ca, cutoff)
    cdef bint inf_cutoff = cutoff == INFINITY
    while s <= tau:
        x = _quantile(dk, da, db, emp, buf.next())
        r = _reward(rk, ra, rb, x, buf)
        if inf_cutoff or x <= cutoff:
            s += x
            rew += r
        else:
            s += cutoff + reset
        n += 1
    return int(n), rew, s


# ---------------------------------------------------------------------------
# UCB-RB episode
# ---------------------------------------------------------------------------


def run_ucb_rb_episode(
    dist_kind_in, dist_a_in, dist_b_in, emp_flat_in, emp_off_in,
    rew_kind_in, rew_a_in, rew_b_in, reset_kind_in, reset_a_in,
    grid_in, double tau, double alpha, double kappa,
    int init_pulls, bint use_union, rngs, bint record=False,
):
    cdef cnp.int32_t[::1] dist_kind = np.ascontiguousarray(dist_kind_in, dtype=np.int32)
    cdef double[::1] dist_a = np.ascontiguousarray(dist_a_in, dtype=float)
    cdef double[::1] dist_b = np.ascontiguousarray(dist_b_in, dtype=float)
    cdef const double[::1] emp_flat = np.ascontiguousarray(emp_flat_in, dtype=float)
    cdef cnp.int64_t[::1] emp_off = np.ascontiguousarray(emp_off_in, dtype=np.int64)
    cdef cnp.int32_t[::1] rew_kind = np.ascontiguousarray(rew_kind_in, dtype=np.int32)
    cdef double[::1] rew_a = np.ascontiguousarray(rew_a_in, dtype=float)
    cdef double[::1] rew_b = np.ascontiguousarray(rew_b_in, dtype=float)
    cdef cnp.int32_t[::1] reset_kind = np.ascontiguousarray(reset_kind_in, dtype=np.int32)
    cdef double[::1] reset_a = np.ascontiguousarray(reset_a_in, dtype=float)
    cdef double[::1] grid = np.ascontiguousarray(grid_in, dtype=float)

    cdef Py_ssize_t K = dist_kind.shape[0]
    cdef Py_ssize_t L = grid.shape[0]
    cdef Py_ssize_t k, li, lj
    for li in range(L):
        if grid[li] == INFINITY:
            raise ValueError("UCB-RB requires a finite cutoff grid")

    bufs_list = [UniformBuffer(rng_obj) for rng_obj in rngs]

    resets_arr = np.zeros((K, L))
    cdef double[:, ::1] resets = resets_arr
    for k in range(K):
        for li in range(L):
            resets[k, li] = _reset_cost(reset_kind[k], reset_a[k], grid[li])

    tstar_arr = np.zeros((K, L), dtype=np.int64)
    pulls_arr = np.zeros((K, L), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] tstar = tstar_arr
    cdef cnp.int64_t[:, ::1] pulls = pulls_arr
    cdef double[:, ::1] mean_u = np.zeros((K, L))
    cdef double[:, ::1] m2_u = np.zeros((K, L))
    cdef double[:, ::1] mean_v = np.zeros((K, L))
    cdef double[:, ::1] m2_v = np.zeros((K, L))

    tr_arm, tr_cut, tr_u, tr_v = [], [], [], []

    cdef double s = 0.0, rew = 0.0
    cdef long long n_done = 0
    cdef double x, r, t, u, v, uu, vv, d, lg, var_u, var_v, eps, eta, r_hat, idx
    cdef double best_idx
    cdef Py_ssize_t best_k, best_l, cnt, lo
    cdef UniformBuffer buf
    cdef int sweep

    # initialization: round-robin sweeps over [K] x [L], truncated on budget
    for sweep in range(init_pulls):
        for k in range(K):
            for li in range(L):
                if s > tau:
                    break
                # ---- pull (k, li) ----
                buf = <UniformBuffer> bufs_list[k]
                x = _quantile(dist_kind[k], dist_a[k], dist_b[k],
                              emp_flat[emp_off[k]:emp_off[k + 1]], buf.next())
                r = _reward(rew_kind[k], rew_a[k], rew_b[k], x, buf)
                t = grid[li]
                if x <= t:
                    u = x; v = r
                else:
                    u = t + resets[k, li]; v = 0.0
                s += u; rew += v
                pulls[k, li] += 1
                n_done += 1
                lo = 0 if use_union else li
                for lj in range(lo, li + 1):
                    if x <= grid[lj]:
                        uu = x; vv = r
                    else:
                        uu = grid[lj] + resets[k, lj]; vv = 0.0
                    tstar[k, lj] += 1
                    cnt = tstar[k, lj]
                    d = uu - mean_u[k, lj]
                    mean_u[k, lj] += d / cnt
                    m2_u[k, lj] += d * (uu - mean_u[k, lj])
                    d = vv - mean_v[k, lj]
                    mean_v[k, lj] += d / cnt
                    m2_v[k, lj] += d * (vv - mean_v[k, lj])
                if record:
                    tr_arm.append(k); tr_cut.append(li)
                    tr_u.append(u); tr_v.append(v)

    while s <= tau:
        lg = alpha * log(<double> (n_done if n_done > 2 else 2))
        best_idx = -INFINITY
        best_k = 0
        best_l = 0
        for k in range(K):
            for li in range(L):
                cnt = tstar[k, li]
                if cnt == 0:
                    idx = INFINITY
                else:
                    var_u = m2_u[k, li] / cnt
                    var_v = m2_v[k, li] / cnt
                    eps = 3.0 * grid[li] * lg / cnt + sqrt(2.0 * var_u * lg / cnt)
                    eta = 3.0 * lg / cnt + sqrt(2.0 * var_v * lg / cnt)
                    r_hat = mean_v[k, li] / mean_u[k, li]
                    idx = r_hat + kappa * (eta + r_hat * eps) / mean_u[k, li]
                if idx > best_idx or (idx == best_idx and k == best_k and li > best_l):
                    best_idx = idx
                    best_k = k
                    best_l = li
        # ---- pull (best_k, best_l) ----
        k = best_k; li = best_l
        buf = <UniformBuffer> bufs_list[k]
        x = _quantile(dist_kind[k], dist_a[k], dist_b[k],
                      emp_flat[emp_off[k]:emp_off[k + 1]], buf.next())
        r = _reward(rew_kind[k], rew_a[k], rew_b[k], x, buf)
        t = grid[li]
        if x <= t:
            u = x; v = r
        else:
            u = t + resets[k, li]; v = 0.0
        s += u; rew += v
        pulls[k, li] += 1
        n_done += 1
        lo = 0 if use_union else li
        for lj in range(lo, li + 1):
            if x <= grid[lj]:
                uu = x; vv = r
            else:
                uu = grid[lj] + resets[k, lj]; vv = 0.0
            tstar[k, lj] += 1
            cnt = tstar[k, lj]
            d = uu - mean_u[k, lj]
            mean_u[k, lj] += d / cnt
            m2_u[k, lj] += d * (uu - mean_u[k, lj])
            d = vv - mean_v[k, lj]
            mean_v[k, lj] += d / cnt
            m2_v[k, lj] += d * (vv - mean_v[k, lj])
        if record:
            tr_arm.append(k); tr_cut.append(li)
            tr_u.append(u); tr_v.append(v)

    trace = None
    if record:
        trace = (
            np.asarray(tr_arm, dtype=np.int32),
            np.asarray(tr_cut, dtype=np.int32),
            np.asarray(tr_u),
            np.asarray(tr_v),
        )
    return int(n_done), rew, s, pulls_arr, trace
