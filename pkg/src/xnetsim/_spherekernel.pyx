# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled sphere-search kernel.

Same algorithm, arithmetic ordering, and tie-breaking as the pure NumPy
kernel in _sphere_py.py; the two are interchangeable and are compared
for exact equality in the test suite. Keep any change mirrored there.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double INF = float("inf")


def sphere_search(double[:, ::1] r, double[::1] z, double[::1] pts_re, double[::1] pts_im):
    """See _sphere_py.sphere_search; signature and results are identical."""
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t n_sym = n // 2
    cdef Py_ssize_t n_pts = pts_re.shape[0]

    zrun_a = np.empty((n_sym, n), dtype=np.float64)
    cost_a = np.empty((n_sym, n_pts), dtype=np.float64)
    order_a = np.empty((n_sym, n_pts), dtype=np.int64)
    rank_a = np.zeros(n_sym, dtype=np.int64)
    acc_a = np.zeros(n_sym, dtype=np.float64)
    cur_a = np.zeros(n_sym, dtype=np.int64)
    best_a = np.full(n_sym, -1, dtype=np.int64)

    cdef double[:, ::1] zrun = zrun_a
    cdef double[:, ::1] cost = cost_a
    cdef long long[:, ::1] order = order_a
    cdef long long[::1] rank = rank_a
    cdef double[::1] acc = acc_a
    cdef long long[::1] cur = cur_a
    cdef long long[::1] best_idx = best_a

    cdef double best = INF
    cdef long long nodes = 0
    cdef Py_ssize_t j, d, p, q, i
    cdef long long cand, key
    cdef double partial, c_re, c_im, ck, pr, pi
    cdef bint lex_smaller

    j = n_sym - 1
    for i in range(n):
        zrun[j, i] = z[i]
    acc[j] = 0.0
    _enter(zrun, cost, order, rank, r, pts_re, pts_im, j, n_pts)

    while True:
        if rank[j] >= n_pts:
            j += 1
            if j == n_sym:
                break
            rank[j] += 1
            continue
        cand = order[j, rank[j]]
        partial = acc[j] + cost[j, cand]
        if partial > best:
            # candidates are sorted, so every sibling is at least as bad
            j += 1
            if j == n_sym:
                break
            rank[j] += 1
            continue
        nodes += 1
        cur[j] = cand
        if j == 0:
            lex_smaller = False
            if partial == best:
                for i in range(n_sym):
                    if cur[i] != best_idx[i]:
                        lex_smaller = cur[i] < best_idx[i]
                        break
            if partial < best or (partial == best and lex_smaller):
                best = partial
                for i in range(n_sym):
                    best_idx[i] = cur[i]
            rank[j] += 1
        else:
            d = 2 * j
            pr = pts_re[cand]
            pi = pts_im[cand]
            for i in range(d):
                zrun[j - 1, i] = zrun[j, i] - r[i, d] * pr - r[i, d + 1] * pi
            acc[j - 1] = partial
            j -= 1
            _enter(zrun, cost, order, rank, r, pts_re, pts_im, j, n_pts)

    return best_a, float(best), int(nodes)


cdef inline void _enter(
    double[:, ::1] zrun,
    double[:, ::1] cost,
    long long[:, ::1] order,
    long long[::1] rank,
    double[:, ::1] r,
    double[::1] pts_re,
    double[::1] pts_im,
    Py_ssize_t j,
    Py_ssize_t n_pts,
):
    cdef Py_ssize_t d = 2 * j
    cdef Py_ssize_t p, q
    cdef double c_re, c_im, ck
    cdef long long key
    for p in range(n_pts):
        c_im = zrun[j, d + 1] - r[d + 1, d + 1] * pts_im[p]
        c_re = zrun[j, d] - r[d, d] * pts_re[p] - r[d, d + 1] * pts_im[p]
        cost[j, p] = c_re * c_re + c_im * c_im
        order[j, p] = p
    # stable insertion sort by cost, equal costs keep point-index order
    for p in range(1, n_pts):
        key = order[j, p]
        ck = cost[j, key]
        q = p - 1
        while q >= 0 and cost[j, order[j, q]] > ck:
            order[j, q + 1] = order[j, q]
            q -= 1
        order[j, q + 1] = key
    rank[j] = 0
