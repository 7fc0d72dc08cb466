"""Pure NumPy sphere-search kernel.

Reference implementation of the depth-first Schnorr-Euchner search used
by the decoder; the compiled extension in _spherekernel.pyx implements
the same algorithm with identical arithmetic ordering, so the two return
bit-identical results and differ only in speed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["sphere_search"]


def sphere_search(
    r: np.ndarray, z: np.ndarray, pts_re: np.ndarray, pts_im: np.ndarray
) -> tuple[np.ndarray, float, int]:
    """Depth-first search for argmin_x ||z - R xt||^2 over constellation
    symbol vectors, where R is upper triangular and xt interleaves the
    real and imaginary parts of the symbols.

    Levels are complex symbols: level j owns real dimensions (2j, 2j+1)
    and is visited from the last symbol upward, so the triangular
    structure lets partial costs accumulate exactly. At each level the
    candidate points are sorted by their two-dimensional partial cost
    (stable sort, point index breaks ties), which makes the first leaf a
    Babai-style estimate whose cost seeds the pruning radius. A subtree
    is pruned only when its partial cost strictly exceeds the best leaf,
    and equal-cost leaves are resolved toward the lexicographically
    smaller index tuple, matching the exhaustive decoder's first-minimum
    convention exactly.

    Returns (index per symbol, best metric, visited node count).
    """
    n = r.shape[0]
    n_sym = n // 2
    n_pts = len(pts_re)
    zrun = np.empty((n_sym, n), dtype=np.float64)
    cost = np.empty((n_sym, n_pts), dtype=np.float64)
    order = np.empty((n_sym, n_pts), dtype=np.int64)
    rank = np.zeros(n_sym, dtype=np.int64)
    acc = np.zeros(n_sym, dtype=np.float64)
    cur = np.zeros(n_sym, dtype=np.int64)
    best_idx = np.full(n_sym, -1, dtype=np.int64)
    best = np.inf
    nodes = 0

    def enter(j: int) -> None:
        d = 2 * j
        c_im = zrun[j, d + 1] - r[d + 1, d + 1] * pts_im
        c_re = zrun[j, d] - r[d, d] * pts_re - r[d, d + 1] * pts_im
        cost[j] = c_re * c_re + c_im * c_im
        order[j] = np.argsort(cost[j], kind="stable")
        rank[j] = 0

    j = n_sym - 1
    zrun[j] = z
    acc[j] = 0.0
    enter(j)
    while True:
        if rank[j] >= n_pts:
            j += 1
            if j == n_sym:
                break
            rank[j] += 1
            continue
        cand = int(order[j, rank[j]])
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
            if partial < best or (partial == best and _lex_less(cur, best_idx)):
                best = partial
                best_idx[:] = cur
            rank[j] += 1
        else:
            d = 2 * j
            zrun[j - 1, :d] = zrun[j, :d] - r[:d, d] * pts_re[cand] - r[:d, d + 1] * pts_im[cand]
            acc[j - 1] = partial
            j -= 1
            enter(j)
    return best_idx, float(best), nodes


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    for x, y in zip(a, b):
        if x != y:
            return x < y
    return False
