"""Numba kernels for orthant counting on integer rank matrices.

Points are stored as integer numerators over a common denominator, so every
comparison ``a / ka <= b / kb`` is evaluated exactly as ``a * kb <= b * ka``.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def orthant_counts(ranks, denom, points, point_denom):
    """Count, for each row of `points`, the sample rows lying below it.

    Returns two int64 arrays: ``#{s : R_s / K <= P_t / Kp}`` and the same
    count for the reflected sample ``(K - R_s) / K``.
    """
    n_obs, dim = ranks.shape
    n_pts = points.shape[0]
    lower = np.zeros(n_pts, dtype=np.int64)
    upper = np.zeros(n_pts, dtype=np.int64)
    for t in range(n_pts):
        c = 0
        cb = 0
        for s in range(n_obs):
            ok = True
            for i in range(dim):
                if ranks[s, i] * point_denom > points[t, i] * denom:
                    ok = False
                    break
            if ok:
                c += 1
            ok = True
            for i in range(dim):
                if (denom - ranks[s, i]) * point_denom > points[t, i] * denom:
                    ok = False
                    break
            if ok:
                cb += 1
        lower[t] = c
        upper[t] = cb
    return lower, upper


@numba.njit(cache=True, nogil=True)
def squared_gap_sum(ranks, denom):
    """Sum over sample points of (count below - reflected count below)^2."""
    lower, upper = orthant_counts(ranks, denom, ranks, denom)
    total = 0
    for t in range(lower.shape[0]):
        d = lower[t] - upper[t]
        total += d * d
    return total


@numba.njit(cache=True, nogil=True)
def le_counts(values):
    """Column-wise ``#{s : x_s <= x_t}`` for a 2-D float or int array."""
    n_obs, dim = values.shape
    out = np.empty((n_obs, dim), dtype=np.int64)
    for i in range(dim):
        col = values[:, i]
        order = np.argsort(col, kind="mergesort")
        srt = col[order]
        # walk sorted runs; every member of a tie run gets the run's end index
        j = 0
        while j < n_obs:
            k = j
            while k + 1 < n_obs and srt[k + 1] == srt[j]:
                k += 1
            for r in range(j, k + 1):
                out[order[r], i] = k + 1
            j = k + 1
    return out
