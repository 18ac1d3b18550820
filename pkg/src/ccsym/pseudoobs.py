"""Pseudo-observations and the empirical copula.

A :class:`PseudoSample` stores integer ranks together with their common
denominator, so that ``u = ranks / denom`` and the reflected sample
``1 - u = (denom - ranks) / denom`` are both represented exactly.  All
counting is done on integers and divided once, which makes results
independent of evaluation order.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._kernels import orthant_counts

__all__ = [
    "PseudoSample",
    "normalized_ranks",
    "ecdf_copula",
    "survival_copula",
    "antisymmetrization",
    "symmetrization",
    "reflect",
    "pool_with_reflection",
    "survival_by_inclusion_exclusion",
    "MAX_INCLUSION_EXCLUSION_DIM",
]

MAX_INCLUSION_EXCLUSION_DIM = 20


@dataclass(frozen=True)
class PseudoSample:
    """T x N pseudo-observations ``ranks / denom``.

    Normalized ranks use ``denom = T + 1``; tie-broken bootstrap ranks use
    ``denom = T``.
    """

    ranks: np.ndarray
    denom: int

    def __post_init__(self):
        ranks = np.asarray(self.ranks)
        if ranks.ndim == 1:
            ranks = ranks[:, None]
        if ranks.ndim != 2:
            raise ValueError("ranks must be a 2-D array")
        if not np.issubdtype(ranks.dtype, np.integer):
            raise TypeError("ranks must be integers; use PseudoSample.from_unit for floats")
        denom = int(self.denom)
        if denom < 1:
            raise ValueError("denom must be positive")
        if ranks.size and (ranks.min() < 0 or ranks.max() > denom):
            raise ValueError("ranks must lie in [0, denom]")
        ranks = np.ascontiguousarray(ranks, dtype=np.int64)
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "denom", denom)

    @classmethod
    def from_unit(cls, u, denom=None):
        """Build from values on the grid ``k / denom`` (default ``denom = T + 1``)."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if denom is None:
            denom = u.shape[0] + 1
        scaled = u * denom
        ranks = np.rint(scaled)
        if not np.allclose(scaled, ranks, rtol=0.0, atol=1e-9):
            raise ValueError(f"values are not multiples of 1/{denom}")
        return cls(ranks.astype(np.int64), denom)

    @property
    def u(self) -> np.ndarray:
        return self.ranks / self.denom

    @property
    def t_len(self) -> int:
        return self.ranks.shape[0]

    @property
    def dim(self) -> int:
        return self.ranks.shape[1]

    def __len__(self):
        return self.t_len


def _column_le_counts(values):
    # #{s : x_s <= x_t} per column
    out = np.empty(values.shape, dtype=np.int64)
    for i in range(values.shape[1]):
        col = values[:, i]
        out[:, i] = np.searchsorted(np.sort(col), col, side="right")
    return out


def normalized_ranks(values) -> PseudoSample:
    """Normalized ranks ``#{s : X_si <= X_ti} / (T + 1)`` of each column.

    Ties share the largest rank of their group, exactly as the counting
    definition implies.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"expected a non-empty T x N matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")
    return PseudoSample(_column_le_counts(x), x.shape[0] + 1)


def _as_points(sample, point):
    p = np.asarray(point, dtype=float)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    if p.shape[1] != sample.dim:
        raise ValueError(f"point has dimension {p.shape[1]}, sample has {sample.dim}")
    if np.any(p < 0.0) or np.any(p > 1.0) or np.any(np.isnan(p)):
        raise ValueError("copula points must lie in [0, 1]^N")
    return p, single


def _count_below(u, points):
    # (n_points,) integer counts of rows of u lying componentwise below each point
    return np.array([np.count_nonzero(np.all(u <= q, axis=1)) for q in points], dtype=np.int64)


def _finish(counts, t_len, single):
    vals = counts / t_len
    return float(vals[0]) if single else vals


def ecdf_copula(sample: PseudoSample, point):
    """Empirical copula ``C_T(point) = #{t : U_t <= point} / T``.

    `point` may be a single N-vector or an (n, N) array of points.
    """
    p, single = _as_points(sample, point)
    return _finish(_count_below(sample.u, p), sample.t_len, single)


def survival_copula(sample: PseudoSample, point):
    """Empirical survival copula: the CDF of the reflected sample ``1 - U``."""
    p, single = _as_points(sample, point)
    return _finish(_count_below(reflect(sample).u, p), sample.t_len, single)


def _both_counts(sample, point):
    p, single = _as_points(sample, point)
    c = _count_below(sample.u, p)
    cb = _count_below(reflect(sample).u, p)
    return c, cb, single


def antisymmetrization(sample: PseudoSample, point):
    """``(C_T - C̄_T) / 2``; identically zero for reflection-closed samples."""
    c, cb, single = _both_counts(sample, point)
    vals = (c - cb) / (2 * sample.t_len)
    return float(vals[0]) if single else vals


def symmetrization(sample: PseudoSample, point):
    """``(C_T + C̄_T) / 2``, the empirical copula of the sample pooled with its reflection."""
    c, cb, single = _both_counts(sample, point)
    vals = (c + cb) / (2 * sample.t_len)
    return float(vals[0]) if single else vals


def reflect(sample: PseudoSample) -> PseudoSample:
    """Entrywise ``1 - u``; an involution."""
    return PseudoSample(sample.denom - sample.ranks, sample.denom)


def pool_with_reflection(sample: PseudoSample) -> PseudoSample:
    """Stack the sample on top of its reflection (size 2T, reflection-closed)."""
    return PseudoSample(np.vstack([sample.ranks, sample.denom - sample.ranks]), sample.denom)


def survival_by_inclusion_exclusion(sample: PseudoSample, point):
    """Survival copula through the alternating sum over coordinate subsets.

    ``sum over I of (-1)^|I| * C_{T,I}(1 - point_I)``, where ``C_{T,I}`` is the
    empirical CDF of the sub-vector ``U_I`` and the empty subset contributes 1.
    Agrees with :func:`survival_copula` at points where no ``1 - point_i``
    coincides with a sample coordinate; at such atoms the two differ by the
    mass sitting on the boundary.
    """
    dim = sample.dim
    if dim > MAX_INCLUSION_EXCLUSION_DIM:
        raise ValueError(f"dimension {dim} too large for inclusion-exclusion (max {MAX_INCLUSION_EXCLUSION_DIM})")
    p, single = _as_points(sample, point)
    u = sample.u
    out = np.empty(len(p), dtype=np.int64)
    for j, q in enumerate(p):
        below = u <= (1.0 - q)
        total = sample.t_len
        for k in range(1, dim + 1):
            sign = -1 if k % 2 else 1
            for subset in combinations(range(dim), k):
                total += sign * int(np.count_nonzero(np.all(below[:, subset], axis=1)))
        out[j] = total
    return _finish(out, sample.t_len, single)


def sample_point_counts(sample: PseudoSample):
    """Integer counts ``T*C_T(U_t)`` and ``T*C̄_T(U_t)`` at every sample point."""
    return orthant_counts(sample.ranks, sample.denom, sample.ranks, sample.denom)
