"""Finite-sample symmetry diagnostics: exceedance moments and odd mixed moments.

Reductions use ``math.fsum`` (exactly rounded, order independent), so a
sample pooled with its own negation yields mirror-image statistics exactly.
"""

import csv
import io
import math
from dataclasses import dataclass, fields
from itertools import combinations, combinations_with_replacement

import numpy as np

__all__ = [
    "ExceedanceStats",
    "exceedance_stats",
    "exceedance_table",
    "exceedance_table_to_csv",
    "OddMoment",
    "odd_moment_check",
    "portfolio_skewness",
]


@dataclass(frozen=True)
class ExceedanceStats:
    """Conditional moments on the joint upper and lower tail sets at level `a`.

    Undefined quantities (fewer than 2 points in a set, or a zero conditional
    variance) are ``None``.
    """

    a: float
    n_plus: int
    n_minus: int
    mu_plus: tuple | None
    mu_minus: tuple | None
    sigma_plus: tuple | None
    sigma_minus: tuple | None
    cov_plus: float | None
    cov_minus: float | None
    rho_plus: float | None
    rho_minus: float | None


def _mean(v):
    return math.fsum(v) / len(v)


def _standardize(x):
    mu = _mean(x)
    sd = math.sqrt(math.fsum((x - mu) ** 2) / len(x))
    if sd == 0.0:
        raise ValueError("series has zero sample standard deviation")
    return (x - mu) / sd


def _tail_moments(z1, z2, sel):
    n = int(np.count_nonzero(sel))
    if n < 2:
        return n, None, None, None, None
    a, b = z1[sel], z2[sel]
    m1, m2 = _mean(a), _mean(b)
    d1, d2 = a - m1, b - m2
    s1 = math.sqrt(math.fsum(d1 * d1) / n)
    s2 = math.sqrt(math.fsum(d2 * d2) / n)
    cov = math.fsum(d1 * d2) / n
    rho = cov / (s1 * s2) if s1 > 0 and s2 > 0 else None
    return n, (m1, m2), (s1, s2), cov, rho


def exceedance_stats(x1, x2, a: float) -> ExceedanceStats:
    """Exceedance means, deviations, covariance and correlation at level `a`.

    Both series are standardized by their own sample mean and (1/T) standard
    deviation; the upper set is ``{z1 > a, z2 > a}`` and the lower set
    ``{z1 < -a, z2 < -a}``.  Conditional moments are plug-in (1/n).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape or x1.ndim != 1:
        raise ValueError("x1 and x2 must be 1-D arrays of equal length")
    if len(x1) < 2:
        raise ValueError("need at least 2 observations")
    z1, z2 = _standardize(x1), _standardize(x2)
    up = _tail_moments(z1, z2, (z1 > a) & (z2 > a))
    lo = _tail_moments(z1, z2, (z1 < -a) & (z2 < -a))
    return ExceedanceStats(a, up[0], lo[0], up[1], lo[1], up[2], lo[2], up[3], lo[3], up[4], lo[4])


def exceedance_table(values, levels, labels=None) -> list[dict]:
    """Exceedance statistics for every column pair and level."""
    x = np.asarray(values, dtype=float)
    if labels is None:
        labels = [f"c{i + 1}" for i in range(x.shape[1])]
    rows = []
    for i, j in combinations(range(x.shape[1]), 2):
        for a in levels:
            st = exceedance_stats(x[:, i], x[:, j], a)
            row = {"series_1": labels[i], "series_2": labels[j]}
            for f in fields(st):
                val = getattr(st, f.name)
                if isinstance(val, tuple):
                    row[f"{f.name}_1"], row[f"{f.name}_2"] = val
                elif val is None and f.name in ("mu_plus", "mu_minus", "sigma_plus", "sigma_minus"):
                    row[f"{f.name}_1"] = row[f"{f.name}_2"] = None
                else:
                    row[f.name] = val
            rows.append(row)
    return rows


def exceedance_table_to_csv(rows) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else (repr(v) if isinstance(v, float) else v)) for k, v in row.items()})
    return buf.getvalue()


@dataclass(frozen=True)
class OddMoment:
    index: tuple
    value: float
    normalized: float


def _odd_indices(dim, max_order):
    for order in range(1, max_order + 1, 2):
        for combo in combinations_with_replacement(range(dim), order):
            yield tuple(int(np.count_nonzero(np.asarray(combo) == i)) for i in range(dim))


def odd_moment_check(values, max_order: int) -> list[OddMoment]:
    """Sample mixed central moments ``mean(prod_i (x_i - mean_i)^m_i)`` with odd ``sum(m)``.

    `normalized` divides by ``mean(prod_i |x_i - mean_i|^m_i)``, giving a scale
    free number in [-1, 1].
    """
    if max_order < 1:
        raise ValueError(f"max_order must be at least 1, got {max_order}")
    x = np.asarray(values, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    t_len, dim = x.shape
    centred = np.column_stack([x[:, i] - _mean(x[:, i]) for i in range(dim)])
    out = []
    for index in _odd_indices(dim, max_order):
        term = np.ones(t_len)
        for i, m in enumerate(index):
            if m:
                term = term * centred[:, i] ** m
        value = math.fsum(term) / t_len
        scale = math.fsum(np.abs(term)) / t_len
        out.append(OddMoment(index, value, value / scale if scale > 0 else 0.0))
    return out


def portfolio_skewness(values, weights=None) -> float:
    """Sample skewness of the portfolio ``X @ w`` (equal weights by default)."""
    x = np.asarray(values, dtype=float)
    w = np.full(x.shape[1], 1.0 / x.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    r = x @ w
    d = r - _mean(r)
    m2 = math.fsum(d * d) / len(d)
    m3 = math.fsum(d**3) / len(d)
    return m3 / m2**1.5
