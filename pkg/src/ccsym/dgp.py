"""Simulation designs for size and power studies.

The main design is a one-factor model with a skewed-t common factor:

    Z_t = phi * Z_{t-1} + sqrt(1 - phi^2) * eps_t,   eps_t ~ skew-t(gamma, nu)
    X_ti = beta_{g(i)} * Z_t + e_ti,                  e_ti ~ t(nu), unit variance

Skewness of the factor (``gamma != 0``) makes the copula of X centrally
asymmetric; ``gamma = 0`` gives an exactly symmetric design.  A Clayton
sample provides a second, strongly lower-tail dependent alternative.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .exceptions import ConfigError
from .streams import derive_seed, stream
from .symmetry_test import BootstrapConfig, run_test

__all__ = [
    "FactorDgpSpec",
    "skew_t_draw",
    "standardized_t_draw",
    "group_assignment",
    "default_groups",
    "factor_copula_sample",
    "clayton_sample",
    "PowerRow",
    "rejection_rates",
    "power_study",
    "power_rows_to_csv",
]

DEFAULT_LEVELS = (0.01, 0.05, 0.10)


def _check_nu(nu):
    if not nu > 2:
        raise ConfigError(f"degrees of freedom must exceed 2, got {nu}")


def standardized_t_draw(nu, rng, size=None):
    """Student-t draws rescaled to unit variance."""
    _check_nu(nu)
    return rng.standard_t(nu, size=size) * math.sqrt((nu - 2.0) / nu)


def _hansen_constants(gamma, nu):
    log_c = gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * math.log(math.pi * (nu - 2))
    a = 4.0 * gamma * math.exp(log_c) * (nu - 2) / (nu - 1)
    b = math.sqrt(1.0 + 3.0 * gamma**2 - a**2)
    return a, b


def skew_t_draw(gamma, nu, rng, size=None):
    """Hansen's skewed-t with skewness `gamma` in [-1, 1]: zero mean, unit variance.

    Sampled as a two-piece scaled t: the left half of a unit-variance t is
    stretched by ``1 - gamma`` and the right half by ``1 + gamma``, then the
    result is recentred and rescaled.  ``gamma = 0`` is exactly the
    unit-variance Student-t.
    """
    _check_nu(nu)
    if not -1.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must lie in [-1, 1], got {gamma}")
    a, b = _hansen_constants(gamma, nu)
    w = np.abs(standardized_t_draw(nu, rng, size=size))
    left = rng.random(size=size) < (1.0 - gamma) / 2.0
    y = np.where(left, -(1.0 - gamma) * w, (1.0 + gamma) * w)
    out = (y - a) / b
    return float(out) if size is None else out


def default_groups(n_series: int) -> int:
    return 2 if n_series <= 10 else 5


def group_assignment(n_series: int, n_groups: int) -> np.ndarray:
    """Contiguous groups of size ``N // G``; the remainder goes one each to the first groups."""
    if not 1 <= n_groups <= n_series:
        raise ConfigError(f"need 1 <= groups <= N, got G={n_groups}, N={n_series}")
    base, extra = divmod(n_series, n_groups)
    sizes = [base + (1 if g < extra else 0) for g in range(n_groups)]
    return np.repeat(np.arange(n_groups), sizes)


@dataclass(frozen=True)
class FactorDgpSpec:
    n_series: int
    n_obs: int
    gamma: float = 0.0
    nu: float = 6.0
    n_groups: int | None = None
    loadings: float | tuple = 1.0
    phi: float = 0.5
    seed: int = 0
    burn_in: int = 1000

    def __post_init__(self):
        if self.n_series < 1 or self.n_obs < 1:
            raise ConfigError("n_series and n_obs must be positive")
        _check_nu(self.nu)
        if not -1.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [-1, 1], got {self.gamma}")
        if not 0.0 <= self.phi < 1.0:
            raise ConfigError(f"phi must lie in [0, 1), got {self.phi}")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be non-negative")
        group_assignment(self.n_series, self.groups)
        beta = self.group_loadings
        if len(beta) != self.groups or np.any(beta < 0):
            raise ConfigError(f"need {self.groups} non-negative loadings, got {self.loadings!r}")

    @property
    def groups(self) -> int:
        return default_groups(self.n_series) if self.n_groups is None else self.n_groups

    @property
    def group_loadings(self) -> np.ndarray:
        if np.isscalar(self.loadings):
            return np.full(self.groups, float(self.loadings))
        return np.asarray(self.loadings, dtype=float)

    @property
    def series_loadings(self) -> np.ndarray:
        return self.group_loadings[group_assignment(self.n_series, self.groups)]


def factor_copula_sample(spec: FactorDgpSpec, rng=None) -> np.ndarray:
    """Raw T x N panel from the skewed-t AR(1) factor model.

    Draw order: factor innovations (burn-in followed by T), then the T x N
    idiosyncratic terms.  Without `rng` the stream ``(spec.seed,)`` is used.
    """
    if rng is None:
        rng = stream(spec.seed)
    n_total = spec.burn_in + spec.n_obs
    eps = skew_t_draw(spec.gamma, spec.nu, rng, size=n_total)
    scale = math.sqrt(1.0 - spec.phi**2)
    z = np.empty(n_total)
    prev = 0.0
    for t in range(n_total):
        prev = spec.phi * prev + scale * eps[t]
        z[t] = prev
    z = z[spec.burn_in:]
    e = standardized_t_draw(spec.nu, rng, size=(spec.n_obs, spec.n_series))
    return z[:, None] * spec.series_loadings[None, :] + e


def clayton_sample(theta: float, n_obs: int, n_series: int, rng) -> np.ndarray:
    """Clayton copula sample via the gamma-frailty construction.

    ``U_i = (1 + E_i / V)^(-1/theta)`` with ``V ~ Gamma(1/theta)`` and
    independent unit exponentials ``E_i``.
    """
    if not theta > 0:
        raise ConfigError(f"theta must be positive, got {theta}")
    v = rng.gamma(1.0 / theta, 1.0, size=n_obs)
    e = rng.standard_exponential(size=(n_obs, n_series))
    return (1.0 + e / v[:, None]) ** (-1.0 / theta)


@dataclass(frozen=True)
class PowerRow:
    gamma: float
    t: int
    n: int
    level: float
    rejection_rate: float
    mc_se: float
    mc_reps: int
    seed: int


def rejection_rates(
    simulate: Callable[[np.random.Generator], np.ndarray],
    mc_reps: int,
    config: BootstrapConfig,
    levels: Sequence[float] = DEFAULT_LEVELS,
    seed: int = 0,
    cell: int = 0,
    threads: int = 1,
) -> tuple[dict, np.ndarray]:
    """Monte Carlo rejection frequency of the test at each nominal level.

    Replicate r draws its data from stream ``(seed, cell, r, 0)`` and runs the
    bootstrap with seed ``derive_seed(seed, cell, r, 1)``.  A test rejects at
    level alpha when its p-value is at most alpha.  Returns the rates and
    the p-values.
    """
    if mc_reps < 1:
        raise ConfigError("mc_reps must be positive")

    def one(r):
        x = simulate(stream(seed, cell, r, 0))
        cfg = replace(config, seed=derive_seed(seed, cell, r, 1))
        return run_test(x, cfg).p_value

    if threads <= 1:
        pvals = np.array([one(r) for r in range(mc_reps)])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pvals = np.array(list(pool.map(one, range(mc_reps))))
    return {lvl: float(np.mean(pvals <= lvl)) for lvl in levels}, pvals


def power_study(
    gammas: Sequence[float],
    t_values: Sequence[int],
    n_values: Sequence[int],
    mc_reps: int,
    config: BootstrapConfig = BootstrapConfig(),
    levels: Sequence[float] = DEFAULT_LEVELS,
    seed: int = 0,
    threads: int = 1,
    nu: float = 6.0,
    phi: float = 0.5,
    loading: float = 1.0,
) -> list[PowerRow]:
    """Rejection-rate table over the (gamma, T, N) grid of the factor design.

    Cells are indexed in grid order (gamma outermost, N innermost); that index
    keys the random streams of the cell.
    """
    if not gammas or not t_values or not n_values:
        raise ConfigError("power grid is empty")
    rows = []
    cell = 0
    for gamma in gammas:
        for t_len in t_values:
            for n in n_values:
                spec = FactorDgpSpec(n_series=n, n_obs=t_len, gamma=gamma, nu=nu, phi=phi, loadings=loading)
                rates, _ = rejection_rates(
                    lambda rng, spec=spec: factor_copula_sample(spec, rng),
                    mc_reps, config, levels, seed=seed, cell=cell, threads=threads,
                )
                for lvl in levels:
                    p = rates[lvl]
                    rows.append(PowerRow(gamma, t_len, n, lvl, p, math.sqrt(p * (1 - p) / mc_reps), mc_reps, seed))
                cell += 1
    return rows


def power_rows_to_csv(rows: Sequence[PowerRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["gamma", "T", "N", "level", "rejection_rate", "mc_se", "mc_reps", "seed"])
    for r in rows:
        writer.writerow([repr(r.gamma), r.t, r.n, repr(r.level), repr(r.rejection_rate), repr(r.mc_se), r.mc_reps, r.seed])
    return buf.getvalue()
