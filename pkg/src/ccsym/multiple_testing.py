"""Benjamini–Hochberg control across yearly tests."""

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .exceptions import ConfigError, InputError
from .panel import ReturnPanel, split_by_year
from .streams import derive_seed
from .symmetry_test import BootstrapConfig, TestResult, run_test

__all__ = [
    "DEFAULT_LEVELS",
    "bh_fdr",
    "level_tag",
    "YearEntry",
    "YearlyReport",
    "yearly_procedure",
]

DEFAULT_LEVELS = (0.01, 0.05, 0.10)


def bh_fdr(p_values, q: float) -> np.ndarray:
    """Step-up Benjamini–Hochberg rejections at FDR level `q`, in input order."""
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("need a non-empty 1-D array of p-values")
    if np.any(np.isnan(p)) or np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    m = p.size
    order = np.argsort(p, kind="stable")
    passed = np.flatnonzero(p[order] <= q * np.arange(1, m + 1) / m)
    if passed.size == 0:
        return np.zeros(m, dtype=bool)
    return p <= p[order[passed[-1]]]


def level_tag(level: float) -> str:
    """Column name for a nominal level, e.g. 0.05 -> ``reject_5pct``."""
    return f"reject_{level * 100:g}pct".replace(".", "p")


@dataclass
class YearEntry:
    year: int
    seed: int
    result: TestResult


@dataclass
class YearlyReport:
    entries: list
    levels: tuple
    decisions: dict
    skipped: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def rejected(self, level: float) -> list:
        flags = self.decisions[level]
        return [e.year for e, f in zip(self.entries, flags) if f]

    def rows(self) -> list:
        out = []
        for k, e in enumerate(self.entries):
            r = e.result
            row = {
                "year": e.year,
                "T": r.t,
                "statistic": r.statistic,
                "scaled_statistic": r.scaled_statistic,
                "p_value": r.p_value,
            }
            for lvl in self.levels:
                row[level_tag(lvl)] = bool(self.decisions[lvl][k])
            out.append(row)
        return out

    def to_dict(self) -> dict:
        tests = []
        for row, e in zip(self.rows(), self.entries):
            tests.append({**row, "seed": e.seed, "block_length": e.result.block_length, "m": e.result.replicates})
        return {
            "config": self.config,
            "m_tests": len(self.entries),
            "tests": tests,
            "skipped": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self, header_comment: bool = True) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write("# config: " + json.dumps(self.config, sort_keys=True) + "\n")
        cols = ["year", "T", "statistic", "scaled_statistic", "p_value"] + [level_tag(l) for l in self.levels]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: (repr(v) if isinstance(v, float) else int(v) if isinstance(v, bool) else v)
                             for k, v in row.items()})
        return buf.getvalue()


def yearly_procedure(
    panel: ReturnPanel,
    config: BootstrapConfig = BootstrapConfig(),
    levels=DEFAULT_LEVELS,
    min_obs: int = 50,
    threads: int = 1,
) -> YearlyReport:
    """Test each calendar year and apply BH jointly over all tested years.

    Year ``y`` runs its bootstrap with seed ``derive_seed(config.seed, y)``.
    Years shorter than `min_obs` are reported as skipped and excluded from
    the multiple-testing family.
    """
    levels = tuple(sorted(float(l) for l in levels))
    for lvl in levels:
        if not 0 < lvl < 1:
            raise ConfigError(f"levels must lie in (0, 1), got {lvl}")
    windows = split_by_year(panel, min_obs=min_obs)
    tested = [w for w in windows if not w.skipped]
    skipped = [{"year": w.year, "T": w.panel.t_len, "reason": f"T < min_obs ({min_obs})"}
               for w in windows if w.skipped]
    if not tested:
        raise InputError(f"no year has at least {min_obs} observations")

    def one(w):
        seed = derive_seed(config.seed, w.year)
        return YearEntry(w.year, seed, run_test(w.panel.values, replace(config, seed=seed)))

    if threads <= 1:
        entries = [one(w) for w in tested]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(one, tested))
    pvals = np.array([e.result.p_value for e in entries])
    decisions = {lvl: bh_fdr(pvals, lvl) for lvl in levels}
    echo = {**asdict(config), "levels": list(levels), "min_obs": min_obs, "dropped_rows": panel.dropped_rows}
    return YearlyReport(entries, levels, decisions, skipped, echo)
