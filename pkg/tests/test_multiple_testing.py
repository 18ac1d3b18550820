import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccsym.exceptions import ConfigError, InputError
from ccsym.multiple_testing import bh_fdr, level_tag, yearly_procedure
from ccsym.panel import ReturnPanel
from ccsym.symmetry_test import BootstrapConfig, run_test

from oracles import bh_oracle

grid_p = st.lists(st.integers(0, 100).map(lambda k: k / 100), min_size=1, max_size=8)


class TestBH:
    def test_worked_example(self):
        assert bh_fdr([0.01, 0.02, 0.04, 0.20], 0.05).tolist() == [True, True, False, False]

    def test_extremes(self):
        assert not bh_fdr(np.ones(6), 0.1).any()
        assert bh_fdr(np.zeros(6), 0.01).all()

    def test_input_order_preserved(self):
        assert bh_fdr([0.20, 0.04, 0.01, 0.02], 0.05).tolist() == [False, False, True, True]

    def test_step_up_rescues_larger_p(self):
        # 0.03 misses its own threshold 0.025 but 0.04 <= 0.05 carries it
        assert bh_fdr([0.03, 0.04], 0.05).tolist() == [True, True]

    def test_ties_at_cutoff_all_rejected(self):
        assert bh_fdr([0.03, 0.03, 0.03, 0.9], 0.05).tolist() == [True, True, True, False]

    @given(grid_p, st.sampled_from([0.01, 0.05, 0.1, 0.2]))
    @settings(max_examples=300, deadline=None)
    def test_matches_oracle(self, p, q):
        assert bh_fdr(p, q).tolist() == bh_oracle(p, q)

    @given(grid_p)
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_q(self, p):
        a, b, c = (bh_fdr(p, q) for q in (0.01, 0.05, 0.10))
        assert np.all(a <= b) and np.all(b <= c)

    def test_single_hypothesis_is_plain_test(self):
        for p in (0.0, 0.04, 0.05, 0.06, 1.0):
            assert bh_fdr([p], 0.05)[0] == (p <= 0.05)

    @pytest.mark.parametrize("p, q", [([], 0.05), ([0.1, 1.2], 0.05), ([0.1, np.nan], 0.05), ([0.1], 0.0), ([0.1], 1.0)])
    def test_errors(self, p, q):
        with pytest.raises(ValueError):
            bh_fdr(p, q)


def test_level_tag():
    assert [level_tag(l) for l in (0.01, 0.05, 0.10, 0.025)] == ["reject_1pct", "reject_5pct", "reject_10pct", "reject_2p5pct"]


def yearly_panel(rng, years, per_year=60, n=3, short=None):
    dates, rows = [], []
    for y in years:
        k = 20 if y == short else per_year
        dates.extend(np.datetime64(f"{y}-01-01") + np.arange(k))
        rows.append(rng.standard_normal((k, n)))
    values = np.vstack(rows)
    return ReturnPanel(np.array(dates), values, [f"s{i}" for i in range(n)], np.zeros(values.shape, bool))


class TestYearlyProcedure:
    CFG = BootstrapConfig(replicates=40, seed=11)

    def test_structure_and_nesting(self, rng):
        panel = yearly_panel(rng, range(2001, 2006), short=2003)
        rep = yearly_procedure(panel, self.CFG)
        assert [e.year for e in rep.entries] == [2001, 2002, 2004, 2005]
        assert rep.skipped == [{"year": 2003, "T": 20, "reason": "T < min_obs (50)"}]
        d = rep.decisions
        assert np.all(d[0.01] <= d[0.05]) and np.all(d[0.05] <= d[0.10])
        assert all(e.result.t == 60 for e in rep.entries)

    def test_per_year_seeds_and_determinism(self, rng):
        panel = yearly_panel(rng, range(2010, 2013))
        a, b = yearly_procedure(panel, self.CFG), yearly_procedure(panel, self.CFG)
        assert a.to_csv() == b.to_csv()
        assert len({e.seed for e in a.entries}) == 3
        e = a.entries[1]
        assert run_test(panel.values[60:120], BootstrapConfig(replicates=40, seed=e.seed)).p_value == e.result.p_value

    def test_threads_do_not_change_results(self, rng):
        panel = yearly_panel(rng, range(2010, 2014))
        assert yearly_procedure(panel, self.CFG, threads=1).to_json() == yearly_procedure(panel, self.CFG, threads=4).to_json()

    def test_single_window_is_plain_test(self, rng):
        panel = yearly_panel(rng, [1999])
        rep = yearly_procedure(panel, self.CFG)
        p = rep.entries[0].result.p_value
        for lvl in rep.levels:
            assert rep.decisions[lvl][0] == (p <= lvl)

    def test_outputs(self, rng):
        rep = yearly_procedure(yearly_panel(rng, [2020, 2021]), self.CFG)
        lines = rep.to_csv().splitlines()
        assert lines[0].startswith("# config: ")
        assert json.loads(lines[0][len("# config: "):])["replicates"] == 40
        assert lines[1] == "year,T,statistic,scaled_statistic,p_value,reject_1pct,reject_5pct,reject_10pct"
        assert len(lines) == 4
        doc = json.loads(rep.to_json())
        assert doc["m_tests"] == 2 and doc["tests"][0]["m"] == 40

    def test_errors(self, rng):
        with pytest.raises(InputError, match="no year"):
            yearly_procedure(yearly_panel(rng, [2020], per_year=30), self.CFG)
        with pytest.raises(ConfigError):
            yearly_procedure(yearly_panel(rng, [2020]), self.CFG, levels=[0.05, 1.5])
