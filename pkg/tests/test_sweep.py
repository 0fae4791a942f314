import math

import pytest

from acmmd.errors import ConfigError, DataError
from acmmd.kernels import KernelSpec
from acmmd.sweep import (SweepRow, run_group_sweep, run_toy_sweep,
                         summarize_sweep, write_sweep_csv)
from acmmd.toy import ToyConfig, ToyPrior, generate_triplets


def toy():
    return ToyConfig(prior=ToyPrior(atoms=(0.4,)), delta_p=0.0)


class TestRunToySweep:
    def test_grid_order_and_reproducibility(self):
        rows = run_toy_sweep(toy(), [4, 6], [0.0, 0.25], 2, bootstrap=20)
        labels = [(r.label, r.n, r.seed) for r in rows]
        assert labels == [(0.0, 4, 0), (0.0, 4, 1),
                          (0.0, 6, 0), (0.0, 6, 1),
                          (0.25, 4, 0), (0.25, 4, 1),
                          (0.25, 6, 0), (0.25, 6, 1)]
        again = run_toy_sweep(toy(), [4, 6], [0.0, 0.25], 2, bootstrap=20)
        assert rows == again

    def test_workers_do_not_change_rows(self):
        kwargs = dict(n_values=[4, 6], delta_p_values=[0.25], n_seeds=3,
                      bootstrap=20)
        serial = run_toy_sweep(toy(), **kwargs, workers=1)
        parallel = run_toy_sweep(toy(), **kwargs, workers=3)
        assert serial == parallel

    def test_cells_have_independent_data(self):
        rows = run_toy_sweep(toy(), [5], [0.0, 0.25], 1, bootstrap=20)
        assert rows[0].statistic != rows[1].statistic

    def test_runtime_zero_without_timings(self):
        rows = run_toy_sweep(toy(), [4], [0.0], 1, bootstrap=20)
        assert rows[0].runtime_ms == 0.0
        timed = run_toy_sweep(toy(), [4], [0.0], 1, bootstrap=20,
                              timings=True)
        assert timed[0].runtime_ms > 0


class TestRunGroupSweep:
    def records(self):
        left = generate_triplets(ToyConfig(prior=ToyPrior(atoms=(0.3,)),
                                           delta_p=0.25), 8, seed=0)
        right = generate_triplets(ToyConfig(prior=ToyPrior(atoms=(0.45,)),
                                            delta_p=0.25), 8, seed=1)
        return left + right

    def test_groups_sorted_and_subsampled(self):
        rows = run_group_sweep(self.records(), "acmmd",
                               KernelSpec("gaussian", sigma=1.0),
                               KernelSpec("exp-hamming"), n_seeds=2,
                               subsample_n=4, bootstrap=20)
        assert [r.label for r in rows] == ["p=0.3"] * 2 + ["p=0.45"] * 2
        assert all(r.n == 4 for r in rows)
        assert rows[0].statistic != rows[1].statistic

    def test_without_subsample_uses_full_groups_once_per_seed(self):
        rows = run_group_sweep(self.records(), "acmmd",
                               KernelSpec("gaussian", sigma=1.0),
                               KernelSpec("exp-hamming"), n_seeds=2,
                               bootstrap=20)
        assert all(r.n == 8 for r in rows)
        # Same records every seed; only the bootstrap stream differs.
        assert rows[0].statistic == rows[1].statistic
        assert rows[0].p_value != rows[1].p_value

    def test_undersized_group_rejected(self):
        records = self.records()[:8] + self.records()[8:9]
        with pytest.raises(DataError, match="fewer than"):
            run_group_sweep(records, "acmmd",
                            KernelSpec("gaussian", sigma=1.0),
                            KernelSpec("exp-hamming"), n_seeds=1,
                            subsample_n=4, bootstrap=20)

    def test_unlabeled_records_rejected(self):
        records = [t for t in self.records()]
        stripped = [type(t)(x=t.x, y=t.y, y_model=t.y_model, group=None)
                    for t in records]
        with pytest.raises(DataError, match="group"):
            run_group_sweep(stripped, "acmmd",
                            KernelSpec("gaussian", sigma=1.0),
                            KernelSpec("exp-hamming"), n_seeds=1,
                            bootstrap=20)


class TestSummarize:
    def rows(self, rejects, label="0.0"):
        return [SweepRow(n=10, label=label, seed=i, statistic=0.1 * i,
                         p_value=0.5, reject=bool(r), runtime_ms=0.0)
                for i, r in enumerate(rejects)]

    def test_rates_and_order(self):
        rows = self.rows([1, 0, 0, 1]) + self.rows([1, 1, 1, 1], label="0.25")
        summary = summarize_sweep(rows, group_mode=False)
        cells = summary["cells"]
        assert [c["delta_p"] for c in cells] == ["0.0", "0.25"]
        assert cells[0]["rejection_rate"] == 0.5
        assert cells[0]["rejections"] == 2
        assert cells[1]["rejection_rate"] == 1.0

    def test_interval_edges(self):
        no_rejects = summarize_sweep(self.rows([0, 0, 0, 0]), False)
        lo, hi = no_rejects["cells"][0]["rejection_rate_ci95"]
        assert lo == 0.0
        assert hi == pytest.approx(1 - 0.025 ** 0.25, rel=1e-12)
        all_rejects = summarize_sweep(self.rows([1, 1, 1, 1]), False)
        lo, hi = all_rejects["cells"][0]["rejection_rate_ci95"]
        assert lo == pytest.approx(0.025 ** 0.25, rel=1e-12)
        assert hi == 1.0

    def test_group_mode_key(self):
        rows = self.rows([0, 1], label="p=0.3")
        summary = summarize_sweep(rows, group_mode=True)
        assert summary["cells"][0]["group"] == "p=0.3"
        assert "delta_p" not in summary["cells"][0]

    def test_config_embedded(self):
        summary = summarize_sweep(self.rows([0]), False, config={"seed": 1})
        assert summary["config"] == {"seed": 1}


class TestCsv:
    def test_float_repr_and_int_zero(self, tmp_path):
        rows = [SweepRow(n=10, label="0.1", seed=0, statistic=0.1 + 0.2,
                         p_value=1 / 3, reject=True, runtime_ms=0.0)]
        path = tmp_path / "rows.csv"
        write_sweep_csv(path, rows, group_mode=False)
        lines = path.read_text().splitlines()
        assert lines[1] == f"10,0.1,0,{repr(0.1 + 0.2)},{repr(1 / 3)},1,0"

    def test_workers_validation(self):
        with pytest.raises(ConfigError, match="workers"):
            run_toy_sweep(toy(), [4], [0.0], 1, bootstrap=20, workers=0)
