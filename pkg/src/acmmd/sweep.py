"""Seed sweeps: rejection-rate grids for the toy process and group runs.

A sweep runs the chosen test once per (grid point, seed index) and writes
one CSV row per run plus a JSON summary of rejection rates per grid point.
Each cell derives its own data and test randomness from the base seed and
its grid coordinates, so results are independent of execution order and of
how many workers run; rows are emitted in grid order either way.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as _beta_dist

from ._rng import SK_CELL, SK_GROUP, derive
from .errors import ConfigError, DataError
from .kernels import KernelSpec
from .reliability import acmmd_rel_test, default_inner_samples
from .testing import acmmd_test
from .toy import ToyConfig, generate_reliability_records, generate_triplets

CSV_FIELDS = ("n", "delta_p", "seed", "statistic", "p_value", "reject",
              "runtime_ms")
CSV_FIELDS_GROUP = ("n", "group", "seed", "statistic", "p_value", "reject",
                    "runtime_ms")


@dataclass(frozen=True)
class SweepRow:
    """One test outcome; `label` is the delta_p value or the group name."""

    n: int
    label: object
    seed: int
    statistic: float
    p_value: float
    reject: bool
    runtime_ms: float


@dataclass(frozen=True)
class _ToyTask:
    toy: ToyConfig
    family: str
    n: int
    inner_samples: int | None
    alpha: float
    bootstrap: int
    sigma_p: float | str
    base_entropy: int
    cell_index: int
    seed_index: int
    timings: bool


def _run_toy_task(task: _ToyTask) -> SweepRow:
    data_seed = derive(task.base_entropy, SK_CELL, task.cell_index,
                       task.seed_index, 0)
    test_seed = derive(task.base_entropy, SK_CELL, task.cell_index,
                       task.seed_index, 1)
    start = time.perf_counter() if task.timings else 0.0
    if task.family == "rel":
        r = task.inner_samples or default_inner_samples(task.n)
        records = generate_reliability_records(task.toy, task.n, r, data_seed)
        report = acmmd_rel_test(records, task.toy.ky, sigma=task.sigma_p,
                                alpha=task.alpha, b_count=task.bootstrap,
                                seed=test_seed)
    else:
        triplets = generate_triplets(task.toy, task.n, data_seed)
        report = acmmd_test(triplets, task.toy.kx, task.toy.ky,
                            alpha=task.alpha, b_count=task.bootstrap,
                            seed=test_seed)
    elapsed = (time.perf_counter() - start) * 1e3 if task.timings else 0.0
    return SweepRow(n=task.n, label=task.toy.delta_p, seed=task.seed_index,
                    statistic=report.statistic, p_value=report.p_value,
                    reject=report.reject, runtime_ms=elapsed)


def run_toy_sweep(toy: ToyConfig, n_values, delta_p_values, n_seeds: int,
                  family: str = "acmmd", alpha: float = 0.05,
                  bootstrap: int = 100, inner_samples: int | None = None,
                  sigma_p: float | str = "median", seed: int = 0,
                  workers: int = 1, timings: bool = False) -> list[SweepRow]:
    """Full toy grid: every delta_p x n cell, n_seeds independent runs each.

    The toy process's own kernels are used (Gaussian on the scalar input,
    exponentiated Hamming with the toy's lambda on outputs) so that results
    line up with the closed forms.
    """
    if not n_values or not delta_p_values:
        raise ConfigError("sweep grids must be non-empty")
    if n_seeds < 1:
        raise ConfigError("n_seeds must be at least 1")
    cells = [(dp, n) for dp in delta_p_values for n in n_values]
    tasks = []
    for ci, (dp, n) in enumerate(cells):
        cell_toy = toy.with_delta_p(dp)
        for si in range(n_seeds):
            tasks.append(_ToyTask(
                toy=cell_toy, family=family, n=n, inner_samples=inner_samples,
                alpha=alpha, bootstrap=bootstrap, sigma_p=sigma_p,
                base_entropy=seed, cell_index=ci, seed_index=si,
                timings=timings))
    return _run_tasks(_run_toy_task, tasks, workers)


@dataclass(frozen=True)
class _GroupTask:
    records: tuple
    group: str
    family: str
    kx: KernelSpec | None
    ky: KernelSpec
    subsample_n: int | None
    alpha: float
    bootstrap: int
    sigma_p: float | str
    base_entropy: int
    group_index: int
    seed_index: int
    timings: bool


def _run_group_task(task: _GroupTask) -> SweepRow:
    records = list(task.records)
    if task.subsample_n is not None:
        rng_seed = derive(task.base_entropy, SK_GROUP, task.group_index,
                          task.seed_index, 0)
        rng = np.random.Generator(np.random.PCG64(rng_seed))
        idx = rng.choice(len(records), size=task.subsample_n, replace=False)
        records = [records[i] for i in sorted(idx)]
    test_seed = derive(task.base_entropy, SK_GROUP, task.group_index,
                       task.seed_index, 1)
    start = time.perf_counter() if task.timings else 0.0
    if task.family == "rel":
        report = acmmd_rel_test(records, task.ky, sigma=task.sigma_p,
                                alpha=task.alpha, b_count=task.bootstrap,
                                seed=test_seed)
    else:
        report = acmmd_test(records, task.kx, task.ky, alpha=task.alpha,
                            b_count=task.bootstrap, seed=test_seed)
    elapsed = (time.perf_counter() - start) * 1e3 if task.timings else 0.0
    return SweepRow(n=len(records), label=task.group, seed=task.seed_index,
                    statistic=report.statistic, p_value=report.p_value,
                    reject=report.reject, runtime_ms=elapsed)


def run_group_sweep(records, family: str, kx: KernelSpec | None,
                    ky: KernelSpec, n_seeds: int,
                    subsample_n: int | None = None, alpha: float = 0.05,
                    bootstrap: int = 100, sigma_p: float | str = "median",
                    seed: int = 0, workers: int = 1, timings: bool = False
                    ) -> list[SweepRow]:
    """Per-group runs over a labeled dataset.

    Groups are processed in sorted label order. With `subsample_n` given,
    every seed index draws its own subsample (without replacement) from the
    group; without it, seeds only vary the test randomness.
    """
    if n_seeds < 1:
        raise ConfigError("n_seeds must be at least 1")
    labels = sorted({r.group for r in records if r.group is not None})
    if not labels:
        raise DataError("group sweep needs records with group labels")
    tasks = []
    for gi, label in enumerate(labels):
        members = tuple(r for r in records if r.group == label)
        if subsample_n is not None and subsample_n > len(members):
            raise DataError(
                f"group {label!r} has {len(members)} records, "
                f"fewer than subsample_n={subsample_n}")
        if (subsample_n or len(members)) < 2:
            raise DataError(f"group {label!r} has fewer than 2 records")
        for si in range(n_seeds):
            tasks.append(_GroupTask(
                records=members, group=label, family=family, kx=kx, ky=ky,
                subsample_n=subsample_n, alpha=alpha, bootstrap=bootstrap,
                sigma_p=sigma_p, base_entropy=seed, group_index=gi,
                seed_index=si, timings=timings))
    return _run_tasks(_run_group_task, tasks, workers)


def _run_tasks(fn, tasks, workers: int) -> list:
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=8))


# ---------------------------------------------------------------------------
# Output


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sweep_csv(path, rows: list[SweepRow], group_mode: bool) -> None:
    """One CSV row per run, grid order, stable byte-for-byte formatting."""
    fields = CSV_FIELDS_GROUP if group_mode else CSV_FIELDS
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            runtime = 0 if row.runtime_ms == 0 else repr(row.runtime_ms)
            writer.writerow([
                row.n, _fmt(row.label), row.seed, repr(row.statistic),
                repr(row.p_value), int(row.reject), runtime,
            ])


def _binomial_interval(k: int, n: int) -> tuple[float, float]:
    """Exact (Clopper-Pearson) central 95% interval for a proportion."""
    lo = 0.0 if k == 0 else float(_beta_dist.ppf(0.025, k, n - k + 1))
    hi = 1.0 if k == n else float(_beta_dist.ppf(0.975, k + 1, n - k))
    return lo, hi


def summarize_sweep(rows: list[SweepRow], group_mode: bool,
                    config: dict | None = None) -> dict:
    """Rejection rate per grid point with exact binomial 95% intervals."""
    order: list[tuple] = []
    groups: dict[tuple, list[SweepRow]] = {}
    for row in rows:
        key = (row.n, row.label)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    label_field = "group" if group_mode else "delta_p"
    cells = []
    for key in order:
        members = groups[key]
        k = sum(int(r.reject) for r in members)
        count = len(members)
        lo, hi = _binomial_interval(k, count)
        cells.append({
            "n": key[0],
            label_field: key[1],
            "n_seeds": count,
            "rejections": k,
            "rejection_rate": k / count,
            "rejection_rate_ci95": [lo, hi],
            "mean_statistic": float(np.mean([r.statistic for r in members])),
            "mean_p_value": float(np.mean([r.p_value for r in members])),
        })
    out = {"cells": cells}
    if config is not None:
        out["config"] = config
    return out
