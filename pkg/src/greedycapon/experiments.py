"""Sweep runner and per-call timing benchmark built on the Monte-Carlo harness."""

from __future__ import annotations

import logging
import time

import numpy as np

from .beamformers import METHODS
from .config import ExperimentConfig
from .montecarlo import make_pool, run_monte_carlo, trial_seed
from .results import ResultTable

log = logging.getLogger(__name__)


def result_columns(config: ExperimentConfig) -> list[str]:
    per_source = [f"rmse_src{k + 1}" for k in range(config.K)]
    return [config.sweep_axis, "method", "rmse_deg", *per_source, "md_rate", "runtime_s", "failures"]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    """One row per (sweep value, method), in config order.

    Estimation columns depend only on the config and its seed; ``runtime_s``
    is measured wall time.
    """
    table = ResultTable(result_columns(config))
    grid = config.grid()
    pool = make_pool(workers) if workers > 1 else None
    try:
        for value in config.sweep_values:
            scenario = config.scenario(value, grid)
            t0 = time.perf_counter()
            summaries = run_monte_carlo(scenario, config.methods, config.trials, config.seed,
                                        workers=workers, executor=pool)
            log.info("%s=%s: %d trials in %.1f s", config.sweep_axis, value, config.trials,
                     time.perf_counter() - t0)
            for s in summaries:
                per_source = list(s.per_source_rmse_deg)
                if len(per_source) != config.K:
                    per_source = [float("nan")] * config.K
                table.rows.append((value, s.method, s.rmse_deg, *per_source, s.md_rate,
                                   s.mean_runtime, s.failures))
    finally:
        if pool is not None:
            pool.shutdown()
    return table


def time_calls(fn, repetitions: int, warmup: int = 3) -> np.ndarray:
    """Wall time of ``repetitions`` calls of ``fn`` after ``warmup`` untimed calls."""
    for _ in range(warmup):
        fn()
    out = np.empty(repetitions)
    for r in range(repetitions):
        t0 = time.perf_counter()
        fn()
        out[r] = time.perf_counter() - t0
    return out


def benchmark_timing(config: ExperimentConfig, repetitions: int = 20, warmup: int = 3,
                     grid_size: int | None = None) -> ResultTable:
    """Mean and standard deviation of the per-call time of each method.

    One sample covariance is drawn per sweep point (seeded by the config);
    every method is timed ``repetitions`` times on each, pooling all calls.
    Methods that cannot run on a covariance (e.g. Capon with ``L < N``) are
    reported with NaN times.
    """
    if repetitions < 10:
        raise ValueError("benchmark needs at least 10 repetitions")
    if grid_size is not None:
        config = config.with_overrides(grid_size=grid_size)
    grid = config.grid()
    samples = {name: [] for name in config.methods}
    for i, value in enumerate(config.sweep_values):
        scenario = config.scenario(value, grid)
        S = scenario.covariance(trial_seed(config.seed, i))
        K = scenario.sources.K
        for name in config.methods:
            fn = METHODS[name]
            try:
                fn(S, grid, K)
            except np.linalg.LinAlgError:
                continue
            samples[name].append(time_calls(lambda: fn(S, grid, K), repetitions, warmup))
    table = ResultTable(["method", "mean_s", "std_s", "calls", "grid_size"])
    for name in config.methods:
        t = np.concatenate(samples[name]) if samples[name] else np.array([np.nan])
        calls = int(sum(len(s) for s in samples[name]))
        table.rows.append((name, float(np.mean(t)), float(np.std(t)), calls, config.grid_size))
    return table
