"""Seeded Monte-Carlo harness.

Trial ``t`` draws from ``SeedSequence([master_seed, t])``, so results do not
depend on how trials are spread over workers, and every sweep point reuses
the same per-trial streams (common random numbers across the sweep).
"""

from __future__ import annotations

import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .array import ArraySpec, SteeringGrid
from .beamformers import METHODS
from .metrics import McSummary, summarize, trial_error
from .simulate import NoiseSpec, SourceSet, exact_covariance, generate_snapshots, sample_covariance

# numerical breakdowns counted as per-method failures instead of aborting the run
_RECOVERABLE = (np.linalg.LinAlgError, FloatingPointError)


@dataclass(frozen=True)
class Scenario:
    """One simulation setting: array, search grid, sources, noise and snapshot count.

    With ``exact=True`` every trial uses the population covariance instead
    of a sample covariance (noise-free shortcut, all trials identical).
    """

    spec: ArraySpec
    grid: SteeringGrid
    sources: SourceSet
    noise: NoiseSpec
    snapshots: int
    exact: bool = False

    def covariance(self, seed) -> np.ndarray:
        if self.exact:
            return exact_covariance(self.spec, self.sources, self.noise)
        X = generate_snapshots(self.spec, self.sources, self.noise, self.snapshots, seed)
        return sample_covariance(X)


def trial_seed(master_seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed), int(trial)])


def run_trial(scenario: Scenario, methods, trial: int, master_seed: int) -> list:
    """Run every method on one simulated covariance.

    Returns ``(method, TrialResult or None, seconds)`` per method; ``None``
    marks a numerical failure.
    """
    S = scenario.covariance(trial_seed(master_seed, trial))
    truth = np.rad2deg(scenario.sources.doas)
    K = scenario.sources.K
    out = []
    for name in methods:
        estimator = METHODS[name]
        t0 = time.perf_counter()
        try:
            est = estimator(S, scenario.grid, K)
        except _RECOVERABLE:
            out.append((name, None, time.perf_counter() - t0))
            continue
        elapsed = time.perf_counter() - t0
        if est.indices.size != K:
            out.append((name, None, elapsed))
        else:
            out.append((name, trial_error(est.angles_deg, truth, name), elapsed))
    return out


def _run_chunk(args):
    scenario, methods, trials, master_seed = args
    return [run_trial(scenario, methods, t, master_seed) for t in trials]


def run_monte_carlo(scenario: Scenario, methods, trials: int, master_seed: int = 0,
                    workers: int = 1, executor=None) -> list[McSummary]:
    """Simulate ``trials`` independent trials and summarize each method.

    Args:
        scenario: Simulation setting.
        methods: Method names, keys of :data:`greedycapon.beamformers.METHODS`.
        trials: Number of Monte-Carlo trials.
        master_seed: Root seed; equal seeds give identical estimates.
        workers: Number of chunks the trials are split into; results do not depend on it.
        executor: Optional ``concurrent.futures`` executor to reuse. A process
            pool is created for the call when ``workers > 1`` and none is given.
    """
    methods = list(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown method(s) {unknown}; available: {sorted(METHODS)}")
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials}")
    trials = int(trials)

    if workers <= 1 and executor is None:
        per_trial = _run_chunk((scenario, methods, range(trials), master_seed))
    else:
        chunks = [range(trials)[i::max(workers, 1)] for i in range(max(workers, 1))]
        jobs = [(scenario, methods, c, master_seed) for c in chunks]
        if executor is None:
            with make_pool(workers) as pool:
                parts = list(pool.map(_run_chunk, jobs))
        else:
            parts = list(executor.map(_run_chunk, jobs))
        per_trial = [None] * trials
        for chunk, part in zip(chunks, parts):
            for t, rows in zip(chunk, part):
                per_trial[t] = rows

    # fold in trial order, independent of completion order
    summaries = []
    for j, name in enumerate(methods):
        rows = [per_trial[t][j] for t in range(trials)]
        results = [r for _, r, _ in rows if r is not None]
        failures = sum(r is None for _, r, _ in rows)
        summaries.append(summarize(name, results, [dt for _, _, dt in rows], failures))
    return summaries


def make_pool(workers: int) -> ProcessPoolExecutor:
    return ProcessPoolExecutor(max_workers=workers, mp_context=multiprocessing.get_context("spawn"))
