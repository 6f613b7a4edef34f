"""Pairing of DOA estimates with ground truth, per-trial errors and
Monte-Carlo aggregates. All angles here are in degrees."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TrialResult:
    method: str
    estimates: np.ndarray
    truth: np.ndarray
    error_norm: float
    per_source_abs_error: np.ndarray
    misdetected: bool | None


@dataclass(frozen=True)
class McSummary:
    method: str
    trials: int
    rmse_deg: float
    per_source_rmse_deg: np.ndarray
    md_rate: float
    mean_runtime: float
    failures: int = 0


def _as_angles(x, name):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector of angles")
    return x


def pair_estimates(estimates, truth_power_ordered) -> np.ndarray:
    """Reorder ``estimates`` to line up with the true DOAs.

    Sources are visited strongest first (the order of ``truth_power_ordered``);
    each takes the nearest estimate not yet assigned, so the weakest source
    gets whatever is left. Distance ties go to the earlier estimate.
    """
    est = _as_angles(estimates, "estimates")
    truth = _as_angles(truth_power_ordered, "truth")
    if est.shape != truth.shape:
        raise ValueError(f"got {est.size} estimates for {truth.size} sources")
    free = list(range(est.size))
    paired = np.empty_like(est)
    for k, target in enumerate(truth):
        j = min(free, key=lambda i: abs(est[i] - target))
        paired[k] = est[j]
        free.remove(j)
    return paired


def misdetection_threshold(truth) -> float:
    """Half the smallest gap between any two true DOAs."""
    truth = np.sort(_as_angles(truth, "truth"))
    if truth.size < 2:
        raise ValueError("misdetection threshold needs at least two sources")
    return 0.5 * float(np.min(np.diff(truth)))


def misdetection(estimates, truth) -> bool:
    """True if any sorted estimate misses its sorted true DOA by more than the threshold."""
    est = np.sort(_as_angles(estimates, "estimates"))
    tru = np.sort(_as_angles(truth, "truth"))
    if est.shape != tru.shape:
        raise ValueError(f"got {est.size} estimates for {tru.size} sources")
    tau = misdetection_threshold(tru)
    return bool(np.max(np.abs(est - tru)) > tau)


def trial_error(estimates, truth_power_ordered, method: str = "") -> TrialResult:
    truth = _as_angles(truth_power_ordered, "truth")
    paired = pair_estimates(estimates, truth)
    diff = np.abs(paired - truth)
    md = misdetection(paired, truth) if truth.size >= 2 else None
    return TrialResult(method, paired, truth, float(np.linalg.norm(diff)), diff, md)


def summarize(method: str, results: list, runtimes, failures: int = 0) -> McSummary:
    """Fold successful trial results (in trial order) into an :class:`McSummary`.

    RMSE is the root of the mean squared ``error_norm``; trials that failed
    are only counted in ``failures``.
    """
    runtimes = np.asarray(runtimes, dtype=float)
    mean_runtime = float(runtimes.mean()) if runtimes.size else float("nan")
    if not results:
        return McSummary(method, 0, float("nan"), np.array([]), float("nan"),
                         mean_runtime, failures)
    norms = np.array([r.error_norm for r in results])
    abs_err = np.vstack([r.per_source_abs_error for r in results])
    md = [r.misdetected for r in results]
    md_rate = float("nan") if md[0] is None else float(np.mean(md))
    return McSummary(
        method=method,
        trials=len(results),
        rmse_deg=float(np.sqrt(np.mean(norms**2))),
        per_source_rmse_deg=np.sqrt(np.mean(abs_err**2, axis=0)),
        md_rate=md_rate,
        mean_runtime=mean_runtime,
        failures=failures,
    )
