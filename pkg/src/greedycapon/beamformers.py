"""Grid-search DOA estimators: greedy Capon (GCB), standard Capon (SCB), MUSIC
and the conventional (Bartlett) beamformer.

All spectra are evaluated column-wise over the steering matrix of a
:class:`~greedycapon.array.SteeringGrid`; each grid value depends only on its
own column, so splitting the grid never changes results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, solve
from scipy.signal import find_peaks

from .array import SteeringGrid


class RankError(np.linalg.LinAlgError):
    """Raised when an estimator needs an invertible sample covariance."""


@dataclass(frozen=True)
class InverseINCM:
    """State of the greedy search.

    Attributes:
        q_inv: Inverse of the current interference-plus-noise covariance estimate.
        chosen: Grid indices selected so far, in selection order.
        powers: Estimated power of each chosen source.
    """

    q_inv: np.ndarray
    chosen: tuple = ()
    powers: tuple = ()

    @classmethod
    def initial(cls, S: np.ndarray) -> "InverseINCM":
        """White-noise start ``Q = (tr(S)/N) I``."""
        N = S.shape[0]
        noise_level = np.real(np.trace(S)) / N
        if not np.isfinite(noise_level) or noise_level <= 0:
            raise ValueError("sample covariance must have a positive finite trace")
        return cls(np.eye(N, dtype=complex) / noise_level)


@dataclass
class DoaEstimate:
    indices: np.ndarray
    angles: np.ndarray
    spectrum: np.ndarray = field(repr=False)
    diagnostics: list = field(default_factory=list)

    @property
    def angles_deg(self) -> np.ndarray:
        return np.rad2deg(self.angles)


def _steering_matrix(grid):
    return grid.vectors if isinstance(grid, SteeringGrid) else np.asarray(grid)


def _quad_form_denominator(A, B):
    # a_i^H Q^{-1} a_i for every column, with B = Q^{-1} A
    den = np.real(np.einsum("ij,ij->j", A.conj(), B))
    if not np.all(np.isfinite(den)) or np.any(den <= 0):
        raise FloatingPointError("a^H Q^{-1} a must be positive and finite")
    return den


def mvdr_weight(a: np.ndarray, q_inv: np.ndarray) -> np.ndarray:
    """Distortionless weight ``Q^{-1} a / (a^H Q^{-1} a)``; satisfies ``w^H a = 1``."""
    b = q_inv @ a
    den = np.real(np.vdot(a, b))
    if not np.isfinite(den) or den <= 0:
        raise FloatingPointError("a^H Q^{-1} a must be positive and finite")
    return b / den


# columns per block in the grid scan; keeps temporaries cache-resident
_SCAN_BLOCK = 256


def _gcb_scan(S, q_inv, A):
    M = A.shape[1]
    num = np.empty(M)
    den = np.empty(M)
    for start in range(0, M, _SCAN_BLOCK):
        cols = slice(start, start + _SCAN_BLOCK)
        a = A[:, cols]
        B = q_inv @ a
        num[cols] = np.einsum("ij,ij->j", B.conj(), S @ B).real
        den[cols] = np.einsum("ij,ij->j", a.conj(), B).real
    if not np.all(np.isfinite(den)) or np.any(den <= 0):
        raise FloatingPointError("a^H Q^{-1} a must be positive and finite")
    return np.maximum(num, 0.0) / den**2, den


def gcb_spectrum(S: np.ndarray, state: InverseINCM, grid) -> np.ndarray:
    """Capon output power ``w_i^H S w_i`` with weights built from ``state.q_inv``."""
    P, _ = _gcb_scan(np.asarray(S), state.q_inv, _steering_matrix(grid))
    return P


def conventional_spectrum(S: np.ndarray, grid) -> np.ndarray:
    """Bartlett power ``a_i^H S a_i / N^2`` (weights ``a_i / N``)."""
    A = _steering_matrix(grid)
    N = A.shape[0]
    return np.maximum(np.real(np.einsum("ij,ij->j", A.conj(), S @ A)), 0.0) / N**2


def _check_invertible(S):
    w = np.linalg.eigvalsh(S)
    if not w[-1] > 0 or w[0] <= S.shape[0] * np.finfo(float).eps * w[-1]:
        raise RankError(
            "sample covariance is singular; standard Capon needs more snapshots "
            f"than sensors (L > N = {S.shape[0]})")


def scb_spectrum(S: np.ndarray, grid) -> np.ndarray:
    """Standard Capon spectrum ``1 / (a_i^H S^{-1} a_i)``.

    Raises:
        RankError: if ``S`` is numerically singular (typically ``L < N``).
    """
    S = np.asarray(S)
    A = _steering_matrix(grid)
    _check_invertible(S)
    S_inv_A = solve(S, A, assume_a="pos")
    return 1.0 / _quad_form_denominator(A, S_inv_A)


def music_spectrum(S: np.ndarray, grid, K: int) -> np.ndarray:
    """MUSIC pseudospectrum ``1 / ||E_n^H a_i||^2`` with E_n the N-K minor eigenvectors."""
    S = np.asarray(S)
    A = _steering_matrix(grid)
    N = S.shape[0]
    if int(K) != K or not 1 <= K < N:
        raise ValueError(f"MUSIC needs 1 <= K < N={N}, got K={K}")
    _, V = eigh(S)
    En = V[:, : N - int(K)]
    proj = np.sum(np.abs(En.conj().T @ A) ** 2, axis=0)
    return 1.0 / np.maximum(proj, np.finfo(float).tiny)


def find_peaks_k(spectrum, k: int) -> np.ndarray:
    """Indices of the ``k`` largest peaks, highest first.

    A peak is a strict interior local maximum; a flat top counts once at its
    first index. Endpoints are never peaks. If fewer than ``k`` peaks exist
    the result is padded with the largest remaining values that are not
    adjacent to an already returned index, so it may hold fewer than ``k``
    entries on tiny grids. Ties go to the smaller index.
    """
    x = np.maximum(np.asarray(spectrum, dtype=float), 0.0)
    M = x.size
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if k > M:
        raise ValueError(f"cannot pick {k} peaks from a spectrum of length {M}")
    _, props = find_peaks(x, plateau_size=1)
    starts = props["left_edges"]
    order = np.lexsort((starts, -x[starts]))
    picked = [int(i) for i in starts[order[:k]]]
    if len(picked) < k:
        taken = np.zeros(M + 2, dtype=bool)
        for i in picked:
            taken[i:i + 3] = True  # i-1, i, i+1 shifted by one
        for i in np.lexsort((np.arange(M), -x)):
            if not taken[i + 1]:
                picked.append(int(i))
                taken[i:i + 3] = True
                if len(picked) == k:
                    break
    return np.array(picked, dtype=int)


def least_coherent_index(candidates, chosen, grid, spectrum=None) -> int:
    """Candidate whose largest coherence with the chosen steering vectors is smallest.

    With nothing chosen every candidate scores 0. Ties are broken by the larger
    spectrum value, then the smaller index; without ``spectrum`` the candidate
    order stands in for height (``find_peaks_k`` returns highest first).
    """
    candidates = np.asarray(candidates, dtype=int).ravel()
    if candidates.size == 0:
        raise ValueError("candidate set is empty")
    chosen = np.asarray(chosen, dtype=int).ravel()
    A = _steering_matrix(grid)
    if chosen.size:
        score = np.abs(A[:, candidates].conj().T @ A[:, chosen]).max(axis=1)
    else:
        score = np.zeros(candidates.size)
    if spectrum is not None:
        height = np.asarray(spectrum, dtype=float)[candidates]
    else:
        height = -np.arange(candidates.size, dtype=float)
    return int(candidates[np.lexsort((candidates, -height, score))[0]])


def estimate_source_power(p_hat: float, a: np.ndarray, q_inv: np.ndarray) -> float:
    """Power of the source at ``a``: ``max(P - 1/(a^H Q^{-1} a), 0)``.

    With ``p_hat`` the Capon output power at ``a`` and ``Q`` the covariance of
    everything except that source, the difference is exactly the source power;
    negative sample estimates are clamped so the covariance only grows.
    """
    den = np.real(np.vdot(a, q_inv @ a))
    if not np.isfinite(den) or den <= 0:
        raise FloatingPointError("a^H Q^{-1} a must be positive and finite")
    return max(float(p_hat) - 1.0 / den, 0.0)


def sherman_morrison_update(state: InverseINCM, a: np.ndarray, gamma: float,
                            index: int | None = None) -> InverseINCM:
    """Fold ``gamma a a^H`` into the interference model in O(N^2).

    The inverse is updated with the Sherman-Morrison identity; ``Q`` itself is
    never formed. When ``index`` is given it is appended to ``chosen`` along
    with ``gamma``. ``gamma == 0`` keeps ``q_inv`` bit-for-bit.
    """
    if gamma < 0:
        raise ValueError("rank-one update weight must be non-negative")
    q_inv = state.q_inv
    if gamma > 0:
        b = q_inv @ a
        denom = 1.0 + gamma * np.real(np.vdot(a, b))
        q_inv = q_inv - (gamma / denom) * np.outer(b, b.conj())
        q_inv = 0.5 * (q_inv + q_inv.conj().T)
    if index is None:
        return InverseINCM(q_inv, state.chosen, state.powers)
    return InverseINCM(q_inv, state.chosen + (int(index),), state.powers + (float(gamma),))


def _estimate(grid, indices, spectrum, diagnostics=None):
    angles = grid.angles[indices] if isinstance(grid, SteeringGrid) else None
    return DoaEstimate(indices, angles, spectrum, diagnostics or [])


def gcb(S: np.ndarray, grid: SteeringGrid, K: int, first_power_correction: bool = True) -> DoaEstimate:
    """Greedy Capon beamformer.

    Starting from a white-noise interference model, each of the first K-1
    rounds scans the Capon spectrum, takes the k largest peaks, keeps the one
    least coherent with the sources found so far, estimates its power and
    folds it into the interference-plus-noise inverse by a rank-one update.
    The K-th scan's K largest peaks are the estimate. Works for any number of
    snapshots, including L < N.

    The white starting model ``tr(S)/N I`` still contains the first detected
    source, so its power estimate comes out low by a factor ``(N-1)/N`` (exact
    for one source in white noise). ``first_power_correction`` rescales it by
    ``N/(N-1)``.

    Args:
        S: N x N sample covariance.
        grid: Search grid.
        K: Number of sources.
        first_power_correction: Undo the first-round power shortfall.

    Returns:
        :class:`DoaEstimate` whose ``diagnostics`` holds ``(index, power)`` per
        greedy round.
    """
    S = np.asarray(S)
    A = _steering_matrix(grid)
    M = A.shape[1]
    if int(K) != K or not 1 <= K < M:
        raise ValueError(f"need 1 <= K < M={M}, got K={K}")
    K = int(K)
    state = InverseINCM.initial(S)
    diagnostics = []
    for k in range(1, K + 1):
        P, _ = _gcb_scan(S, state.q_inv, A)
        peaks = find_peaks_k(P, k)
        if k == K:
            break
        i_k = least_coherent_index(peaks, state.chosen, A, P)
        gamma = estimate_source_power(P[i_k], A[:, i_k], state.q_inv)
        if k == 1 and first_power_correction and A.shape[0] > 1:
            gamma *= A.shape[0] / (A.shape[0] - 1)
        state = sherman_morrison_update(state, A[:, i_k], gamma, index=i_k)
        diagnostics.append((i_k, gamma))
    return _estimate(grid, peaks, P, diagnostics)


def scb(S: np.ndarray, grid: SteeringGrid, K: int) -> DoaEstimate:
    """Standard Capon beamformer: the K largest peaks of :func:`scb_spectrum`."""
    P = scb_spectrum(S, grid)
    return _estimate(grid, find_peaks_k(P, K), P)


def music(S: np.ndarray, grid: SteeringGrid, K: int) -> DoaEstimate:
    """MUSIC with the noise subspace spanned by the N-K smallest eigenvectors."""
    P = music_spectrum(S, grid, K)
    return _estimate(grid, find_peaks_k(P, K), P)


def conventional(S: np.ndarray, grid: SteeringGrid, K: int) -> DoaEstimate:
    P = conventional_spectrum(S, grid)
    return _estimate(grid, find_peaks_k(P, K), P)


METHODS = {
    "gcb": gcb,
    "scb": scb,
    "music": music,
    "cbf": conventional,
}
