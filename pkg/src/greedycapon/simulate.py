"""Synthetic narrowband snapshots and covariance matrices.

Two source models are supported:

* ``"gaussian"``: ``s_k ~ CN(0, gamma_k)`` i.i.d. over snapshots.
* ``"constant-modulus"``: ``s_k = c_k exp(j phi_k)`` with phases uniform on
  ``[0, 2 pi)``, redrawn every snapshot. Sources listed together in
  ``phase_links`` share the same phase draw and are therefore fully coherent.
  ``c_k = sqrt(gamma_k)`` by default (``amplitude="power"``) so that the source
  power is ``gamma_k``; ``amplitude="literal"`` uses ``c_k = gamma_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array import ArraySpec, ula_steering

MODELS = ("gaussian", "constant-modulus")
AMPLITUDES = ("power", "literal")


@dataclass(frozen=True)
class SourceSet:
    """K far-field sources, strongest first.

    ``doas`` are radians; ``phase_links`` holds 0-based index groups whose
    phases are tied (constant-modulus model only).
    """

    doas: np.ndarray
    powers: np.ndarray
    model: str = "gaussian"
    phase_links: tuple = ()
    amplitude: str = "power"

    def __post_init__(self):
        doas = np.atleast_1d(np.asarray(self.doas, dtype=float))
        powers = np.atleast_1d(np.asarray(self.powers, dtype=float))
        if doas.ndim != 1 or doas.shape != powers.shape:
            raise ValueError("doas and powers must be 1-D of equal length")
        if np.any(~(powers > 0)):
            raise ValueError("source powers must be positive")
        if np.any(np.abs(doas) > np.pi / 2 + 1e-12):
            raise ValueError("source DOAs must lie in [-pi/2, pi/2]")
        if self.model not in MODELS:
            raise ValueError(f"unknown source model {self.model!r}; expected one of {MODELS}")
        if self.amplitude not in AMPLITUDES:
            raise ValueError(f"unknown amplitude convention {self.amplitude!r}")
        links = tuple(tuple(int(i) for i in group) for group in self.phase_links)
        if links and self.model != "constant-modulus":
            raise ValueError("phase_links require the constant-modulus model")
        for group in links:
            if len(group) < 2 or any(i < 0 or i >= doas.size for i in group):
                raise ValueError(f"invalid phase link {group} for {doas.size} sources")
        object.__setattr__(self, "doas", doas)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "phase_links", links)

    @property
    def K(self) -> int:
        return self.doas.size

    def amplitudes(self) -> np.ndarray:
        if self.amplitude == "literal":
            return self.powers.copy()
        return np.sqrt(self.powers)

    def phase_groups(self) -> np.ndarray:
        """Index of the phase draw each source uses (identity when unlinked)."""
        parent = list(range(self.K))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for group in self.phase_links:
            root = find(group[0])
            for i in group[1:]:
                parent[find(i)] = root
        return np.array([find(i) for i in range(self.K)], dtype=int)


@dataclass(frozen=True)
class NoiseSpec:
    """Spatially white circular Gaussian noise of variance ``variance`` per sensor."""

    variance: float = 1.0

    def __post_init__(self):
        # zero is accepted for noise-free checks
        if not self.variance >= 0:
            raise ValueError(f"noise variance must be non-negative, got {self.variance}")


def calibrate_powers(array_snr_db: float, relative_db, sigma2: float = 1.0) -> np.ndarray:
    """Source powers for a target array SNR.

    The array SNR is the mean of the per-source SNRs in dB. Given fixed dB
    offsets between the sources, the per-source SNR is
    ``array_snr_db + relative_db[k] - mean(relative_db)``.
    """
    rel = np.atleast_1d(np.asarray(relative_db, dtype=float))
    if rel.size == 0:
        raise ValueError("relative_db must contain at least one offset")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    snr_db = array_snr_db + rel - rel.mean()
    return sigma2 * 10.0 ** (snr_db / 10.0)


def _complex_normal(rng, shape, variance):
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def source_waveforms(sources: SourceSet, L: int, rng) -> np.ndarray:
    """K x L source signal matrix drawn from ``rng``."""
    K = sources.K
    if sources.model == "gaussian":
        return _complex_normal(rng, (K, L), sources.powers[:, None])
    phases = rng.uniform(0.0, 2 * np.pi, size=(K, L))
    phases = phases[sources.phase_groups()]
    return sources.amplitudes()[:, None] * np.exp(1j * phases)


def generate_snapshots(spec: ArraySpec, sources: SourceSet | None, noise: NoiseSpec,
                       L: int, seed) -> np.ndarray:
    """Simulate an N x L snapshot matrix ``X = A s + n``.

    ``seed`` may be an integer, a ``SeedSequence`` or a ``Generator``; equal
    seeds give bit-identical output. Sources are drawn before the noise.
    """
    if int(L) != L or L < 1:
        raise ValueError(f"number of snapshots must be a positive integer, got {L}")
    L = int(L)
    rng = np.random.default_rng(seed)
    N = spec.n_sensors
    X = np.zeros((N, L), dtype=complex)
    if sources is not None and sources.K > 0:
        A = ula_steering(spec, sources.doas)
        X += A @ source_waveforms(sources, L, rng)
    if noise.variance > 0:
        X += _complex_normal(rng, (N, L), noise.variance)
    return X


def sample_covariance(X: np.ndarray) -> np.ndarray:
    """Sample covariance ``(1/L) sum_l x_l x_l^H``, Hermitian by construction."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError("X must be an N x L matrix with L >= 1")
    S = (X @ X.conj().T) / X.shape[1]
    return 0.5 * (S + S.conj().T)


def source_covariance(sources: SourceSet) -> np.ndarray:
    """K x K covariance of the source waveforms implied by the source model."""
    if sources.model == "gaussian":
        return np.diag(sources.powers).astype(complex)
    c = sources.amplitudes()
    groups = sources.phase_groups()
    linked = groups[:, None] == groups[None, :]
    return np.where(linked, np.outer(c, c), 0.0).astype(complex)


def exact_covariance(spec: ArraySpec, sources: SourceSet | None, noise: NoiseSpec) -> np.ndarray:
    """Population covariance ``A R_s A^H + sigma^2 I``.

    For uncorrelated sources this is ``sum_k gamma_k a_k a_k^H + sigma^2 I``;
    phase-linked constant-modulus sources contribute their cross terms.
    """
    N = spec.n_sensors
    R = noise.variance * np.eye(N, dtype=complex)
    if sources is None or sources.K == 0:
        return R
    A = ula_steering(spec, sources.doas)
    R = R + A @ source_covariance(sources) @ A.conj().T
    return 0.5 * (R + R.conj().T)
