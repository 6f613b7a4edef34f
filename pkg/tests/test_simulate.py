import numpy as np
import pytest

from greedycapon.array import ArraySpec, ula_steering
from greedycapon.simulate import (
    NoiseSpec,
    SourceSet,
    calibrate_powers,
    exact_covariance,
    generate_snapshots,
    sample_covariance,
    source_waveforms,
)

FOUR_DOAS = np.deg2rad([-30.1, -20.02, -10.02, 3.02])


def test_single_source_zero_db():
    np.testing.assert_allclose(calibrate_powers(0.0, [0.0], 1.0), [1.0])


def test_four_source_offsets():
    gamma = calibrate_powers(-6.0, [0, -1, -2, -5], 1.0)
    np.testing.assert_allclose(10 * np.log10(gamma), [-4, -5, -6, -9], rtol=1e-12)
    np.testing.assert_allclose(gamma, [0.3981071705534972, 0.31622776601683794,
                                       0.251188643150958, 0.12589254117941673], rtol=1e-12)
    # array SNR is the mean of per-source dB values
    assert np.mean(10 * np.log10(gamma)) == pytest.approx(-6.0, rel=1e-12)


def test_equal_sources_with_noise_scaling():
    np.testing.assert_allclose(calibrate_powers(3.0, [0, 0], 2.0), [2 * 10**0.3] * 2, rtol=1e-12)


def test_calibrate_rejects_empty():
    with pytest.raises(ValueError):
        calibrate_powers(0.0, [])


def test_source_set_validation():
    with pytest.raises(ValueError):
        SourceSet([0.1], [0.0])
    with pytest.raises(ValueError):
        SourceSet([0.1, 0.2], [1.0, 1.0], phase_links=[(0, 1)])
    with pytest.raises(ValueError):
        SourceSet([0.1], [1.0], model="laplace")
    with pytest.raises(ValueError):
        SourceSet([0.1, 0.2], [1.0, 1.0], model="constant-modulus", phase_links=[(0, 5)])


def test_noise_only_covariance_is_white():
    spec = ArraySpec(6)
    X = generate_snapshots(spec, None, NoiseSpec(1.0), 100_000, seed=3)
    S = sample_covariance(X)
    assert np.linalg.norm(S - np.eye(6)) / np.linalg.norm(np.eye(6)) < 0.02


def test_gaussian_source_power_per_sensor():
    spec = ArraySpec(8)
    src = SourceSet([0.0], [4.0])
    X = generate_snapshots(spec, src, NoiseSpec(0.0), 10_000, seed=11)
    np.testing.assert_allclose(np.mean(np.abs(X) ** 2, axis=1), 4.0, rtol=0.05)


def test_linked_phases_identical():
    src = SourceSet(FOUR_DOAS, [1.0, 0.8, 0.6, 0.3], model="constant-modulus", phase_links=[(0, 3)])
    s = source_waveforms(src, 500, np.random.default_rng(5))
    # one shared phase draw; amplitudes differ, so compare to rounding
    np.testing.assert_allclose(np.angle(s[0]), np.angle(s[3]), rtol=0, atol=4 * np.finfo(float).eps)
    assert not np.allclose(np.angle(s[0]), np.angle(s[1]))


def test_constant_modulus_power():
    powers = np.array([1.0, 0.8, 0.6, 0.3])
    src = SourceSet(FOUR_DOAS, powers, model="constant-modulus")
    s = source_waveforms(src, 200, np.random.default_rng(0))
    np.testing.assert_allclose(np.abs(s) ** 2, np.broadcast_to(powers[:, None], s.shape), rtol=1e-14)


def test_literal_amplitude_switch():
    src = SourceSet([0.0], [0.5], model="constant-modulus", amplitude="literal")
    s = source_waveforms(src, 10, np.random.default_rng(0))
    np.testing.assert_allclose(np.abs(s), 0.5, rtol=1e-14)


def test_same_seed_bit_identical():
    spec = ArraySpec(20)
    src = SourceSet(FOUR_DOAS, calibrate_powers(-6, [0, -1, -2, -5]))
    X1 = generate_snapshots(spec, src, NoiseSpec(1.0), 125, seed=42)
    X2 = generate_snapshots(spec, src, NoiseSpec(1.0), 125, seed=42)
    X3 = generate_snapshots(spec, src, NoiseSpec(1.0), 125, seed=43)
    assert X1.tobytes() == X2.tobytes()
    assert not np.array_equal(X1, X3)


def test_scm_single_snapshot_is_outer_product():
    x = np.array([1 + 2j, -0.5j, 3.0])
    S = sample_covariance(x[:, None])
    np.testing.assert_allclose(S, np.outer(x, x.conj()), atol=1e-15)
    assert np.linalg.matrix_rank(S) == 1


def test_scm_orthonormal_columns():
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3)))
    S = sample_covariance(np.sqrt(3) * Q)
    np.testing.assert_allclose(S, Q @ Q.conj().T, atol=1e-14)
    np.testing.assert_allclose(S @ Q, Q, atol=1e-14)


def test_scm_matches_brute_force_sum():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((4, 50)) + 1j * rng.standard_normal((4, 50))
    brute = np.zeros((4, 4), dtype=complex)
    for l in range(50):
        for i in range(4):
            for j in range(4):
                brute[i, j] += X[i, l] * np.conj(X[j, l])
    brute /= 50
    S = sample_covariance(X)
    np.testing.assert_allclose(S, brute, atol=1e-12)
    np.testing.assert_array_equal(S, S.conj().T)
    assert np.trace(S).real == pytest.approx(np.sum(np.abs(X) ** 2) / 50, rel=1e-13)
    assert np.linalg.eigvalsh(S).min() > -1e-12


def test_exact_covariance_noise_only():
    np.testing.assert_array_equal(exact_covariance(ArraySpec(5), None, NoiseSpec(3.0)), 3 * np.eye(5))


def test_exact_covariance_single_broadside_source():
    R = exact_covariance(ArraySpec(4), SourceSet([0.0], [2.0]), NoiseSpec(1.0))
    np.testing.assert_allclose(R, 2 * np.ones((4, 4)) + np.eye(4), atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(R), [1, 1, 1, 9], atol=1e-12)


def test_exact_covariance_signal_part_rank():
    spec = ArraySpec(20)
    src = SourceSet(FOUR_DOAS, calibrate_powers(0, [0, -1, -2, -5]))
    R = exact_covariance(spec, src, NoiseSpec(1.5))
    signal = R - 1.5 * np.eye(20)
    w = np.linalg.eigvalsh(signal)
    assert w.min() > -1e-10
    assert np.sum(w > 1e-8) == 4
    A = ula_steering(spec, FOUR_DOAS)
    np.testing.assert_allclose(signal, (A * src.powers) @ A.conj().T, atol=1e-12)


def test_coherent_exact_covariance_drops_rank():
    spec = ArraySpec(20)
    src = SourceSet(FOUR_DOAS, [1.0, 0.8, 0.6, 0.3], model="constant-modulus", phase_links=[(0, 3)])
    signal = exact_covariance(spec, src, NoiseSpec(1.0)) - np.eye(20)
    assert np.sum(np.linalg.eigvalsh(signal) > 1e-8) == 3


def test_coherent_sample_covariance_converges_to_exact():
    spec = ArraySpec(6)
    src = SourceSet(np.deg2rad([-20.0, 15.0]), [1.0, 0.5], model="constant-modulus", phase_links=[(0, 1)])
    S = sample_covariance(generate_snapshots(spec, src, NoiseSpec(0.5), 50_000, seed=2))
    R = exact_covariance(spec, src, NoiseSpec(0.5))
    assert np.linalg.norm(S - R) / np.linalg.norm(R) < 0.03
