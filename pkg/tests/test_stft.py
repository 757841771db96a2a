import numpy as np
import pytest

from adaspec import (InvalidArgumentError, Lattice, Signal, dft_forward, dft_inverse,
                     frame_bounds_diag, make_hanning, overlap_sum, spectrogram, stft)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def test_dft_impulse():
    np.testing.assert_allclose(dft_forward([1, 0, 0, 0]), [1, 1, 1, 1])


def test_dft_round_trip_and_parseval(rng):
    x = rng.standard_normal(1024) + 1j * rng.standard_normal(1024)
    X = dft_forward(x)
    assert np.linalg.norm(dft_inverse(X) - x) / np.linalg.norm(x) < 1e-12
    assert np.sum(np.abs(x) ** 2) == pytest.approx(np.sum(np.abs(X) ** 2) / 1024, rel=1e-12)


def test_dft_matches_direct_sum(rng):
    x = rng.standard_normal(16)
    k = np.arange(16)
    direct = np.exp(-2j * np.pi * np.outer(k, k) / 16) @ x
    np.testing.assert_allclose(dft_forward(x), direct, atol=1e-12)


def test_dft_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        dft_forward([])


def test_impulse_is_flat_in_frequency():
    n, hop, p = 64, 16, 100
    x = np.zeros(300)
    x[p] = 1
    w = make_hanning(n)
    m = stft(Signal(x, 1000), w, Lattice(hop, 128))
    for i, row in enumerate(np.abs(m.coeffs)):
        offset = p - i * hop
        expected = w.taps[offset] if 0 <= offset < n else 0.0
        np.testing.assert_allclose(row, expected, atol=1e-14)
    tile = spectrogram(m)
    np.testing.assert_allclose(tile.values[:, 5], np.abs(m.coeffs[:, 5]) ** 2)


def test_bin_centered_sinusoid_three_bins():
    n, k0 = 64, 8
    t = np.arange(n)
    x = np.sin(2 * np.pi * k0 * t / n)
    m = stft(Signal(x, n), make_hanning(n), Lattice(n, n))
    mag = np.abs(m.coeffs[0])
    # closed form: Hann = 1/2 - e^{+}/4 - e^{-}/4, sine = (e^{+} - e^{-}) / 2i
    np.testing.assert_allclose(mag[[k0 - 1, k0, k0 + 1]], [n / 8, n / 4, n / 8], atol=1e-12)
    np.testing.assert_allclose(mag[[n - k0 - 1, n - k0, n - k0 + 1]], [n / 8, n / 4, n / 8], atol=1e-12)
    mask = np.ones(n, bool)
    mask[[k0 - 1, k0, k0 + 1, n - k0 - 1, n - k0, n - k0 + 1]] = False
    assert np.abs(m.coeffs[0][mask]).max() < 1e-12
    power = spectrogram(m).values[0]
    np.testing.assert_allclose(power[[k0 - 1, k0, k0 + 1]] / power[k0 - 1], [1, 4, 1], rtol=1e-12)


def test_zero_signal():
    m = stft(Signal(np.zeros(500), 1), make_hanning(64), Lattice(16, 64))
    assert not np.any(m.coeffs)
    assert not np.any(spectrogram(m).values)


def test_frame_count_and_starts():
    m = stft(Signal(np.zeros(1000), 1), make_hanning(100), Lattice(30, 128))
    assert m.num_frames == (1000 - 100) // 30 + 1
    assert m.frame_starts()[-1] + 100 <= 1000


def test_stft_errors():
    with pytest.raises(InvalidArgumentError):
        stft(Signal(np.zeros(100), 1), make_hanning(64), Lattice(16, 32))
    with pytest.raises(InvalidArgumentError):
        stft(Signal(np.zeros(50), 1), make_hanning(64), Lattice(16, 64))
    with pytest.raises(InvalidArgumentError):
        Lattice(0, 64)


def test_linearity(rng):
    f, g = rng.standard_normal(2000), rng.standard_normal(2000)
    w, lat = make_hanning(256), Lattice(64, 512)
    lhs = stft(Signal(2.5 * f - 0.75 * g, 1), w, lat).coeffs
    rhs = 2.5 * stft(Signal(f, 1), w, lat).coeffs - 0.75 * stft(Signal(g, 1), w, lat).coeffs
    assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-12


def test_time_shift_covariance(rng):
    hop = 32
    x = rng.standard_normal(3000)
    shifted = np.concatenate([np.zeros(hop), x[:-hop]])
    w, lat = make_hanning(128), Lattice(hop, 128)
    a = spectrogram(stft(Signal(x, 1), w, lat)).values
    b = spectrogram(stft(Signal(shifted, 1), w, lat)).values
    assert np.array_equal(b[1:], a[:-1])


def test_tight_frame_energy(rng):
    n, hop, nfft = 256, 64, 512
    w = make_hanning(n)
    a, b = frame_bounds_diag(w, hop)
    assert a == pytest.approx(b)
    x = np.zeros(4096)
    x[n:-n] = rng.standard_normal(4096 - 2 * n)
    values = spectrogram(stft(Signal(x, 1), w, Lattice(hop, nfft))).values
    # Parseval per frame: sum_k |X|^2 = nfft * sum_t |h f|^2
    assert values.sum() / (a * nfft) == pytest.approx(np.sum(x ** 2), rel=1e-6)


def test_overlap_sum_hop2():
    np.testing.assert_allclose(overlap_sum(make_hanning(8), 2, range(20)), 1.5, atol=1e-15)


def test_overlap_sum_hop4():
    s = overlap_sum(make_hanning(8), 4, range(8))
    np.testing.assert_allclose(s, [1.0, 0.75, 0.5, 0.75] * 2, atol=1e-15)


def test_overlap_sum_has_gaps_when_hop_too_large():
    assert np.any(overlap_sum(make_hanning(8), 8) == 0)
    assert np.any(overlap_sum(make_hanning(8), 11, range(22)) == 0)


def test_overlap_sum_periodic_and_span_independent():
    w = make_hanning(100)
    s = overlap_sum(w, 30, range(1000, 1300))
    np.testing.assert_array_equal(s[:270], s[30:])
    assert (s.min(), s.max()) == frame_bounds_diag(w, 30)


def test_frame_bounds():
    h = make_hanning(8)
    assert frame_bounds_diag(h, 2) == (1.5, 1.5)
    a, b = frame_bounds_diag(h, 4)
    assert abs(a - 0.5) <= 1e-12 and abs(b - 1.0) <= 1e-12
    assert frame_bounds_diag(h, 8)[0] == 0.0
