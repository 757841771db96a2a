"""Regular-lattice STFT, spectrogram and painless-frame diagnostics.

Frame ``n`` of an analysis starting at ``start_sample`` covers the samples
``[start_sample + n*hop, start_sample + n*hop + len(window))``. Only full
frames are computed; the signal is never padded implicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidArgumentError
from .signal import Signal, Window

__all__ = [
    "Lattice",
    "StftMatrix",
    "SpectrogramTile",
    "dft_forward",
    "dft_inverse",
    "stft",
    "stft_frames",
    "spectrogram",
    "overlap_sum",
    "frame_bounds_diag",
]


@dataclass(frozen=True)
class Lattice:
    hop: int
    fft_size: int

    def __post_init__(self):
        if int(self.hop) != self.hop or self.hop < 1:
            raise InvalidArgumentError(f"hop must be a positive integer, got {self.hop}")
        if int(self.fft_size) != self.fft_size or self.fft_size < 1:
            raise InvalidArgumentError(f"fft_size must be a positive integer, got {self.fft_size}")
        object.__setattr__(self, "hop", int(self.hop))
        object.__setattr__(self, "fft_size", int(self.fft_size))

    @property
    def area_element(self) -> float:
        """Time step times frequency step (s * Hz), independent of the sample rate."""
        return self.hop / self.fft_size

    def freq_step(self, sample_rate: float) -> float:
        return sample_rate / self.fft_size


@dataclass(frozen=True, eq=False)
class StftMatrix:
    coeffs: np.ndarray          # (num_frames, fft_size) complex
    lattice: Lattice
    window: Window
    start_sample: int = 0

    @property
    def num_frames(self) -> int:
        return self.coeffs.shape[0]

    def frame_starts(self) -> np.ndarray:
        return self.start_sample + self.lattice.hop * np.arange(self.num_frames)


@dataclass(frozen=True, eq=False)
class SpectrogramTile:
    values: np.ndarray          # (num_frames, num_bins), nonnegative
    lattice: Lattice
    area_element: float

    @property
    def shape(self):
        return self.values.shape


def _check_length(n: int):
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"unsupported transform length {n}")


def dft_forward(buffer) -> np.ndarray:
    """Unnormalized forward DFT ``X[k] = sum_t x[t] exp(-2 pi i k t / N)``."""
    x = np.asarray(buffer, dtype=complex)
    if x.ndim != 1:
        raise InvalidArgumentError("dft expects a 1-d buffer")
    _check_length(x.size)
    return np.fft.fft(x)


def dft_inverse(buffer) -> np.ndarray:
    """Inverse of :func:`dft_forward`, carrying the ``1/N`` factor."""
    x = np.asarray(buffer, dtype=complex)
    if x.ndim != 1:
        raise InvalidArgumentError("dft expects a 1-d buffer")
    _check_length(x.size)
    return np.fft.ifft(x)


def stft_frames(x: np.ndarray, taps: np.ndarray, hop: int, fft_size: int,
                start: int = 0, num_frames: int | None = None) -> np.ndarray:
    """Windowed, zero-padded DFT frames of the raw array ``x``.

    Returns an array of shape ``(num_frames, fft_size)``. Without an explicit
    ``num_frames`` every full frame starting at ``start`` is computed.
    """
    n_win = taps.size
    if fft_size < n_win:
        raise InvalidArgumentError(f"fft_size {fft_size} shorter than window length {n_win}")
    avail = x.size - start - n_win
    if avail < 0:
        raise InvalidArgumentError(
            f"signal span of {x.size - start} samples shorter than window length {n_win}")
    if num_frames is None:
        num_frames = avail // hop + 1
    elif (num_frames - 1) * hop > avail:
        raise InvalidArgumentError("requested frames run past the end of the signal")
    if num_frames <= 0:
        return np.zeros((0, fft_size), dtype=complex)
    view = sliding_window_view(x[start:start + (num_frames - 1) * hop + n_win], n_win)[::hop]
    return np.fft.fft(view * taps, n=fft_size, axis=1)


def stft(signal: Signal, window: Window, lattice: Lattice, start_sample: int = 0) -> StftMatrix:
    """Short-time Fourier transform of ``signal`` on a regular lattice."""
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, dtype=float)
    coeffs = stft_frames(x, window.taps, lattice.hop, lattice.fft_size, start_sample)
    return StftMatrix(coeffs, lattice, window, start_sample)


def spectrogram(matrix: StftMatrix) -> SpectrogramTile:
    c = matrix.coeffs
    values = c.real ** 2 + c.imag ** 2
    return SpectrogramTile(values, matrix.lattice, matrix.lattice.area_element)


def overlap_sum(window: Window, hop: int, span=None) -> np.ndarray:
    """``s(t) = sum_n |g(t - n*hop)|^2`` on an infinite lattice, evaluated at ``span``.

    The painless frame operator is this sequence times ``1/b``; the ``1/b``
    factor is left out. ``span`` defaults to one period ``range(hop)``.
    """
    if int(hop) != hop or hop < 1:
        raise InvalidArgumentError(f"hop must be a positive integer, got {hop}")
    hop = int(hop)
    if span is None:
        span = range(hop)
    t = np.asarray(list(span) if isinstance(span, range) else span, dtype=np.int64)
    # exact rational accumulation of the squared taps, rounded once
    g = [Fraction(float(v)) for v in window.taps]
    per_phase = np.array([float(sum((v * v for v in g[r::hop]), Fraction(0)))
                          for r in range(hop)])
    return per_phase[np.mod(t, hop)]


def frame_bounds_diag(window: Window, hop: int) -> tuple[float, float]:
    """Lower and upper bound of the diagonal frame operator (without ``1/b``).

    ``A > 0`` certifies that the window with this hop is a painless frame.
    """
    s = overlap_sum(window, hop)
    return float(s.min()), float(s.max())
