"""Weighted overlap-add synthesis over a variable-window frame.

Every frame's inverse DFT gives a windowed piece ``h_n(t) f(t)`` of the
signal. Summing ``h_n * piece`` over all atoms and dividing by
``sum h_n**2`` recovers ``f`` wherever the denominator is positive, for any
mixture of windows and hops. Applied to modified coefficients, the same
formula returns the least-squares signal for them. The canonical-dual
formulation with a normalizing function is equivalent in this setting and
is not implemented separately.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .adaptive import FRAME_FLOOR, AdaptiveSpectrogram, Slice
from .errors import InvalidArgumentError, NotAFrameError
from .signal import Signal
from .stft import stft_frames

__all__ = [
    "ReducedFrame",
    "reduced_frame",
    "denominator_profile",
    "reconstruct",
    "apply_mask",
    "reanalyze",
    "interior_error",
]


@dataclass(frozen=True, eq=False)
class ReducedFrame:
    """Time-sorted atoms ``(frame_start, taps, hop)`` of an adapted analysis."""

    starts: np.ndarray
    windows: tuple            # taps per atom
    hops: np.ndarray
    signal_len: int

    def __post_init__(self):
        if np.any(np.diff(self.starts) < 0):
            order = np.argsort(self.starts, kind="stable")
            object.__setattr__(self, "starts", self.starts[order])
            object.__setattr__(self, "windows", tuple(self.windows[i] for i in order))
            object.__setattr__(self, "hops", self.hops[order])

    def __len__(self):
        return self.starts.size

    @property
    def centers(self) -> np.ndarray:
        return self.starts + np.array([w.size for w in self.windows]) / 2.0

    def span(self) -> tuple[int, int]:
        """Samples between the first and the last atom center."""
        c = self.centers
        return int(np.ceil(c.min())), int(np.floor(c.max())) + 1


def reduced_frame(analysis: AdaptiveSpectrogram) -> ReducedFrame:
    starts, windows, hops = [], [], []
    for s in analysis.slices:
        for start in s.frame_starts:
            starts.append(int(start))
            windows.append(s.window.taps)
            hops.append(s.lattice.hop)
    return ReducedFrame(np.asarray(starts, dtype=np.int64), tuple(windows),
                        np.asarray(hops, dtype=np.int64), analysis.signal_len)


def denominator_profile(reduced: ReducedFrame, span=None) -> np.ndarray:
    """Pointwise ``sum_n h_n(t)**2`` over the atoms, on ``span`` (default: whole signal)."""
    den = np.zeros(reduced.signal_len)
    for start, taps in zip(reduced.starts, reduced.windows):
        den[start:start + taps.size] += taps ** 2
    if span is None:
        return den
    lo, hi = span
    return den[lo:hi]


def _check_denominator(den, reduced, eps):
    lo, hi = reduced.span()
    bad = np.flatnonzero(den[lo:hi] <= eps)
    if bad.size:
        i = lo + int(bad[0])
        raise NotAFrameError(i, den[i])


def reconstruct(analysis: AdaptiveSpectrogram, eps: float = FRAME_FLOOR) -> Signal:
    """Weighted overlap-add inverse of an adaptive analysis.

    The whole signal length is produced. Samples near the signal edges where
    the denominator falls below ``eps`` (outside the span between the first
    and last atom centers) are set to zero; a sub-``eps`` denominator inside
    that span raises :class:`NotAFrameError`.
    """
    n = analysis.signal_len
    num = np.zeros(n)
    den = np.zeros(n)
    for s in analysis.slices:
        m = s.window.length
        taps = s.window.taps
        pieces = np.fft.ifft(s.coeffs, axis=1)[:, :m].real
        for start, piece in zip(s.frame_starts, pieces):
            num[start:start + m] += taps * piece
            den[start:start + m] += taps ** 2
    _check_denominator(den, reduced_frame(analysis), eps)
    out = np.zeros(n)
    ok = den > eps
    out[ok] = num[ok] / den[ok]
    return Signal(out, analysis.sample_rate)


def apply_mask(analysis: AdaptiveSpectrogram, mask) -> AdaptiveSpectrogram:
    """Multiply each slice's coefficients by the matching gain matrix.

    ``mask`` is a sequence with one array per slice, each broadcastable to
    the slice's ``(num_frames, fft_size)`` coefficient matrix.
    """
    if len(mask) != len(analysis.slices):
        raise InvalidArgumentError(
            f"mask has {len(mask)} entries for {len(analysis.slices)} slices")
    slices = []
    for s, gain in zip(analysis.slices, mask):
        gain = np.asarray(gain)
        if not np.all(np.isfinite(gain)):
            raise InvalidArgumentError("mask entries must be finite")
        try:
            coeffs = s.coeffs * np.broadcast_to(gain, s.coeffs.shape)
        except ValueError:
            raise InvalidArgumentError(
                f"mask of shape {gain.shape} does not match slice {s.coeffs.shape}") from None
        slices.append(replace(s, coeffs=coeffs))
    return replace(analysis, slices=tuple(slices))


def reanalyze(signal: Signal, template: AdaptiveSpectrogram) -> AdaptiveSpectrogram:
    """Analyse ``signal`` with exactly the atoms of ``template``."""
    if len(signal) != template.signal_len:
        raise InvalidArgumentError("signal length differs from the template analysis")
    x = signal.samples
    slices = []
    for s in template.slices:
        coeffs = stft_frames(x, s.window.taps, s.lattice.hop, s.lattice.fft_size,
                             start=int(s.frame_starts[0]), num_frames=s.num_frames)
        slices.append(replace(s, coeffs=coeffs))
    return replace(template, slices=tuple(slices))


def interior_error(original: Signal, rebuilt: Signal, margin: int) -> float:
    """Relative L2 error ignoring ``margin`` samples at both ends."""
    a = original.samples[margin:len(original) - margin]
    b = rebuilt.samples[margin:len(rebuilt) - margin]
    ref = np.linalg.norm(a)
    diff = np.linalg.norm(a - b)
    if ref == 0:
        return float(diff)
    return float(diff / ref)
