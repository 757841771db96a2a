"""Entropy-driven window selection and assembly of the adaptive analysis.

Two multi-frame layouts are supported:

``v1``
    every scaled window shares the hop of the smallest one and the FFT size
    of the largest one;
``v2``
    every window gets its own hop so that all analyses have the same overlap
    ratio (and redundancy); the FFT size is still shared.

The signal is cut into overlapping segments whose length is counted in
frames of the largest window. Each segment is pre-weighted at its edges,
analysed with every window, and the window giving the lowest Rényi entropy
wins. The final analysis is recomputed on the unweighted signal with the
selected window around each time point.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entropy import DEFAULT_ALPHA, ProbabilityDensity, RenyiOrder, renyi_entropy
from .errors import InfeasiblePlanError, InvalidArgumentError, InvalidSegmentError
from .signal import Signal, Window, make_hanning, scale_window
from .stft import Lattice, frame_bounds_diag, stft_frames

__all__ = [
    "MultiFrameConfig",
    "AnalysisPlan",
    "SelectionTrack",
    "Slice",
    "AdaptiveSpectrogram",
    "FRAME_FLOOR",
    "window_lengths",
    "plan",
    "preweight_segment",
    "evaluate_segment",
    "select_best",
    "assign_choices",
    "adapt",
]

# smallest admissible lower frame bound, shared with the synthesis floor
FRAME_FLOOR = 1e-8


@dataclass(frozen=True)
class MultiFrameConfig:
    version: str = "v2"
    min_len: int = 512
    max_len: int = 4096
    num_windows: int = 8
    alpha: float = DEFAULT_ALPHA
    segment_frames: int = 4
    segment_overlap_frames: int = 2
    overlap_ratio: float = 0.75
    hop: int | None = None  # v1 only; defaults to (1 - overlap_ratio) * min_len

    def __post_init__(self):
        if self.version not in ("v1", "v2"):
            raise InvalidArgumentError(f"version must be 'v1' or 'v2', got {self.version!r}")
        if not 1 <= self.min_len <= self.max_len:
            raise InvalidArgumentError(
                f"need 1 <= min_len <= max_len, got {self.min_len}, {self.max_len}")
        if self.num_windows < 1:
            raise InvalidArgumentError("num_windows must be >= 1")
        if self.num_windows > 1 and self.min_len == self.max_len:
            raise InvalidArgumentError("several windows need min_len < max_len")
        if self.segment_frames < 1 or not 0 <= self.segment_overlap_frames < self.segment_frames:
            raise InvalidArgumentError("need 0 <= segment_overlap_frames < segment_frames")
        if not 0 < self.overlap_ratio < 1:
            raise InvalidArgumentError("overlap_ratio must lie in (0, 1)")
        if self.hop is not None and (int(self.hop) != self.hop or self.hop < 1):
            raise InvalidArgumentError("hop must be a positive integer")
        RenyiOrder(self.alpha)


def window_lengths(min_len: int, max_len: int, num_windows: int) -> list[int]:
    """Geometrically spaced even window lengths with exact endpoints."""
    if num_windows == 1:
        return [int(max_len)]
    ratio = max_len / min_len
    lengths = [int(min_len)]
    for k in range(1, num_windows - 1):
        x = min_len * ratio ** (k / (num_windows - 1))
        lengths.append(2 * int(round(x / 2)))
    lengths.append(int(max_len))
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise InvalidArgumentError(
            f"{num_windows} windows between {min_len} and {max_len} collide after rounding: {lengths}")
    return lengths


@dataclass(frozen=True, eq=False)
class AnalysisPlan:
    config: MultiFrameConfig
    windows: tuple            # Window per scale, increasing length
    lattices: tuple           # Lattice per scale
    bounds: tuple             # (A, B) per scale
    segments: tuple           # (start, stop) sample ranges
    signal_len: int
    sample_rate: float

    @property
    def lengths(self) -> list[int]:
        return [w.length for w in self.windows]

    @property
    def hops(self) -> list[int]:
        return [lat.hop for lat in self.lattices]

    @property
    def fft_size(self) -> int:
        return self.lattices[0].fft_size

    @property
    def max_window(self) -> Window:
        return self.windows[-1]

    @property
    def segment_len(self) -> int:
        return self.segments[0][1] - self.segments[0][0]


def _segments(signal_len, seg_len, step):
    if signal_len <= seg_len:
        return ((0, signal_len),)
    starts = list(range(0, signal_len - seg_len + 1, step))
    if starts[-1] + seg_len < signal_len:
        starts.append(signal_len - seg_len)
    return tuple((s, s + seg_len) for s in starts)


def plan(config: MultiFrameConfig, signal_len: int, sample_rate: float) -> AnalysisPlan:
    """Build the window bank, lattices and segment layout for a signal."""
    if signal_len < config.max_len:
        raise InvalidArgumentError(
            f"signal of {signal_len} samples shorter than largest window {config.max_len}")
    lengths = window_lengths(config.min_len, config.max_len, config.num_windows)
    base = make_hanning(config.min_len)
    windows = tuple(scale_window(base, n / config.min_len) for n in lengths)
    fft_size = config.max_len

    if config.version == "v1":
        hop = config.hop if config.hop is not None else \
            max(1, int(round((1 - config.overlap_ratio) * config.min_len)))
        if hop > config.min_len / 2:
            raise InfeasiblePlanError(
                f"v1 hop {hop} exceeds half the smallest window ({config.min_len})")
        hops = [int(hop)] * len(lengths)
    else:
        hops = [max(1, int(round((1 - config.overlap_ratio) * n))) for n in lengths]

    lattices = tuple(Lattice(h, fft_size) for h in hops)
    bounds = []
    for w, h in zip(windows, hops):
        a, b = frame_bounds_diag(w, h)
        if a <= FRAME_FLOOR:
            raise InfeasiblePlanError(
                f"window of {w.length} taps with hop {h} is not a frame (lower bound {a:.3g})")
        bounds.append((a, b))

    hop_ref = hops[-1]
    seg_len = config.max_len + (config.segment_frames - 1) * hop_ref
    step = (config.segment_frames - config.segment_overlap_frames) * hop_ref
    segments = _segments(int(signal_len), seg_len, step)
    return AnalysisPlan(config, windows, lattices, tuple(bounds), segments,
                        int(signal_len), float(sample_rate))


def preweight_segment(segment, plan: AnalysisPlan, version: str | None = None) -> np.ndarray:
    """Taper the segment edges with the halves of the largest Hanning window.

    The same construction is used for both layouts (``version`` is accepted
    for symmetry). The result only feeds entropy evaluation; synthesis always
    works on the unweighted signal.
    """
    x = segment.samples if isinstance(segment, Signal) else np.asarray(segment, dtype=float)
    m = plan.config.max_len
    if x.size < m:
        raise InvalidSegmentError(f"segment of {x.size} samples shorter than largest window {m}")
    h = make_hanning(m).taps
    half = m // 2
    w = np.ones(x.size)
    w[:half] = h[:half]
    w[x.size - (m - half):] = h[half:]
    return x * w


def _centered_frames(x: np.ndarray, taps: np.ndarray, hop: int, fft_size: int) -> np.ndarray:
    """Frames whose centers lie on ``0, hop, 2*hop, ... < len(x)``, zero outside ``x``."""
    half = taps.size // 2
    pad = np.zeros(half)
    xp = np.concatenate([pad, x, pad, np.zeros(taps.size - 2 * half)])
    num_frames = (x.size - 1) // hop + 1
    return stft_frames(xp, taps, hop, fft_size, num_frames=num_frames)


def evaluate_segment(weighted, plan: AnalysisPlan, alpha=DEFAULT_ALPHA) -> np.ndarray:
    """Rényi entropy (bits, with cell term) of the segment under every window.

    For each window the region covers all frequency bins and every frame
    whose center falls inside the segment; the weighted segment is taken as
    zero outside its bounds. Silent segments yield NaN entries.
    """
    x = np.asarray(weighted, dtype=float)
    out = np.full(len(plan.windows), np.nan)
    for i, (w, lat) in enumerate(zip(plan.windows, plan.lattices)):
        coeffs = _centered_frames(x, w.taps, lat.hop, lat.fft_size)
        power = coeffs.real ** 2 + coeffs.imag ** 2
        total = power.sum()
        if not total > 0:
            continue
        d = ProbabilityDensity(power / total, lat.area_element)
        out[i] = renyi_entropy(d, alpha, include_cell_term=True)
    return out


def select_best(entropies, previous: int | None = None) -> int:
    """Index of the minimum entropy; ties go to the larger window.

    An all-silent (NaN) vector keeps ``previous``, or the largest window when
    there is no previous choice.
    """
    e = np.asarray(entropies, dtype=float)
    valid = ~np.isnan(e)
    if not valid.any():
        return int(previous) if previous is not None else e.size - 1
    best = e[valid].min()
    return int(np.flatnonzero(valid & (e == best))[-1])


@dataclass(frozen=True, eq=False)
class SelectionTrack:
    segments: np.ndarray      # (S, 2) sample ranges
    choices: np.ndarray       # (S,) scale index
    entropies: np.ndarray     # (S, K), NaN where silent
    window_lengths: tuple
    sample_rate: float

    def __len__(self):
        return self.choices.size

    @property
    def silent(self) -> np.ndarray:
        return np.all(np.isnan(self.entropies), axis=1) if self.entropies.size else \
            np.zeros(0, dtype=bool)

    @property
    def chosen_lengths(self) -> np.ndarray:
        return np.asarray(self.window_lengths, dtype=int)[self.choices]

    @property
    def centers(self) -> np.ndarray:
        """Segment centers in samples."""
        return (self.segments[:, 0] + self.segments[:, 1] - 1) / 2.0

    def records(self):
        for (start, stop), c, e in zip(self.segments, self.choices, self.entropies):
            yield (start / self.sample_rate, stop / self.sample_rate,
                   self.window_lengths[c], tuple(e))


def assign_choices(track: SelectionTrack, signal_len: int) -> list[tuple[int, int, int]]:
    """Split ``[0, signal_len)`` into runs ``(start, stop, scale_index)``.

    Each sample takes the choice of the segment with the nearest center; a
    sample equidistant from two centers goes to the earlier segment.
    """
    if len(track) == 0:
        return []
    centers = track.centers
    # first sample of segment j+1's territory
    cuts = [int(math.floor((a + b) / 2)) + 1 for a, b in zip(centers, centers[1:])]
    edges = [0] + [min(max(c, 0), signal_len) for c in cuts] + [signal_len]
    runs = []
    for (lo, hi), k in zip(zip(edges, edges[1:]), track.choices):
        if hi <= lo:
            continue
        if runs and runs[-1][2] == k:
            runs[-1] = (runs[-1][0], hi, int(k))
        else:
            runs.append((lo, hi, int(k)))
    return runs


@dataclass(frozen=True, eq=False)
class Slice:
    """Frames of one window covering the sample range ``[start, stop)``."""

    scale_index: int
    window: Window
    lattice: Lattice
    coeffs: np.ndarray        # (num_frames, fft_size) complex
    frame_starts: np.ndarray  # first sample of each frame
    start: int
    stop: int

    @property
    def num_frames(self) -> int:
        return self.coeffs.shape[0]

    @property
    def frame_centers(self) -> np.ndarray:
        return self.frame_starts + self.window.length / 2.0


@dataclass(frozen=True, eq=False)
class AdaptiveSpectrogram:
    slices: tuple
    selection: SelectionTrack
    sample_rate: float
    signal_len: int
    plan: AnalysisPlan = field(repr=False, default=None)

    @property
    def span(self) -> tuple[int, int]:
        return self.slices[0].start, self.slices[-1].stop

    def frame_positions(self):
        """(frame_start, window_length, hop) of every atom, in time order."""
        for s in self.slices:
            for start in s.frame_starts:
                yield int(start), s.window.length, s.lattice.hop


def _slice_frames(start, stop, length, hop, signal_len):
    n_max = (signal_len - length) // hop
    half = length / 2.0
    lo = max(0, math.ceil((start - half) / hop))
    hi = min(n_max, math.ceil((stop - half) / hop) - 1)
    if hi < lo:
        # no lattice center inside the run; keep the frame nearest to its middle
        n = int(round(((start + stop - 1) / 2.0 - half) / hop))
        lo = hi = min(max(n, 0), n_max)
    return np.arange(lo, hi + 1) * hop


def analyze_runs(x: np.ndarray, plan: AnalysisPlan, runs) -> tuple:
    """Complex STFT slices of the unweighted signal for each selection run."""
    slices = []
    for start, stop, k in runs:
        w, lat = plan.windows[k], plan.lattices[k]
        frame_starts = _slice_frames(start, stop, w.length, lat.hop, x.size)
        coeffs = stft_frames(x, w.taps, lat.hop, lat.fft_size,
                             start=int(frame_starts[0]), num_frames=frame_starts.size)
        slices.append(Slice(k, w, lat, coeffs, frame_starts, start, stop))
    return tuple(slices)


def selection_track(signal: Signal, plan: AnalysisPlan, alpha=None, workers: int = 1) -> SelectionTrack:
    alpha = plan.config.alpha if alpha is None else alpha
    x = signal.samples

    def evaluate(seg):
        start, stop = seg
        return evaluate_segment(preweight_segment(x[start:stop], plan), plan, alpha)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entropies = list(pool.map(evaluate, plan.segments))
    else:
        entropies = [evaluate(seg) for seg in plan.segments]

    choices, previous = [], None
    for e in entropies:
        previous = select_best(e, previous)
        choices.append(previous)
    return SelectionTrack(np.asarray(plan.segments, dtype=np.int64).reshape(-1, 2),
                          np.asarray(choices, dtype=np.int64),
                          np.asarray(entropies).reshape(len(entropies), len(plan.windows)),
                          tuple(plan.lengths), plan.sample_rate)


def adapt(signal: Signal, config: MultiFrameConfig | None = None, workers: int = 1) -> AdaptiveSpectrogram:
    """Time-adaptive analysis of ``signal`` with per-segment window selection."""
    config = config or MultiFrameConfig()
    p = plan(config, len(signal), signal.sample_rate)
    track = selection_track(signal, p, workers=workers)
    runs = assign_choices(track, len(signal))
    slices = analyze_runs(signal.samples, p, runs)
    return AdaptiveSpectrogram(slices, track, signal.sample_rate, len(signal), p)
