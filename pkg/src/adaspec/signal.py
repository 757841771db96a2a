"""Signal containers, Hanning windows and synthetic test signals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Signal",
    "Window",
    "ScaleSet",
    "make_hanning",
    "scale_window",
    "synth_test_signal",
    "SIGNAL_KINDS",
]


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Mono real-valued signal with its sample rate in Hz."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 1:
            raise InvalidArgumentError("signal must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("signal samples must be finite")
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise InvalidArgumentError(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "samples", _frozen(samples))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def scaled(self, gain: float) -> "Signal":
        return Signal(self.samples * gain, self.sample_rate)


@dataclass(frozen=True, eq=False)
class Window:
    """Sampled analysis window.

    ``scale`` is the dilation factor applied to a base window of
    ``origin_length`` taps; unscaled windows have ``scale == 1``.
    """

    taps: np.ndarray
    scale: float = 1.0
    origin_length: int = 0
    family: str = "hann"

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=float)
        if taps.ndim != 1 or taps.size < 1:
            raise InvalidArgumentError("window must have at least one tap")
        if not np.all(np.isfinite(taps)):
            raise InvalidArgumentError("window taps must be finite")
        if not self.scale > 0:
            raise InvalidArgumentError(f"scale must be > 0, got {self.scale}")
        object.__setattr__(self, "taps", _frozen(taps))
        if not self.origin_length:
            object.__setattr__(self, "origin_length", taps.size)

    def __len__(self):
        return self.taps.size

    @property
    def length(self) -> int:
        return self.taps.size


@dataclass(frozen=True)
class ScaleSet:
    scales: tuple = field(default=(1.0,))

    def __post_init__(self):
        scales = tuple(float(s) for s in self.scales)
        if not scales:
            raise InvalidArgumentError("scale set must not be empty")
        if any(s <= 0 or not math.isfinite(s) for s in scales):
            raise InvalidArgumentError("scales must be positive and finite")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise InvalidArgumentError("scales must be strictly increasing")
        object.__setattr__(self, "scales", scales)

    def __len__(self):
        return len(self.scales)

    def __iter__(self):
        return iter(self.scales)


def _hann_profile(length: int) -> np.ndarray:
    # periodic sampling of cos^2(pi t) on [-1/2, 1/2)
    k = np.arange(length)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * k / length))


def make_hanning(length: int) -> Window:
    """Periodic (DFT-even) Hanning window ``0.5 * (1 - cos(2 pi k / length))``."""
    if int(length) != length or length < 1:
        raise InvalidArgumentError(f"window length must be a positive integer, got {length}")
    length = int(length)
    return Window(_hann_profile(length), 1.0, length, "hann")


def scale_window(base: Window, l: float) -> Window:
    """Dilate ``base`` by ``l`` and multiply by ``1/sqrt(l)``.

    Hanning windows are re-sampled from the continuous profile; other tap
    sequences are linearly interpolated on their periodic support.
    """
    if not (l > 0 and math.isfinite(l)):
        raise InvalidArgumentError(f"scale must be positive, got {l}")
    if l == 1:
        return Window(base.taps, base.scale, base.origin_length, base.family)
    n = int(round(l * base.length))
    if n < 1:
        raise InvalidArgumentError(f"scaled window of factor {l} has no taps")
    if base.family == "hann":
        taps = _hann_profile(n)
    else:
        pos = np.arange(n) * (base.length / n)
        taps = np.interp(pos, np.arange(base.length + 1), np.append(base.taps, base.taps[0]))
    return Window(taps / math.sqrt(l), base.scale * l, base.origin_length, base.family)


# --- synthetic signals ---------------------------------------------------

SIGNAL_KINDS = ("sine", "fm_sine", "impulse", "percussive_harmonic")

_REQUIRED = {
    "sine": ("freq",),
    "fm_sine": ("carrier", "mod_rate", "mod_depth"),
    "impulse": ("position",),
    "percussive_harmonic": ("fundamental", "decay_rate", "noise_burst_len"),
}


def _param(params: Mapping, name: str, default=None) -> float:
    value = params.get(name, default)
    if value is None:
        raise InvalidArgumentError(f"missing parameter {name!r}")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"parameter {name!r} is not a number: {value!r}") from None
    if not math.isfinite(value):
        raise InvalidArgumentError(f"parameter {name!r} must be finite")
    return value


def synth_test_signal(kind: str, params: Mapping, duration: float,
                      sample_rate: float, seed: int = 0) -> Signal:
    """Generate a deterministic test signal.

    kinds and their parameters:

    ``sine``
        ``freq`` (Hz), optional ``amplitude`` and ``phase`` (rad).
    ``fm_sine``
        ``carrier``, ``mod_rate``, ``mod_depth`` (Hz); instantaneous frequency
        is ``carrier + mod_depth * sin(2 pi mod_rate t)``.
    ``impulse``
        ``position`` (sample index), optional ``amplitude``.
    ``percussive_harmonic``
        ``fundamental`` (Hz), ``decay_rate`` (1/s), ``noise_burst_len``
        (samples); optional ``onset`` (s), ``burst_gain``. A seeded white-noise
        burst at the onset plus four exponentially decaying harmonics.
    """
    if kind not in _REQUIRED:
        raise InvalidArgumentError(f"unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}")
    if not (duration > 0 and sample_rate > 0):
        raise InvalidArgumentError("duration and sample_rate must be positive")
    for name in _REQUIRED[kind]:
        _param(params, name)
    n = int(round(duration * sample_rate))
    if n < 1:
        raise InvalidArgumentError("duration shorter than one sample")
    t = np.arange(n) / sample_rate

    if kind == "sine":
        freq = _param(params, "freq")
        amp = _param(params, "amplitude", 1.0)
        phase = _param(params, "phase", 0.0)
        x = amp * np.sin(2 * np.pi * freq * t + phase)
    elif kind == "fm_sine":
        carrier = _param(params, "carrier")
        rate = _param(params, "mod_rate")
        depth = _param(params, "mod_depth")
        if rate <= 0:
            raise InvalidArgumentError("mod_rate must be positive")
        phase = 2 * np.pi * carrier * t - (depth / rate) * np.cos(2 * np.pi * rate * t)
        x = _param(params, "amplitude", 1.0) * np.sin(phase)
    elif kind == "impulse":
        pos = _param(params, "position")
        if pos != int(pos) or not 0 <= pos < n:
            raise InvalidArgumentError(f"impulse position {pos} outside [0, {n})")
        x = np.zeros(n)
        x[int(pos)] = _param(params, "amplitude", 1.0)
    else:
        x = _percussive(params, t, sample_rate, seed)
    return Signal(x, sample_rate)


def _percussive(params, t, sample_rate, seed):
    f0 = _param(params, "fundamental")
    decay = _param(params, "decay_rate")
    burst_len = _param(params, "noise_burst_len")
    onset = _param(params, "onset", 0.0)
    burst_gain = _param(params, "burst_gain", 1.0)
    if f0 <= 0 or decay < 0 or burst_len < 0 or burst_len != int(burst_len):
        raise InvalidArgumentError("invalid percussive_harmonic parameters")
    n = t.size
    start = int(round(onset * sample_rate))
    if not 0 <= start < n:
        raise InvalidArgumentError(f"onset {onset} s outside the signal")
    tau = t[start:] - t[start]
    body = np.zeros(n - start)
    for k in range(1, 5):
        freq = k * f0
        if freq >= sample_rate / 2:
            continue
        # upper partials die out faster
        body += np.exp(-decay * k * tau) * np.sin(2 * np.pi * freq * tau) / k
    burst_len = min(int(burst_len), n - start)
    rng = np.random.default_rng(seed)
    body[:burst_len] += burst_gain * rng.standard_normal(burst_len)
    x = np.zeros(n)
    x[start:] = body
    return x
