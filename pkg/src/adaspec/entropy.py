"""Rényi entropies of normalized time-frequency densities (in bits)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, ZeroEnergyRegionError

__all__ = [
    "DEFAULT_ALPHA",
    "ProbabilityDensity",
    "RenyiOrder",
    "normalize_region",
    "renyi_entropy",
    "dm_family",
]

DEFAULT_ALPHA = 0.7


@dataclass(frozen=True, eq=False)
class ProbabilityDensity:
    p: np.ndarray
    area_element: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).ravel()
        if p.size < 1:
            raise InvalidArgumentError("density must have at least one cell")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InvalidArgumentError("density entries must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise InvalidArgumentError(f"density sums to {p.sum()!r}, not 1")
        if not self.area_element > 0:
            raise InvalidArgumentError("area_element must be positive")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __len__(self):
        return self.p.size

    @classmethod
    def from_weights(cls, weights, area_element: float = 1.0) -> "ProbabilityDensity":
        w = np.asarray(weights, dtype=float).ravel()
        total = w.sum()
        if not total > 0:
            raise ZeroEnergyRegionError("weights sum to zero")
        return cls(w / total, area_element)


@dataclass(frozen=True)
class RenyiOrder:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        a = float(self.alpha)
        if not (a >= 0 and math.isfinite(a)):
            raise InvalidArgumentError(f"Rényi order must be finite and >= 0, got {self.alpha}")
        object.__setattr__(self, "alpha", a)


def normalize_region(tile, region=None) -> ProbabilityDensity:
    """Turn a rectangle of a spectrogram tile into a probability density.

    ``region`` is a ``(frame_slice, bin_slice)`` pair, or ``None`` for the
    whole tile.
    """
    values = tile.values
    if region is not None:
        rows, cols = region
        for sl, size in ((rows, values.shape[0]), (cols, values.shape[1])):
            start, stop, _ = sl.indices(size)
            if sl.start is not None and not 0 <= sl.start < size \
                    or sl.stop is not None and not 0 < sl.stop <= size:
                raise InvalidArgumentError(f"region {sl} outside tile bounds [0, {size})")
            if stop <= start:
                raise InvalidArgumentError("region is empty")
        values = values[rows, cols]
    if values.size == 0:
        raise InvalidArgumentError("region is empty")
    total = values.sum()
    if not total > 0:
        raise ZeroEnergyRegionError("spectrogram region has zero energy")
    return ProbabilityDensity(values / total, tile.area_element)


def renyi_entropy(d: ProbabilityDensity, order=DEFAULT_ALPHA, include_cell_term: bool = False) -> float:
    """Rényi entropy of order ``alpha`` in bits.

    ``alpha = 1`` is the Shannon entropy and ``alpha = 0`` the log of the
    number of strictly positive cells. With ``include_cell_term`` the
    ``log2(area_element)`` term is added so that tiles sampled on different
    lattices become comparable.
    """
    alpha = order.alpha if isinstance(order, RenyiOrder) else RenyiOrder(order).alpha
    p = d.p[d.p > 0]
    if alpha == 0:
        h = math.log2(p.size)
    elif alpha == 1:
        h = -float(np.sum(p * np.log2(p)))
    else:
        # exp/log form flushes underflowing powers to 0
        s = float(np.sum(np.exp(alpha * np.log(p))))
        h = math.log2(s) / (1.0 - alpha)
    if include_cell_term:
        h += math.log2(d.area_element)
    return h


def dm_family(n: int, m: int, seed: int = 0, attenuation: float = 20.0,
              mean: float = 0.5, std: float = 0.25) -> ProbabilityDensity:
    """Peaky-to-flat test densities: ``m`` large entries followed by attenuated ones.

    A base vector of ``n`` draws from a normal distribution restricted to
    ``(0, 1]`` (out-of-range draws are redrawn) is generated from ``seed``;
    entries past index ``m`` are divided by ``attenuation`` and the result is
    normalized to unit sum. The base vector depends only on ``(n, seed)``, so
    all members of one family share it.
    """
    if n < 1 or not 1 <= m <= n:
        raise InvalidArgumentError(f"need 1 <= m <= n, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    base = np.empty(0)
    while base.size < n:
        draw = rng.normal(mean, std, size=n)
        base = np.concatenate([base, draw[(draw > 0) & (draw <= 1)]])
    d = base[:n].copy()
    d[m:] /= attenuation
    return ProbabilityDensity(d / d.sum())
