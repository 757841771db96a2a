"""End-to-end acceptance checks.

Each check returns a :class:`CheckResult`; the test-suite and the
``selftest`` command both run :data:`CHECKS`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .adaptive import MultiFrameConfig, adapt, assign_choices, plan
from .entropy import ProbabilityDensity, dm_family, normalize_region, renyi_entropy
from .errors import InfeasiblePlanError
from .resynthesis import interior_error, reconstruct
from .signal import Signal, make_hanning, scale_window, synth_test_signal
from .stft import Lattice, SpectrogramTile, frame_bounds_diag, spectrogram, stft

__all__ = ["CheckResult", "CHECKS", "run_all", "fm_signal", "marimba_signal", "random_densities"]

SR = 44100

FM_PARAMS = dict(carrier=4000, mod_rate=2, mod_depth=2000)
MARIMBA_PARAMS = dict(fundamental=493.88, decay_rate=6, noise_burst_len=256,
                      onset=0.3, burst_gain=4)
ALPHA_GRID = (0.1, 0.3, 0.7, 1, 2, 3, 5, 10, 30)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def fm_signal(duration=2.0) -> Signal:
    return synth_test_signal("fm_sine", FM_PARAMS, duration, SR)


def marimba_signal(duration=2.0, seed=1) -> Signal:
    return synth_test_signal("percussive_harmonic", MARIMBA_PARAMS, duration, SR, seed=seed)


def random_densities(count=100, lengths=(10, 100, 4096), seed=0):
    """Seeded densities ranging from flat to very peaky, some with zero cells."""
    rng = np.random.default_rng(seed)
    out = []
    for n in lengths:
        for i in range(count):
            w = rng.random(n) ** rng.uniform(0.2, 12.0)
            if i % 4 == 3:
                w[rng.random(n) < 0.3] = 0.0
            if not w.sum() > 0:
                w[0] = 1.0
            out.append(ProbabilityDensity(w / w.sum()))
    return out


def check_perfect_reconstruction() -> CheckResult:
    rng = np.random.default_rng(2024)
    sig = Signal(rng.standard_normal(2 * SR), SR)
    cfg = MultiFrameConfig(version="v2", min_len=512, max_len=4096, num_windows=8)
    t0 = time.perf_counter()
    rebuilt = reconstruct(adapt(sig, cfg))
    elapsed = time.perf_counter() - t0
    err = interior_error(sig, rebuilt, cfg.max_len)
    return CheckResult("1 perfect reconstruction", err < 1e-10 and elapsed < 10.0,
                       f"interior rel. L2 error {err:.2e} (< 1e-10), {elapsed:.2f} s (< 10 s)")


def check_scaling_law() -> CheckResult:
    # 1 kHz sits on bin 256 of an 8192-point FFT at 32 kHz; the FFT is twice
    # the largest window so the main lobe is sampled finely enough
    sr, fft_size, hop, frames = 32000, 8192, 256, 40
    x = synth_test_signal("sine", {"freq": 1000}, 1.0, sr)
    base = make_hanning(1024)
    worst = 0.0
    parts = []
    for alpha in (0.5, 0.7, 2, 5):
        h = []
        for l in (1, 2, 4):
            tile = spectrogram(stft(x, scale_window(base, l), Lattice(hop, fft_size)))
            tile = SpectrogramTile(tile.values[:frames], tile.lattice, tile.area_element)
            h.append(renyi_entropy(normalize_region(tile), alpha, include_cell_term=True))
        dev = [abs((h[i] - h[0]) + math.log2(l)) for i, l in ((1, 2), (2, 4))]
        worst = max(worst, *dev)
        parts.append(f"a={alpha}: {h[1] - h[0]:+.3f}/{h[2] - h[0]:+.3f}")
    return CheckResult("2 entropy scaling law", worst <= 0.1,
                       f"max |dH + log2 l| = {worst:.4f} bit (<= 0.1); " + ", ".join(parts))


def _alpha_violation(densities):
    worst = 0.0
    for d in densities:
        h = [renyi_entropy(d, a) for a in ALPHA_GRID]
        worst = max(worst, max(b - a for a, b in zip(h, h[1:])))
    return worst


def check_alpha_monotonicity() -> CheckResult:
    worst = _alpha_violation(random_densities())
    return CheckResult("3 alpha monotonicity", worst <= 1e-9,
                       f"largest increase along alpha grid {worst:.2e} (<= 1e-9)")


def check_shannon_limit() -> CheckResult:
    worst = 0.0
    for d in random_densities():
        h1 = renyi_entropy(d, 1.0)
        worst = max(worst, abs(renyi_entropy(d, 1 - 1e-4) - h1), abs(renyi_entropy(d, 1 + 1e-4) - h1))
    return CheckResult("4 Shannon limit", worst < 1e-3, f"max |H(1+-1e-4) - H(1)| = {worst:.2e} (< 1e-3)")


def check_dm_study(seed=0) -> CheckResult:
    n = 100
    ms = np.arange(1, n + 1)
    family = [dm_family(n, int(m), seed) for m in ms]
    h0 = {renyi_entropy(d, 0) for d in family}
    h0_ok = h0 == {math.log2(100)}
    rhos = {a: spearmanr(ms, [renyi_entropy(d, a) for d in family])[0] for a in (2, 5)}
    ok = h0_ok and all(r >= 0.95 for r in rhos.values())
    return CheckResult("5 D_M study", ok,
                       f"H0 constant = log2(100): {h0_ok}; Spearman(M, H_a): "
                       + ", ".join(f"a={a}: {r:.4f}" for a, r in rhos.items()) + " (>= 0.95)")


def _fm_entropies(window_len, lattices):
    # span divisible by every hop, so all analyses cover the same samples
    span = window_len + 512 * 84
    x = fm_signal(1.0).samples[:span]
    w = make_hanning(window_len)
    return [renyi_entropy(normalize_region(spectrogram(stft(x, w, lat))), 0.7, include_cell_term=True)
            for lat in lattices]


def check_hop_invariance() -> CheckResult:
    h = _fm_entropies(1024, [Lattice(hop, 1024) for hop in (128, 256, 512)])
    spread = max(h) - min(h)
    return CheckResult("6 hop invariance", spread < 0.05,
                       f"H_0.7 over hops 128/256/512 = {', '.join(f'{v:.4f}' for v in h)}; "
                       f"spread {spread:.4f} (< 0.05)")


def check_fft_invariance() -> CheckResult:
    h = _fm_entropies(1024, [Lattice(256, n) for n in (1024, 2048, 4096)])
    spread = max(h) - min(h)
    return CheckResult("7 FFT-size invariance", spread < 0.1,
                       f"H_0.7 over FFT 1024/2048/4096 = {', '.join(f'{v:.4f}' for v in h)}; "
                       f"spread {spread:.4f} (< 0.1)")


def check_marimba() -> CheckResult:
    sig = marimba_signal()
    cfg = MultiFrameConfig(version="v2", alpha=0.7, segment_frames=4, segment_overlap_frames=2)
    track = adapt(sig, cfg).selection
    onset = int(round(MARIMBA_PARAMS["onset"] * SR))
    onset_seg = int(np.argmin(np.abs(track.centers - onset)))
    onset_ok = track.choices[onset_seg] == 0
    decay = (track.segments[:, 0] >= onset) & ~track.silent
    largest = len(track.window_lengths) - 1
    frac = float(np.mean(track.choices[decay] == largest)) if decay.any() else 0.0
    return CheckResult("8 marimba-like adaptation", bool(onset_ok and frac >= 0.8),
                       f"onset segment picks {track.chosen_lengths[onset_seg]} samples "
                       f"(want {track.window_lengths[0]}); largest window on {frac:.0%} of "
                       f"{int(decay.sum())} decay segments (>= 80%)")


def check_fm_adaptation() -> CheckResult:
    sig = fm_signal(2.0)
    cfg = MultiFrameConfig(version="v2", alpha=0.7, segment_frames=4, segment_overlap_frames=3)
    analysis = adapt(sig, cfg)
    track = analysis.selection
    rate = FM_PARAMS["mod_rate"]
    seg_len = track.segments[0, 1] - track.segments[0, 0]
    step = int(track.segments[1, 0] - track.segments[0, 0])

    # period: autocorrelation peak of the selected log-length nearest the modulator period
    v = np.log2(track.chosen_lengths.astype(float))
    v = v - v.mean()
    max_lag = min(v.size - 1, int(round(1.0 * SR / step)))
    ac = np.array([np.dot(v[:-k], v[k:]) / np.dot(v, v) * v.size / (v.size - k)
                   for k in range(1, max_lag + 1)])
    lags = np.arange(1, max_lag + 1) * step
    peaks = [i for i in range(1, ac.size - 1) if ac[i] >= ac[i - 1] and ac[i] >= ac[i + 1]
             and lags[i] > seg_len / 2]
    target = SR / rate
    best = min(peaks, key=lambda i: abs(lags[i] - target)) if peaks else None
    period_ok = best is not None and abs(lags[best] - target) <= seg_len and ac[best] >= 0.5
    first = lags[peaks[0]] / SR if peaks else float("nan")

    # window size at the extrema of |df/dt|
    runs = assign_choices(track, len(sig))
    starts = np.array([r[0] for r in runs])

    def choice_at(t):
        return runs[int(np.searchsorted(starts, int(round(t * SR)), side="right")) - 1][2]

    margin = seg_len / SR
    t_min = [(2 * m + 1) / (4 * rate) for m in range(int(4 * rate * sig.duration))]
    t_max = [m / (2 * rate) for m in range(1, int(2 * rate * sig.duration) + 1)]
    t_min = [t for t in t_min if margin <= t <= sig.duration - margin]
    t_max = [t for t in t_max if margin <= t <= sig.duration - margin]
    top = int(track.choices.max())
    at_min = [choice_at(t) for t in t_min]
    at_max = [choice_at(t) for t in t_max]
    extrema_ok = all(c == top for c in at_min) and all(c < top for c in at_max)
    lengths = track.window_lengths
    return CheckResult(
        "9 FM-sinusoid adaptation", bool(period_ok and extrema_ok),
        (f"track repeats at {lags[best] / SR:.3f} s vs modulator {1 / rate:.3f} s "
         f"(tol {seg_len / SR:.3f} s, ac {ac[best]:.2f}); " if best is not None else
         "no autocorrelation peak; ")
        + f"fundamental {first:.3f} s; at |df/dt| minima {[lengths[c] for c in at_min]}, "
        f"at maxima {[lengths[c] for c in at_max]}")


def check_frame_diagnostics() -> CheckResult:
    h = make_hanning(8)
    b2 = frame_bounds_diag(h, 2)
    b4 = frame_bounds_diag(h, 4)
    b8 = frame_bounds_diag(h, 8)
    try:
        plan(MultiFrameConfig(version="v2", min_len=8, max_len=8, num_windows=1,
                              overlap_ratio=0.01, segment_frames=1, segment_overlap_frames=0), 64, 8000)
        rejected = False
    except InfeasiblePlanError:
        rejected = True
    ok = (b2 == (1.5, 1.5) and abs(b4[0] - 0.5) <= 1e-12 and abs(b4[1] - 1.0) <= 1e-12
          and b8[0] == 0.0 and rejected)
    return CheckResult("10 frame diagnostics", ok,
                       f"hop2 {b2}, hop4 ({b4[0]:.15g}, {b4[1]:.15g}), hop8 A={b8[0]}, "
                       f"plan rejected: {rejected}")


CHECKS = (
    check_perfect_reconstruction,
    check_scaling_law,
    check_alpha_monotonicity,
    check_shannon_limit,
    check_dm_study,
    check_hop_invariance,
    check_fft_invariance,
    check_marimba,
    check_fm_adaptation,
    check_frame_diagnostics,
)


def run_all(stream=None) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        r = check()
        results.append(r)
        if stream is not None:
            print(r.line(), file=stream, flush=True)
    return results
