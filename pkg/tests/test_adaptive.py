import numpy as np
import pytest

from adaspec import (InfeasiblePlanError, InvalidArgumentError, InvalidSegmentError, Lattice,
                     MultiFrameConfig, Signal, adapt, evaluate_segment, make_hanning, plan,
                     preweight_segment, select_best, stft, synth_test_signal)
from adaspec.adaptive import assign_choices, window_lengths

SR = 44100


def fm(duration=2.0):
    return synth_test_signal("fm_sine", dict(carrier=4000, mod_rate=2, mod_depth=2000), duration, SR)


def test_window_lengths_geometric():
    # raw values 512 * 8**(k/7): 689.10, 927.46, 1248.27, 1680.05, 2261.18, 3043.32
    assert window_lengths(512, 4096, 8) == [512, 690, 928, 1248, 1680, 2262, 3044, 4096]


def test_window_lengths_octaves():
    assert window_lengths(512, 4096, 4) == [512, 1024, 2048, 4096]
    assert window_lengths(512, 4096, 1) == [4096]


def test_window_lengths_collision():
    with pytest.raises(InvalidArgumentError):
        window_lengths(10, 12, 5)


def test_plan_v1():
    p = plan(MultiFrameConfig(version="v1", num_windows=4), 3 * SR, SR)
    assert p.lengths == [512, 1024, 2048, 4096]
    assert p.hops == [128] * 4
    assert p.fft_size == 4096


def test_plan_v1_explicit_hop():
    p = plan(MultiFrameConfig(version="v1", num_windows=4, hop=256), 3 * SR, SR)
    assert p.hops == [256] * 4
    assert all(a > 0 for a, _ in p.bounds)


def test_plan_v2_equal_redundancy():
    p = plan(MultiFrameConfig(), 3 * SR, SR)
    assert p.hops == [round(n / 4) for n in p.lengths]
    ratios = [n / h for n, h in zip(p.lengths, p.hops)]
    assert max(ratios) - min(ratios) < 0.02


def test_plan_segments_cover_signal():
    p = plan(MultiFrameConfig(), 100000, SR)
    assert p.segment_len == 4096 + 3 * 1024
    assert p.segments[0][0] == 0 and p.segments[-1][1] == 100000
    for (a, b), (c, d) in zip(p.segments, p.segments[1:]):
        assert c < b  # consecutive segments overlap


def test_plan_infeasible():
    with pytest.raises(InfeasiblePlanError):
        plan(MultiFrameConfig(version="v1", num_windows=4, hop=300), SR, SR)
    with pytest.raises(InfeasiblePlanError):
        plan(MultiFrameConfig(min_len=8, max_len=8, num_windows=1, overlap_ratio=0.01), 100, SR)


def test_plan_rejects_short_signal():
    with pytest.raises(InvalidArgumentError):
        plan(MultiFrameConfig(), 4000, SR)


@pytest.mark.parametrize("kwargs", [
    dict(version="v3"), dict(min_len=0), dict(min_len=8192), dict(num_windows=0),
    dict(segment_frames=2, segment_overlap_frames=2), dict(overlap_ratio=1.0), dict(alpha=-1),
    dict(hop=0),
])
def test_config_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        MultiFrameConfig(**kwargs)


def test_single_window_matches_plain_stft():
    sig = fm(1.0)
    cfg = MultiFrameConfig(version="v1", min_len=1024, max_len=1024, num_windows=1, hop=256)
    analysis = adapt(sig, cfg)
    direct = stft(sig, make_hanning(1024), Lattice(256, 1024))
    got = np.concatenate([s.coeffs for s in analysis.slices])
    starts = np.concatenate([s.frame_starts for s in analysis.slices])
    np.testing.assert_array_equal(got, direct.coeffs[starts // 256])
    assert np.array_equal(np.unique(starts), starts)


def test_preweight_constant_segment():
    p = plan(MultiFrameConfig(), SR, SR)
    w = preweight_segment(np.ones(p.segment_len), p)
    h = make_hanning(4096).taps
    np.testing.assert_array_equal(w[:2048], h[:2048])
    np.testing.assert_array_equal(w[-2048:], h[2048:])
    assert np.all(w[2048:-2048] == 1)
    assert np.all(preweight_segment(np.zeros(p.segment_len), p) == 0)


def test_preweight_short_segment():
    p = plan(MultiFrameConfig(), SR, SR)
    with pytest.raises(InvalidSegmentError):
        preweight_segment(np.ones(4000), p)


def test_evaluate_segment_sinusoid_scaling():
    # a stationary sine spreads over ~1/l as many time-frequency cells as the
    # window grows by l, so doubling the window lowers the entropy by about one bit
    cfg = MultiFrameConfig(num_windows=4, segment_frames=32)
    p = plan(cfg, SR, SR)
    x = synth_test_signal("sine", {"freq": 1000}, 1.0, SR).samples[:p.segment_len]
    for alpha in (0.7, 2):
        e = evaluate_segment(preweight_segment(x, p), p, alpha)
        assert np.all(np.diff(e) < 0)
        np.testing.assert_allclose(np.diff(e), -1, atol=0.1)


@pytest.mark.parametrize("version", ["v1", "v2"])
def test_evaluate_segment_impulse(version):
    p = plan(MultiFrameConfig(version=version, num_windows=4), SR, SR)
    x = np.zeros(p.segment_len)
    x[p.segment_len // 2] = 1
    e = evaluate_segment(preweight_segment(x, p), p, 0.7)
    assert np.all(np.diff(e) > 0)
    assert select_best(e) == 0


def test_evaluate_segment_silence():
    p = plan(MultiFrameConfig(num_windows=4), SR, SR)
    assert np.all(np.isnan(evaluate_segment(np.zeros(p.segment_len), p)))


def test_select_best():
    assert select_best([3.0, 1.0, 2.0]) == 1
    assert select_best([1.0, 2.0, 1.0]) == 2
    assert select_best([np.nan] * 3) == 2
    assert select_best([np.nan] * 3, previous=0) == 0
    assert select_best([np.nan, 5.0, np.nan]) == 1


def test_scale_invariance():
    sig = fm(1.0)
    a = adapt(sig)
    b = adapt(sig.scaled(3.7))
    assert np.array_equal(a.selection.choices, b.selection.choices)
    np.testing.assert_allclose(a.selection.entropies, b.selection.entropies, atol=1e-9)


def test_coverage_and_centers():
    sig = fm(1.5)
    a = adapt(sig)
    assert a.slices[0].start == 0 and a.slices[-1].stop == len(sig)
    for s, t in zip(a.slices, a.slices[1:]):
        assert s.stop == t.start
        assert s.scale_index != t.scale_index
    for s in a.slices:
        assert s.num_frames >= 1
        c = s.frame_centers
        inside = (c >= s.start) & (c < s.stop)
        assert inside.all() or s.num_frames == 1
        assert np.all(s.frame_starts + s.window.length <= len(sig))


def test_assign_choices_nearest_center():
    a = adapt(fm(1.0))
    track = a.selection
    runs = assign_choices(track, 44100)
    centers = track.centers
    for lo, hi, k in runs:
        for t in (lo, hi - 1):
            d = np.abs(centers - t)
            assert track.choices[int(np.flatnonzero(d == d.min())[0])] == k


def test_determinism_and_workers():
    sig = fm(1.0)
    a, b = adapt(sig), adapt(sig, workers=4)
    assert np.array_equal(a.selection.entropies, b.selection.entropies, equal_nan=True)
    for s, t in zip(a.slices, b.slices):
        assert np.array_equal(s.coeffs, t.coeffs)


def test_stationary_sine_picks_largest():
    a = adapt(synth_test_signal("sine", {"freq": 1000}, 1.0, SR))
    assert np.all(a.selection.chosen_lengths == 4096)


def test_impulse_picks_small_window_nearby():
    a = adapt(synth_test_signal("impulse", {"position": 22050}, 1.0, SR))
    track = a.selection
    d = np.abs(track.centers - 22050)
    assert track.chosen_lengths[d.argmin()] == 512
    # silent segments keep the previous choice, or the largest window at the start
    first = int(np.flatnonzero(~track.silent)[0])
    assert np.all(track.chosen_lengths[:first] == 4096)
    for i in np.flatnonzero(track.silent)[1:]:
        if i > first:
            assert track.choices[i] == track.choices[i - 1]


def test_fm_uses_several_windows():
    a = adapt(fm(2.0))
    assert len(set(a.selection.chosen_lengths.tolist())) >= 2


def test_v1_runs():
    a = adapt(fm(1.0), MultiFrameConfig(version="v1", num_windows=4))
    assert all(s.lattice.hop == 128 for s in a.slices)
