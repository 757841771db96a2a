import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from adaspec import (InvalidArgumentError, Lattice, ProbabilityDensity, RenyiOrder, SpectrogramTile,
                     ZeroEnergyRegionError, dm_family, normalize_region, renyi_entropy)


def tile(values, hop=1, fft=1):
    return SpectrogramTile(np.asarray(values, float), Lattice(hop, fft), hop / fft)


def test_normalize_single_cell():
    d = normalize_region(tile([[0, 3.0], [1, 1]]), (slice(0, 1), slice(1, 2)))
    assert d.p.tolist() == [1.0]


def test_normalize_uniform():
    d = normalize_region(tile(np.ones((2, 2))))
    assert d.p.tolist() == [0.25] * 4


def test_normalize_zero_region():
    with pytest.raises(ZeroEnergyRegionError):
        normalize_region(tile(np.zeros((3, 3))))


def test_normalize_out_of_bounds():
    with pytest.raises(InvalidArgumentError):
        normalize_region(tile(np.ones((2, 2))), (slice(0, 5), slice(0, 1)))
    with pytest.raises(InvalidArgumentError):
        normalize_region(tile(np.ones((2, 2))), (slice(1, 1), slice(0, 1)))


def test_area_element_carried():
    d = normalize_region(tile(np.ones((2, 2)), hop=256, fft=4096))
    assert d.area_element == 256 / 4096


@pytest.mark.parametrize("alpha", [0, 0.5, 2, 5])
def test_uniform_is_log_n(alpha):
    assert renyi_entropy(ProbabilityDensity(np.full(16, 1 / 16)), alpha) == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 1, 2, 7])
def test_delta_is_zero(alpha):
    p = np.zeros(10)
    p[0] = 1
    assert renyi_entropy(ProbabilityDensity(p), alpha) == 0


def test_collision_entropy():
    # mpmath: -log2(3/8)
    assert renyi_entropy(ProbabilityDensity([0.5, 0.25, 0.25]), 2) == pytest.approx(1.4150374992788438, abs=1e-14)


def test_shannon_closed_form():
    assert renyi_entropy(ProbabilityDensity([0.5, 0.25, 0.25]), 1) == pytest.approx(1.5, abs=1e-15)


def test_order_zero_counts_positive_cells():
    assert renyi_entropy(ProbabilityDensity([0.5, 0, 0.5, 0]), 0) == 1.0


def test_order_validation():
    with pytest.raises(InvalidArgumentError):
        RenyiOrder(-0.1)
    with pytest.raises(InvalidArgumentError):
        RenyiOrder(math.inf)
    with pytest.raises(InvalidArgumentError):
        ProbabilityDensity([0.5, 0.6])


def test_small_alpha_underflow_is_finite():
    p = np.full(1000, 1e-300)
    p[0] = 1 - p[1:].sum()
    assert math.isfinite(renyi_entropy(ProbabilityDensity(p), 30))
    assert math.isfinite(renyi_entropy(ProbabilityDensity(p), 0.01))


densities = arrays(np.float64, st.integers(1, 200),
                   elements=st.floats(0, 1e3, allow_nan=False, allow_subnormal=False)) \
    .filter(lambda w: w.sum() > 1e-200) \
    .map(lambda w: ProbabilityDensity(w / w.sum()))
orders = st.floats(0, 40, allow_nan=False)


@settings(max_examples=200)
@given(densities, orders, orders)
def test_monotone_in_alpha(d, a1, a2):
    a1, a2 = sorted((a1, a2))
    assert renyi_entropy(d, a1) >= renyi_entropy(d, a2) - 1e-9


@settings(max_examples=200)
@given(densities, orders)
def test_range(d, a):
    h = renyi_entropy(d, a)
    assert -1e-9 <= h <= math.log2(len(d)) + 1e-9
    assert renyi_entropy(d, 0) >= h - 1e-9


@settings(max_examples=100)
@given(arrays(np.float64, st.integers(2, 4096), elements=st.floats(0.001, 1)))
def test_shannon_limit(w):
    d = ProbabilityDensity(w / w.sum())
    h1 = renyi_entropy(d, 1)
    assert abs(renyi_entropy(d, 1 - 1e-4) - h1) < 1e-3
    assert abs(renyi_entropy(d, 1 + 1e-4) - h1) < 1e-3


@settings(max_examples=100)
@given(densities, orders, st.randoms(use_true_random=False))
def test_permutation_invariance(d, a, rnd):
    p = d.p.copy()
    rnd.shuffle(p)
    # sorted summation makes the comparison independent of cell order
    assert renyi_entropy(ProbabilityDensity(np.sort(p)), a) == renyi_entropy(ProbabilityDensity(np.sort(d.p)), a)
    assert renyi_entropy(ProbabilityDensity(p), a) == pytest.approx(renyi_entropy(d, a), abs=1e-12)


@given(densities, orders, st.floats(1e-4, 1e4))
def test_cell_term_is_additive(d, a, area):
    d2 = ProbabilityDensity(d.p, area)
    assert renyi_entropy(d2, a, include_cell_term=True) == renyi_entropy(d2, a) + math.log2(area)


def test_dm_family_m_equals_n_is_plain_normalization():
    full = dm_family(100, 100, seed=5)
    peaky = dm_family(100, 10, seed=5)
    # the shared base vector is recoverable from any member
    base = peaky.p.copy()
    base[10:] *= 20
    np.testing.assert_allclose(full.p, base / base.sum(), rtol=1e-12)


def test_dm_family_h0_constant():
    for m in (1, 17, 50, 100):
        assert renyi_entropy(dm_family(100, m, seed=1), 0) == math.log2(100)


def test_dm_family_peaky_has_lower_collision_entropy():
    assert renyi_entropy(dm_family(100, 10, seed=0), 2) < renyi_entropy(dm_family(100, 90, seed=0), 2)


def test_dm_family_deterministic_and_validated():
    assert np.array_equal(dm_family(50, 5, 3).p, dm_family(50, 5, 3).p)
    with pytest.raises(InvalidArgumentError):
        dm_family(10, 0)
    with pytest.raises(InvalidArgumentError):
        dm_family(10, 11)
