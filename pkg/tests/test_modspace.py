import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bbm_modlab.families import random_band_limited
from bbm_modlab.grid import Field, GridSpec, Trajectory, lp_values
from bbm_modlab.modspace import (RAISED_COSINE, SMOOTH_BUMP, ModNormParams, TailWarning, block, block_norms,
                                 block_values, build_decomposition, mixed_time_norm, mod_norm, nu1,
                                 weighted_sup_norm)


@pytest.mark.parametrize("profile", [SMOOTH_BUMP, RAISED_COSINE])
def test_partition_of_unity(small_grid, profile):
    dec = build_decomposition(small_grid, profile, k_max=12)
    assert dec.partition_residual() < 1e-12
    assert dec.lower_bound == pytest.approx(0.5, abs=1e-12)


def test_bump_profile_shape():
    a = np.array([0.0, 0.5, 0.75, 1.0, 1.5])
    vals = SMOOTH_BUMP(a)
    assert vals[0] == vals[1] == 1.0 and vals[3] == vals[4] == 0.0
    assert vals[2] == pytest.approx(np.exp(1 - 1 / (1 - 0.25)))
    assert np.all(SMOOTH_BUMP(-a) == vals)


def test_kmax_limited_by_nyquist(small_grid):
    with pytest.raises(ValueError, match="k_max"):
        build_decomposition(small_grid, k_max=int(small_grid.nyquist))


def test_block_index_bounds(small_dec):
    with pytest.raises(IndexError):
        small_dec.index(small_dec.k_max + 1)


def test_reconstruction_of_band_limited_fields(small_grid, small_dec):
    rng = np.random.default_rng(3)
    for _ in range(5):
        u = random_band_limited(small_grid, rng, band=small_dec.band - 1)
        total = block_values(u.values, small_dec).sum(axis=0)
        assert np.max(np.abs(total - u.values)) <= 1e-10 * np.max(np.abs(u.values))


def test_single_mode_norm_by_hand(small_grid, small_dec):
    u = Field.from_function(small_grid, lambda x: np.exp(1j * x))
    A = lambda p: (2 * small_grid.L) ** (1 / p)
    for s, p, q in [(0, 2, 2), (1.5, 4, 1), (-1, 3, 1.5)]:
        assert mod_norm(u, ModNormParams(s, p, q), small_dec) == pytest.approx(2**s * A(p), rel=1e-12)


def test_half_integer_mode_splits_between_two_blocks(small_grid, small_dec):
    u = Field.from_function(small_grid, lambda x: np.exp(0.5j * x))
    b0, b1 = block(u, 0, small_dec), block(u, 1, small_dec)
    assert np.max(np.abs(b0.values - 0.5 * u.values)) < 1e-12
    assert np.max(np.abs(b1.values - 0.5 * u.values)) < 1e-12
    s, p, q = 1.0, 2.0, 1.5
    a = 0.5 * (2 * small_grid.L) ** 0.5
    expected = (a**q + (2**s * a) ** q) ** (1 / q)
    assert mod_norm(u, ModNormParams(s, p, q), small_dec) == pytest.approx(expected, rel=1e-12)


def test_block_skipping_does_not_change_norms(small_grid, small_dec):
    u = Field.from_function(small_grid, lambda x: np.exp(-x**2) * np.exp(2j * x))
    full = lp_values(block_values(u.values, small_dec), 3.0, small_grid.dx)
    skipped = block_norms(u.values, small_dec, 3.0)
    assert np.max(np.abs(full - skipped)) <= 1e-12 * full.max()


def test_tail_warning(small_grid, small_dec):
    u = Field.from_function(small_grid, lambda x: np.exp(1j * (small_dec.band + 1) * x))
    with pytest.warns(TailWarning):
        mod_norm(u, ModNormParams(0, 2, 2), small_dec)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mod_norm(Field.from_function(small_grid, lambda x: np.exp(-x**2)), ModNormParams(0, 2, 2), small_dec)


def test_q_infinity_not_implemented():
    with pytest.raises(NotImplementedError):
        ModNormParams(0, 2, np.inf)
    with pytest.raises(ValueError):
        ModNormParams(0, 0.5, 2)


@given(st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=200, deadline=None)
def test_nu1_matches_max_formula(a, b):
    p = np.inf if a == 0 else 1 / a
    q = np.inf if b == 0 else 1 / b
    assert nu1(p, q) == pytest.approx(max(0.0, b - a, a + b - 1), abs=1e-14)


@given(st.integers(0, 2**31))
@settings(max_examples=15, deadline=None)
def test_m22_norm_comparable_to_l2(seed):
    g = GridSpec(16 * np.pi, 1024)
    dec = build_decomposition(g, k_max=12)
    u = random_band_limited(g, np.random.default_rng(seed), band=8)
    ratio = mod_norm(u, ModNormParams(0, 2, 2), dec) / lp_values(u.values, 2, g.dx)
    assert 1 / np.sqrt(2) - 1e-12 <= ratio <= 1 + 1e-12


@given(st.integers(0, 2**31), st.floats(1, 3), st.floats(0.1, 2), st.floats(0, 2))
@settings(max_examples=15, deadline=None)
def test_norm_monotone_in_q_and_s(seed, q, dq, ds):
    g = GridSpec(16 * np.pi, 1024)
    dec = build_decomposition(g, k_max=12)
    u = random_band_limited(g, np.random.default_rng(seed), band=8)
    base = mod_norm(u, ModNormParams(0.5, 3, q), dec)
    assert mod_norm(u, ModNormParams(0.5, 3, q + dq), dec) <= base * (1 + 1e-12)
    assert mod_norm(u, ModNormParams(0.5 + ds, 3, q), dec) >= base * (1 - 1e-12)


@given(st.integers(0, 2**31), st.floats(1, 4), st.floats(0, 3), st.sampled_from([5, 8, 9]))
@settings(max_examples=30, deadline=None)
def test_minkowski_ordering_between_nestings(seed, q, extra, n_t):
    g = GridSpec(16 * np.pi, 256)
    dec = build_decomposition(g, k_max=6)
    rng = np.random.default_rng(seed)
    times = np.linspace(0, 3, n_t)
    vals = np.stack([random_band_limited(g, rng, band=4).values for _ in times])
    traj = Trajectory(g, times, vals)
    gamma = q + extra
    inner = mixed_time_norm(traj, 0.5, q, gamma, 2.0, "time-outside", dec)
    outer = mixed_time_norm(traj, 0.5, q, gamma, 2.0, "blocks-outside", dec)
    assert inner <= outer * (1 + 1e-12)


def test_mixed_norm_of_single_state_and_sup(small_grid, small_dec):
    u = Field.from_function(small_grid, lambda x: np.exp(-x**2))
    tr = Trajectory(small_grid, [0.0], u.values[None, :])
    params = ModNormParams(0, 2, 2)
    one = mod_norm(u, params, small_dec)
    assert mixed_time_norm(tr, 0, 2, 4, 2, "time-outside", small_dec) == pytest.approx(one)
    tr2 = Trajectory(small_grid, [0.0, 1.0], np.stack([u.values, 2 * u.values]))
    assert mixed_time_norm(tr2, 0, 2, np.inf, 2, "time-outside", small_dec) == pytest.approx(2 * one)
    assert weighted_sup_norm(tr2, 1.0, params, small_dec) == pytest.approx(4 * one)
    with pytest.raises(ValueError):
        mixed_time_norm(tr2, 0, 2, 2, 2, "sideways", small_dec)
