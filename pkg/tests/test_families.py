import numpy as np
import pytest

from bbm_modlab.families import TestFamily, random_band_limited
from bbm_modlab.grid import passes_truncation


@pytest.mark.parametrize("kind", ["gaussian-packets", "band-limited-random"])
def test_members_are_reproducible(small_grid, kind):
    fam = TestFamily(kind=kind, count=5, center=(-8.0, 8.0))
    a, b = fam.members(small_grid), fam.members(small_grid)
    assert len(a) == 5
    for f, g in zip(a, b):
        assert np.array_equal(f.values, g.values)
    other = fam.with_(seed=1).members(small_grid)
    assert not np.allclose(a[0].values, other[0].values)


@pytest.mark.parametrize("kind", ["gaussian-packets", "band-limited-random"])
def test_members_agree_across_refinement(small_grid, kind):
    fam = TestFamily(kind=kind, count=4, center=(-8.0, 8.0))
    coarse = fam.members(small_grid)
    fine = fam.members(small_grid.refined())
    for c, f in zip(coarse, fine):
        assert np.allclose(f.values[::2], c.values, atol=1e-10 * np.max(np.abs(c.values)))


def test_real_members_and_truncation(small_grid):
    for f in TestFamily(real=True, count=6, center=(-8.0, 8.0)).members(small_grid):
        assert f.real
        assert passes_truncation(f)


def test_rejects_bad_parameters(small_grid):
    with pytest.raises(ValueError, match="kind"):
        TestFamily(kind="uniform")
    with pytest.raises(ValueError, match="count"):
        TestFamily(count=0)
    # the default centres reach beyond the inner half of this small window
    with pytest.raises(ValueError, match="truncation"):
        TestFamily(count=32).members(small_grid)


def test_random_band_limited_stays_in_band(small_grid):
    f = random_band_limited(small_grid, np.random.default_rng(0), band=4.0)
    spec = np.abs(np.fft.fft(f.values))
    assert np.max(spec[np.abs(small_grid.xi) > 4.0 + 1e-12]) < 1e-10 * np.max(spec)
