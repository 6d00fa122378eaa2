import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bbm_modlab.grid import (Field, GridError, GridSpec, Trajectory, apply_multiplier, conjugate_exponent,
                             cumulative_weights, forward_transform, inverse_transform, lp_norm, passes_truncation,
                             quadrature_weights, sample_symbol, time_quadrature, truncation_fraction)

G = GridSpec(8 * np.pi, 256)


def test_grid_geometry():
    g = GridSpec(64 * np.pi, 2**13)
    assert g.dx == pytest.approx(2 * 64 * np.pi / 2**13)
    assert g.dxi == pytest.approx(1 / 64)
    assert g.nyquist == pytest.approx(64)
    assert g.x[0] == -g.L and g.x[-1] == pytest.approx(g.L - g.dx)
    assert g.refined().N == 2 * g.N and g.refined().L == g.L


@pytest.mark.parametrize("n", [0, 3, 6, 100])
def test_grid_rejects_bad_sample_counts(n):
    with pytest.raises(GridError):
        GridSpec(1.0, n)


def test_forward_transform_of_gaussian_matches_closed_form():
    # int exp(-x^2/2) exp(-i x xi) dx = sqrt(2 pi) exp(-xi^2/2)
    f = Field.from_function(G, lambda x: np.exp(-x**2 / 2))
    spec = forward_transform(f)
    assert np.max(np.abs(spec - np.sqrt(2 * np.pi) * np.exp(-G.xi**2 / 2))) < 1e-12


def test_transform_roundtrip_and_shape_check():
    rng = np.random.default_rng(0)
    v = rng.normal(size=G.N) + 1j * rng.normal(size=G.N)
    back = inverse_transform(forward_transform(Field(G, v)), G)
    assert np.max(np.abs(back.values - v)) < 1e-12
    with pytest.raises(GridError):
        inverse_transform(np.zeros(3), G)


def test_multiplier_derivative_of_mode():
    u = Field.from_function(G, lambda x: np.exp(3j * x))
    du = apply_multiplier(u, lambda xi: 1j * xi)
    assert np.max(np.abs(du.values - 3j * u.values)) < 1e-11


def test_symbol_non_finite_is_named():
    with pytest.raises(GridError, match="xi = 0.0"), np.errstate(divide="ignore"):
        sample_symbol(lambda xi: 1 / xi, G)


def test_real_flag_checks_imaginary_part():
    with pytest.raises(GridError):
        Field(G, np.ones(G.N) * (1 + 1e-3j), real=True)
    assert Field(G, np.ones(G.N) * (1 + 1e-14j), real=True).values.imag.max() == 0


@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-3, max_value=3), st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_multiplier_is_linear(a, b, seed):
    rng = np.random.default_rng(seed)
    u = Field(G, rng.normal(size=G.N) + 1j * rng.normal(size=G.N))
    v = Field(G, rng.normal(size=G.N))
    m = lambda xi: np.exp(-xi**2) + 1j * xi
    lhs = apply_multiplier(u * a + v * b, m).values
    rhs = a * apply_multiplier(u, m).values + b * apply_multiplier(v, m).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * (1 + np.max(np.abs(rhs)))


def test_lp_norms_against_closed_forms():
    g = GridSpec(16 * np.pi, 2048)
    f = Field.from_function(g, lambda x: np.exp(-x**2))
    assert lp_norm(f, 1) == pytest.approx(np.sqrt(np.pi), rel=1e-12)
    assert lp_norm(f, 2) == pytest.approx((np.pi / 2) ** 0.25, rel=1e-12)
    assert lp_norm(f, np.inf) == pytest.approx(1.0)
    assert lp_norm(f, 4) == pytest.approx((np.sqrt(np.pi / 4)) ** 0.25, rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_conjugate_exponent():
    assert conjugate_exponent(2) == 2
    assert conjugate_exponent(1) == np.inf
    assert conjugate_exponent(np.inf) == 1
    assert conjugate_exponent(3) == pytest.approx(1.5)


def test_truncation_diagnostic():
    inside = Field.from_function(G, lambda x: np.exp(-x**2))
    spread = Field.from_function(G, lambda x: np.ones_like(x))
    assert truncation_fraction(inside) < 1e-30 and passes_truncation(inside)
    assert truncation_fraction(spread) == pytest.approx(0.5, abs=1e-2)
    assert not passes_truncation(spread)


@pytest.mark.parametrize("n", [3, 4, 5, 8, 9])
@pytest.mark.parametrize("rule", ["trapezoid", "simpson"])
def test_sampled_rules(n, rule):
    t = np.linspace(0.0, 2.0, n)
    w = quadrature_weights(t, rule)
    assert w.sum() == pytest.approx(2.0)
    if rule == "simpson" and n >= 3:
        assert np.dot(w, t**3) == pytest.approx(4.0, rel=1e-13)  # exact for cubics


def test_nonuniform_simpson_exact_for_quadratics():
    t = np.array([0.0, 0.1, 0.5, 0.6, 1.3])
    assert np.dot(quadrature_weights(t, "simpson"), t**2) == pytest.approx(1.3**3 / 3, rel=1e-13)


def test_gauss_on_subintervals_and_errors():
    t = np.linspace(0, np.pi, 5)
    assert time_quadrature(np.sin, t, "gauss-on-subintervals") == pytest.approx(2.0, rel=1e-13)
    with pytest.raises(ValueError):
        time_quadrature(np.sin(t), t, "gauss-on-subintervals")
    with pytest.raises(ValueError):
        quadrature_weights(np.array([0.0, 1.0, 0.5]))


def test_cumulative_weights_fourth_order():
    t = np.linspace(0, 1, 9)
    W = cumulative_weights(t)
    exact = t**4 / 4
    assert np.max(np.abs(W @ t**3 - exact)) < 1e-14
    errs = []
    for n in (17, 33):
        tt = np.linspace(0, 2, n)
        errs.append(np.max(np.abs(cumulative_weights(tt) @ np.exp(tt) - (np.exp(tt) - 1))))
    assert errs[0] / errs[1] > 12
    with pytest.raises(ValueError):
        cumulative_weights(np.array([0.0, 0.1, 0.3, 0.4]))


def test_trajectory_validation_and_prefix():
    vals = np.zeros((3, G.N))
    tr = Trajectory(G, [0.0, 1.0, 2.0], vals)
    assert len(tr.prefix(1.0)) == 2
    with pytest.raises(GridError):
        Trajectory(G, [0.0, 0.0, 1.0], vals)
    with pytest.raises(GridError):
        Trajectory(G, [0.0, 1.0], vals)
