import mpmath as mp
import numpy as np
import pytest

from bbm_modlab.estimates import (
    DEFAULT_PRODUCT_TUPLES, QuotientOptions, QuotientReport, Window, WindowError, _Ctx, _check_product,
    _conv_integral, _eval_phiD_smooth, calibrated_envelope, decay_quotients, envelope_parameters,
    estimate_quotient, fit_decay_slope, kernel_envelope, retarded_integral, sobolev_norm,
    weighted_convolution_bound,
)
from bbm_modlab.families import TestFamily
from bbm_modlab.grid import Field, Trajectory
from bbm_modlab.group import HypothesisError, SymbolSpec, exponent_pack, phi


@pytest.fixture(scope="module")
def small_family():
    return TestFamily(count=3, center=(-8.0, 8.0))


def test_sobolev_norm_of_single_mode(small_grid):
    u = Field(small_grid, np.exp(1j * small_grid.x))
    l2 = np.sqrt(2 * small_grid.half_width)
    for sigma in (-3.0, -1.0, 0.5):
        assert sobolev_norm(u, sigma, 2) == pytest.approx(2 ** (sigma / 2) * l2, rel=1e-12)


def test_negative_sobolev_norm_below_l2(small_grid, small_family):
    for f in small_family.members(small_grid):
        assert sobolev_norm(f, -1.0, 2) <= sobolev_norm(f, 0.0, 2)


def test_l2_quotient_is_constant_in_time(small_grid, small_family):
    rep = decay_quotients(small_family, -2.0, 2.0, np.geomspace(1, 100, 12), small_grid, refine=False)
    q = np.array([r[2] / r[3] for r in rep.table()]).reshape(3, 12)
    assert np.max(np.ptp(q, axis=1) / q[:, 0]) < 1e-12


def test_decay_rejects_p_below_two(small_grid, small_family):
    with pytest.raises(HypothesisError):
        decay_quotients(small_family, -2.0, 1.5, [1.0, 2.0], small_grid)


def test_fit_recovers_exact_power():
    t = np.geomspace(1, 100, 20)
    fit = fit_decay_slope((t, 3 * t ** (-1 / 3)), (1, 100), target=-1 / 3)
    assert fit.slope == pytest.approx(-1 / 3, abs=1e-10)
    assert fit.accepted


def test_fit_tolerates_bounded_perturbation():
    t = np.geomspace(1, 100, 40)
    y = t ** -0.2 * (1 + 0.05 * np.sin(3 * np.log(t)))
    fit = fit_decay_slope((t, y), (1, 100), target=-0.2)
    assert abs(fit.slope + 0.2) < 0.02


def test_fit_flags_slow_decay_and_needs_points():
    t = np.geomspace(1, 100, 20)
    assert not fit_decay_slope((t, t ** -0.1), (1, 100), target=-0.3).accepted
    with pytest.raises(ValueError, match="8 points"):
        fit_decay_slope((t[:5], t[:5] ** -0.2), (1, 100), target=-0.2)


def test_envelope_parameters():
    eps, N, theta = envelope_parameters(16.0, -2.0)
    assert theta == pytest.approx(0.2)
    assert N == pytest.approx(2 * 16 ** 0.2, rel=1e-14)
    assert N == pytest.approx(3.4822022531844965, rel=1e-12)
    assert N ** 1.5 == pytest.approx(eps ** -0.5, rel=1e-12)


@pytest.mark.parametrize("sigma", [-2.0, -4.0])
def test_envelope_decreases(sigma):
    env = [calibrated_envelope(t, sigma) for t in np.geomspace(1, 100, 30)]
    assert np.all(np.diff(env) < 0)


def test_envelope_preconditions():
    with pytest.raises(ValueError):
        kernel_envelope(0.0, 0.01, 3.0, -2.0)
    with pytest.raises(ValueError):
        kernel_envelope(1.0, 0.2, 3.0, -2.0)
    with pytest.raises(ValueError):
        kernel_envelope(1.0, 0.01, 2.0, -2.0)
    with pytest.raises(ValueError):
        kernel_envelope(1.0, 0.01, 3.0, -1.0)
    assert np.isfinite(kernel_envelope(1.0, 1 / 8, 2.0, -2.0, strict=False))


def test_phi_smoothing_quotient_on_single_mode(small_grid, small_dec):
    # phi(1) = 1/2 and the weights differ by one power of 1 + |k| = 2, so the quotient is exactly 1
    pk = exponent_pack(2, -2, 0.5, q=2, s=0.7)
    ctx = _Ctx(pk, small_grid, small_dec, Window(), QuotientOptions())
    u = Field(small_grid, np.exp(1j * small_grid.x))
    out, skipped = _eval_phiD_smooth(ctx, [u, Field.zeros(small_grid)], (None,))
    (_, _, num, den), = out[None]
    assert num / den == pytest.approx(1.0, abs=1e-12)
    assert skipped == [1]


def test_retarded_integral_constant_forcing(small_grid):
    f = np.exp(-small_grid.x ** 2)
    times = np.arange(41) * 0.5
    forcing = Trajectory(small_grid, times, np.tile(f, (times.size, 1)).astype(complex))
    out = retarded_integral(forcing, SymbolSpec.bbm())
    P = -phi(small_grid.xi)
    t = times[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(P == 0, t, (np.exp(1j * t * P) - 1) / (1j * P))
    exact = np.fft.ifft(factor * np.fft.fft(f))
    assert np.max(np.abs(out.values[-1] - exact)) < 1e-12 * np.max(np.abs(exact))


def test_window_sampling():
    w = Window(t_min=1, t_max=10, samples=5, T=4, dt=0.5)
    assert w.sweep()[-1] == pytest.approx(10)
    assert w.sweep(extend=True)[-1] == pytest.approx(20)
    assert w.integrated().size == 9
    assert w.integrated(extend=True)[-1] == pytest.approx(8)
    with pytest.raises(WindowError):
        Window(T=1.0, dt=0.3)


def test_report_pass_logic():
    rep = QuotientReport("x", [(0, None, 1.0, 2.0)], refinement_drift=0.01, window_drift=0.2)
    assert rep.sup_quotient == 0.5
    assert not rep.passes()
    rep.window_drift = None
    assert rep.passes()


def test_strichartz_hypotheses(small_dec, small_family):
    pk = exponent_pack(6, -4, 0.25, q=40)
    win = Window(T=4, dt=0.5)
    with pytest.raises(HypothesisError, match="gamma"):
        estimate_quotient("strichartz_retarded", pk, small_family, win, small_dec)
    opts = QuotientOptions(symbol=SymbolSpec.custom(lambda xi: xi ** 2))
    with pytest.raises(HypothesisError, match="mu, delta"):
        estimate_quotient("strichartz_hom", exponent_pack(6, -4, 0.25), small_family, win, small_dec, opts)


def test_product_tuples():
    for kind, tuples in DEFAULT_PRODUCT_TUPLES.items():
        for t in tuples:
            _check_product(kind, t)
    with pytest.raises(HypothesisError):
        _check_product("product_bilinear", {"p1": 4, "p2": 4, "q0": 1.5, "q1": 1.5, "q2": 1.5, "s": 0.7})
    with pytest.raises(HypothesisError):
        _check_product("product_power", {"m": 2, "q": 2, "mu": 1, "nu": 1.5, "s": 0.1})


def test_product_quotient_finite(small_dec, small_family):
    pk = exponent_pack(2, -2, 0.5)
    opts = QuotientOptions(product=DEFAULT_PRODUCT_TUPLES["product_bilinear"][0], refine=False)
    rep = estimate_quotient("product_bilinear", pk, small_family, dec=small_dec, options=opts)
    assert len(rep.rows) == 3 and np.isfinite(rep.sup_quotient)


def test_convolution_against_arbitrary_precision():
    assert _conv_integral(0.0, 0.3, 3) == 0.0
    t, rho, lam = 50.0, 0.3, 3
    ref = mp.quad(lambda s: (1 + abs(t - s)) ** -rho * (1 + s) ** (-rho * (lam + 1)), [0, 1, 25, 49, 50])
    assert _conv_integral(t, rho, lam) == pytest.approx(float(ref), rel=1e-10)


def test_convolution_rejects_slow_weight():
    with pytest.raises(HypothesisError, match="hypothesis λ≥3 regime violated"):
        weighted_convolution_bound(0.2, 3, [1.0, 2.0])
    rep = weighted_convolution_bound(0.3, 3, np.geomspace(1, 200, 20))
    assert rep.refinement_drift < 0.01
