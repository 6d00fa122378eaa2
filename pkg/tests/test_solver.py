import numpy as np
import pytest

from bbm_modlab.grid import Field, GridError, Trajectory
from bbm_modlab.group import HypothesisError, apply_S, exponent_pack
from bbm_modlab.solver import (
    CauchyProblem, PicardConfig, PicardDivergence, conserved_quantities, duhamel_apply, nonlinearity,
    picard_solve, reference_evolve, residual, solitary_parameters, solitary_wave, traveling_wave_residual,
    x_space_membership,
)


def gaussian(grid, amp=0.01):
    return Field(grid, amp * np.exp(-grid.x ** 2), real=True)


def test_square_of_cosine(small_grid):
    u = Field(small_grid, np.cos(small_grid.x), real=True)
    assert np.allclose(nonlinearity(u, 1).values.real, (1 + np.cos(2 * small_grid.x)) / 2, atol=1e-13)
    with pytest.raises(GridError):
        nonlinearity(Field(small_grid, np.exp(1j * small_grid.x)), 1)


def test_duhamel_of_frozen_cosine(small_grid):
    # u(tau) = a cos x, lam = 1: only the modes +-2 feel phi, with phi(2) = 2/5
    a, x = 0.3, small_grid.x
    times = np.linspace(0, 4, 65)
    v = Trajectory(small_grid, times, np.tile(a * np.cos(x), (65, 1)), real=True)
    out = duhamel_apply(v, 1)
    for n in (0, 16, 64):
        exact = -a * a / 4 * (np.cos(2 * x) - np.cos(2 * x - 0.4 * times[n]))
        assert np.max(np.abs(out.values[n] - exact)) < 1e-8
    assert out.meta["resolution_error"] < 1e-7


def test_duhamel_of_zero(small_grid):
    times = np.linspace(0, 1, 9)
    out = duhamel_apply(Trajectory(small_grid, times, np.zeros((9, small_grid.samples)), real=True), 2)
    assert np.all(out.values == 0)


def test_problem_validation(small_grid):
    with pytest.raises(HypothesisError):
        CauchyProblem(0, gaussian(small_grid), 1.0)
    with pytest.raises(GridError):
        CauchyProblem(1, Field(small_grid, np.exp(-small_grid.x ** 2)), 1.0)
    with pytest.raises(ValueError):
        CauchyProblem(1, gaussian(small_grid), 0.0)


def test_zero_data_is_a_fixed_point(small_grid):
    rep = picard_solve(CauchyProblem(2, Field.zeros(small_grid), 1.0))
    assert rep.converged and rep.iterations == 1
    assert np.all(rep.trajectory.values == 0)


def test_small_data_contracts(small_grid):
    prob = CauchyProblem(1, gaussian(small_grid), 1.0)
    rep = picard_solve(prob)
    assert rep.converged
    assert rep.contraction_ratios and max(rep.contraction_ratios) < 0.1
    assert rep.final_residual < 1e-8
    ref = reference_evolve(prob, 0.05)
    assert np.linalg.norm(ref.values[-1] - rep.trajectory.values[-1]) * np.sqrt(small_grid.dx) < 1e-8


def test_fixed_point_does_not_depend_on_seed(small_grid):
    prob = CauchyProblem(2, gaussian(small_grid, 0.2), 1.0)
    a = picard_solve(prob, PicardConfig(seed="linear", time_samples=65, tol=1e-10)).trajectory.values
    b = picard_solve(prob, PicardConfig(seed="frozen", time_samples=65, tol=1e-10)).trajectory.values
    assert np.max(np.abs(a - b)) < 1e-9


def test_frozen_data_is_not_a_solution(small_grid):
    # negative control: the residual check must notice a trajectory that ignores the dynamics
    u0 = gaussian(small_grid, 0.2)
    times = np.linspace(0, 1, 17)
    frozen = Trajectory(small_grid, times, np.tile(u0.values.real, (17, 1)), real=True)
    assert residual(frozen, 1, u0) > 1e-3


def test_large_data_diverges(small_grid):
    with pytest.raises(PicardDivergence) as err:
        picard_solve(CauchyProblem(1, gaussian(small_grid, 5.0), 10.0))
    assert not err.value.report.converged


def test_linear_reference_matches_group(small_grid):
    u0 = gaussian(small_grid, 1.0)
    ref = reference_evolve(CauchyProblem(1, u0, 3.0), 0.5, nonlinear=False)
    assert np.allclose(ref.values[-1], apply_S(u0, 3.0).values.real, atol=1e-13)


def test_reference_is_fourth_order(small_grid):
    prob = CauchyProblem(1, gaussian(small_grid, 1.0), 2.0)
    a, b, c = (reference_evolve(prob, dt).values[-1] for dt in (0.2, 0.1, 0.05))
    ratio = np.linalg.norm(a - b) / np.linalg.norm(b - c)
    assert 12 < ratio < 20


def test_cosine_invariants(small_grid):
    q = conserved_quantities(Field(small_grid, np.cos(small_grid.x), real=True), 1)
    assert abs(q["I1"]) < 1e-12
    assert q["I2"] == pytest.approx(2 * small_grid.half_width, rel=1e-12)


@pytest.mark.parametrize("c, lam", [(1.5, 1), (1.5, 2), (2.0, 4)])
def test_solitary_profile_solves_the_ode(small_grid, c, lam):
    assert traveling_wave_residual(solitary_wave(c, lam, small_grid), c, lam) < 1e-8


def test_solitary_parameters_and_wrap(small_grid):
    A, B = solitary_parameters(2.0, 2)
    assert A ** 2 == pytest.approx(6.0)
    assert B == pytest.approx(2 * np.sqrt(1 / 8))
    period = 2 * small_grid.half_width / 1.5
    a = solitary_wave(1.5, 1, small_grid).values
    b = solitary_wave(1.5, 1, small_grid, t=period).values
    assert np.allclose(a, b, atol=1e-12)
    with pytest.raises(ValueError):
        solitary_parameters(0.9, 1)


def test_weighted_membership(small_dec):
    grid = small_dec.grid
    times = np.linspace(0, 2, 9)
    zero = Trajectory(grid, times, np.zeros((9, grid.samples)), real=True)
    out = x_space_membership(zero, exponent_pack(3, -4, 0.25), small_dec)
    assert out["weighted_sup"] == 0 and out["finite"]
    with pytest.raises(HypothesisError):
        x_space_membership(zero, exponent_pack(2, -4, 0.25), small_dec)
