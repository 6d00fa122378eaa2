"""Picard iteration on the Duhamel form of the generalized BBM equation

    u_t + u_x - u_xxt + u^lam u_x = 0,

i.e. ``u(t) = S(t) u0 - i/(lam+1) int_0^t S(t-tau) phi(D) u(tau)^{lam+1} dtau``, cross-checked
against an integrating-factor RK4 stepper for the same spectral ODE.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import Field, GridError, GridSpec, Trajectory, cumulative_weights, lp_values, passes_truncation
from .group import ExponentPack, HypothesisError, phi
from .modspace import ModNormParams, UniformDecomposition, mod_norm_values


class PicardDivergence(RuntimeError):
    """Picard distances grew for three consecutive iterations; ``report`` holds the partial run."""

    def __init__(self, message: str, report: "SolveReport"):
        super().__init__(message)
        self.report = report


class EvolutionBlowUp(RuntimeError):
    pass


class QuadratureWarning(UserWarning):
    pass


def dealias_mask(grid: GridSpec) -> np.ndarray:
    """Two-thirds rule: keep modes with ``|j| <= N/3``."""
    j = np.abs(np.fft.fftfreq(grid.samples) * grid.samples)
    return j <= grid.samples // 3


def _require_real(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        scale = max(float(np.max(np.abs(values.real), initial=0.0)), 1.0)
        if np.max(np.abs(values.imag), initial=0.0) > 1e-10 * scale:
            raise GridError("nonlinearity needs a real-valued field")
        values = values.real
    return values


def _power_spectrum(values: np.ndarray, lam: int, mask: np.ndarray) -> np.ndarray:
    """Dealiased FFT of ``u^{lam+1}`` for real samples (last axis is space)."""
    v = _require_real(values)
    return sfft.fft(v ** (lam + 1), axis=-1) * mask


def nonlinearity(u: Field, lam: int) -> Field:
    if not u.real:
        raise GridError("nonlinearity needs a field flagged real")
    spec = _power_spectrum(u.values, lam, dealias_mask(u.grid))
    return Field(u.grid, sfft.ifft(spec).real, real=True)


# --------------------------------------------------------------------------- Duhamel term

def _duhamel_spectra(values: np.ndarray, times: np.ndarray, lam: int, grid: GridSpec) -> np.ndarray:
    ph = phi(grid.xi)
    nl = _power_spectrum(values, lam, dealias_mask(grid))
    g = np.exp(1j * times[:, None] * ph[None, :]) * ph[None, :] * nl
    acc = cumulative_weights(times) @ g
    return (-1j / (lam + 1)) * np.exp(-1j * times[:, None] * ph[None, :]) * acc


def _duhamel_values(values: np.ndarray, times: np.ndarray, lam: int, grid: GridSpec) -> np.ndarray:
    return sfft.ifft(_duhamel_spectra(values, times, lam, grid), axis=-1).real


def duhamel_apply(v: Trajectory, lam: int, t_grid: np.ndarray | None = None,
                  tol: float | None = None) -> Trajectory:
    """``-i/(lam+1) int_0^t S(t-tau) phi(D) v(tau)^{lam+1} dtau`` at every sample of ``v``.

    The tau-integral uses fourth-order cumulative weights on the (uniform) samples of ``v``.  When
    the sample count allows it, the same integral on every other sample is compared against the
    full one; the maximal L^2 gap is stored as ``meta['resolution_error']`` and a
    ``QuadratureWarning`` is raised if it exceeds ``tol / 10``.
    """
    if t_grid is not None and not np.allclose(np.asarray(t_grid, dtype=float), v.times, rtol=0, atol=1e-14):
        raise ValueError("duhamel_apply evaluates on the samples of v; t_grid must equal v.times")
    if v.times[0] != 0:
        raise ValueError("trajectory must start at t = 0")
    vals = _require_real(v.values)
    out = _duhamel_values(vals, v.times, lam, v.grid)
    traj = Trajectory(v.grid, v.times, out, real=True)
    n = len(v)
    if n >= 9 and (n - 1) % 2 == 0:
        coarse = _duhamel_values(vals[::2], v.times[::2], lam, v.grid)
        err = float(np.max(lp_values(coarse - out[::2], 2, v.grid.dx)))
        traj.meta["resolution_error"] = err
        if tol is not None and err > tol / 10:
            warnings.warn(f"Duhamel quadrature under-resolved: halving the samples moves it by {err:.2e}",
                          QuadratureWarning, stacklevel=2)
    return traj


def linear_trajectory(u0: Field, times: np.ndarray) -> Trajectory:
    times = np.asarray(times, dtype=float)
    spec = sfft.fft(u0.values)
    vals = sfft.ifft(np.exp(-1j * times[:, None] * phi(u0.grid.xi)[None, :]) * spec[None, :], axis=-1)
    if u0.real:
        vals = vals.real
    return Trajectory(u0.grid, times, vals, real=u0.real)


# --------------------------------------------------------------------------- problem / config

@dataclass
class CauchyProblem:
    lam: int
    u0: Field
    T: float

    def __post_init__(self):
        if int(self.lam) != self.lam or self.lam < 1:
            raise HypothesisError("lambda >= 1 integer", f"lambda = {self.lam}")
        self.lam = int(self.lam)
        if not self.u0.real:
            raise GridError("initial data must be flagged real")
        if not passes_truncation(self.u0):
            raise GridError("initial data fails the truncation diagnostic")
        if not self.T > 0:
            raise ValueError("final time must be positive")

    @property
    def grid(self) -> GridSpec:
        return self.u0.grid


@dataclass
class PicardConfig:
    max_iter: int = 60
    tol: float = 1e-12
    time_samples: int = 33
    rule: str = "simpson"
    norm: str = "l2"  # or "mod"
    norm_params: ModNormParams = field(default_factory=lambda: ModNormParams(0.0, 2.0, 2.0))
    seed: str = "linear"  # or "frozen": u^(0)(t) = u0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.time_samples < 9:
            raise ValueError("time_samples must be at least 9")
        if self.rule != "simpson":
            raise ValueError("the Picard map integrates with the fourth-order cumulative Simpson rule")
        if self.norm not in ("l2", "mod"):
            raise ValueError("norm must be 'l2' or 'mod'")
        if self.seed not in ("linear", "frozen"):
            raise ValueError("seed must be 'linear' or 'frozen'")


@dataclass
class SolveReport:
    iterate_distances: list[float]
    contraction_ratios: list[float]
    final_residual: float
    trajectory: Trajectory
    conserved_drift: dict[str, float]
    converged: bool
    resolution_error: float = float("nan")

    @property
    def iterations(self) -> int:
        return len(self.iterate_distances)

    def summary(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "iterate_distances": self.iterate_distances,
            "contraction_ratios": self.contraction_ratios,
            "final_residual": self.final_residual,
            "conserved_drift": self.conserved_drift,
            "resolution_error": self.resolution_error,
        }


def _sup_distance(a: np.ndarray, b: np.ndarray, grid: GridSpec, cfg: PicardConfig,
                  dec: UniformDecomposition | None) -> float:
    if cfg.norm == "l2":
        return float(np.max(lp_values(a - b, 2, grid.dx)))
    if dec is None:
        raise ValueError("norm='mod' needs a decomposition")
    return float(np.max(mod_norm_values(a - b, cfg.norm_params, dec)))


def _contraction_ratios(distances: list[float], floor: float) -> list[float]:
    out = []
    for a, b in zip(distances[:-1], distances[1:]):
        if a > floor and b > floor:
            out.append(b / a)
    return out


def picard_solve(prob: CauchyProblem, cfg: PicardConfig | None = None,
                 dec: UniformDecomposition | None = None) -> SolveReport:
    cfg = cfg or PicardConfig()
    grid, lam = prob.grid, prob.lam
    times = np.linspace(0.0, prob.T, cfg.time_samples)
    lin = linear_trajectory(prob.u0, times).values.real
    u = lin.copy() if cfg.seed == "linear" else np.tile(prob.u0.values.real, (times.size, 1))
    scale = max(float(np.max(lp_values(lin, 2, grid.dx))), 1e-300)
    floor = 1e-13 * scale
    distances: list[float] = []
    converged = False
    growth = 0
    for _ in range(cfg.max_iter):
        new = lin + _duhamel_values(u, times, lam, grid)
        if not np.all(np.isfinite(new)):
            growth = 3
            d = float("inf")
        else:
            d = _sup_distance(new, u, grid, cfg, dec)
        if distances and d > distances[-1]:
            growth += 1
        elif np.isfinite(d):
            growth = 0
        distances.append(d)
        u = new
        if d < cfg.tol:
            converged = True
            break
        if growth >= 3:
            traj = Trajectory(grid, times, np.nan_to_num(u), real=True)
            rep = SolveReport(distances, _contraction_ratios(distances, floor), float("nan"), traj, {}, False)
            raise PicardDivergence("Picard iterates diverge: data too large for the contraction regime", rep)
    traj = Trajectory(grid, times, u, real=True)
    checked = duhamel_apply(traj, lam, tol=cfg.tol)
    return SolveReport(
        iterate_distances=distances,
        contraction_ratios=_contraction_ratios(distances, floor),
        final_residual=residual(traj, lam, prob.u0),
        trajectory=traj,
        conserved_drift=conserved_drift(traj, lam),
        converged=converged,
        resolution_error=checked.meta.get("resolution_error", float("nan")),
    )


def contraction_threshold(lam: int, u0: Field, T: float, cfg: PicardConfig | None = None, bound: float = 0.5,
                          bisections: int = 8, max_doublings: int = 30) -> dict:
    """Smallest multiple ``a`` of ``u0`` (to ``bisections`` log-steps) whose first Picard ratio reaches ``bound``.

    Only the first two Picard distances are needed, so each probe runs three iterations.  A probe
    that diverges or produces non-finite distances counts as beyond the threshold.
    """
    cfg = cfg or PicardConfig()
    probe_cfg = PicardConfig(max_iter=3, tol=1e-300, time_samples=cfg.time_samples, norm=cfg.norm,
                             norm_params=cfg.norm_params)

    def first_ratio(a: float) -> float:
        prob = CauchyProblem(lam, Field(u0.grid, a * u0.values.real, real=True), T)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                d = picard_solve(prob, probe_cfg).iterate_distances
        except PicardDivergence:
            return float("inf")
        if len(d) < 2 or not np.isfinite(d[1]) or d[0] == 0:
            return float("inf") if len(d) >= 2 and not np.isfinite(d[1]) else 0.0
        return d[1] / d[0]

    lo, hi = 0.0, 1.0
    r_hi = first_ratio(hi)
    for _ in range(max_doublings):
        if r_hi >= bound:
            break
        lo, hi = hi, 2 * hi
        r_hi = first_ratio(hi)
    else:
        return {"bound": bound, "amplitude": float("inf"), "bracket": [lo, hi]}
    if lo == 0.0:
        lo = hi
        while first_ratio(lo) >= bound and lo > 1e-12:
            hi, lo = lo, lo / 2
    for _ in range(bisections):
        mid = np.sqrt(lo * hi)
        if first_ratio(mid) >= bound:
            hi = mid
        else:
            lo = mid
    return {"bound": bound, "amplitude": float(np.sqrt(lo * hi)), "bracket": [float(lo), float(hi)]}


def residual(traj: Trajectory, lam: int, u0: Field | None = None) -> float:
    """Sup over samples of the L^2 defect of the Duhamel equation, over ``max(1, ||u0||_2)``."""
    if traj.times[0] != 0:
        raise ValueError("trajectory must start at t = 0")
    if u0 is None:
        u0 = traj.state(0)
    vals = _require_real(traj.values)
    lin = linear_trajectory(u0, traj.times).values.real
    defect = vals - lin - _duhamel_values(vals, traj.times, lam, traj.grid)
    norm0 = float(lp_values(u0.values, 2, u0.grid.dx))
    return float(np.max(lp_values(defect, 2, traj.grid.dx))) / max(1.0, norm0)


# --------------------------------------------------------------------------- reference integrator

def reference_evolve(prob: CauchyProblem, dt: float, stride: int = 1, nonlinear: bool = True,
                     blowup: float = 1e6) -> Trajectory:
    """Classical RK4 on ``v = exp(i t phi(D)) u``, for which the linear part is exact.

    Returns states at every ``stride``-th step, always including ``t = 0`` and ``t = T``.
    """
    grid, lam = prob.grid, prob.lam
    steps = int(round(prob.T / dt))
    if steps < 1 or abs(steps * dt - prob.T) > 1e-9 * max(1.0, prob.T):
        raise ValueError("T must be an integer multiple of dt")
    ph = phi(grid.xi)
    mask = dealias_mask(grid)
    coef = -1j / (lam + 1) * ph

    def rhs(t: float, v: np.ndarray) -> np.ndarray:
        u = sfft.ifft(np.exp(-1j * t * ph) * v).real
        return np.exp(1j * t * ph) * coef * (sfft.fft(u ** (lam + 1)) * mask)

    v = sfft.fft(prob.u0.values.real)
    n0 = max(float(np.max(np.abs(v))), 1e-300)
    keep_t, keep_v = [0.0], [prob.u0.values.real.copy()]
    for n in range(steps):
        t = n * dt
        if nonlinear:
            k1 = rhs(t, v)
            k2 = rhs(t + dt / 2, v + dt / 2 * k1)
            k3 = rhs(t + dt / 2, v + dt / 2 * k2)
            k4 = rhs(t + dt, v + dt * k3)
            v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(v)) or np.max(np.abs(v)) > blowup * n0:
            raise EvolutionBlowUp(f"reference evolution blew up at t = {t + dt:g}")
        if (n + 1) % stride == 0 or n + 1 == steps:
            tn = (n + 1) * dt
            keep_t.append(tn)
            keep_v.append(sfft.ifft(np.exp(-1j * tn * ph) * v).real)
    return Trajectory(grid, np.array(keep_t), np.array(keep_v), real=True)


# --------------------------------------------------------------------------- invariants

def _dx_spectral(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    return sfft.ifft(1j * grid.xi * sfft.fft(values, axis=-1), axis=-1).real


def conserved_quantities(u: Field, lam: int) -> dict[str, float]:
    """``I1 = int u``, ``I2 = int u^2 + u_x^2``, ``H = int u^2/2 + u^{lam+2}/((lam+1)(lam+2))``."""
    if not u.real:
        raise GridError("conserved quantities need a real field")
    v = u.values.real
    ux = _dx_spectral(v, u.grid)
    dx = u.grid.dx
    return {
        "I1": float(np.sum(v) * dx),
        "I2": float(np.sum(v * v + ux * ux) * dx),
        "H": float(np.sum(v * v / 2 + v ** (lam + 2) / ((lam + 1) * (lam + 2))) * dx),
    }


def conserved_drift(traj: Trajectory, lam: int) -> dict[str, float]:
    """Max over samples of ``|Q(t) - Q(0)|``, relative to ``max(|Q(0)|, 1e-300)`` (absolute if Q(0) = 0)."""
    q0 = conserved_quantities(traj.state(0), lam)
    drift = {k: 0.0 for k in q0}
    for n in range(1, len(traj)):
        qn = conserved_quantities(traj.state(n), lam)
        for k in q0:
            denom = abs(q0[k]) if q0[k] != 0 else 1.0
            drift[k] = max(drift[k], abs(qn[k] - q0[k]) / denom)
    return drift


# --------------------------------------------------------------------------- solitary waves

def solitary_parameters(c: float, lam: int) -> tuple[float, float]:
    """Amplitude ``A`` and inverse width ``B`` of ``A sech^{2/lam}(B z)``.

    Matching the ``sech^{2/lam}`` and ``sech^{2/lam + 2}`` terms of
    ``(1 - c) psi + c psi'' + psi^{lam+1}/(lam+1) = 0`` gives
    ``B^2 = lam^2 (c - 1) / (4 c)`` and ``A^lam = (lam + 1)(lam + 2)(c - 1) / 2``.
    """
    if not c > 1:
        raise ValueError("solitary waves need speed c > 1")
    B = lam * np.sqrt((c - 1.0) / (4.0 * c))
    A = ((lam + 1.0) * (lam + 2.0) * (c - 1.0) / 2.0) ** (1.0 / lam)
    return float(A), float(B)


def solitary_wave(c: float, lam: int, grid: GridSpec, t: float = 0.0) -> Field:
    A, B = solitary_parameters(c, lam)
    L = grid.half_width
    z = np.mod(grid.x - c * t + L, 2 * L) - L
    return Field(grid, A / np.cosh(B * z) ** (2.0 / lam), real=True)


def traveling_wave_residual(psi: Field, c: float, lam: int) -> float:
    v = psi.values.real
    vxx = sfft.ifft(-(psi.grid.xi**2) * sfft.fft(v)).real
    return float(np.max(np.abs((1 - c) * v + c * vxx + v ** (lam + 1) / (lam + 1))))


# --------------------------------------------------------------------------- weighted space

def x_space_membership(traj: Trajectory, pack: ExponentPack, dec: UniformDecomposition,
                       params: ModNormParams | None = None) -> dict:
    """Time-weighted sup norm ``sup_t (1+t)^rho ||u(t)||_{M^s_{p,q}}`` on the full window and its first half."""
    if pack.lam < 3:
        raise HypothesisError("lambda >= 3", f"lambda = {pack.lam}")
    params = params or ModNormParams(pack.s, pack.p, pack.q)
    norms = mod_norm_values(traj.values, params, dec)
    weighted = (1.0 + np.abs(traj.times)) ** pack.rho * norms
    half = traj.times <= traj.times[-1] / 2 * (1 + 1e-12)
    full_sup = float(np.max(weighted))
    half_sup = float(np.max(weighted[half]))
    drift = abs(full_sup - half_sup) / half_sup if half_sup > 0 else 0.0
    return {
        "rho": pack.rho,
        "weighted_sup": full_sup,
        "weighted_sup_half_window": half_sup,
        "window_drift": drift,
        "finite": bool(np.isfinite(full_sup)),
        "convolution_integrable": bool(pack.rho * (pack.lam + 1) > 1),
    }
