"""Measured constants for the linear and multilinear estimates.

Every inequality ``A(f) <~ B(f)`` is realized as a table of quotients ``A(f)/B(f)`` over a seeded
family of inputs.  A report is healthy when the largest quotient is finite and does not move (beyond a
few percent) when the grid is refined or the time window is doubled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft
from scipy import integrate

from .families import TestFamily
from .grid import (DEFAULT_GRID, Field, GridSpec, Trajectory, apply_multiplier, conjugate_exponent, lp_norm,
                   lp_values, quadrature_weights)
from .group import ExponentPack, HypothesisError, SymbolSpec, apply_J, beta, bessel_symbol, phi
from .modspace import (ModNormParams, UniformDecomposition, block_norms, build_decomposition,
                       mixed_norm_from_blocks, mod_norm_values)

DRIFT_TOL = 0.05


class WindowError(ValueError):
    pass


# --------------------------------------------------------------------------- reports

@dataclass
class QuotientReport:
    """Quotient table; each row is ``(member_id, t, numerator, denominator)`` (``t`` is None when unused).

    Rows with a zero denominator are never stored; their member ids go to ``skipped``.
    """

    kind: str
    rows: list[tuple[int, float | None, float, float]] = field(default_factory=list)
    refinement_drift: float | None = None
    window_drift: float | None = None
    skipped: list[int] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def table(self) -> list[tuple[int, float | None, float, float]]:
        return sorted(self.rows, key=lambda r: (r[0], -1.0 if r[1] is None else r[1]))

    @property
    def quotients(self) -> np.ndarray:
        return np.array([num / den for _, _, num, den in self.rows], dtype=float)

    @property
    def sup_quotient(self) -> float:
        q = self.quotients
        return float(np.max(q)) if q.size else float("nan")

    def sup_by_time(self) -> tuple[np.ndarray, np.ndarray]:
        best: dict[float, float] = {}
        for _, t, num, den in self.rows:
            if t is not None:
                best[t] = max(best.get(t, -np.inf), num / den)
        ts = np.array(sorted(best))
        return ts, np.array([best[t] for t in ts])

    def csv_rows(self) -> list[tuple]:
        return [(self.kind, mid, "" if t is None else t, num / den, num, den) for mid, t, num, den in self.table()]

    def passes(self, tol: float = DRIFT_TOL) -> bool:
        ok = math.isfinite(self.sup_quotient)
        for d in (self.refinement_drift, self.window_drift):
            if d is not None:
                ok = ok and math.isfinite(d) and d < tol
        return bool(ok)

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "sup_quotient": self.sup_quotient,
            "refinement_drift": self.refinement_drift,
            "window_drift": self.window_drift,
            "rows": len(self.rows),
            "skipped_members": list(self.skipped),
            **self.extra,
        }


def _relative_change(new: float, old: float) -> float:
    if old == 0:
        return 0.0 if new == 0 else float("inf")
    return abs(new - old) / abs(old)


@dataclass(frozen=True)
class Window:
    """Log-spaced sweep ``[t_min, t_max]`` for pointwise decay, ``[0, T]`` with step ``dt`` for time integrals."""

    t_min: float = 1.0
    t_max: float = 100.0
    samples: int = 24
    T: float = 40.0
    dt: float = 0.25

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise WindowError("need 0 < t_min < t_max")
        if self.samples < 2:
            raise WindowError("sweep needs at least two samples")
        n = self.T / self.dt
        if not self.T > 0 or abs(n - round(n)) > 1e-9:
            raise WindowError("T must be a positive integer multiple of dt")

    def sweep(self, extend: bool = False) -> np.ndarray:
        base = np.geomspace(self.t_min, self.t_max, self.samples)
        if not extend:
            return base
        ratio = base[1] / base[0]
        more = []
        t = self.t_max
        while t * ratio < 2 * self.t_max * (1 - 1e-12):
            t *= ratio
            more.append(t)
        return np.concatenate([base, more, [2 * self.t_max]])

    def integrated(self, extend: bool = False) -> np.ndarray:
        n = int(round(self.T / self.dt)) * (2 if extend else 1)
        return np.arange(n + 1) * self.dt


# --------------------------------------------------------------------------- Sobolev / kernel decay

def sobolev_norm(u: Field, sigma: float, p: float) -> float:
    return lp_norm(apply_J(u, sigma), p)


def _evolved(values: np.ndarray, grid: GridSpec, times: np.ndarray, extra: np.ndarray | None = None) -> np.ndarray:
    """``S(t) m(D) f`` for every t, as an ``(n_t, N)`` array."""
    spec = sfft.fft(values)
    if extra is not None:
        spec = spec * extra
    return sfft.ifft(np.exp(-1j * times[:, None] * phi(grid.xi)[None, :]) * spec[None, :], axis=-1)


def _decay_rows(members: list[Field], sigma: float, p: float, times: np.ndarray, exponent: float):
    rows, skipped = [], []
    grid = members[0].grid
    J = bessel_symbol(sigma)(grid.xi)
    pc = conjugate_exponent(p)
    for i, f in enumerate(members):
        den0 = lp_norm(f, pc)
        if den0 == 0:
            skipped.append(i)
            continue
        num = lp_values(_evolved(f.values, grid, times, J), p, grid.dx)
        for t, nv in zip(times, num):
            rows.append((i, float(t), float(nv), float(abs(t) ** exponent * den0)))
    return rows, skipped


def decay_quotients(family: TestFamily, sigma: float, p: float, t_grid: Sequence[float],
                    grid: GridSpec = DEFAULT_GRID, refine: bool = True) -> QuotientReport:
    """``||S(t) f||_{H^sigma_p} / (|t|^{2(1/2-1/p) beta} ||f||_{p'})`` over the family and ``t_grid``."""
    if not sigma < -1:
        raise HypothesisError("sigma < -1", f"sigma = {sigma}")
    if not p >= 2:
        raise HypothesisError("2 <= p <= inf", f"p = {p}")
    times = np.asarray(t_grid, dtype=float)
    if np.any(times == 0):
        raise ValueError("decay quotients need t != 0")
    exponent = 2.0 * (0.5 - (0.0 if np.isinf(p) else 1.0 / p)) * beta(sigma)
    rows, skipped = _decay_rows(family.members(grid), sigma, p, times, exponent)
    rep = QuotientReport(f"decay[sigma={sigma:g},p={p:g}]", rows, skipped=skipped,
                         extra={"exponent": exponent, "sigma": sigma, "p": p})
    if refine:
        fine = QuotientReport(rep.kind, _decay_rows(family.members(grid.refined()), sigma, p, times, exponent)[0])
        rep.refinement_drift = _relative_change(fine.sup_quotient, rep.sup_quotient)
    return rep


def kernel_operator_norms(family: TestFamily, sigma: float, times: Sequence[float],
                          grid: GridSpec = DEFAULT_GRID) -> np.ndarray:
    """``max_f ||S(t) J^sigma f||_inf / ||f||_1`` for each t."""
    rep = decay_quotients(family, sigma, np.inf, times, grid, refine=False)
    ts, sup = rep.sup_by_time()
    return sup * np.abs(ts) ** rep.extra["exponent"]


@dataclass(frozen=True)
class DecayFit:
    t_window: tuple[float, float]
    slope: float
    intercept: float
    residual: float
    target_exponent: float
    n_points: int
    slack: float = 0.05

    def __post_init__(self):
        if self.t_window[0] < 1:
            raise ValueError("decay fits start at t >= 1")

    @property
    def accepted(self) -> bool:
        """Upper-bound semantics: decay at least as fast as the target, up to the slack."""
        return bool(self.slope <= self.target_exponent + self.slack)

    def as_dict(self) -> dict:
        return {"t_window": list(self.t_window), "slope": self.slope, "intercept": self.intercept,
                "residual": self.residual, "target_exponent": self.target_exponent,
                "n_points": self.n_points, "accepted": self.accepted}


def fit_decay_slope(data, t_window: tuple[float, float], target: float | None = None,
                    slack: float = 0.05) -> DecayFit:
    """Least squares on ``(log t, log y)`` restricted to ``t_window``.

    ``data`` is either ``(times, values)`` or a ``QuotientReport`` from ``decay_quotients`` (in which case
    the per-time sup quotient is turned back into the raw norm and the target defaults to the exponent).
    """
    if isinstance(data, QuotientReport):
        ts, sup = data.sup_by_time()
        exponent = data.extra["exponent"]
        ys = sup * np.abs(ts) ** exponent
        if target is None:
            target = exponent
    else:
        ts, ys = (np.asarray(a, dtype=float) for a in data)
    if target is None:
        raise ValueError("a target exponent is required for raw data")
    lo, hi = t_window
    sel = (ts >= lo * (1 - 1e-12)) & (ts <= hi * (1 + 1e-12))
    if np.count_nonzero(sel) < 8:
        raise ValueError(f"need at least 8 points in the fit window, got {np.count_nonzero(sel)}")
    if np.any(ys[sel] <= 0):
        raise ValueError("log-log fit needs positive values")
    lx, ly = np.log(ts[sel]), np.log(ys[sel])
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = float(np.sqrt(np.mean((A @ np.array([slope, intercept]) - ly) ** 2)))
    return DecayFit((float(lo), float(hi)), float(slope), float(intercept), res, float(target),
                    int(np.count_nonzero(sel)), slack)


# --------------------------------------------------------------------------- L1 -> Linf envelope

def kernel_envelope(t: float, eps: float, N: float, sigma: float, strict: bool = True) -> float:
    """``eps + (1-sigma)|t|^{-1/2} eps^{-1/2}
    + |t|^{-1/2} max(N^{3/2}, eps^{-1/2}) (N^sigma + (sqrt3 + eps)^sigma) - N^{sigma+1}/(sigma+1)``.

    ``strict=False`` admits the closed boundary ``eps = 1/8``, ``N = 2`` where the expression is still
    continuous.
    """
    if t == 0:
        raise ValueError("envelope needs t != 0")
    if not sigma < 0:
        raise ValueError(f"envelope needs sigma < 0, got {sigma}")
    if sigma == -1:
        raise ValueError("envelope is singular at sigma = -1")
    ok_eps = 0 < eps < 1 / 8 if strict else 0 < eps <= 1 / 8 * (1 + 1e-12)
    ok_N = N > 2 if strict else N >= 2 * (1 - 1e-12)
    if not ok_eps:
        raise ValueError(f"envelope needs 0 < eps < 1/8, got {eps}")
    if not ok_N:
        raise ValueError(f"envelope needs N > 2, got {N}")
    at = abs(t) ** -0.5
    return float(eps + (1 - sigma) * at * eps**-0.5
                 + at * max(N**1.5, eps**-0.5) * (N**sigma + (np.sqrt(3) + eps) ** sigma)
                 - N ** (sigma + 1) / (sigma + 1))


def envelope_parameters(t: float, sigma: float) -> tuple[float, float, float]:
    """``(eps, N, theta)`` with ``N = 2 t^theta``, ``theta = 1/(1-2 sigma)`` and ``N^{3/2} = eps^{-1/2}``."""
    theta = 1.0 / (1.0 - 2.0 * sigma)
    N = 2.0 * abs(t) ** theta
    return float(N**-3.0), float(N), theta


def calibrated_envelope(t: float, sigma: float) -> float:
    eps, N, _ = envelope_parameters(t, sigma)
    return kernel_envelope(t, eps, N, sigma, strict=abs(t) > 1)


@dataclass
class EnvelopeCalibration:
    sigma: float
    times: np.ndarray
    measured: np.ndarray
    envelope: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.measured / self.envelope

    @property
    def constant(self) -> float:
        return float(np.max(self.ratios))

    def dominated(self, C: float | None = None) -> bool:
        C = self.constant if C is None else C
        return bool(np.all(self.measured <= C * self.envelope * (1 + 1e-12)))

    def envelope_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.envelope) < 0))


def calibrate_envelope(family: TestFamily, sigma: float, times: Sequence[float],
                       grid: GridSpec = DEFAULT_GRID) -> EnvelopeCalibration:
    times = np.asarray(times, dtype=float)
    if np.any(times < 1):
        raise ValueError("envelope calibration uses t >= 1")
    measured = kernel_operator_norms(family, sigma, times, grid)
    env = np.array([calibrated_envelope(t, sigma) for t in times])
    return EnvelopeCalibration(sigma, times, measured, env)


# --------------------------------------------------------------------------- general groups

def _filon_weights(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``E1 = (e^z - 1)/z`` and ``E2 = (e^z (z-1) + 1)/z^2``, by series near 0."""
    z = np.asarray(z, dtype=complex)
    e1 = np.empty_like(z)
    e2 = np.empty_like(z)
    small = np.abs(z) < 0.5
    zs = z[small]
    s1 = np.zeros_like(zs)
    s2 = np.zeros_like(zs)
    term = np.ones_like(zs)  # z^n / n!
    for n in range(24):
        s1 += term / (n + 1)
        s2 += term / (n + 2)
        term = term * zs / (n + 1)
    e1[small], e2[small] = s1, s2
    zb = z[~small]
    ez = np.exp(zb)
    e1[~small] = (ez - 1) / zb
    e2[~small] = (ez * (zb - 1) + 1) / zb**2
    return e1, e2


def linear_group_trajectory(f: Field, times: np.ndarray, sym: SymbolSpec) -> Trajectory:
    P = sym.sample(f.grid)
    vals = sfft.ifft(np.exp(1j * times[:, None] * P[None, :]) * sfft.fft(f.values)[None, :], axis=-1)
    real = f.real and sym.conjugate_symmetric(f.grid)
    return Trajectory(f.grid, times, vals.real if real else vals, real=real)


def retarded_integral(forcing: Trajectory, sym: SymbolSpec) -> Trajectory:
    """``t -> int_0^t U(t - tau) F(tau) dtau`` on the (uniform, starting at 0) samples of ``F``.

    Each step integrates the oscillatory factor exactly against the piecewise-linear interpolant of
    ``F``, so large ``|P| dt`` is harmless.
    """
    times = forcing.times
    if times[0] != 0:
        raise ValueError("forcing must start at t = 0")
    if len(times) > 1:
        h = times[1] - times[0]
        if np.max(np.abs(np.diff(times) - h)) > 1e-9 * max(1.0, h):
            raise ValueError("retarded integral needs uniform samples")
    grid = forcing.grid
    P = sym.sample(grid)
    F = sfft.fft(forcing.values, axis=-1)
    out = np.zeros_like(F)
    if len(times) > 1:
        e1, e2 = _filon_weights(-1j * P * h)
        rot = np.exp(1j * P * h)
        a, b = h * (e1 - e2), h * e2
        for n in range(len(times) - 1):
            out[n + 1] = rot * (out[n] + a * F[n] + b * F[n + 1])
    vals = sfft.ifft(out, axis=-1)
    real = forcing.real and sym.conjugate_symmetric(grid)
    return Trajectory(grid, times, vals.real if real else vals, real=real)


def bump_in_time(times: np.ndarray, duration: float) -> np.ndarray:
    """``sin^2(pi tau / duration)`` on ``[0, duration]``, zero after."""
    out = np.sin(np.pi * times / duration) ** 2
    out[times > duration] = 0.0
    return out


def minkowski_pair(norms: np.ndarray, times: np.ndarray, s: float, q: float, gamma: float,
                   dec: UniformDecomposition, rule: str = "simpson") -> tuple[float, float]:
    """``(L^gamma_t l^q_k, l^q_k L^gamma_t)``; for ``gamma >= q`` the first never exceeds the second."""
    inner = mixed_norm_from_blocks(norms, times, s, q, gamma, "time-outside", dec, rule)
    outer = mixed_norm_from_blocks(norms, times, s, q, gamma, "blocks-outside", dec, rule)
    return inner, outer


# --------------------------------------------------------------------------- quotient kinds

KINDS = ("mod_decay", "compact_interval", "phiD_growth", "phiD_smooth", "product_bilinear", "product_power",
         "product_m", "strichartz_hom", "strichartz_inhom_smooth", "strichartz_inhom_L1", "strichartz_retarded",
         "duhamel_nonlinear")
STRICHARTZ_KINDS = KINDS[7:11]
PRODUCT_KINDS = ("product_bilinear", "product_power", "product_m")

# admissible index tuples, three per product estimate
DEFAULT_PRODUCT_TUPLES = {
    "product_bilinear": [
        {"p1": 4, "p2": 4, "q0": 1.5, "q1": 1.5, "q2": 1.5, "s": 0.5},
        {"p1": 3, "p2": 6, "q0": 1.2, "q1": 1.2, "q2": 1.2, "s": 0.4},
        {"p1": 2, "p2": 2, "q0": 1.5, "q1": 1.25, "q2": 1.25, "s": 0.2},
    ],
    "product_power": [
        {"m": 2, "q": 2, "mu": 1.5, "nu": 1.5, "s": 0.5},
        {"m": 3, "q": 1, "mu": 1.5, "nu": 1.2, "s": 0.6},
        {"m": 2, "q": 1.5, "mu": 1, "nu": 1, "s": 0.0},
    ],
    "product_m": [
        {"p": [4, 4], "q": [1, 1], "s": 0.0},
        {"p": [6, 6, 6], "q": [1, 1, 1.5], "s": 0.5},
        {"p": [3, 3, "inf"], "q": [1, 1, 1], "s": 1.0},
    ],
}


def _f(x) -> float:
    return float("inf") if x in ("inf", "Infinity") else float(x)


@dataclass(frozen=True)
class QuotientOptions:
    r_compact: float = float("inf")
    forcing_duration: float = 8.0
    symbol: SymbolSpec | None = None  # None: the BBM group
    mu: float | None = None  # required with a custom symbol
    delta: float | None = None
    product: dict | None = None  # one admissible tuple for the product kinds
    rule: str = "simpson"
    refine: bool = True


@dataclass
class _Ctx:
    pack: ExponentPack
    grid: GridSpec
    dec: UniformDecomposition
    window: Window
    opts: QuotientOptions
    opts_extra: dict = field(default_factory=dict)


def _mn(values, s, p, q, dec):
    return mod_norm_values(values, ModNormParams(s, p, q), dec)


def _pointwise(ctx: _Ctx, members, ends, numer: Callable, denom: Callable):
    """Pointwise-in-time kinds on the log sweep; ``numer(f, times)`` is an array over times."""
    times = ctx.window.sweep(extend=len(ends) > 1)
    out = {e: [] for e in ends}
    skipped = []
    for i, f in enumerate(members):
        den = denom(f, times)
        if np.all(den == 0):
            skipped.append(i)
            continue
        num = numer(f, times)
        for e in ends:
            out[e].extend((i, float(t), float(n), float(d)) for t, n, d in zip(times, num, den)
                          if t <= e * (1 + 1e-12) and d > 0)
    return out, skipped


def _eval_mod_decay(ctx: _Ctx, members, ends):
    pk, dec = ctx.pack, ctx.dec
    if not (2 <= pk.p < np.inf):
        raise HypothesisError("2 <= p < inf", f"p = {pk.p}")
    return _pointwise(
        ctx, members, ends,
        lambda f, ts: _mn(_evolved(f.values, ctx.grid, ts), pk.s, pk.p, pk.q, dec),
        lambda f, ts: (1 + np.abs(ts)) ** pk.decay_exponent
        * _mn(f.values, pk.s - pk.sigma * pk.theta, pk.p_conj, pk.q, dec))


def _eval_phiD_growth(ctx: _Ctx, members, ends):
    pk, dec = ctx.pack, ctx.dec
    if not (2 <= pk.p < np.inf):
        raise HypothesisError("2 <= p < inf", f"p = {pk.p}")
    ph = phi(ctx.grid.xi)
    growth = 2 * (0.5 - 1 / pk.p)
    return _pointwise(
        ctx, members, ends,
        lambda f, ts: _mn(_evolved(f.values, ctx.grid, ts, ph), pk.s, pk.p, pk.q, dec),
        lambda f, ts: (1 + ts**2) ** (growth / 2) * _mn(f.values, pk.s, pk.p, pk.q, dec))


def _eval_phiD_smooth(ctx: _Ctx, members, ends):
    pk, dec = ctx.pack, ctx.dec
    if not pk.p > 1:
        raise HypothesisError("1 < p <= inf", f"p = {pk.p}")
    rows, skipped = [], []
    for i, f in enumerate(members):
        den = float(_mn(f.values, pk.s - 1, pk.p, pk.q, dec))
        if den == 0:
            skipped.append(i)
            continue
        num = float(_mn(apply_multiplier(f, phi(ctx.grid.xi).astype(complex)).values, pk.s, pk.p, pk.q, dec))
        rows.append((i, None, num, den))
    return {e: list(rows) for e in ends}, skipped


def _time_norm(values: np.ndarray, times: np.ndarray, r: float, rule: str) -> float:
    if np.isinf(r):
        return float(np.max(values))
    w = quadrature_weights(times, rule)
    return float(np.dot(w, values**r) ** (1 / r))


def _require_window(times: np.ndarray) -> None:
    if times.size < 9:
        raise WindowError(f"time window has {times.size} samples; at least 9 are needed for the quadrature")


def _integrated(ctx: _Ctx, members, ends, per_member: Callable):
    """Time-integrated kinds on ``[0, T]``; ``per_member(f, times, end_masks)`` -> list of (num, den) or None."""
    times = ctx.window.integrated(extend=len(ends) > 1)
    masks = {e: times <= e * (1 + 1e-12) for e in ends}
    for m in masks.values():
        _require_window(times[m])
    out = {e: [] for e in ends}
    skipped = []
    for i, f in enumerate(members):
        res = per_member(f, times, masks)
        if res is None:
            skipped.append(i)
            continue
        for e in ends:
            num, den = res[e]
            out[e].append((i, float(e), float(num), float(den)))
    return out, skipped


def _eval_compact_interval(ctx: _Ctx, members, ends):
    pk, dec, r = ctx.pack, ctx.dec, ctx.opts.r_compact
    if not (2 <= pk.p < np.inf):
        raise HypothesisError("2 <= p < inf", f"p = {pk.p}")
    if not r >= 1:
        raise HypothesisError("1 <= r <= inf", f"r = {r}")

    def per(f, times, masks):
        den = float(_mn(f.values, pk.s - pk.theta * pk.sigma, pk.p_conj, pk.q, dec))
        if den == 0:
            return None
        norms = _mn(_evolved(f.values, ctx.grid, times), pk.s, pk.p, pk.q, dec)
        return {e: (_time_norm(norms[m], times[m], r, ctx.opts.rule), den) for e, m in masks.items()}

    return _integrated(ctx, members, ends, per)


def _eval_duhamel_nonlinear(ctx: _Ctx, members, ends):
    from .solver import _duhamel_values
    pk, dec = ctx.pack, ctx.dec
    lam, r = pk.lam, pk.r

    def per(f, times, masks):
        u = _evolved(f.values.real, ctx.grid, times).real
        un = _mn(u, pk.s, pk.p, pk.q, dec)
        w = _duhamel_values(u, times, lam, ctx.grid)
        wn = _mn(w, pk.s, pk.p, pk.q, dec)
        res = {}
        for e, m in masks.items():
            den = _time_norm(un[m], times[m], r, ctx.opts.rule) ** (lam + 1)
            if den == 0:
                return None
            res[e] = (_time_norm(wn[m], times[m], r, ctx.opts.rule), den)
        return res

    return _integrated(ctx, members, ends, per)


def _strichartz_constants(ctx: _Ctx) -> tuple[SymbolSpec, float, float, float]:
    """``(symbol, mu, delta, gamma)``; for the BBM group mu and delta come from the pack."""
    o = ctx.opts
    if o.symbol is None or o.symbol.kind == "bbm-phi":
        ctx.pack.require_strichartz()
        mu = ctx.pack.mu if o.mu is None else o.mu
        delta = ctx.pack.delta if o.delta is None else o.delta
        if abs(mu - ctx.pack.mu) > 1e-12 or abs(delta - ctx.pack.delta) > 1e-12:
            raise HypothesisError("(mu, delta) consistent with the BBM decay estimate",
                                  f"expected ({ctx.pack.mu}, {ctx.pack.delta}), got ({mu}, {delta})")
        sym = SymbolSpec.bbm()
    else:
        if o.mu is None or o.delta is None:
            raise HypothesisError("custom symbols need user-supplied (mu, delta)")
        mu, delta, sym = float(o.mu), float(o.delta), o.symbol
        if not 0 < mu < 1:
            raise HypothesisError("0 < mu < 1", f"mu = {mu}")
        if not (np.isfinite(delta) and delta >= 0):
            raise HypothesisError("delta >= 0", f"delta = {delta}")
    return sym, mu, delta, 2.0 / mu


def _eval_strichartz(kind: str):
    def run(ctx: _Ctx, members, ends):
        sym, mu, delta, gamma = _strichartz_constants(ctx)
        pk, dec, rule = ctx.pack, ctx.dec, ctx.opts.rule
        s, q, p = pk.s, pk.q, pk.p
        gconj = gamma / (gamma - 1)
        pconj = conjugate_exponent(p)
        if kind in ("strichartz_hom", "strichartz_inhom_L1") and not gamma >= q:
            raise HypothesisError("gamma >= q", f"gamma = {gamma}, q = {q}")
        if kind == "strichartz_inhom_smooth" and not gconj <= q:
            raise HypothesisError("gamma' <= q", f"gamma' = {gconj}, q = {q}")
        if kind == "strichartz_retarded" and not gconj <= q <= gamma:
            raise HypothesisError("q in [gamma', gamma]", f"q = {q}, gamma = {gamma}")
        minkowski: list[bool] = []

        def mixed(norms, times, m):
            inner, outer = minkowski_pair(norms[m], times[m], s, q, gamma, dec, rule)
            if gamma >= q:
                minkowski.append(bool(inner <= outer * (1 + 1e-10)))
            return inner

        def per(f, times, masks):
            if kind == "strichartz_hom":
                den = float(_mn(f.values, s + delta / 2, 2, q, dec))
                if den == 0:
                    return None
                traj = linear_group_trajectory(f, times, sym)
                norms = block_norms(traj.values, dec, p)
                return {e: (mixed(norms, times, m), den) for e, m in masks.items()}
            chi = bump_in_time(times, ctx.opts.forcing_duration)
            forcing = Trajectory(f.grid, times, chi[:, None] * f.values[None, :], real=False)
            if kind == "strichartz_inhom_smooth":
                base = float(_mn(f.values, s + delta / 2, pconj, q, dec))
            elif kind == "strichartz_inhom_L1":
                base = float(_mn(f.values, s + delta / 2, 2, q, dec))
            else:
                base = float(_mn(f.values, s + delta, pconj, q, dec))
            if base == 0:
                return None
            duh = retarded_integral(forcing, sym)
            res = {}
            if kind == "strichartz_inhom_smooth":
                sup = _mn(duh.values, s, 2, q, dec)
                for e, m in masks.items():
                    res[e] = (float(np.max(sup[m])), base * _time_norm(chi[m], times[m], gconj, rule))
                return res
            norms = block_norms(duh.values, dec, p)
            texp = 1.0 if kind == "strichartz_inhom_L1" else gconj
            for e, m in masks.items():
                res[e] = (mixed(norms, times, m), base * _time_norm(chi[m], times[m], texp, rule))
            return res

        out, skipped = _integrated(ctx, members, ends, per)
        ctx.opts_extra = {"mu": mu, "delta": delta, "gamma": gamma, "symbol": sym.name,
                          "minkowski_checked": len(minkowski), "minkowski_holds": all(minkowski)}
        return out, skipped

    return run


def _product_members(kind: str, members: list[Field], m: int) -> list[list[Field]]:
    n = len(members)
    if kind == "product_power":
        return [[f] * m for f in members]
    return [[members[(i + j) % n] for j in range(m)] for i in range(n)]


def _check_product(kind: str, t: dict) -> dict:
    """Validate one index tuple and return the (numerator, factor) exponent layout."""
    tol = 1e-12
    if kind == "product_bilinear":
        p1, p2, q0, q1, q2, s = (_f(t[k]) for k in ("p1", "p2", "q0", "q1", "q2", "s"))
        p = 1 / (1 / p1 + 1 / p2)
        if not all(1 < x < np.inf for x in (q0, q1, q2)):
            raise HypothesisError("1 < q0, q1, q2 < inf", str(t))
        if not (p >= 1 and p1 >= 1 and p2 >= 1):
            raise HypothesisError("1 <= p, p1, p2 <= inf", str(t))
        if not (1 / q0 - 1 / q1 - 1 / q2 + 1 <= s + tol and s < 1 / q0):
            raise HypothesisError("1/q0 - 1/q1 - 1/q2 + 1 <= s < 1/q0", str(t))
        return {"s": s, "num": (p, q0), "factors": [(p1, q1), (p2, q2)], "m": 2}
    if kind == "product_power":
        m, q, mu, nu, s = int(t["m"]), _f(t["q"]), _f(t["mu"]), _f(t["nu"]), _f(t["s"])
        if m < 1 or m != t["m"]:
            raise HypothesisError("m positive integer", str(t))
        if not (1 <= q <= np.inf and 1 <= nu <= mu < np.inf):
            raise HypothesisError("1 <= q <= inf, 1 <= nu <= mu < inf", str(t))
        if not (0 <= s < 1 / nu):
            raise HypothesisError("0 <= s < 1/nu", str(t))
        if not 1 / nu - (m - 1) * s <= m / mu - m + 1 + tol:
            raise HypothesisError("1/nu - (m-1) s <= m/mu - m + 1", str(t))
        return {"s": s, "num": (q, mu), "factors": [(m * q, nu)] * m, "m": m}
    ps = [_f(x) for x in t["p"]]
    qs = [_f(x) for x in t["q"]]
    s = _f(t["s"])
    m = len(ps)
    if m < 1 or len(qs) != m:
        raise HypothesisError("m factors with matching p_i, q_i", str(t))
    if not (s >= 0 and all(x > 0 for x in ps) and all(x >= 1 for x in qs)):
        raise HypothesisError("s >= 0, p_i > 0, q_i >= 1", str(t))
    inv_p0 = sum(1 / x for x in ps)
    inv_q0 = sum(1 / x for x in qs) - (m - 1)
    if not inv_q0 > 0 or inv_q0 > 1 + tol:
        raise HypothesisError("sum 1/q_i = m - 1 + 1/q0 with q0 >= 1", str(t))
    p0 = 1 / inv_p0
    if p0 < 1:
        raise HypothesisError("p0 >= 1 (L^p quasi-norms are not supported)", str(t))
    return {"s": s, "num": (p0, 1 / inv_q0), "factors": list(zip(ps, qs)), "m": m}


def _eval_product(kind: str):
    def run(ctx: _Ctx, members, ends):
        if ctx.opts.product is None:
            raise ValueError(f"{kind} needs an index tuple")
        lay = _check_product(kind, ctx.opts.product)
        s, dec = lay["s"], ctx.dec
        rows, skipped = [], []
        for i, group in enumerate(_product_members(kind, members, lay["m"])):
            den = 1.0
            for f, (pi, qi) in zip(group, lay["factors"]):
                den *= float(_mn(f.values, s, pi, qi, dec))
            if den == 0:
                skipped.append(i)
                continue
            prod = np.prod(np.stack([f.values for f in group]), axis=0)
            num = float(_mn(prod, s, lay["num"][0], lay["num"][1], dec))
            rows.append((i, None, num, den))
        ctx.opts_extra = {"tuple": ctx.opts.product, "numerator_indices": list(lay["num"])}
        return {e: list(rows) for e in ends}, skipped

    return run


_EVALUATORS = {
    "mod_decay": (_eval_mod_decay, "sweep"),
    "compact_interval": (_eval_compact_interval, "integrated"),
    "phiD_growth": (_eval_phiD_growth, "sweep"),
    "phiD_smooth": (_eval_phiD_smooth, None),
    "product_bilinear": (_eval_product("product_bilinear"), None),
    "product_power": (_eval_product("product_power"), None),
    "product_m": (_eval_product("product_m"), None),
    "strichartz_hom": (_eval_strichartz("strichartz_hom"), "integrated"),
    "strichartz_inhom_smooth": (_eval_strichartz("strichartz_inhom_smooth"), "integrated"),
    "strichartz_inhom_L1": (_eval_strichartz("strichartz_inhom_L1"), "integrated"),
    "strichartz_retarded": (_eval_strichartz("strichartz_retarded"), "integrated"),
    "duhamel_nonlinear": (_eval_duhamel_nonlinear, "integrated"),
}


def estimate_quotient(kind: str, pack: ExponentPack, family: TestFamily, window: Window | None = None,
                      dec: UniformDecomposition | None = None,
                      options: QuotientOptions | None = None) -> QuotientReport:
    """Quotient table of one estimate, with refinement (N -> 2N) and window (T -> 2T) drifts."""
    if kind not in _EVALUATORS:
        raise ValueError(f"unknown estimate kind {kind!r}; known: {', '.join(KINDS)}")
    window = window or Window()
    options = options or QuotientOptions()
    dec = dec or build_decomposition(DEFAULT_GRID)
    fn, mode = _EVALUATORS[kind]
    if mode == "sweep":
        end, end2 = window.t_max, 2 * window.t_max
    elif mode == "integrated":
        end, end2 = window.T, 2 * window.T
    else:
        end, end2 = None, None
    ends = (end,) if mode is None else (end, end2)

    ctx = _Ctx(pack, dec.grid, dec, window, options)
    out, skipped = fn(ctx, family.members(dec.grid), ends)
    extra = dict(ctx.opts_extra)
    rep = QuotientReport(kind, out[end], skipped=skipped, extra=extra)
    if mode is not None:
        rep.window_drift = _relative_change(QuotientReport(kind, out[end2]).sup_quotient, rep.sup_quotient)
    if options.refine:
        fine_dec = build_decomposition(dec.grid.refined(), dec.profile, dec.k_max)
        fctx = _Ctx(pack, fine_dec.grid, fine_dec, window, options)
        fout, _ = fn(fctx, family.members(fine_dec.grid), (end,))
        rep.refinement_drift = _relative_change(QuotientReport(kind, fout[end]).sup_quotient, rep.sup_quotient)
        for k, v in fctx.opts_extra.items():
            if k == "minkowski_holds":
                rep.extra[k] = bool(rep.extra.get(k, True) and v)
            elif k == "minkowski_checked":
                rep.extra[k] = rep.extra.get(k, 0) + v
    return rep


# --------------------------------------------------------------------------- scalar convolution bound

def _conv_integral(t: float, rho: float, lam: int) -> float:
    if t == 0:
        return 0.0
    a = rho * (lam + 1)

    def f(tau):
        return (1 + abs(t - tau)) ** -rho * (1 + tau) ** -a

    pts = [x for x in (1.0, t / 2, t - 1.0) if 0 < x < t]
    val, _ = integrate.quad(f, 0.0, t, points=pts or None, epsabs=1e-14, epsrel=1e-12, limit=400)
    return float(val)


def weighted_convolution_bound(rho: float, lam: int, t_grid: Sequence[float],
                               refine: bool = True) -> QuotientReport:
    """``int_0^t (1+|t-tau|)^{-rho} (1+tau)^{-rho(lam+1)} dtau / (1+t)^{-rho}`` over ``t_grid``.

    Refinement inserts the midpoint of every pair of consecutive t samples.
    """
    if not rho * (lam + 1) > 1:
        raise HypothesisError("rho (lambda + 1) > 1", f"rho = {rho}, lambda = {lam}",
                              message="hypothesis λ≥3 regime violated")
    ts = np.asarray(t_grid, dtype=float)
    rows = [(0, float(t), _conv_integral(t, rho, lam), float((1 + t) ** -rho)) for t in ts]
    rep = QuotientReport("convolution_bound", rows, extra={"rho": rho, "lambda": lam})
    if refine and ts.size > 1:
        mids = 0.5 * (ts[1:] + ts[:-1])
        extra_rows = [(0, float(t), _conv_integral(t, rho, lam), float((1 + t) ** -rho)) for t in mids]
        fine = QuotientReport(rep.kind, rows + extra_rows)
        rep.refinement_drift = _relative_change(fine.sup_quotient, rep.sup_quotient)
    return rep
