"""Frequency-uniform decomposition, block operators and modulation-space norms (n = 1)."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .grid import Field, GridSpec, Trajectory, lp_values, quadrature_weights

# blocks whose spectral amplitude is below this fraction of the field's peak are skipped
BLOCK_SKIP = 1e-13
TAIL_TOL = 1e-8


class TailWarning(UserWarning):
    """Input carries spectral mass outside the resolved band of the decomposition."""


@dataclass(frozen=True)
class BumpProfile:
    name: str
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, xi):
        return self.func(np.abs(np.asarray(xi, dtype=float)))


def _smooth_bump(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[a <= 0.5] = 1.0
    mid = (a > 0.5) & (a < 1.0)
    y = 2.0 * a[mid] - 1.0
    out[mid] = np.exp(1.0 - 1.0 / (1.0 - y * y))
    return out


def _raised_cosine(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[a <= 0.5] = 1.0
    mid = (a > 0.5) & (a < 1.0)
    out[mid] = 0.5 * (1.0 + np.cos(np.pi * (2.0 * a[mid] - 1.0)))
    return out


SMOOTH_BUMP = BumpProfile("smooth-bump", _smooth_bump)
RAISED_COSINE = BumpProfile("raised-cosine", _raised_cosine)
PROFILES = {p.name: p for p in (SMOOTH_BUMP, RAISED_COSINE)}
DEFAULT_K_MAX = 48


@dataclass(frozen=True)
class ModNormParams:
    s: float
    p: float
    q: float

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        if np.isinf(self.q):
            raise NotImplementedError("q = inf (sup over blocks) is not implemented")
        if not (self.q >= 1):
            raise ValueError(f"q must lie in [1, inf), got {self.q}")


@dataclass(frozen=True, eq=False)
class UniformDecomposition:
    grid: GridSpec
    k_max: int
    profile: BumpProfile
    ks: np.ndarray
    sigma: np.ndarray  # (2 k_max + 1, N), FFT order
    lower_bound: float  # realized min of sigma_k on |xi - k| <= 1/2

    @property
    def n_blocks(self) -> int:
        return self.ks.size

    @cached_property
    def weights_base(self) -> np.ndarray:
        return 1.0 + np.abs(self.ks)

    @cached_property
    def support(self) -> list[np.ndarray]:
        return [np.flatnonzero(row) for row in self.sigma]

    @property
    def band(self) -> float:
        """Frequencies with ``|xi| <= band`` are fully resolved by the blocks."""
        return self.k_max - 2.0

    def index(self, k: int) -> int:
        if abs(k) > self.k_max:
            raise IndexError(f"block {k} outside |k| <= {self.k_max}")
        return int(k + self.k_max)

    def partition_residual(self) -> float:
        inside = np.abs(self.grid.xi) <= self.band
        return float(np.max(np.abs(self.sigma.sum(axis=0)[inside] - 1.0)))


def build_decomposition(grid: GridSpec, profile: BumpProfile = SMOOTH_BUMP,
                        k_max: int = DEFAULT_K_MAX) -> UniformDecomposition:
    k_max = int(k_max)
    if k_max < 1:
        raise ValueError("k_max must be a positive integer")
    if k_max > grid.nyquist - 2:
        raise ValueError(
            f"k_max = {k_max} too large for grid: needs k_max <= nyquist - 2 = {grid.nyquist - 2:g}")
    xi = grid.xi
    base = np.floor(xi)
    denom = np.zeros_like(xi)
    for d in (-1.0, 0.0, 1.0, 2.0):
        denom += profile(xi - (base + d))
    ks = np.arange(-k_max, k_max + 1)
    sigma = profile(xi[None, :] - ks[:, None]) / denom[None, :]
    near = np.abs(xi[None, :] - ks[:, None]) <= 0.5
    lower = float(np.min(sigma[near])) if np.any(near) else float("nan")
    return UniformDecomposition(grid, k_max, profile, ks, sigma, lower)


def spectral_tail(values: np.ndarray, dec: UniformDecomposition) -> float:
    """Relative L^2 spectral mass beyond ``|xi| > k_max - 2``."""
    spec = np.abs(sfft.fft(values, axis=-1)) ** 2
    total = spec.sum(axis=-1)
    outside = spec[..., np.abs(dec.grid.xi) > dec.band].sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, outside / np.where(total > 0, total, 1.0), 0.0)
    return float(np.max(frac))


def _warn_tail(values: np.ndarray, dec: UniformDecomposition) -> None:
    tail = spectral_tail(values, dec)
    if tail > TAIL_TOL:
        warnings.warn(f"relative spectral mass {tail:.2e} beyond |xi| > {dec.band:g}", TailWarning,
                      stacklevel=3)


def block(u: Field, k: int, dec: UniformDecomposition) -> Field:
    """``F^{-1} sigma_k F u``."""
    row = dec.sigma[dec.index(k)]
    return Field(u.grid, sfft.ifft(row * sfft.fft(u.values)))


def block_values(values: np.ndarray, dec: UniformDecomposition) -> np.ndarray:
    """All blocks of one sample array, shape ``(n_blocks, N)``."""
    return sfft.ifft(dec.sigma * sfft.fft(values)[None, :], axis=-1)


def block_norms(values: np.ndarray, dec: UniformDecomposition, p: float | tuple[float, ...]) -> np.ndarray:
    """L^p norms of every block of every state.

    ``values`` has shape ``(..., N)``; the result has shape ``(..., n_blocks)`` (or
    ``(len(p), ..., n_blocks)`` when several exponents are requested at once, sharing the FFTs).
    """
    ps = (p,) if np.isscalar(p) else tuple(p)
    values = np.asarray(values, dtype=complex)
    lead = values.shape[:-1]
    flat = values.reshape(-1, values.shape[-1])
    out = np.zeros((len(ps), flat.shape[0], dec.n_blocks))
    spectra = sfft.fft(flat, axis=-1)
    dx = dec.grid.dx
    for i, spec in enumerate(spectra):
        peak = np.max(np.abs(spec))
        if peak == 0:
            continue
        amp = np.abs(spec)
        active = [b for b, idx in enumerate(dec.support) if idx.size and np.max(amp[idx]) > BLOCK_SKIP * peak]
        if not active:
            continue
        blocks = sfft.ifft(dec.sigma[active] * spec[None, :], axis=-1)
        for j, pp in enumerate(ps):
            out[j, i, active] = lp_values(blocks, pp, dx)
    out = out.reshape((len(ps),) + lead + (dec.n_blocks,))
    return out[0] if np.isscalar(p) else out


def combine_blocks(norms: np.ndarray, s: float, q: float, dec: UniformDecomposition) -> np.ndarray:
    """Weighted l^q over the last axis of block norms."""
    w = dec.weights_base ** s
    return np.sum((w * norms) ** q, axis=-1) ** (1.0 / q)


def mod_norm(u: Field, params: ModNormParams, dec: UniformDecomposition) -> float:
    _warn_tail(u.values, dec)
    norms = block_norms(u.values, dec, params.p)
    return float(combine_blocks(norms, params.s, params.q, dec))


def mod_norm_values(values: np.ndarray, params: ModNormParams, dec: UniformDecomposition) -> np.ndarray:
    """``mod_norm`` over the leading axes of a raw sample array."""
    return combine_blocks(block_norms(values, dec, params.p), params.s, params.q, dec)


def nu1(p: float, q: float) -> float:
    """Loss index of the embedding of Bessel potential spaces into modulation spaces."""
    if p < 1 or q < 1:
        raise ValueError("nu1 needs p, q in [1, inf]")
    a = 0.0 if np.isinf(p) else 1.0 / p
    b = 0.0 if np.isinf(q) else 1.0 / q
    vals = []
    if b <= a and b <= 1 - a:
        vals.append(0.0)
    if a >= 0.5 and b >= 1 - a:
        vals.append(a + b - 1.0)
    if a <= 0.5 and b >= a:
        vals.append(b - a)
    if max(vals) - min(vals) > 1e-14:
        raise AssertionError(f"nu1 region formulas disagree at (1/p, 1/q) = ({a}, {b}): {vals}")
    return float(vals[0])


NESTINGS = ("blocks-outside", "time-outside")


def _time_lgamma(values: np.ndarray, times: np.ndarray, gamma: float, rule: str) -> np.ndarray:
    """L^gamma over axis 0 of nonnegative samples."""
    if np.isinf(gamma):
        return np.max(values, axis=0)
    if values.shape[0] == 1:
        return values[0]
    w = quadrature_weights(times, rule)
    return np.tensordot(w, values**gamma, axes=(0, 0)) ** (1.0 / gamma)


def mixed_norm_from_blocks(norms: np.ndarray, times: np.ndarray, s: float, q: float, gamma: float,
                           nesting: str, dec: UniformDecomposition, rule: str = "simpson") -> float:
    """Mixed space-time norm from precomputed block norms of shape ``(n_times, n_blocks)``."""
    if nesting == "blocks-outside":
        per_block = _time_lgamma(norms, times, gamma, rule)
        return float(combine_blocks(per_block, s, q, dec))
    if nesting == "time-outside":
        per_time = combine_blocks(norms, s, q, dec)
        return float(_time_lgamma(per_time, times, gamma, rule))
    raise ValueError(f"nesting must be one of {NESTINGS}")


def mixed_time_norm(traj: Trajectory, s: float, q: float, gamma: float, p: float, nesting: str,
                    dec: UniformDecomposition, rule: str = "simpson") -> float:
    """``l^{s,q}(L^gamma L^p)`` (blocks outside) or ``L^gamma(M^s_{p,q})`` (time outside) on the sampled window.

    A single-state trajectory is treated as a window of length one.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if not (gamma >= 1):
        raise ValueError("gamma must be >= 1")
    norms = block_norms(traj.values, dec, p)
    return mixed_norm_from_blocks(norms, traj.times, s, q, gamma, nesting, dec, rule)


def weighted_sup_norm(traj: Trajectory, rho: float, params: ModNormParams, dec: UniformDecomposition) -> float:
    """``max_t (1+|t|)^rho ||u(t)||_{M^s_{p,q}}``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    norms = mod_norm_values(traj.values, params, dec)
    return float(np.max((1.0 + np.abs(traj.times)) ** rho * norms))
