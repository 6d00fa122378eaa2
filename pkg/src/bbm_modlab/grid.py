"""Periodic discretization of the real line and the Fourier conventions used everywhere.

Spatial nodes are ``x_m = -L + m dx`` with ``dx = 2L/N``.  Frequencies are
``xi_j = pi j / L`` and spectra are stored in FFT order (``numpy.fft.fftfreq``),
so the Nyquist node ``j = -N/2`` sits at index ``N/2``.

The transform is the Riemann sum of the continuous one::

    f_hat(xi_j) = dx * sum_m f(x_m) exp(-i xi_j x_m)
    f(x_m)      = 1/(2L) * sum_j f_hat(xi_j) exp(i xi_j x_m)

so Fourier multipliers written for the line apply verbatim.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np
import scipy.fft as sfft

REAL_TOL = 1e-10
TRUNCATION_TOL = 1e-8

Symbol = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    half_width: float
    samples: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise GridError(f"half_width must be positive, got {self.half_width}")
        n = int(self.samples)
        if n != self.samples or n < 4 or n & (n - 1):
            raise GridError(f"samples must be a power of two >= 4, got {self.samples}")

    @property
    def L(self) -> float:
        return self.half_width

    @property
    def N(self) -> int:
        return self.samples

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.samples

    @property
    def dxi(self) -> float:
        return np.pi / self.half_width

    @property
    def nyquist(self) -> float:
        return np.pi * self.samples / (2.0 * self.half_width)

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.samples)

    @cached_property
    def xi(self) -> np.ndarray:
        """Frequencies in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.samples, d=self.dx)

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i xi_j L) = (-1)^j
        return np.where(np.arange(self.samples) % 2 == 0, 1.0, -1.0)

    def refined(self) -> "GridSpec":
        """Same window, twice the samples."""
        return GridSpec(self.half_width, 2 * self.samples)


DEFAULT_GRID = GridSpec(64 * np.pi, 2**13)


@dataclass
class Field:
    grid: GridSpec
    values: np.ndarray
    real: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.samples,):
            raise GridError(f"field has {v.shape} samples, grid expects ({self.grid.samples},)")
        if self.real:
            scale = max(np.max(np.abs(v.real), initial=0.0), 1.0)
            if np.max(np.abs(v.imag), initial=0.0) > REAL_TOL * scale:
                raise GridError("field flagged real has non-negligible imaginary part")
            v = v.real.astype(complex)
        self.values = v

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable[[np.ndarray], np.ndarray], real: bool = False) -> "Field":
        return cls(grid, fn(grid.x), real=real)

    @classmethod
    def zeros(cls, grid: GridSpec, real: bool = True) -> "Field":
        return cls(grid, np.zeros(grid.samples), real=real)

    def with_values(self, values: np.ndarray, real: bool | None = None) -> "Field":
        return Field(self.grid, values, self.real if real is None else real)

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values, self.real and other.real)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values, self.real and other.real)

    def __mul__(self, scalar) -> "Field":
        return Field(self.grid, self.values * scalar, self.real and np.isrealobj(scalar))

    __rmul__ = __mul__


def _check_same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        raise GridError("fields live on different grids")


@dataclass
class Trajectory:
    """Time-indexed family of fields sharing one grid; ``values[n]`` is the state at ``times[n]``."""

    grid: GridSpec
    times: np.ndarray
    values: np.ndarray
    real: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.times.ndim != 1 or self.times.size == 0:
            raise GridError("trajectory needs at least one time")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise GridError("trajectory times must be strictly increasing")
        if self.values.shape != (self.times.size, self.grid.samples):
            raise GridError(
                f"trajectory values have shape {self.values.shape}, "
                f"expected {(self.times.size, self.grid.samples)}"
            )

    @classmethod
    def from_fields(cls, times: Sequence[float], states: Sequence[Field]) -> "Trajectory":
        grids = {s.grid for s in states}
        if len(grids) != 1:
            raise GridError("all trajectory states must share one grid")
        return cls(states[0].grid, np.asarray(times), np.stack([s.values for s in states]),
                   real=all(s.real for s in states))

    def __len__(self) -> int:
        return self.times.size

    def state(self, n: int) -> Field:
        return Field(self.grid, self.values[n], real=self.real)

    @property
    def states(self) -> list[Field]:
        return [self.state(n) for n in range(len(self))]

    def prefix(self, t_end: float) -> "Trajectory":
        """States with ``t <= t_end``."""
        n = int(np.searchsorted(self.times, t_end * (1 + 1e-12) + 1e-300, side="right"))
        return Trajectory(self.grid, self.times[:n], self.values[:n], self.real)


# --------------------------------------------------------------------------- transforms

def forward_transform(f: Field) -> np.ndarray:
    """Spectrum of ``f`` at ``grid.xi`` (FFT order)."""
    g = f.grid
    return g.dx * g._phase * sfft.fft(f.values)


def inverse_transform(spectrum: np.ndarray, grid: GridSpec, real: bool = False) -> Field:
    spectrum = np.asarray(spectrum)
    if spectrum.shape != (grid.samples,):
        raise GridError(f"spectrum has shape {spectrum.shape}, grid expects ({grid.samples},)")
    values = sfft.ifft(spectrum * grid._phase) / grid.dx
    return Field(grid, values, real=real)


def sample_symbol(m: Symbol, grid: GridSpec) -> np.ndarray:
    """Evaluate a symbol at the grid frequencies and reject non-finite values."""
    vals = m(grid.xi) if callable(m) else m
    vals = np.broadcast_to(np.asarray(vals), (grid.samples,))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise GridError(f"symbol is not finite at xi = {float(grid.xi[j])!r} (index {j})")
    return vals


def apply_multiplier(f: Field, m: Symbol, real: bool | None = None) -> Field:
    """``F^{-1}[m F f]``.  The sign/scale factors of the transform cancel, so this is a bare FFT pair."""
    vals = sample_symbol(m, f.grid)
    out = sfft.ifft(vals * sfft.fft(f.values))
    if real is None:
        real = False
    if real:
        out = out.real
    return Field(f.grid, out, real=real)


def multiply_spectra(values: np.ndarray, symbol_values: np.ndarray) -> np.ndarray:
    """Batched multiplier on raw sample arrays (last axis is space)."""
    return sfft.ifft(symbol_values * sfft.fft(values, axis=-1), axis=-1)


# --------------------------------------------------------------------------- norms

def lp_values(values: np.ndarray, p: float, dx: float, axis: int = -1) -> np.ndarray:
    """Rectangle-rule L^p norm along ``axis`` of raw samples."""
    if p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    a = np.abs(values)
    if np.isinf(p):
        return np.max(a, axis=axis)
    if p == 2:
        return np.sqrt(np.sum(a * a, axis=axis) * dx)
    if p == 1:
        return np.sum(a, axis=axis) * dx
    return (np.sum(a**p, axis=axis) * dx) ** (1.0 / p)


def lp_norm(f: Field, p: float) -> float:
    return float(lp_values(f.values, p, f.grid.dx))


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def truncation_fraction(f: Field) -> float:
    """Fraction of the L^2 mass lying outside ``|x| <= L/2``."""
    w = np.abs(f.values) ** 2
    total = w.sum()
    if total == 0:
        return 0.0
    outside = np.abs(f.grid.x) > f.grid.half_width / 2
    return float(w[outside].sum() / total)


def passes_truncation(f: Field, tol: float = TRUNCATION_TOL) -> bool:
    return truncation_fraction(f) < tol


# --------------------------------------------------------------------------- time quadrature

RULES = ("trapezoid", "simpson", "gauss-on-subintervals")


def _check_times(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("time quadrature needs at least 2 samples")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def _is_uniform(times: np.ndarray) -> bool:
    h = np.diff(times)
    return bool(np.allclose(h, h[0], rtol=1e-10, atol=0))


def quadrature_weights(times: np.ndarray, rule: str = "simpson") -> np.ndarray:
    """Weights ``w`` with ``sum(w * g(times))`` approximating the integral over ``[times[0], times[-1]]``.

    Simpson on a uniform grid with an odd number of intervals closes with a 3/8 panel, so the
    rule stays exact for cubics; on non-uniform grids the three-point interpolatory rule is used
    per pair of intervals.
    """
    times = _check_times(times)
    n = times.size
    h = np.diff(times)
    w = np.zeros(n)
    if rule == "trapezoid" or n == 2:
        w[:-1] += h / 2
        w[1:] += h / 2
        return w
    if rule != "simpson":
        raise ValueError(f"unknown sampled rule {rule!r}; choose 'trapezoid' or 'simpson'")
    intervals = n - 1
    if _is_uniform(times):
        hh = h[0]
        if intervals % 2 == 0:
            w[0:-1:2] += hh / 3
            w[1::2] += 4 * hh / 3
            w[2::2] += hh / 3
            return w
        if intervals == 1:
            return quadrature_weights(times, "trapezoid")
        m = intervals - 3
        if m > 0:
            w[: m + 1] = quadrature_weights(times[: m + 1], "simpson")
        w[m: m + 4] += np.array([3, 9, 9, 3]) * hh / 8
        return w
    # non-uniform: pairwise interpolatory rule, trapezoid on a trailing single interval
    last = intervals if intervals % 2 == 0 else intervals - 1
    for i in range(0, last, 2):
        h0, h1 = h[i], h[i + 1]
        s = h0 + h1
        w[i] += s * (2 * h0 - h1) / (6 * h0)
        w[i + 1] += s**3 / (6 * h0 * h1)
        w[i + 2] += s * (2 * h1 - h0) / (6 * h1)
    if last < intervals:
        w[-2] += h[-1] / 2
        w[-1] += h[-1] / 2
    return w


def time_quadrature(g, times: np.ndarray, rule: str = "simpson", order: int = 8):
    """Integrate ``g`` over ``[times[0], times[-1]]``.

    For ``trapezoid``/``simpson`` ``g`` holds samples at ``times`` (time on axis 0).  For
    ``gauss-on-subintervals`` ``g`` must be callable; an ``order``-point Gauss-Legendre rule is
    applied on every ``[times[i], times[i+1]]``.
    """
    times = _check_times(times)
    if rule == "gauss-on-subintervals":
        if not callable(g):
            raise ValueError("gauss-on-subintervals needs a callable integrand")
        nodes, weights = np.polynomial.legendre.leggauss(order)
        a, b = times[:-1, None], times[1:, None]
        tau = 0.5 * (b - a) * nodes[None, :] + 0.5 * (a + b)
        vals = np.asarray(g(tau.ravel()))
        vals = vals.reshape(tau.shape + vals.shape[1:])
        wt = (0.5 * (b - a) * weights[None, :])
        return np.tensordot(wt.ravel(), vals.reshape((-1,) + vals.shape[2:]), axes=(0, 0))
    g = np.asarray(g)
    if g.shape[0] != times.size:
        raise ValueError("sample count does not match times")
    w = quadrature_weights(times, rule)
    return np.tensordot(w, g, axes=(0, 0))


def cumulative_weights(times: np.ndarray) -> np.ndarray:
    """Matrix ``W`` with ``(W @ g)[n]`` approximating the integral of ``g`` over ``[t_0, t_n]``.

    Fourth order on a uniform grid: composite Simpson for even ``n``, Simpson plus a closing 3/8
    panel for odd ``n >= 3`` and a four-point cubic rule for the first interval.
    """
    times = _check_times(times)
    if not _is_uniform(times):
        raise ValueError("cumulative weights need uniform time samples")
    n = times.size
    if n < 4:
        raise ValueError("cumulative weights need at least 4 samples")
    h = times[1] - times[0]
    W = np.zeros((n, n))
    W[1, :4] = np.array([9.0, 19.0, -5.0, 1.0]) * h / 24
    for k in range(2, n):
        W[k, : k + 1] = quadrature_weights(times[: k + 1], "simpson")
    return W
