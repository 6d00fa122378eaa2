"""Seeded families of test inputs standing in for "all Schwartz functions"."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import Field, GridSpec, passes_truncation

KINDS = ("gaussian-packets", "band-limited-random")


@dataclass(frozen=True)
class TestFamily:
    seed: int = 20240917
    count: int = 32
    kind: str = "gaussian-packets"
    width: tuple[float, float] = (0.5, 3.0)
    center: tuple[float, float] = (-20.0, 20.0)
    modulation: tuple[float, float] = (-4.0, 4.0)
    band: float = 6.0  # band-limited-random: |xi| <= band
    real: bool = False

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"family kind must be one of {KINDS}, got {self.kind!r}")
        if self.count < 1:
            raise ValueError("family count must be positive")

    def with_(self, **kw) -> "TestFamily":
        return replace(self, **kw)

    def members(self, grid: GridSpec) -> list[Field]:
        """Deterministic members; parameters are drawn independently of the grid resolution."""
        rng = np.random.default_rng(self.seed)
        out = []
        x = grid.x
        for _ in range(self.count):
            if self.kind == "gaussian-packets":
                w = rng.uniform(*self.width)
                c = rng.uniform(*self.center)
                k = rng.uniform(*self.modulation)
                ph = rng.uniform(0, 2 * np.pi)
                env = np.exp(-((x - c) ** 2) / (2 * w * w))
                v = env * (np.cos(k * x + ph) if self.real else np.exp(1j * (k * x + ph)))
            else:
                v = _band_limited(grid, rng, self.band, self.real)
            out.append(Field(grid, v, real=self.real))
        bad = [i for i, f in enumerate(out) if not passes_truncation(f)]
        if bad:
            raise ValueError(f"family members {bad} fail the truncation diagnostic on this grid")
        return out


def _band_limited(grid: GridSpec, rng: np.random.Generator, band: float, real: bool) -> np.ndarray:
    # random coefficients on integer multiples of dxi inside the band, windowed in space so that
    # the member is localized; drawing by signed mode number keeps members identical under N -> 2N
    jmax = int(np.floor(band / grid.dxi))
    js = np.arange(-jmax, jmax + 1)
    coef = rng.normal(size=js.size) + 1j * rng.normal(size=js.size)
    taper = np.cos(0.5 * np.pi * js / (jmax + 1)) ** 2
    spec = np.zeros(grid.samples, dtype=complex)
    spec[js % grid.samples] = coef * taper
    v = np.fft.ifft(spec) * grid.samples / np.sqrt(js.size)
    window = np.exp(-(grid.x**2) / (2 * (grid.half_width / 10) ** 2))
    v = v * window
    return v.real if real else v


def random_band_limited(grid: GridSpec, rng: np.random.Generator, band: float = 6.0,
                        real: bool = False) -> Field:
    """Periodic random field with spectrum inside ``|xi| <= band`` (no spatial localization)."""
    jmax = int(np.floor(band / grid.dxi))
    js = np.arange(-jmax, jmax + 1)
    spec = np.zeros(grid.samples, dtype=complex)
    spec[js % grid.samples] = rng.normal(size=js.size) + 1j * rng.normal(size=js.size)
    v = np.fft.ifft(spec) * np.sqrt(grid.samples)
    if real:
        v = v.real
    return Field(grid, v, real=real)
