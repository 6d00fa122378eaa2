"""The BBM dispersion symbol, its unitary group, Bessel potentials, general dispersive groups,
the decay exponent and the exponent algebra shared by the well-posedness statements."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .grid import Field, GridSpec, apply_multiplier, sample_symbol


class HypothesisError(ValueError):
    """A parameter hypothesis failed; ``hypothesis`` names it."""

    def __init__(self, hypothesis: str, detail: str = "", message: str | None = None):
        self.hypothesis = hypothesis
        if message is None:
            message = f"hypothesis violated: {hypothesis}"
        super().__init__(message + (f" ({detail})" if detail else ""))


def phi(xi):
    """Dispersion symbol ``xi / (1 + xi^2)``."""
    xi = np.asarray(xi, dtype=float)
    return xi / (1.0 + xi * xi)


def phi_second_derivative(eta):
    eta = np.asarray(eta, dtype=float)
    return 2.0 * eta * (eta * eta - 3.0) / (1.0 + eta * eta) ** 3


def beta_near(sigma: float) -> float:
    """Decay exponent formula used for ``-4 <= sigma < -1``."""
    return (sigma + 1.0) / (1.0 - 2.0 * sigma)


def beta_far(sigma: float) -> float:
    """Decay exponent formula used for ``sigma <= -4``."""
    return -3.0 / (1.0 - 2.0 * sigma)


def beta(sigma: float) -> float:
    if not sigma < -1:
        raise HypothesisError("sigma < -1", f"sigma = {sigma}")
    return beta_near(sigma) if sigma >= -4 else beta_far(sigma)


def bessel_symbol(sigma: float):
    return lambda xi: (1.0 + np.asarray(xi, dtype=float) ** 2) ** (sigma / 2.0)


def apply_J(u: Field, sigma: float) -> Field:
    """Bessel potential ``(1 - d_xx)^{sigma/2}``."""
    return apply_multiplier(u, bessel_symbol(sigma), real=u.real)


def apply_S(u: Field, t: float) -> Field:
    """Linear BBM group ``exp(-i t phi(D))``."""
    return apply_multiplier(u, lambda xi: np.exp(-1j * t * phi(xi)), real=u.real)


def apply_phiD(u: Field) -> Field:
    """``phi(D)``; note ``-i phi(D)`` maps real fields to real fields, ``phi(D)`` alone does not."""
    return apply_multiplier(u, lambda xi: phi(xi).astype(complex))


@dataclass(frozen=True)
class SymbolSpec:
    """Real phase function ``P`` of ``U(t) = F^{-1} exp(i t P) F``."""

    kind: str
    P: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    @classmethod
    def bbm(cls) -> "SymbolSpec":
        return cls("bbm-phi", lambda xi: -phi(xi), "bbm-phi")

    @classmethod
    def custom(cls, P: Callable[[np.ndarray], np.ndarray], name: str = "custom") -> "SymbolSpec":
        return cls("custom", P, name)

    def sample(self, grid: GridSpec) -> np.ndarray:
        if self.kind == "bbm-phi":
            return -phi(grid.xi)
        if self.P is None:
            raise ValueError("custom symbol needs a phase function P")
        vals = np.asarray(sample_symbol(self.P, grid))
        if np.iscomplexobj(vals):
            if np.any(vals.imag != 0):
                raise ValueError("symbol P must be real-valued at every grid frequency")
            vals = vals.real
        return vals.astype(float)

    def conjugate_symmetric(self, grid: GridSpec) -> bool:
        """True when ``exp(i t P)`` maps real fields to real fields (``P`` odd on the grid)."""
        vals = self.sample(grid)
        reflected = vals[(-np.arange(grid.samples)) % grid.samples]
        paired = np.arange(grid.samples) != grid.samples // 2  # the Nyquist bin has no partner
        scale = max(np.max(np.abs(vals)), 1.0)
        return bool(np.allclose(vals[paired], -reflected[paired], atol=1e-14 * scale, rtol=0))


CUSTOM_SYMBOLS = {
    "schrodinger": lambda xi: np.asarray(xi, dtype=float) ** 2,
    "airy": lambda xi: np.asarray(xi, dtype=float) ** 3,
}


def apply_U(u: Field, t: float, sym: SymbolSpec) -> Field:
    P = sym.sample(u.grid)
    real = u.real and sym.conjugate_symmetric(u.grid)
    return apply_multiplier(u, np.exp(1j * t * P), real=real)


# --------------------------------------------------------------------------- kernel quadrature

def _panel_gauss(fn, a: float, b: float, width: float, order: int = 24) -> float:
    """Composite Gauss-Legendre over ``[a, b]`` with panels no wider than ``width``."""
    n = max(1, int(np.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    xs = mid + half * nodes[None, :]
    return float(np.sum(half * weights[None, :] * fn(xs)))


def kernel_direct(t: float, sigma: float, x: float, smoothing: float | None = None,
                  rtol: float = 1e-8) -> complex:
    """``int (1+xi^2)^{sigma/2} exp(i(x xi - t phi(xi))) g(xi) dxi`` by direct quadrature.

    ``g = 1`` by default (the kernel of ``S(t) J^sigma`` times ``2 pi``).  With ``smoothing = w`` the
    integrand carries ``exp(-w^2 xi^2 / 2)``, the transform of the unit-mass Gaussian of width ``w``,
    which is the same kernel convolved with that Gaussian.

    The integrand at ``-xi`` is the conjugate of the one at ``xi``, so the value is real and only the
    half line is integrated.  The finite part uses Gauss-Legendre panels no wider than
    ``pi / (4 (|x| + |t| + 1))``; the unsmoothed tail beyond ``A`` goes to QUADPACK's Fourier-integral
    routine, or to a plain infinite-range rule when ``x = 0``.
    """
    if smoothing is None and not sigma < -1:
        raise HypothesisError("sigma < -1", "the kernel integral diverges for sigma >= -1")
    width = np.pi / (4.0 * (abs(x) + abs(t) + 1.0))

    if smoothing is not None:
        w = float(smoothing)
        cut = np.sqrt(2.0 * 46.0) / w  # exp(-46) ~ 1e-20

        def full(xi):
            return (1 + xi * xi) ** (sigma / 2) * np.exp(-0.5 * (w * xi) ** 2) * np.cos(x * xi - t * phi(xi))

        return complex(2.0 * _panel_gauss(full, 0.0, cut, width))

    A = max(40.0, 4.0 * abs(t))

    def head(xi):
        return (1 + xi * xi) ** (sigma / 2) * np.cos(x * xi - t * phi(xi))

    total = _panel_gauss(head, 0.0, A, width)
    abs_tol = rtol * 1e-3
    if x == 0:
        tail, _ = integrate.quad(lambda xi: (1 + xi * xi) ** (sigma / 2) * np.cos(t * phi(xi)), A, np.inf,
                                 epsabs=abs_tol, epsrel=rtol * 1e-2, limit=500)
    else:
        ax, sgn = abs(x), np.sign(x)
        c, _ = integrate.quad(lambda xi: (1 + xi * xi) ** (sigma / 2) * np.cos(t * phi(xi)), A, np.inf,
                              weight="cos", wvar=ax, epsabs=abs_tol, limlst=200)
        s, _ = integrate.quad(lambda xi: (1 + xi * xi) ** (sigma / 2) * np.sin(t * phi(xi)), A, np.inf,
                              weight="sin", wvar=ax, epsabs=abs_tol, limlst=200)
        tail = c + sgn * s
    return complex(2.0 * (total + tail))


def grid_kernel(grid: GridSpec, t: float, sigma: float, smoothing: float) -> Field:
    """``S(t) J^sigma`` applied to the unit-mass Gaussian of width ``smoothing`` centred at 0."""
    g = Field(grid, np.exp(-grid.x**2 / (2 * smoothing**2)) / (np.sqrt(2 * np.pi) * smoothing), real=True)
    return apply_S(apply_J(g, sigma), t)


# --------------------------------------------------------------------------- exponent algebra

@dataclass(frozen=True)
class ExponentPack:
    lam: int
    sigma: float
    theta: float
    p: float
    q: float
    s: float
    beta: float
    r: float
    gamma: float
    mu: float
    rho: float

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def gamma_conj(self) -> float:
        return self.gamma / (self.gamma - 1.0)

    @property
    def decay_exponent(self) -> float:
        """``2 theta (1/2 - 1/p) beta``: the (negative) power of ``1+|t|`` in the modulation decay."""
        return 2.0 * self.theta * (0.5 - 1.0 / self.p) * self.beta

    @property
    def hls_exponent(self) -> float:
        """``1 + 2 theta (1/2 - 1/p) beta``, which must lie in (0, 1)."""
        return 1.0 + self.decay_exponent

    @property
    def delta(self) -> float:
        """Regularity loss of the modulation decay estimate for the BBM group."""
        return -self.sigma * self.theta

    def identity_residuals(self) -> dict[str, float]:
        lam = self.lam
        return {
            "scaling": abs(1.0 / self.r - ((lam + 1) / self.r - self.hls_exponent)),
            "gamma_mu": abs(self.gamma - 2.0 / self.mu),
            "rho_mu": abs(self.rho - self.mu),
        }

    def require_strichartz(self) -> None:
        if not 0 < self.mu < 1:
            raise HypothesisError("0 < mu < 1", f"mu = {self.mu}")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("lam", "sigma", "theta", "p", "q", "s", "beta", "r", "gamma", "mu", "rho")}


def exponent_pack(lam: int, sigma: float, theta: float, q: float = 2.0, s: float = 0.0,
                  p: float | None = None, check: bool = True) -> ExponentPack:
    """Derived exponents ``p = lam + 2``, ``beta``, ``r``, ``gamma``, ``mu``, ``rho`` with hypothesis checks."""
    if int(lam) != lam or lam < 1:
        raise HypothesisError("lambda >= 1 integer", f"lambda = {lam}")
    lam = int(lam)
    if not sigma < -1:
        raise HypothesisError("sigma < -1", f"sigma = {sigma}")
    if not 0 < theta <= -1.0 / sigma * (1 + 1e-15):
        raise HypothesisError("0 < theta <= -1/sigma", f"theta = {theta}, -1/sigma = {-1.0 / sigma}")
    if p is not None and abs(p - (lam + 2)) > 1e-12:
        raise HypothesisError("p = lambda + 2", f"p = {p}")
    if not q >= 1:
        raise HypothesisError("q >= 1", f"q = {q}")
    b = beta(sigma)
    ratio = -lam * theta * b / (lam + 2)
    if not 0 < ratio < 1:
        raise HypothesisError("0 < -lambda theta beta / (lambda + 2) < 1", f"value = {ratio}")
    pp = float(lam + 2)
    r = lam * (lam + 2) / (lam + 2 + lam * theta * b)
    gamma = -2.0 * (lam + 2) / (lam * theta * b)
    mu = -2.0 * theta * (0.5 - 1.0 / pp) * b
    pack = ExponentPack(lam, float(sigma), float(theta), pp, float(q), float(s), b, r, gamma, mu, mu)
    if check:
        res = pack.identity_residuals()
        bad = {k: v for k, v in res.items() if v > 1e-12 * max(1.0, pack.gamma)}
        if bad:
            raise AssertionError(f"exponent identities fail: {bad}")
        if not 0 < pack.hls_exponent < 1:
            raise HypothesisError("0 < 1 + 2 theta (1/2 - 1/p) beta < 1", f"value = {pack.hls_exponent}")
    return pack


def global_strichartz_sigmas(lam: int) -> tuple[float, float]:
    """The two admissible choices of sigma for the small-M_{2,q}-data global result."""
    return (lam + 2.0) / (4.0 - lam), (2.0 - 3.0 * lam) / 4.0
