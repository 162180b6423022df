"""Gaussian test functions with closed-form Fourier transforms, and the
distributional checks built on them.

A packet is ``g(x) = A exp(-sum_mu (x_mu - c_mu)^2 / (2 s_mu^2)) exp(i q.x)``
with the canonical product ``q.x`` over storage indices.  Every pairing of
a distribution with a packet is reduced, by doing the x-integral in closed
form, to a single momentum integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .core import FORWARD_CONE, FourVector, check_mass
from .kernels import schwinger_position
from .quadrature import Box, QuadratureSpec, integrate_nd

MINKOWSKI = "minkowski"
EUCLIDEAN = "euclidean"

# sign of k_mu x_mu in the forward transform exp(i sum s_mu k_mu x_mu)
_SIGNS = {
    MINKOWSKI: np.array([-1.0, 1.0, 1.0, 1.0]),  # exp(-i k0 x0 + i k.x)
    EUCLIDEAN: np.array([1.0, 1.0, 1.0, 1.0]),   # exp(+i k.x)
}

_SQRT2PI = math.sqrt(2 * math.pi)


def _vec4(v) -> np.ndarray:
    if isinstance(v, FourVector):
        return v.array
    a = np.asarray(v, dtype=float)
    if a.shape != (4,):
        raise ValueError("expected four components")
    return a


@dataclass(frozen=True, eq=False)
class GaussianPacket:
    amplitude: complex
    center: np.ndarray = field(default_factory=lambda: np.zeros(4))
    width: np.ndarray = field(default_factory=lambda: np.ones(4))
    wave: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        for name in ("center", "width", "wave"):
            a = _vec4(getattr(self, name)).copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if np.any(self.width <= 0):
            raise ValueError("packet widths must be positive")

    def __call__(self, x) -> np.ndarray | complex:
        x = np.asarray(x, dtype=float)
        u = (x - self.center) / self.width
        val = self.amplitude * np.exp(-0.5 * np.sum(u * u, axis=-1) + 1j * (x @ self.wave))
        return val.item() if val.ndim == 0 else val

    def axis_factor(self, mu: int, x) -> np.ndarray:
        """One-dimensional factor along storage axis ``mu`` (no amplitude)."""
        x = np.asarray(x, dtype=float)
        u = (x - self.center[mu]) / self.width[mu]
        return np.exp(-0.5 * u * u + 1j * self.wave[mu] * x)

    def scaled(self, factor: complex) -> GaussianPacket:
        return GaussianPacket(self.amplitude * factor, self.center, self.width, self.wave)

    def integral(self) -> complex:
        """``int g d^4x``."""
        return complex(fourier(self, EUCLIDEAN)(np.zeros(4)))

    @property
    def terms(self) -> tuple:
        return (self,)

    def __add__(self, other):
        return PacketSum(self.terms + other.terms)

    def __mul__(self, factor):
        return self.scaled(factor)

    __rmul__ = __mul__


@dataclass(frozen=True)
class PacketSum:
    """Finite linear combination of packets (closed under every operation here)."""

    terms: tuple

    def __call__(self, x):
        return sum(t(x) for t in self.terms)

    def __add__(self, other):
        return PacketSum(self.terms + other.terms)

    def __mul__(self, factor):
        return PacketSum(tuple(t.scaled(factor) for t in self.terms))

    __rmul__ = __mul__


def fourier(g, convention: str = EUCLIDEAN, inverse: bool = False):
    """Closed-form transform ``int d^4x exp(i sum s_mu k_mu x_mu) g(x)``.

    ``inverse=True`` gives ``(2 pi)^-4 int d^4k exp(-i sum s_mu k_mu x_mu) g(k)``.
    """
    if isinstance(g, PacketSum):
        return PacketSum(tuple(fourier(t, convention, inverse) for t in g.terms))
    s = _SIGNS[convention]
    if inverse:
        s = -s
    amp = g.amplitude * np.prod(_SQRT2PI * g.width) * np.exp(1j * float(g.wave @ g.center))
    if inverse:
        amp /= (2 * math.pi) ** 4
    return GaussianPacket(amp, -s * g.wave, 1.0 / g.width, s * g.center)


# --------------------------------------------------------------------------
# Klein-Gordon sector

def _shell_box(gh, nsig: float = 9.0) -> Box:
    lo = np.min([t.center[1:] - nsig * t.width[1:] for t in gh.terms], axis=0)
    hi = np.max([t.center[1:] + nsig * t.width[1:] for t in gh.terms], axis=0)
    return Box(lo, hi)


def _shell_points(k: np.ndarray, m: float) -> np.ndarray:
    w = np.sqrt(k[:, 0] * k[:, 0] + k[:, 1] * k[:, 1] + k[:, 2] * k[:, 2] + m * m)
    return np.column_stack([w, k])


def smear_two_point(g: GaussianPacket, m, spec: QuadratureSpec | None = None):
    """Pairing of the two-point function with a packet:
    ``(2 pi)^-3 int d^3k g^(w_k, k) / (2 w_k)`` with the Minkowski transform."""
    m = check_mass(float(m))
    spec = spec or QuadratureSpec(rel_tol=1e-10)
    gh = fourier(g, MINKOWSKI)
    norm = (2 * math.pi) ** -3

    def f(k):
        kk = _shell_points(k, m)
        return norm * gh(kk) / (2 * kk[:, 0])

    return integrate_nd(f, 3, _shell_box(gh), spec)


@dataclass(frozen=True)
class BoundaryProbe:
    t: tuple
    values: tuple
    limit: complex
    limit_error: float
    order: float


def _neville_at_zero(ts, vals):
    p = list(vals)
    n = len(ts)
    for j in range(1, n):
        for i in range(n - j):
            p[i] = (ts[i + j] * p[i] - ts[i] * p[i + 1]) / (ts[i + j] - ts[i])
    return p[0]


def boundary_limit_probe(g: GaussianPacket, eta, t_list, m, spec: QuadratureSpec | None = None) -> BoundaryProbe:
    """Pair ``f(x - i t eta)`` with ``g`` for each ``t`` and extrapolate ``t -> 0``.

    For ``t > 0`` the pairing is ``(2 pi)^-3 int d^3k exp(-t (w_k eta0 - k.eta))
    g^(w_k, k) / (2 w_k)``.  The limit is the value at ``t = 0`` of the
    polynomial through all nodes; the order is the slope of
    ``log|value - limit|`` against ``log t``.
    """
    m = check_mass(float(m))
    spec = spec or QuadratureSpec(rel_tol=1e-10)
    eta = _vec4(eta)
    if not FORWARD_CONE.contains(eta):
        raise ValueError("eta must lie in the open forward cone")
    ts = [float(t) for t in t_list]
    if len(ts) < 2 or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_list must be strictly decreasing with at least two entries")
    if ts[-1] < 1e-3:
        raise ValueError("t values below 1e-3 are not resolved")
    gh = fourier(g, MINKOWSKI)
    norm = (2 * math.pi) ** -3
    box = _shell_box(gh)
    vals = []
    for t in ts:
        def f(k, t=t):
            kk = _shell_points(k, m)
            damp = np.exp(-t * (kk[:, 0] * eta[0] - kk[:, 1:] @ eta[1:]))
            return norm * damp * gh(kk) / (2 * kk[:, 0])
        vals.append(integrate_nd(f, 3, box, spec).value)
    limit = _neville_at_zero(ts, vals)
    err = abs(limit - _neville_at_zero(ts[1:], vals[1:])) if len(ts) > 2 else math.inf
    dev = np.abs(np.array(vals) - limit)
    ok = dev > 0
    order = float(np.polyfit(np.log(np.array(ts)[ok]), np.log(dev[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    return BoundaryProbe(tuple(ts), tuple(vals), limit, err, order)


def _moment_ft_1d(n: int, center: float, sigma: float, kappa):
    """``int (x-c)^n exp(-(x-c)^2/(2 s^2) + i kappa x) dx`` for n = 0, 1, 2."""
    base = _SQRT2PI * sigma * np.exp(1j * kappa * center - 0.5 * (sigma * kappa) ** 2)
    mu = 1j * kappa * sigma * sigma
    if n == 0:
        return base
    if n == 1:
        return base * mu
    return base * (sigma * sigma + mu * mu)


def _second_derivative_ft(g: GaussianPacket, mu: int, kappa):
    """Transform of ``d^2/dx_mu^2`` of the axis factor, from the position-space
    derivative ``[u^2/s^4 - 2 i q u/s^2 - q^2 - 1/s^2] g`` with ``u = x - c``."""
    c, s, q = g.center[mu], g.width[mu], g.wave[mu]
    s2 = s * s
    return (_moment_ft_1d(2, c, s, kappa) / (s2 * s2)
            - 2j * q / s2 * _moment_ft_1d(1, c, s, kappa)
            - (q * q + 1.0 / s2) * _moment_ft_1d(0, c, s, kappa))


def _operator_ft(g, k: np.ndarray, signs: np.ndarray, coeffs, mass_term: float):
    """Transform of ``sum_mu coeffs[mu] d_mu^2 g + mass_term g`` at momenta ``k``."""
    if isinstance(g, PacketSum):
        return sum(_operator_ft(t, k, signs, coeffs, mass_term) for t in g.terms)
    kappa = signs * k + g.wave
    plain = [_moment_ft_1d(0, g.center[mu], g.width[mu], kappa[:, mu]) for mu in range(4)]
    total = mass_term * plain[0] * plain[1] * plain[2] * plain[3]
    for mu in range(4):
        prod = _second_derivative_ft(g, mu, kappa[:, mu])
        for nu in range(4):
            if nu != mu:
                prod = prod * plain[nu]
        total = total + coeffs[mu] * prod
    return g.amplitude * total


@dataclass(frozen=True)
class KGCheck:
    defect: float
    scale: float
    pairing: complex


def kg_annihilation_check(g: GaussianPacket, m, spec: QuadratureSpec | None = None,
                          operator_mass=None) -> KGCheck:
    """``|<Delta+, P g>|`` with ``P = d0^2 - Laplacian + m'^2`` (``m'`` defaults to ``m``).

    ``P g`` is differentiated in position space and transformed with exact
    Gaussian moments, so the on-shell cancellation is a genuine test.
    ``scale`` is the pairing of the absolute values of the cancelling terms.
    """
    m = check_mass(float(m))
    mp = m if operator_mass is None else check_mass(float(operator_mass))
    spec = spec or QuadratureSpec(rel_tol=1e-8)
    gh = fourier(g, MINKOWSKI)
    norm = (2 * math.pi) ** -3
    signs = _SIGNS[MINKOWSKI]
    box = _shell_box(gh)

    def mag(k):
        kk = _shell_points(k, m)
        e2 = kk[:, 0] ** 2
        return norm * np.abs(gh(kk)) * (e2 + (e2 - m * m) + mp * mp) / (2 * kk[:, 0])

    scale = integrate_nd(mag, 3, box, spec.with_(rel_tol=1e-6)).real

    def f(k):
        kk = _shell_points(k, m)
        return norm * _operator_ft(g, kk, signs, (1.0, -1.0, -1.0, -1.0), mp * mp) / (2 * kk[:, 0])

    res = integrate_nd(f, 3, box, spec.with_(abs_tol=max(spec.abs_tol, 1e-12 * scale)))
    return KGCheck(abs(res.value), scale, res.value)


# --------------------------------------------------------------------------
# Euclidean sector

@dataclass(frozen=True)
class GreensCheck:
    momentum_route: complex
    position_route: complex
    g0: complex
    defect: float


def _laplace_minus_mass(g, x: np.ndarray, m: float) -> np.ndarray:
    if isinstance(g, PacketSum):
        return sum(_laplace_minus_mass(t, x, m) for t in g.terms)
    u = (x - g.center) / (g.width * g.width)
    poly = np.sum((-u + 1j * g.wave) ** 2 - 1.0 / (g.width * g.width), axis=-1) - m * m
    return poly * g(x)


def _sphere3(n_nodes: np.ndarray) -> np.ndarray:
    """Unit vectors on S^3 from angles (psi, theta, phi) in storage order."""
    psi, th, ph = n_nodes[:, 0], n_nodes[:, 1], n_nodes[:, 2]
    sp, st = np.sin(psi), np.sin(th)
    return np.column_stack([np.cos(psi), sp * np.cos(th), sp * st * np.cos(ph), sp * st * np.sin(ph)])


def _radial_schwinger_table(m: float, rmax: float, n: int = 400):
    """Cubic spline of ``r^2 S(r)`` on a log-spaced grid (smooth down to r = 0)."""
    rs = np.geomspace(1e-4, rmax, n)
    vals = [r * r * schwinger_position(FourVector.euclidean(0.0, 0.0, 0.0, r), m) for r in rs]
    return CubicSpline(rs, vals), rs[0]


def greens_check(g, m, spec: QuadratureSpec | None = None) -> GreensCheck:
    """Check ``<S, (Laplacian - m^2) g> = -g(0)`` two ways.

    Momentum route: the transform of ``(Laplacian - m^2) g`` is
    ``-(k^2 + m^2) g^(k)``, which cancels the kernel and leaves minus the
    inverse transform of ``g^`` at the origin (closed form).
    Position route: a 4D quadrature in hyperspherical coordinates of
    ``r^3 S(r) (Laplacian - m^2) g``, with ``S`` tabulated from
    ``schwinger_position``.
    """
    m = check_mass(float(m))
    spec = spec or QuadratureSpec(rel_tol=1e-5, max_evals=5_000_000)
    terms = g.terms
    g0 = complex(g(np.zeros(4)))
    gh = fourier(g, EUCLIDEAN)
    momentum = -complex(fourier(gh, EUCLIDEAN, inverse=True)(np.zeros(4)))

    rmax = max(float(np.linalg.norm(t.center) + 9.0 * np.max(t.width)) for t in terms)
    table, rmin = _radial_schwinger_table(m, rmax)
    h0 = 1.0 / (4 * math.pi ** 2)
    scale = max(abs(t.amplitude) for t in terms)

    def f(y):
        r = y[:, 0]
        hr = np.where(r < rmin, h0, table(np.maximum(r, rmin)))
        jac = r * np.sin(y[:, 1]) ** 2 * np.sin(y[:, 2])
        x = r[:, None] * _sphere3(y[:, 1:])
        return hr * jac * _laplace_minus_mass(g, x, m)

    domain = Box((0.0, 0.0, 0.0, 0.0), (rmax, math.pi, math.pi, 2 * math.pi))
    res = integrate_nd(f, 4, domain, spec.with_(abs_tol=max(spec.abs_tol, 1e-9 * scale)))
    position = complex(res.value)
    return GreensCheck(momentum, position, g0, abs(position + g0))
