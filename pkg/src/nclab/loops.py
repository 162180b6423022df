"""Cutoff-regularised one-loop integrals with untwisted, off-shell twisted
and on-shell twisted phases, plus the UV/IR scan harness.

Momenta are Euclidean arrays in storage order ``(k4, k1, k2, k3)``.  The
convolution integrals do the ``p4`` integral in closed form and regulate
only the spatial loop momentum, so untwisted, off-shell and on-shell
variants share exactly the same integrand at ``theta = 0``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special, stats

from .core import FourVector, Signature, ThetaMatrix, check_mass, contract, lift_array
from .kernels import Twist, TwistKind
from .quadrature import (Ball, Box, IntegralResult, QuadratureSpec, integrate_1d, integrate_nd,
                         regulate, regulator_radius)


def _euclid(k) -> np.ndarray:
    if isinstance(k, FourVector):
        if k.signature is not Signature.EUCLIDEAN:
            raise ValueError("expected a Euclidean four-vector")
        return k.array
    a = np.asarray(k, dtype=float)
    if a.shape != (4,):
        raise ValueError("expected four components")
    return a


def _check_cutoff(cutoff: float, m: float) -> float:
    cutoff = float(cutoff)
    if not cutoff > m:
        raise ValueError(f"cutoff {cutoff} must exceed the mass {m}")
    return cutoff


# --------------------------------------------------------------------------
# one-propagator tadpole with an off-shell twist: int d^4p e^{ip.a} R(p) / (p^2 + m^2)

@dataclass(frozen=True)
class TadpoleResult:
    value: complex
    error: float
    converged: bool
    divergent: bool = False

    def __complex__(self):
        return complex(self.value)


def tadpole_closed_form(a, m) -> float:
    """Unregulated limit ``4 pi^2 m K1(m|a|) / |a|`` for ``a != 0``."""
    m = check_mass(float(m))
    r = float(np.linalg.norm(_euclid(a)))
    if r == 0.0:
        return math.inf
    return 4 * math.pi ** 2 * m * special.k1(m * r) / r


def tadpole_one_propagator(a, m, cutoff: float, regulator: str = "gaussian",
                           spec: QuadratureSpec | None = None) -> TadpoleResult:
    """Nonplanar one-propagator tadpole with phase ``e^{i p.a}`` (``a = theta k``).

    The 4D integral of a radial function against a plane wave reduces to
    ``(4 pi^2 / |a|) int p^2 J1(p|a|) R(p) / (p^2 + m^2) dp``.  At ``a = 0``
    the value grows like ``Lambda^2`` and is flagged divergent.
    """
    m = check_mass(float(m))
    cutoff = _check_cutoff(cutoff, m)
    spec = spec or QuadratureSpec(rel_tol=1e-10)
    r = float(np.linalg.norm(_euclid(a)))
    top = regulator_radius(regulator, cutoff)
    if r == 0.0:
        def f0(p):
            return 2 * math.pi ** 2 * p ** 3 / (p * p + m * m)
        g = regulate(f0, regulator, cutoff)
        res = integrate_1d(g, 0.0, top, spec, initial_intervals=8)
        return TadpoleResult(res.value, res.error, res.converged, divergent=True)

    def f(p):
        return p * p * special.j1(p * r) / (p * p + m * m)

    g = regulate(f, regulator, cutoff)
    # one interval per oscillation keeps the local rule well resolved
    n = int(min(4000, max(8, top * r / math.pi)))
    res = integrate_1d(g, 0.0, top, spec, initial_intervals=n)
    pref = 4 * math.pi ** 2 / r
    return TadpoleResult(pref * res.value, pref * res.error, res.converged)


def gaussian_regulator_bias(a, m, cutoff: float) -> float:
    """Leading relative deviation of the Gaussian-regulated tadpole from its limit.

    From the proper-time form the regulated value is
    ``e^{m^2/L^2} (limit - O(e^{-|a|^2 L^2 / 4}))``.
    """
    r = float(np.linalg.norm(_euclid(a)))
    return (m / cutoff) ** 2 + math.exp(-0.25 * (r * cutoff) ** 2)


def richardson_cutoff(cutoffs: Sequence[float], values: Sequence[complex], power: int = 2):
    """Extrapolate ``values(Lambda)`` to ``Lambda -> inf`` assuming a series in ``Lambda^-power``.

    Returns ``(limit, error)`` with the error taken as the change when the
    smallest cutoff is dropped.
    """
    hs = [float(c) ** -power for c in cutoffs]
    if len(hs) < 2:
        raise ValueError("at least two cutoffs are needed")

    def neville(h, v):
        p = list(v)
        for j in range(1, len(h)):
            for i in range(len(h) - j):
                p[i] = (h[i + j] * p[i] - h[i] * p[i + 1]) / (h[i + j] - h[i])
        return p[0]

    limit = neville(hs, values)
    err = abs(limit - neville(hs[1:], values[1:])) if len(hs) > 2 else abs(limit - values[-1])
    return limit, err


def tadpole_extrapolated(a, m, cutoffs: Sequence[float], regulator: str = "gaussian",
                         spec: QuadratureSpec | None = None):
    vals = [tadpole_one_propagator(a, m, c, regulator, spec).value for c in cutoffs]
    return richardson_cutoff(cutoffs, vals)


# --------------------------------------------------------------------------
# two-propagator convolution

def bubble_p4_reduced(kvec, k4: float, pvec, m):
    """``int dp4 / ((p^2 + m^2)((k - p)^2 + m^2))`` in closed form.

    ``pi (A + B) / (A B ((A + B)^2 + k4^2))`` with ``A = w_p``,
    ``B = w_{k - p}``.  Vectorised over leading axes of ``pvec``.
    """
    m = check_mass(float(m))
    kvec = np.asarray(kvec, dtype=float)
    pvec = np.asarray(pvec, dtype=float)
    A = np.sqrt(np.sum(pvec * pvec, axis=-1) + m * m)
    q = kvec - pvec
    B = np.sqrt(np.sum(q * q, axis=-1) + m * m)
    s = A + B
    val = math.pi * s / (A * B * (s * s + k4 * k4))
    return val.item() if np.ndim(val) == 0 else val


def _hderiv(z, n, u, al, be):
    """n-th derivative of ``e^{-izu} / ((z - al)(z - be))`` (n <= 3)."""
    e = np.exp(-1j * z * u)
    za, zb = z - al, z - be
    total = 0
    for j in range(n + 1):
        ej = (-1j * u) ** (n - j) * e
        # j-th derivative of 1/((z-al)(z-be))
        r = 0
        for i in range(j + 1):
            r = r + math.comb(j, i) * (-1) ** j * math.factorial(i) * math.factorial(j - i) \
                * za ** (-1 - i) * zb ** (-1 - (j - i))
        total = total + math.comb(n, j) * ej * r
    return total


def offshell_p4_integral(u, k4: float, A, B):
    """``int dp4 e^{-i p4 u} / ((p4^2 + A^2)((k4 - p4)^2 + B^2))`` by residues.

    For ``u >= 0`` the contour closes below, picking up ``z1 = -iA`` and
    ``z2 = k4 - iB``; the result is ``-2 pi i`` times the divided difference
    of ``h(z) = e^{-izu} / ((z - iA)(z - k4 - iB))``.  Near ``z1 = z2`` a
    Taylor expansion about the midpoint replaces the cancelling difference.
    ``u < 0`` follows from ``I(u; k4) = I(-u; -k4)``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    u = float(u)
    if u < 0:
        u, k4 = -u, -k4
    z1 = -1j * A
    z2 = k4 - 1j * B
    al, be = 1j * A, k4 + 1j * B
    d = z1 - z2
    small = np.abs(d) < 1e-3 * np.minimum(A + B, 1.0 / max(u, 1e-300))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (_hderiv(z1, 0, u, al, be) - _hderiv(z2, 0, u, al, be)) / d
    if np.any(small):
        zm = 0.5 * (z1 + z2)
        taylor = _hderiv(zm, 1, u, al, be) + _hderiv(zm, 3, u, al, be) * d * d / 24
        direct = np.where(small, taylor, direct)
    return -2j * math.pi * direct


def _spatial_regulated(f, regulator: str, cutoff: float, spec: QuadratureSpec) -> IntegralResult:
    # Cartesian cells suit phases that oscillate along one axis; the sharp
    # cutoff needs the ball to avoid a discontinuity inside cells
    g = regulate(f, regulator, cutoff)
    if regulator == "sharp":
        return integrate_nd(g, 3, Ball(cutoff), spec)
    radius = regulator_radius(regulator, cutoff, 1e-3 * spec.rel_tol)
    return integrate_nd(g, 3, Box.cube(radius, 3), spec)


def tadpole_onshell_convolution(k, theta: ThetaMatrix, m, cutoff: float,
                                spec: QuadratureSpec | None = None,
                                regulator: str = "gaussian") -> IntegralResult:
    """``int d^4p S(k - p) S(p) exp(-i p~ theta (k - p)~)`` with spatial cutoff.

    The phase does not involve ``p4``, so the ``p4`` integral is the closed
    form ``bubble_p4_reduced`` and one 3D integral remains.
    """
    m = check_mass(float(m))
    cutoff = _check_cutoff(cutoff, m)
    spec = spec or QuadratureSpec.for_dimension(3)
    ka = _euclid(k)
    k4, kvec = ka[0], ka[1:]

    def f(p):
        val = bubble_p4_reduced(kvec, k4, p, m)
        if not np.any(theta.entries):
            return val
        pt = lift_array(p, m)
        qt = lift_array(kvec - p, m)
        return val * np.exp(-1j * contract(pt, theta, qt))

    return _spatial_regulated(f, regulator, cutoff, spec)


def tadpole_offshell_convolution(k, theta: ThetaMatrix, m, cutoff: float,
                                 spec: QuadratureSpec | None = None,
                                 regulator: str = "gaussian") -> IntegralResult:
    """``int d^4p S(k - p) S(p) exp(-i p theta k)`` with spatial cutoff.

    Writing ``p theta k = p4 u + p.v`` with ``(u, v) = theta k``, the ``p4``
    integral is done by residues (``offshell_p4_integral``).
    """
    m = check_mass(float(m))
    cutoff = _check_cutoff(cutoff, m)
    spec = spec or QuadratureSpec.for_dimension(3)
    ka = _euclid(k)
    k4, kvec = ka[0], ka[1:]
    tk = theta.entries @ ka
    u, v = float(tk[0]), tk[1:]

    def f(p):
        A = np.sqrt(np.sum(p * p, axis=-1) + m * m)
        q = kvec - p
        B = np.sqrt(np.sum(q * q, axis=-1) + m * m)
        if u == 0.0:
            s = A + B
            val = math.pi * s / (A * B * (s * s + k4 * k4))
        else:
            val = offshell_p4_integral(u, k4, A, B)
        if not np.any(v):
            return val
        return val * np.exp(-1j * (p @ v))

    return _spatial_regulated(f, regulator, cutoff, spec)


def tadpole_onshell_one_propagator(k, theta: ThetaMatrix, m, cutoff: float,
                                   spec: QuadratureSpec | None = None,
                                   regulator: str = "gaussian") -> IntegralResult:
    """``int d^4p exp(-i p~ theta k~) / (p^2 + m^2)``; the ``p4`` integral gives ``pi / w_p``."""
    m = check_mass(float(m))
    cutoff = _check_cutoff(cutoff, m)
    spec = spec or QuadratureSpec.for_dimension(3)
    kt = lift_array(_euclid(k)[1:], m)

    def f(p):
        pt = lift_array(p, m)
        return math.pi / pt[:, 0] * np.exp(-1j * contract(pt, theta, kt))

    return _spatial_regulated(f, regulator, cutoff, spec)


# --------------------------------------------------------------------------
# scan harness

GRAPHS = ("tadpole", "bubble")


@dataclass(frozen=True)
class ScanGrid:
    external_momenta: tuple
    cutoffs: tuple
    twist: TwistKind
    m: float
    spec: QuadratureSpec = field(default_factory=lambda: QuadratureSpec.for_dimension(3))
    graph: str = "bubble"
    regulator: str = "gaussian"

    def __post_init__(self):
        m = check_mass(float(self.m))
        object.__setattr__(self, "m", m)
        ks = tuple(tuple(_euclid(k)) for k in self.external_momenta)
        if not ks:
            raise ValueError("scan needs at least one external momentum")
        object.__setattr__(self, "external_momenta", ks)
        cs = tuple(float(c) for c in self.cutoffs)
        if not cs or any(b <= a for a, b in zip(cs, cs[1:])):
            raise ValueError("cutoffs must be strictly ascending")
        if cs[0] <= m:
            raise ValueError("all cutoffs must exceed the mass")
        object.__setattr__(self, "cutoffs", cs)
        if self.graph not in GRAPHS:
            raise ValueError(f"graph must be one of {GRAPHS}")
        if self.regulator not in ("sharp", "gaussian"):
            raise ValueError("regulator must be sharp or gaussian")


@dataclass(frozen=True)
class ScanRow:
    k: tuple
    cutoff: float
    value: complex
    error: float
    converged: bool
    reference: float | None = None
    message: str = ""

    @property
    def k_norm(self) -> float:
        return float(np.linalg.norm(self.k))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    npoints: int


@dataclass
class ScanResult:
    grid: ScanGrid
    rows: list
    log_slopes: dict = field(default_factory=dict)
    quadratic_slopes: dict = field(default_factory=dict)
    k_exponents: dict = field(default_factory=dict)

    def table(self, k) -> list:
        k = tuple(float(c) for c in k)
        return [r for r in self.rows if r.k == k]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# momenta and cutoffs in mass units; value in units of m^(d-2n) with the 4D measure d^4p\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k4", "k1", "k2", "k3", "k_norm", "cutoff", "re", "im", "error", "converged",
                    "reference", "message"])
        for r in self.rows:
            w.writerow([repr(float(c)) for c in r.k] + [repr(r.k_norm), repr(r.cutoff),
                        repr(float(np.real(r.value))), repr(float(np.imag(r.value))),
                        repr(float(r.error)), int(r.converged),
                        "" if r.reference is None else repr(float(r.reference)), r.message])
        return buf.getvalue()


def _fit(x, y) -> SlopeFit:
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    if len(x) < 2:
        return SlopeFit(math.nan, math.nan, len(x))
    if len(x) == 2:
        return SlopeFit(float((y[1] - y[0]) / (x[1] - x[0])), math.nan, 2)
    lr = stats.linregress(x, y)
    return SlopeFit(float(lr.slope), float(lr.stderr), len(x))


def _cell(grid: ScanGrid, k: np.ndarray, cutoff: float):
    tw, m, theta = grid.twist, grid.m, grid.twist.theta
    if grid.graph == "tadpole":
        if tw.kind is Twist.ON_SHELL:
            return tadpole_onshell_one_propagator(k, theta, m, cutoff, grid.spec, grid.regulator), None
        a = theta.entries @ k if tw.kind is Twist.OFF_SHELL else np.zeros(4)
        spec1 = grid.spec.with_(rel_tol=min(grid.spec.rel_tol, 1e-10))
        res = tadpole_one_propagator(a, m, cutoff, grid.regulator, spec1)
        ref = tadpole_closed_form(a, m) if np.any(a) else None
        return res, ref
    zero = ThetaMatrix(np.zeros((4, 4)))
    if tw.kind is Twist.ON_SHELL:
        return tadpole_onshell_convolution(k, theta, m, cutoff, grid.spec, grid.regulator), None
    th = theta if tw.kind is Twist.OFF_SHELL else zero
    return tadpole_offshell_convolution(k, th, m, cutoff, grid.spec, grid.regulator), None


def uvir_scan(grid: ScanGrid) -> ScanResult:
    """Evaluate every (k, Lambda) cell, then fit cutoff and momentum dependence.

    Per momentum: slopes of ``Re value`` against ``ln Lambda`` and against
    ``Lambda^2`` over the upper half of the cutoff grid.  Per cutoff: the
    exponent of ``|value|`` against ``|k|`` over the smaller half of the
    nonzero momenta.  Failed cells are recorded with a message and the scan
    continues.  Nothing is asserted about the outcome.
    """
    rows = []
    for kt in grid.external_momenta:
        k = np.array(kt)
        for c in grid.cutoffs:
            try:
                res, ref = _cell(grid, k, c)
                rows.append(ScanRow(kt, c, complex(res.value), float(res.error), bool(res.converged), ref))
            except (ArithmeticError, ValueError, RuntimeError) as exc:
                rows.append(ScanRow(kt, c, complex(math.nan, math.nan), math.inf, False, None, str(exc)))
    out = ScanResult(grid, rows)
    half = grid.cutoffs[(len(grid.cutoffs) - 1) // 2:]
    for kt in grid.external_momenta:
        sel = [r for r in out.table(kt) if r.cutoff in half]
        re = [np.real(r.value) for r in sel]
        out.log_slopes[kt] = _fit([math.log(r.cutoff) for r in sel], re)
        out.quadratic_slopes[kt] = _fit([r.cutoff ** 2 for r in sel], re)
    nonzero = sorted({kt for kt in grid.external_momenta if any(kt)}, key=lambda t: np.linalg.norm(t))
    small = nonzero[:max(2, (len(nonzero) + 1) // 2)]
    for c in grid.cutoffs:
        sel = [r for r in rows if r.cutoff == c and r.k in small]
        out.k_exponents[c] = _fit([math.log(r.k_norm) for r in sel],
                                  [math.log(abs(r.value)) if abs(r.value) > 0 else math.nan for r in sel])
    return out
