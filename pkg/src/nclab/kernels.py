"""Momentum-space kernels of the free massive scalar field and their
Wick-rotation relations.

Fourier conventions
-------------------
* Minkowski sector: plane waves ``exp(-i w_k x0 + i k.x)`` with measure
  ``(2 pi)^-3 d^3k / (2 w_k)`` (the two-point function).
* Euclidean sector: ``exp(+i k.x)`` with measure ``(2 pi)^-4 d^4k``.

The Feynman kernel is ``1 / (k0^2 - |k|^2 - m^2 + i eps)``, which makes the
rotated kernel ``w(k, k4) = feynman_ft(i k4, k)`` equal to
``-1 / (k^2 + m^2)``.

Two-point weight: the positive-energy delta on the mass shell always carries
``1 / (2 w_k)``.  (Some texts write ``1 / w_k``; that normalisation is not
used here.)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (FourVector, Signature, SpatialVector, ThetaMatrix, check_mass,
                   contract, lift_array, FORWARD_CONE)
from .quadrature import Ball, IntegralResult, QuadratureSpec, integrate_1d, integrate_nd


@dataclass(frozen=True)
class Mass:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", check_mass(self.value))

    def __float__(self):
        return self.value


class Twist(enum.Enum):
    NONE = "none"
    OFF_SHELL = "offShell"
    ON_SHELL = "onShell"


@dataclass(frozen=True)
class TwistKind:
    kind: Twist = Twist.NONE
    theta: ThetaMatrix | None = None

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", Twist(self.kind))
        if self.kind is not Twist.NONE and self.theta is None:
            raise ValueError(f"twist {self.kind.value} needs a theta matrix")

    @classmethod
    def none(cls) -> TwistKind:
        return cls(Twist.NONE)

    @classmethod
    def off_shell(cls, theta: ThetaMatrix) -> TwistKind:
        return cls(Twist.OFF_SHELL, theta)

    @classmethod
    def on_shell(cls, theta: ThetaMatrix) -> TwistKind:
        return cls(Twist.ON_SHELL, theta)


def _euclid(k) -> np.ndarray:
    if isinstance(k, FourVector):
        if k.signature is not Signature.EUCLIDEAN:
            raise ValueError("expected a Euclidean four-vector")
        return k.array
    return np.asarray(k)


def _spatial(k) -> np.ndarray:
    if isinstance(k, SpatialVector):
        return k.array
    return np.asarray(k, dtype=float)


def _ksq3(k: np.ndarray):
    return k[..., 0] * k[..., 0] + k[..., 1] * k[..., 1] + k[..., 2] * k[..., 2]


def _scalar(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def schwinger_ft(k, m) -> float | np.ndarray:
    """``1 / (k^2 + m^2)`` for Euclidean ``k`` in storage order ``(k4, k1, k2, k3)``."""
    m = check_mass(float(m))
    a = _euclid(k).astype(float)
    k4 = a[..., 0]
    den = (k4 * k4 + _ksq3(a[..., 1:])) + m * m
    return _scalar(1.0 / den)


def feynman_ft(k0, kvec, m, eps: float = 0.0):
    """``1 / (k0^2 - |k|^2 - m^2 + i eps)``; ``k0`` may be complex."""
    m = check_mass(float(m))
    if eps < 0:
        raise ValueError("eps must be >= 0")
    k0 = np.asarray(k0, dtype=complex)
    ksq = _ksq3(_spatial(kvec))
    den = (k0 * k0 - ksq) - m * m + 1j * eps
    if eps == 0.0:
        onshell = np.abs(den) <= 1e-14 * (np.abs(k0 * k0) + ksq + m * m)
        if np.any(onshell):
            raise ValueError("Feynman kernel evaluated on the mass shell with eps = 0")
    return _scalar(1.0 / den)


def wick_rotation_w(kvec, k4, m):
    """Rotated Feynman kernel ``w(k, k4) = feynman_ft(i k4, k, m, 0)``.

    Real for real ``k4`` and then exactly ``-schwinger_ft``.  A complex
    ``k4 = k4' - i k0`` evaluates the kernel at ``k0 + i k4'``.
    """
    k4 = np.asarray(k4)
    val = feynman_ft(1j * k4, kvec, m, 0.0)
    if not np.iscomplexobj(k4):
        val = np.real(val)
    return _scalar(val)


def two_point_ft_weight(k, m):
    """On-shell weight ``1 / (2 w_k)`` left once the energy delta is integrated out."""
    m = check_mass(float(m))
    k = _spatial(k)
    return _scalar(1.0 / (2.0 * np.sqrt(_ksq3(k) + m * m)))


def continuation_kernel_f(x: FourVector, eta: FourVector, m, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Analytic continuation ``f(x - i eta)`` of the two-point function.

    ``(2 pi)^-3 int d^3k exp(i k.x - w_k (x4 + i x0)) / (2 w_k)`` with
    ``x4 = eta.c0``; ``eta`` must lie in the forward cone with zero spatial part.
    """
    m = check_mass(float(m))
    spec = spec or QuadratureSpec.for_dimension(3)
    if any(eta.spatial.components) or not FORWARD_CONE.contains(eta.array):
        raise ValueError("eta must be (x4, 0, 0, 0) with x4 > 0")
    x4, x0 = eta.c0, x.c0
    xs = x.spatial.array
    norm = (2 * math.pi) ** -3

    def f(k):
        w = np.sqrt(_ksq3(k) + m * m)
        return norm * np.exp(1j * (k @ xs) - w * complex(x4, x0)) / (2 * w)

    return integrate_nd(f, 3, Ball(math.inf, scale=1.0 / x4), spec)


def _proper_time(r: float, m: float, spec: QuadratureSpec) -> IntegralResult:
    # (4 pi)^-2 (2m/r) int du exp(-u - m r cosh u), from 1/(k^2+m^2) = int da exp(-a(k^2+m^2))
    z = m * r
    span = math.log(2000.0 / z) + 2.0 if z < 1000 else 3.0
    pref = (4 * math.pi) ** -2 * 2 * m / r

    def f(u):
        return np.exp(-u - z * np.cosh(u))

    res = integrate_1d(f, -span, span, spec, initial_intervals=8)
    return IntegralResult(pref * res.value, pref * res.error, res.evals, res.converged)


def _damped(rho: float, x4: float, m: float, spec: QuadratureSpec) -> IntegralResult:
    # (2 pi)^-3 int d^3k e^{i k.x} e^{-w|x4|}/(2w), angular part done analytically
    a = abs(x4)

    def f(k):
        w = np.sqrt(k * k + m * m)
        return k * k * np.sinc(k * rho / math.pi) * np.exp(-w * a) / w

    res = integrate_1d(f, 0.0, math.inf, spec)
    pref = 1.0 / (4 * math.pi ** 2)
    return IntegralResult(pref * res.value, pref * res.error, res.evals, res.converged)


def schwinger_position(x: FourVector, m, spec: QuadratureSpec | None = None) -> float:
    """Euclidean Schwinger function ``(2 pi)^-4 int d^4k e^{ikx} / (k^2 + m^2)``.

    With ``|x4| >= |x|/2`` the damped three-dimensional representation
    (energy integral done by residues) is used; closer to the ``x4 = 0``
    plane, where that representation stops converging absolutely, the
    proper-time (Bessel-type) radial integral is used instead.
    """
    m = check_mass(float(m))
    spec = spec or QuadratureSpec(rel_tol=1e-10)
    a = _euclid(x).astype(float)
    rho = float(np.sqrt(_ksq3(a[1:])))
    x4 = float(a[0])
    r = math.hypot(rho, x4)
    if r == 0.0:
        raise ValueError("Schwinger function is singular at x = 0")
    res = _damped(rho, x4, m, spec) if abs(x4) >= 0.5 * rho else _proper_time(r, m, spec)
    if not res.converged:
        raise RuntimeError(f"Schwinger function quadrature did not converge at r={r}")
    return float(np.real(res.value))


def twist_factor(k, p, twist: TwistKind, m=None):
    """Oscillating factor ``exp(-i p theta k)`` of a two-momentum kernel.

    ``k, p`` are Euclidean arrays ``(k4, k1, k2, k3)`` (broadcastable).
    Off-shell twists contract the full vectors; on-shell twists contract the
    mass-shell lifts ``(w_k, k)`` of the spatial parts, so ``k4, p4`` never
    enter.
    """
    if twist.kind is Twist.NONE:
        k, p = np.asarray(k), np.asarray(p)
        return np.ones(np.broadcast_shapes(k.shape[:-1], p.shape[:-1]), dtype=complex)
    if twist.kind is Twist.OFF_SHELL:
        return np.exp(-1j * contract(p, twist.theta, k))
    m = check_mass(float(m))
    kt = lift_array(np.real(np.asarray(k)[..., 1:]), m)
    pt = lift_array(np.real(np.asarray(p)[..., 1:]), m)
    return np.exp(-1j * contract(pt, twist.theta, kt))


def schwinger2_theta_ft(k, p, twist: TwistKind, m):
    """Twisted two-propagator kernel ``exp(-i p~ theta k~) / ((k^2+m^2)(p^2+m^2))``.

    ``twist`` none gives the plain product, off-shell the traditional
    Euclidean twist over full four-momenta, on-shell the lifted twist.
    """
    ka, pa = _euclid(k), _euclid(p)
    val = schwinger_ft(ka, m) * schwinger_ft(pa, m) * twist_factor(ka, pa, twist, m)
    return _scalar(np.asarray(val))


def _join(k4, kvec: np.ndarray) -> np.ndarray:
    k4 = np.asarray(k4)
    out = np.empty(np.broadcast_shapes(k4.shape, kvec.shape[:-1]) + (4,), np.result_type(k4, kvec))
    out[..., 0] = k4
    out[..., 1:] = kvec
    return out


def w2_theta(kvec, k4, pvec, p4, twist: TwistKind, m):
    """Product of two rotated Feynman kernels times the twist factor.

    ``k4, p4`` may be complex continuation variables; the on-shell factor
    is independent of them while the off-shell one is not.
    """
    kvec, pvec = _spatial(kvec), _spatial(pvec)
    wk = wick_rotation_w(kvec, k4, m)
    wp = wick_rotation_w(pvec, p4, m)
    k, p = _join(k4, kvec), _join(p4, pvec)
    return _scalar(np.asarray(wk * wp * twist_factor(k, p, twist, m)))


def continuation_sign(k, p, twist: TwistKind, m) -> complex:
    """Ratio ``schwinger2_theta_ft / w2_theta`` at real Euclidean momenta.

    Each rotated kernel is ``-1/(k^2+m^2)``, so the product of two carries
    ``(-1)^2`` and the ratio is ``+1`` for every twist kind.
    """
    ka, pa = _euclid(k).astype(float), _euclid(p).astype(float)
    s = schwinger2_theta_ft(ka, pa, twist, m)
    w = w2_theta(ka[1:], ka[0], pa[1:], pa[0], twist, m)
    return complex(s / w)


@dataclass(frozen=True)
class HalfLineCheck:
    closed_form: float
    quadrature: IntegralResult

    @property
    def rel_error(self) -> float:
        return abs(self.quadrature.value - self.closed_form) / abs(self.closed_form)


def half_line_identity(knorm: float, x4: float, m, spec: QuadratureSpec | None = None) -> HalfLineCheck:
    """Compare ``e^{-w x4} / (2 w)`` with ``int dk4 e^{i k4 x4} / (2 pi (k4^2 + w^2))``.

    The energy integral is oscillatory with period ``2 pi / x4`` and is
    summed over half periods with sequence acceleration.
    """
    m = check_mass(float(m))
    if not x4 > 0:
        raise ValueError("x4 must be positive")
    spec = spec or QuadratureSpec(rel_tol=1e-10)
    w2 = float(knorm) ** 2 + m * m
    w = math.sqrt(w2)

    def f(k4):
        return np.exp(1j * k4 * x4) / (2 * math.pi * (k4 * k4 + w2))

    res = integrate_1d(f, -math.inf, math.inf, spec, period=2 * math.pi / x4)
    return HalfLineCheck(math.exp(-w * x4) / (2 * w), res)
