"""Twisted products at plane-wave and packet level, Wick-pairing
combinatorics, and the on-shell twisted n-point kernels.

Plane-wave phases are tracked as exact rationals (every float is a dyadic
rational), so associativity of the off-shell product is checked with zero
rounding.  On-shell phases involve square roots and are computed in floating
point from the mass-shell lifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import (FourVector, Signature, SpatialVector, ThetaMatrix, check_mass,
                   contract, contract_exact, lift_array, mass_shell_lift, twist_phase)
from .kernels import Twist, TwistKind, schwinger2_theta_ft, two_point_ft_weight
from .quadrature import Box, QuadratureSpec, integrate_nd
from .schwartz import EUCLIDEAN, GaussianPacket, fourier


# --------------------------------------------------------------------------
# plane waves

@dataclass(frozen=True)
class PlaneWaveLabel:
    """Plane wave ``coefficient * exp(i phase) * exp(-i k.x)``.

    ``phase`` is kept separately as an exact rational so products never
    round.  On-shell labels store a spatial momentum and a mass.
    """

    momentum: tuple
    coefficient: complex = 1.0
    phase: Fraction = Fraction(0)
    mass: float | None = None

    def __post_init__(self):
        mom = self.momentum
        if isinstance(mom, FourVector):
            mom = mom.components
        elif isinstance(mom, SpatialVector):
            mom = mom.components
        mom = tuple(Fraction(c) for c in mom)
        if self.mass is None and len(mom) != 4:
            raise ValueError("off-shell labels carry four momentum components")
        if self.mass is not None:
            check_mass(self.mass)
            if len(mom) != 3:
                raise ValueError("on-shell labels carry three spatial components")
        object.__setattr__(self, "momentum", mom)
        object.__setattr__(self, "phase", Fraction(self.phase))
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def on_shell(self) -> bool:
        return self.mass is not None

    def value(self) -> complex:
        return self.coefficient * complex(math.cos(self.phase), math.sin(self.phase))

    def lift(self) -> np.ndarray:
        if not self.on_shell:
            raise ValueError("only on-shell labels are lifted")
        return mass_shell_lift(SpatialVector(*map(float, self.momentum)), self.mass).array


def moyal_star_planewave(k: PlaneWaveLabel, p: PlaneWaveLabel, theta: ThetaMatrix) -> PlaneWaveLabel:
    """``e_k * e_p = exp(-(i/2) p theta k) e_{k+p}`` with exact phase bookkeeping."""
    if k.on_shell or p.on_shell:
        raise ValueError("the Moyal product acts on off-shell four-momentum labels")
    phase = k.phase + p.phase - contract_exact(p.momentum, theta, k.momentum) / 2
    mom = tuple(a + b for a, b in zip(k.momentum, p.momentum))
    return PlaneWaveLabel(mom, k.coefficient * p.coefficient, phase)


def onshell_star_planewave(a, b, m, theta: ThetaMatrix, scale: float = 1.0):
    """On-shell twisted product of two plane waves with spatial labels.

    Returns ``(a + b, -scale * a~ theta b~)`` with ``~`` the mass-shell lift.
    """
    a = a if isinstance(a, SpatialVector) else SpatialVector(*a)
    b = b if isinstance(b, SpatialVector) else SpatialVector(*b)
    la, lb = mass_shell_lift(a, m), mass_shell_lift(b, m)
    return a + b, -twist_phase(la.array, lb.array, theta, scale)


def associativity_defect(a, b, c, m, theta: ThetaMatrix, scale: float = 1.0) -> float:
    """``|phase((a*b)*c) - phase(a*(b*c))|`` for the on-shell product.

    Composite labels are re-lifted, i.e. ``(a+b)~ = (w_{a+b}, a+b)``, which
    differs from ``a~ + b~``; that difference is the whole defect.
    """
    ab, ph_ab = onshell_star_planewave(a, b, m, theta, scale)
    _, ph_ab_c = onshell_star_planewave(ab, c, m, theta, scale)
    bc, ph_bc = onshell_star_planewave(b, c, m, theta, scale)
    _, ph_a_bc = onshell_star_planewave(a, bc, m, theta, scale)
    return abs((ph_ab + ph_ab_c) - (ph_bc + ph_a_bc))


def associativity_defect_offshell(k, p, q, theta: ThetaMatrix) -> Fraction:
    """Exact phase difference ``(k*p)*q - k*(p*q)`` for the Moyal product."""
    labels = [x if isinstance(x, PlaneWaveLabel) else PlaneWaveLabel(x) for x in (k, p, q)]
    left = moyal_star_planewave(moyal_star_planewave(labels[0], labels[1], theta), labels[2], theta)
    right = moyal_star_planewave(labels[0], moyal_star_planewave(labels[1], labels[2], theta), theta)
    return abs(left.phase - right.phase)


# --------------------------------------------------------------------------
# Moyal product of Gaussian packets

def _block_integral(fh: GaussianPacket, g: GaussianPacket, x, axes, lam: float,
                    spec: QuadratureSpec) -> complex:
    """``int dk_a dk_b f~(k) e^{-i k.x} g(x + theta k / 2)`` restricted to one 2D block.

    ``fh`` carries the per-axis factors of ``(2 pi)^-4 FT_E f``; amplitudes
    are applied by the caller.
    """
    a, b = axes
    lo = np.array([fh.center[a] - 9 * fh.width[a], fh.center[b] - 9 * fh.width[b]])
    hi = np.array([fh.center[a] + 9 * fh.width[a], fh.center[b] + 9 * fh.width[b]])

    def h(k):
        ka, kb = k[:, 0], k[:, 1]
        ya = x[a] + 0.5 * lam * kb
        yb = x[b] - 0.5 * lam * ka
        return (fh.axis_factor(a, ka) * fh.axis_factor(b, kb) * np.exp(-1j * (ka * x[a] + kb * x[b]))
                * g.axis_factor(a, ya) * g.axis_factor(b, yb))

    return integrate_nd(h, 2, Box(lo, hi), spec).value


def moyal_star_packet(f: GaussianPacket, g: GaussianPacket, theta: ThetaMatrix,
                      spec: QuadratureSpec | None = None) -> Callable:
    """Evaluator ``x -> (f * g)(x)`` for the Moyal product of two packets.

    ``(f*g)(x) = int d^4k f~(k) e^{-ikx} g(x + theta k / 2)`` with
    ``f~ = (2 pi)^-4 FT f``.  With ``theta`` in block form the 4D integral
    factorises into two independent 2D integrals over the (0,1) and (2,3)
    planes.
    """
    if not theta.is_block_form:
        raise ValueError("packet star product needs theta in block form")
    spec = spec or QuadratureSpec(rel_tol=1e-10, abs_tol=1e-300)
    fh = fourier(f, EUCLIDEAN).scaled((2 * math.pi) ** -4)
    lam01, lam23 = theta.entries[0, 1], theta.entries[2, 3]
    amp = fh.amplitude * g.amplitude

    def evaluate(x) -> complex:
        x = np.asarray(x, dtype=float)
        i01 = _block_integral(fh, g, x, (0, 1), lam01, spec)
        i23 = _block_integral(fh, g, x, (2, 3), lam23, spec)
        return complex(amp * i01 * i23)

    return evaluate


# --------------------------------------------------------------------------
# Wick pairings and twisted n-point kernels

@dataclass(frozen=True)
class WickPairing:
    pairs: tuple

    def __post_init__(self):
        pairs = tuple(tuple(p) for p in self.pairs)
        flat = sorted(i for p in pairs for i in p)
        if flat != list(range(1, 2 * len(pairs) + 1)):
            raise ValueError("pairing is not a perfect matching of 1..2n")
        if any(i >= j for i, j in pairs):
            raise ValueError("pairs must be ordered with i < j")
        object.__setattr__(self, "pairs", tuple(sorted(pairs)))

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)


def _matchings(items: tuple):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for idx, partner in enumerate(rest):
        for tail in _matchings(rest[:idx] + rest[idx + 1:]):
            yield ((first, partner),) + tail


def wick_pairings(n2: int) -> list:
    """All perfect matchings of ``1..n2`` in lexicographic order; empty for odd ``n2``."""
    if n2 < 0 or n2 > 12:
        raise ValueError("n2 must lie in 0..12")
    if n2 % 2:
        return []
    return [WickPairing(p) for p in _matchings(tuple(range(1, n2 + 1)))]


@dataclass(frozen=True, eq=False)
class TwistAssignment:
    """Antisymmetric integer matrix ``sigma`` weighting the pairwise twists."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("sigma must be square")
        if not np.issubdtype(s.dtype, np.integer):
            if not np.all(s == np.round(s)):
                raise ValueError("sigma must be integer valued")
            s = s.astype(int)
        if not np.array_equal(s.T, -s):
            raise ValueError("sigma must be antisymmetric")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def untwisted(cls, n: int) -> TwistAssignment:
        return cls(np.zeros((n, n), dtype=int))

    @classmethod
    def full(cls, n: int) -> TwistAssignment:
        """Default model: every ordered pair of contraction momenta twisted once."""
        s = np.triu(np.ones((n, n), dtype=int), 1)
        return cls(s - s.T)


@dataclass(frozen=True)
class NPointKernel:
    weight: float
    phase: float

    @property
    def value(self) -> complex:
        return self.weight * complex(math.cos(self.phase), math.sin(self.phase))

    def __call__(self, positions=None) -> complex:
        """Plane-wave integrand value; positions are ignored (momentum-space kernel)."""
        return self.value


def assemble_npoint_ft(pairing: WickPairing, momenta: Sequence, m, assignment: TwistAssignment,
                       theta: ThetaMatrix) -> NPointKernel:
    """Weight-and-phase of one pairing's contribution.

    The weight is ``prod_a 1/(2 w_{k_a})``; the phase is
    ``-sum_{a<b} sigma_ab (k~_b theta k~_a)``, so two pairs with
    ``sigma_12 = 1`` give ``exp(-i p~ theta k~)`` for momenta ``[k, p]``.
    """
    m = check_mass(float(m))
    if len(momenta) != pairing.n_pairs:
        raise ValueError("one momentum per pair required")
    if assignment.n != pairing.n_pairs:
        raise ValueError("assignment size does not match the number of pairs")
    ks = [k.array if isinstance(k, SpatialVector) else np.asarray(k, dtype=float) for k in momenta]
    weight = math.prod(float(two_point_ft_weight(k, m)) for k in ks)
    lifts = [lift_array(k, m) for k in ks]
    total = math.fsum(
        assignment.sigma[a, b] * float(contract(lifts[b], theta, lifts[a]))
        for a in range(len(ks)) for b in range(a + 1, len(ks)) if assignment.sigma[a, b]
    )
    return NPointKernel(weight, -total)


def reflection_defect_ft(k, p, twist: TwistKind, m) -> float:
    """``|S2(k, p) - S2(-k, -p)|`` for the twisted two-propagator kernel."""
    ka = k.array if isinstance(k, FourVector) else np.asarray(k, dtype=float)
    pa = p.array if isinstance(p, FourVector) else np.asarray(p, dtype=float)
    for v in (k, p):
        if isinstance(v, FourVector) and v.signature is not Signature.EUCLIDEAN:
            raise ValueError("expected Euclidean momenta")
    a = schwinger2_theta_ft(ka, pa, twist, m)
    b = schwinger2_theta_ft(-ka, -pa, twist, m)
    return float(abs(a - b))


__all__ = [
    "PlaneWaveLabel", "moyal_star_planewave", "onshell_star_planewave", "associativity_defect",
    "associativity_defect_offshell", "moyal_star_packet", "WickPairing", "wick_pairings",
    "TwistAssignment", "NPointKernel", "assemble_npoint_ft", "reflection_defect_ft", "Twist",
]
