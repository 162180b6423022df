"""Signature-aware vectors, the mass-shell lift, twist phases and cones.

Storage convention: every four-vector is stored as ``(c0, c1, c2, c3)``.
For Minkowski vectors ``c0`` is the time/energy component; for Euclidean
vectors ``c0`` is the fourth Euclidean direction ``x4`` and the display
order is ``(x1, x2, x3, x4)``.  Twist contractions ``p theta k`` always
sum ``p[mu] * theta[mu, nu] * k[nu]`` over storage indices, with no metric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


class Signature(enum.Enum):
    MINKOWSKI = "minkowski"
    EUCLIDEAN = "euclidean"


def _finite_tuple(values, n: int) -> tuple:
    vals = tuple(float(v) for v in values)
    if len(vals) != n:
        raise ValueError(f"expected {n} components, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError(f"non-finite component in {vals}")
    return vals


@dataclass(frozen=True)
class SpatialVector:
    components: tuple

    def __init__(self, *components):
        if len(components) == 1 and np.ndim(components[0]) == 1:
            components = tuple(components[0])
        object.__setattr__(self, "components", _finite_tuple(components, 3))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.components)

    def dot(self, other: SpatialVector) -> float:
        a, b = self.components, other.components
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

    def norm2(self) -> float:
        return self.dot(self)

    def __add__(self, other: SpatialVector) -> SpatialVector:
        return SpatialVector(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: SpatialVector) -> SpatialVector:
        return SpatialVector(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> SpatialVector:
        return SpatialVector(*(-a for a in self.components))

    def __iter__(self):
        return iter(self.components)


@dataclass(frozen=True)
class FourVector:
    c0: float
    spatial: SpatialVector
    signature: Signature = Signature.MINKOWSKI

    def __post_init__(self):
        (c0,) = _finite_tuple([self.c0], 1)
        object.__setattr__(self, "c0", c0)
        if not isinstance(self.spatial, SpatialVector):
            object.__setattr__(self, "spatial", SpatialVector(*self.spatial))

    @classmethod
    def minkowski(cls, x0, x1, x2, x3) -> FourVector:
        return cls(x0, SpatialVector(x1, x2, x3), Signature.MINKOWSKI)

    @classmethod
    def euclidean(cls, x1, x2, x3, x4) -> FourVector:
        """Build from display order ``(x1, x2, x3, x4)``."""
        return cls(x4, SpatialVector(x1, x2, x3), Signature.EUCLIDEAN)

    @classmethod
    def from_array(cls, arr, signature: Signature) -> FourVector:
        a = np.asarray(arr, dtype=float)
        return cls(a[0], SpatialVector(a[1], a[2], a[3]), signature)

    @property
    def array(self) -> np.ndarray:
        return np.array((self.c0,) + self.spatial.components)

    @property
    def components(self) -> tuple:
        return (self.c0,) + self.spatial.components

    def dot(self, other: FourVector) -> float:
        if self.signature is not other.signature:
            raise ValueError("product between vectors of different signature")
        if self.signature is Signature.MINKOWSKI:
            return self.c0 * other.c0 - self.spatial.dot(other.spatial)
        return self.c0 * other.c0 + self.spatial.dot(other.spatial)

    def square(self) -> float:
        """``k.k``; for Euclidean vectors computed as ``k4^2 + |k|^2``."""
        return self.dot(self)

    def __neg__(self) -> FourVector:
        return FourVector(-self.c0, -self.spatial, self.signature)

    def __add__(self, other: FourVector) -> FourVector:
        if self.signature is not other.signature:
            raise ValueError("sum of vectors of different signature")
        return FourVector(self.c0 + other.c0, self.spatial + other.spatial, self.signature)

    def __sub__(self, other: FourVector) -> FourVector:
        return self + (-other)

    def __str__(self) -> str:
        s = self.spatial.components
        if self.signature is Signature.EUCLIDEAN:
            return f"E({s[0]:g}, {s[1]:g}, {s[2]:g}; x4={self.c0:g})"
        return f"M({self.c0:g}; {s[0]:g}, {s[1]:g}, {s[2]:g})"


def check_mass(m) -> float:
    m = float(m)
    if not (m > 0 and math.isfinite(m)):
        raise ValueError(f"mass must be positive and finite, got {m}")
    return m


@dataclass(frozen=True)
class MassShellVector:
    omega: float
    spatial: SpatialVector
    mass: float

    def __post_init__(self):
        check_mass(self.mass)
        scale = self.omega ** 2
        if abs(self.omega ** 2 - self.spatial.norm2() - self.mass ** 2) > 1e-12 * scale:
            raise ValueError("vector is not on the mass shell")
        if self.omega < self.mass:
            raise ValueError("on-shell energy below the mass")

    @property
    def array(self) -> np.ndarray:
        return np.array((self.omega,) + self.spatial.components)

    def as_four_vector(self) -> FourVector:
        return FourVector(self.omega, self.spatial, Signature.MINKOWSKI)


def omega(k, m):
    """Vectorised on-shell energy ``sqrt(|k|^2 + m^2)`` over the last axis."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(np.sum(k * k, axis=-1) + m * m)


def mass_shell_lift(k: SpatialVector, m) -> MassShellVector:
    m = check_mass(m)
    if not isinstance(k, SpatialVector):
        k = SpatialVector(*k)
    return MassShellVector(math.sqrt(k.norm2() + m * m), k, m)


def lift_array(k, m) -> np.ndarray:
    """Stack ``(omega_k, k)`` for an array of spatial momenta of shape (..., 3)."""
    k = np.asarray(k, dtype=float)
    return np.concatenate([omega(k, m)[..., None], k], axis=-1)


@dataclass(frozen=True, eq=False)
class ThetaMatrix:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.shape != (4, 4):
            raise ValueError("theta must be 4x4")
        if not np.all(np.isfinite(a)):
            raise ValueError("theta has non-finite entries")
        if not np.array_equal(a.T, -a):
            raise ValueError("theta must be exactly antisymmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_nearly_antisymmetric(cls, a, tol: float = 1e-14) -> ThetaMatrix:
        a = np.asarray(a, dtype=float)
        if np.max(np.abs(a + a.T)) > tol * max(1.0, np.max(np.abs(a))):
            raise ValueError("theta is not antisymmetric within tolerance")
        return cls(0.5 * (a - a.T))

    @property
    def det(self) -> float:
        # Pfaffian squared, exact for antisymmetric 4x4
        t = self.entries
        pf = t[0, 1] * t[2, 3] - t[0, 2] * t[1, 3] + t[0, 3] * t[1, 2]
        return pf * pf

    @property
    def nondegenerate(self) -> bool:
        return self.det != 0.0

    @property
    def is_block_form(self) -> bool:
        t = self.entries
        return t[0, 2] == t[0, 3] == t[1, 2] == t[1, 3] == 0.0

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.entries))

    def __eq__(self, other):
        return isinstance(other, ThetaMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"ThetaMatrix({self.entries.tolist()})"


def theta_standard(lambda1: float, lambda2: float) -> ThetaMatrix:
    t = np.zeros((4, 4))
    t[0, 1], t[1, 0] = lambda1, -lambda1
    t[2, 3], t[3, 2] = lambda2, -lambda2
    return ThetaMatrix(t)


def _real_or_complex(a) -> np.ndarray:
    a = np.asarray(a)
    return a if np.iscomplexobj(a) else a.astype(float)


def contract(p, theta: ThetaMatrix, k) -> np.ndarray:
    """``sum p[mu] theta[mu,nu] k[nu]`` over the last axis, broadcasting.

    Summed as ``theta[mu,nu] * (p[mu] k[nu] - p[nu] k[mu])`` over ``mu < nu``
    so that swapping ``p`` and ``k`` flips the sign exactly.
    """
    p, k = _real_or_complex(p), _real_or_complex(k)
    t = theta.entries
    out = np.zeros(np.broadcast_shapes(p.shape[:-1], k.shape[:-1]))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            if t[mu, nu] != 0.0:
                out = out + t[mu, nu] * (p[..., mu] * k[..., nu] - p[..., nu] * k[..., mu])
    return out


def contract_exact(p, theta: ThetaMatrix, k) -> Fraction:
    """Exact rational contraction of float (or Fraction) components."""
    t = theta.entries
    total = Fraction(0)
    for mu in range(4):
        for nu in range(4):
            if t[mu, nu] != 0.0:
                total += Fraction(p[mu]) * Fraction(t[mu, nu]) * Fraction(k[nu])
    return total


def _components(v) -> tuple:
    if isinstance(v, (FourVector, MassShellVector)):
        return tuple(v.array)
    return tuple(np.asarray(v, dtype=float))


def twist_phase(p, k, theta: ThetaMatrix, scale: float = 1.0) -> float:
    """Return ``scale * p theta k``.

    ``scale=0.5`` is the Moyal product phase, ``scale=1`` the phase of the
    twisted tensor product of two-point functions.
    """
    if isinstance(p, FourVector) and isinstance(k, FourVector) and p.signature is not k.signature:
        raise ValueError("twist phase between vectors of different signature")
    pc, kc = _components(p), _components(k)
    return scale * float(contract(pc, theta, kc))


@dataclass(frozen=True)
class Cone:
    """Open cone ``{y : y.a > |y| cos(angle)}`` in R^4 (canonical product)."""

    axis: tuple
    opening_angle: float

    def __init__(self, axis, opening_angle: float):
        a = np.asarray(axis.array if isinstance(axis, FourVector) else axis, dtype=float)
        n = float(np.linalg.norm(a))
        if n == 0.0:
            raise ValueError("cone axis must be nonzero")
        if not 0.0 < opening_angle < math.pi / 2:
            raise ValueError("opening angle must lie in (0, pi/2)")
        object.__setattr__(self, "axis", tuple(a / n))
        object.__setattr__(self, "opening_angle", float(opening_angle))

    def contains(self, y) -> bool | np.ndarray:
        y = np.asarray(y.array if isinstance(y, FourVector) else y, dtype=float)
        proj = y @ np.asarray(self.axis)
        res = proj > np.linalg.norm(y, axis=-1) * math.cos(self.opening_angle)
        return bool(res) if res.ndim == 0 else res

    def dual(self) -> Cone:
        return Cone(self.axis, math.pi / 2 - self.opening_angle)


FORWARD_CONE = Cone((1.0, 0.0, 0.0, 0.0), math.pi / 4)
