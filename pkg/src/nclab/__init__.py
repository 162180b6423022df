"""Numerics for free scalar field kernels on commutative and noncommutative
spacetime: Wick rotation, boundary values, twisted products and loop scans."""

__version__ = "0.1.0"

from .core import (Cone, FORWARD_CONE, FourVector, MassShellVector, Signature, SpatialVector,
                   ThetaMatrix, mass_shell_lift, theta_standard, twist_phase)
from .quadrature import Ball, Box, IntegralResult, QuadratureSpec, integrate_1d, integrate_nd, regulate

__all__ = [
    "Cone", "FORWARD_CONE", "FourVector", "MassShellVector", "Signature", "SpatialVector",
    "ThetaMatrix", "mass_shell_lift", "theta_standard", "twist_phase",
    "Ball", "Box", "IntegralResult", "QuadratureSpec", "integrate_1d", "integrate_nd", "regulate",
]
