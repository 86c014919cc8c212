"""Coulomb-gas formulas relating parafermion spins to conformal data."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "CoulombGas",
    "central_charge",
    "conformal_weight",
    "c_regime34",
    "sle_c_of_s",
    "spin_from_boundary_weight",
    "dense_coupling",
    "dilute_coupling",
    "regime34_coupling",
]


def _check_g(g: float) -> None:
    if not g > 0:
        raise ValueError(f"coupling must be positive, got {g}")


def central_charge(g: float) -> float:
    """``c = 1 - 6 (1 - g)^2 / g``."""
    _check_g(g)
    return 1 - 6 * (1 - g) ** 2 / g


def conformal_weight(g: float, r: int, rp: int) -> float:
    """``h_{r,r'} = ((g r - r')^2 - (1 - g)^2) / (4 g)``."""
    _check_g(g)
    return ((g * r - rp) ** 2 - (1 - g) ** 2) / (4 * g)


@dataclass(frozen=True)
class CoulombGas:
    """Free-field description with coupling ``g > 0``."""

    g: float

    def __post_init__(self) -> None:
        _check_g(self.g)

    @property
    def c(self) -> float:
        return central_charge(self.g)

    def h(self, r: int, rp: int) -> float:
        return conformal_weight(self.g, r, rp)


def c_regime34(gp: float) -> float:
    """Central charge ``3/2 - 6 (1 - g')^2 / g'`` of the dilute model for ``-pi < eta < 0``."""
    _check_g(gp)
    return 1.5 - 6 * (1 - gp) ** 2 / gp


def sle_c_of_s(s: float) -> float:
    """Central charge ``2 s (5 - 8 s) / (2 s + 1)`` implied by spin ``s`` for a simple SLE curve.

    Raises:
        ZeroDivisionError: at the pole ``s = -1/2``.
    """
    if 2 * s + 1 == 0:
        raise ZeroDivisionError("sle_c_of_s has a pole at s = -1/2")
    return 2 * s * (5 - 8 * s) / (2 * s + 1)


def spin_from_boundary_weight(N: int, kappa: float) -> float:
    """``s = h_{N+1,1} = N (2N + 4 - kappa) / (2 kappa)`` for ``N`` strands from the origin."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return N * (2 * N + 4 - kappa) / (2 * kappa)


def dense_coupling(gamma: float) -> float:
    """``g = 1 - gamma / pi`` for ``sqrt(Q) = 2 cos gamma``."""
    return 1 - gamma / math.pi


def dilute_coupling(eta: float) -> float:
    """``g = 2 eta / pi`` for ``n = -2 cos 2 eta``."""
    return 2 * eta / math.pi


def regime34_coupling(eta: float) -> float:
    """``g' = 2 (pi + eta) / pi``."""
    return 2 * (math.pi + eta) / math.pi
