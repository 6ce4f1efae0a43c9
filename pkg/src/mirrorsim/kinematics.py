"""Units, constants and elastic-collision kinematics shared by every other module.

Two unit systems are supported: SI (CODATA constants) and "natural" units
with hbar = m = 1, which is what the dimensionless scenario presets use.
All functions are unit-system agnostic given consistent inputs.

The mirror is treated as a perfectly reflecting hard wall (the infinite
reflectivity limit of a delta-function barrier); finite reflectivity is
out of scope and never appears as a runtime parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SI_H = 6.62607015e-34        # Planck constant, J s (exact)
SI_HBAR = SI_H / (2.0 * math.pi)
SI_KB = 1.380649e-23         # Boltzmann constant, J/K (exact)


class ApproximationWarning(UserWarning):
    """A closed-form approximation was evaluated outside its stated regime."""


@dataclass(frozen=True)
class PhysicalParams:
    """Masses, initial velocities and constants of one particle-mirror system.

    ``v`` is the particle velocity and ``V`` the mirror velocity; reflection
    requires v > V (the particle must catch up with the mirror).
    """

    m: float
    M: float
    v: float
    V: float
    hbar: float = SI_HBAR
    kB: float = SI_KB

    def __post_init__(self):
        if not (self.m > 0 and self.M > 0):
            raise ValueError("masses must be positive")
        if not (self.hbar > 0 and self.kB > 0):
            raise ValueError("constants must be positive")
        if not self.v > self.V:
            raise ValueError("no reflection: particle velocity must exceed mirror velocity")

    @classmethod
    def natural(cls, M: float, v: float, V: float, m: float = 1.0) -> "PhysicalParams":
        """Parameters in natural units (hbar = kB = 1)."""
        return cls(m=m, M=M, v=v, V=V, hbar=1.0, kB=1.0)

    @property
    def k(self) -> float:
        """Incident particle wavevector m*v/hbar."""
        return self.m * self.v / self.hbar

    @property
    def K(self) -> float:
        """Incident mirror wavevector M*V/hbar."""
        return self.M * self.V / self.hbar


@dataclass(frozen=True)
class CmRelParams:
    """Centre-of-mass / relative-coordinate view of a wavevector pair."""

    M_tot: float
    mu: float
    K_cm: float
    K_rel: float
    hbar: float = SI_HBAR

    @property
    def E_cm(self) -> float:
        return (self.hbar * self.K_cm) ** 2 / (2.0 * self.M_tot)

    @property
    def E_rel(self) -> float:
        return (self.hbar * self.K_rel) ** 2 / (2.0 * self.mu)


def elastic_final_velocities(p: PhysicalParams) -> tuple[float, float]:
    """Post-collision velocities of a 1D elastic reflection.

    Returns (v_f, V_f) satisfying conservation of momentum and kinetic
    energy. Raises for v <= V, where no collision occurs (enforced by
    PhysicalParams, kept here for direct callers).
    """
    if not p.v > p.V:
        raise ValueError("no reflection: particle velocity must exceed mirror velocity")
    s = p.m + p.M
    v_f = ((p.m - p.M) * p.v + 2.0 * p.M * p.V) / s
    V_f = ((p.M - p.m) * p.V + 2.0 * p.m * p.v) / s
    return v_f, V_f


def to_cm_rel(p: PhysicalParams, k: float, K: float) -> CmRelParams:
    """Transform a particle-mirror wavevector pair to cm/rel coordinates."""
    M_tot = p.m + p.M
    return CmRelParams(
        M_tot=M_tot,
        mu=p.m * p.M / M_tot,
        K_cm=k + K,
        K_rel=(p.M * k - p.m * K) / M_tot,
        hbar=p.hbar,
    )


def from_cm_rel(p: PhysicalParams, cm: CmRelParams) -> tuple[float, float]:
    """Inverse of :func:`to_cm_rel`; returns the (k, K) pair."""
    k = p.m * cm.K_cm / cm.M_tot + cm.K_rel
    K = p.M * cm.K_cm / cm.M_tot - cm.K_rel
    return k, K


def thermal_spread(M: float, T: float, *, kB: float = SI_KB, h: float = SI_H) -> tuple[float, float]:
    """Thermal velocity spread and coherence length of a mass in equilibrium.

    Returns (dV, l_c) with dV = sqrt(2 kB T / M) and l_c = h / sqrt(2 M kB T).
    """
    if not T > 0:
        raise ValueError("temperature must be positive")
    if not M > 0:
        raise ValueError("mass must be positive")
    dV = math.sqrt(2.0 * kB * T / M)
    l_c = h / math.sqrt(2.0 * M * kB * T)
    return dV, l_c


def coherence_length(lam: float, V: float, dV: float) -> float:
    """Longitudinal coherence length lam * V / dV of a moving wavegroup."""
    if not dV > 0:
        raise ValueError("velocity spread must be positive")
    return lam * V / dV
