"""Trap units, perturbations and the phase-space <-> coherent-amplitude map.

Every computation in the package runs in oscillator units (hbar = m = omega
= 1, so the oscillator length is 1).  :class:`TrapSpec` carries the physical
scales and converts on the way in and out; with its defaults it *is* the
dimensionless system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TrapSpec:
    """Harmonic trap of angular frequency ``omega`` for a particle of ``mass``.

    ``hbar`` fixes the unit system; leave it at 1 for oscillator units or set
    it to the SI value together with SI mass and frequency.
    """

    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    internal_energy: float = field(default=0.0, init=False)

    def __post_init__(self):
        for name in ("mass", "omega", "hbar"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def ell(self) -> float:
        """Oscillator length sqrt(hbar / m omega)."""
        return math.sqrt(self.hbar / (self.mass * self.omega))

    @property
    def eta(self) -> float:
        return self.ell / SQRT2

    @property
    def velocity_scale(self) -> float:
        return self.omega * self.ell

    @property
    def energy_scale(self) -> float:
        return self.hbar * self.omega

    def beta_scale(self, power: int) -> float:
        """Unit of a power-law coefficient: hbar omega / ell**power."""
        return self.energy_scale / self.ell**power

    @property
    def is_dimensionless(self) -> bool:
        return self.mass == 1.0 and self.omega == 1.0 and self.hbar == 1.0


DIMENSIONLESS = TrapSpec()


@dataclass(frozen=True)
class PhaseSpacePoint:
    x: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.v)):
            raise ValueError("phase-space point must be finite")


@dataclass(frozen=True)
class PolyPotential:
    """Perturbing potential sum_k c_k x**k, stored as ``{power: coefficient}``.

    Coefficients are in oscillator units.  This is the form the classical
    engines consume; :class:`PowerLawPerturbation` is the public single-term
    case and the Gaussian-averaged cubic adds a linear term.
    """

    terms: Mapping[int, float]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, c in self.terms.items():
            out = out + c * x**k
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, c in self.terms.items():
            if k:
                out = out + k * c * x ** (k - 1)
        return out

    def scaled(self, factor: float) -> "PolyPotential":
        return PolyPotential({k: factor * c for k, c in self.terms.items()})

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.terms.values())


@dataclass(frozen=True)
class PowerLawPerturbation:
    """V(x) = beta * x**power, with beta in units of hbar omega / ell**power."""

    power: int
    beta: float

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 3:
            raise ValueError(f"power must be an integer >= 3, got {self.power!r}")
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")

    @property
    def closed_form_supported(self) -> bool:
        return 3 <= self.power <= 6

    def dimensionless_beta(self, trap: TrapSpec = DIMENSIONLESS) -> float:
        return self.beta / trap.beta_scale(self.power)

    def as_poly(self, trap: TrapSpec = DIMENSIONLESS) -> PolyPotential:
        return PolyPotential({self.power: self.dimensionless_beta(trap)})

    def __call__(self, x):
        return self.beta * np.asarray(x, dtype=float) ** self.power


def as_poly(pert, trap: TrapSpec = DIMENSIONLESS) -> PolyPotential:
    """Normalize any supported perturbation description to oscillator units."""
    if isinstance(pert, PolyPotential):
        return pert
    if isinstance(pert, PowerLawPerturbation):
        return pert.as_poly(trap)
    raise TypeError(f"unsupported perturbation type {type(pert).__name__}")


def alpha_from_phase_space(p: PhaseSpacePoint, trap: TrapSpec = DIMENSIONLESS) -> complex:
    """Coherent amplitude (x + i v / omega) / (sqrt(2) ell)."""
    return complex(p.x, p.v / trap.omega) / (SQRT2 * trap.ell)


def phase_space_from_alpha(alpha: complex, trap: TrapSpec = DIMENSIONLESS) -> PhaseSpacePoint:
    alpha = complex(alpha)
    scale = SQRT2 * trap.ell
    return PhaseSpacePoint(scale * alpha.real, scale * trap.omega * alpha.imag)
