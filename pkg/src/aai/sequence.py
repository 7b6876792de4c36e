"""Interferometer description and the phase assembly shared by every method.

The two-arm phase has the same algebraic form whether the trajectory data
come from classical mechanics or from quantum expectation values; only the
inputs differ.  :func:`assemble_phase` is that form, and each method supplies
an :class:`ArmTrack` per arm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import PacketGapTooLarge
from .units import DIMENSIONLESS, SQRT2, PhaseSpacePoint, TrapSpec


@dataclass(frozen=True)
class Stage:
    """An extra kick pair followed by a hold, inserted before recombination."""

    kappa_a: float
    kappa_b: float
    hold: float


@dataclass(frozen=True)
class InterferometerSequence:
    """Split, hold for ``hold``, (optional stages), recombine, with laser phase ``xi``.

    Wavenumbers are in inverse length units, times in the trap's time units;
    ``xi`` is the recombination laser phase xi_b - xi_a in radians and enters
    once, at the final pulse.
    """

    initial: PhaseSpacePoint
    kappa_ai: float
    kappa_bi: float
    hold: float
    kappa_af: float
    kappa_bf: float
    xi: float = 0.0
    stages: tuple = ()

    def __post_init__(self):
        if not self.hold > 0:
            raise ValueError("hold time must be positive")
        values = (self.kappa_ai, self.kappa_bi, self.kappa_af, self.kappa_bf, self.xi)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("kicks and laser phase must be finite")
        object.__setattr__(self, "stages", tuple(self.stages))
        for st in self.stages:
            if not st.hold > 0:
                raise ValueError("stage hold time must be positive")

    @classmethod
    def symmetric(cls, amplitude: float, hold: float, trap: TrapSpec = DIMENSIONLESS,
                  xi: float = 0.0, x_i: float = 0.0, v_i: float = 0.0):
        """kappa_ai = kappa_af = -kappa_bi = -kappa_bf = m omega A / hbar."""
        kappa = trap.mass * trap.omega * amplitude / trap.hbar
        return cls(PhaseSpacePoint(x_i, v_i), kappa, -kappa, hold, kappa, -kappa, xi)

    def with_xi(self, xi: float) -> "InterferometerSequence":
        return InterferometerSequence(self.initial, self.kappa_ai, self.kappa_bi, self.hold,
                                      self.kappa_af, self.kappa_bf, xi, self.stages)

    def dimensionless(self, trap: TrapSpec) -> "InterferometerSequence":
        if trap.is_dimensionless:
            return self
        ell, w = trap.ell, trap.omega
        return InterferometerSequence(
            PhaseSpacePoint(self.initial.x / ell, self.initial.v / (w * ell)),
            self.kappa_ai * ell, self.kappa_bi * ell, self.hold * w,
            self.kappa_af * ell, self.kappa_bf * ell, self.xi,
            tuple(Stage(s.kappa_a * ell, s.kappa_b * ell, s.hold * w) for s in self.stages),
        )

    def arm_schedule(self, arm: str):
        """[(kick, hold), ...] for one arm, excluding the recombination kick."""
        if arm == "a":
            first, last = self.kappa_ai, self.kappa_af
            extra = [(s.kappa_a, s.hold) for s in self.stages]
        elif arm == "b":
            first, last = self.kappa_bi, self.kappa_bf
            extra = [(s.kappa_b, s.hold) for s in self.stages]
        else:
            raise ValueError(f"arm must be 'a' or 'b', got {arm!r}")
        return [(first, self.hold)] + extra, last

    @property
    def total_time(self) -> float:
        return self.hold + sum(s.hold for s in self.stages)


@dataclass(frozen=True)
class ArmTrack:
    """Final-time trajectory data of one arm, in oscillator units.

    ``x0, v0`` are the unperturbed values, ``x1, v1`` the first-order shifts,
    and ``potential_integral`` is the time integral of the perturbation felt
    by the arm (V along the classical path, or its quantum expectation).
    """

    x0: float
    v0: float
    x1: float
    v1: float
    potential_integral: float

    @property
    def x(self) -> float:
        return self.x0 + self.x1

    @property
    def v(self) -> float:
        return self.v0 + self.v1


@dataclass
class PhaseReport:
    method: str
    theta_total: float
    theta0: float
    theta1: float
    propagation: float
    laser: float
    separation: float
    gap: float
    visibility: float = 1.0
    extras: dict = field(default_factory=dict)

    @property
    def population(self) -> float:
        return 0.5 * (1.0 + self.visibility * math.cos(self.theta_total))

    def as_row(self) -> dict:
        return {
            "method": self.method,
            "theta_total": self.theta_total,
            "theta0": self.theta0,
            "theta1": self.theta1,
            "propagation": self.propagation,
            "laser": self.laser,
            "separation": self.separation,
            "gap": self.gap,
            "population": self.population,
            "visibility": self.visibility,
        }


def packet_gap(xa: float, va: float, xb: float, vb: float, kaf: float, kbf: float) -> float:
    """|alpha_af - alpha_bf| for final (x, v) plus recombination kicks."""
    return abs(complex(xa - xb, (va + kaf) - (vb + kbf))) / SQRT2


def laser_and_separation(seq: InterferometerSequence, xa, va, xb, vb):
    """Laser and separation phase differences at the final pulse (oscillator units)."""
    xi0 = seq.initial.x
    laser = seq.xi + (seq.kappa_bi - seq.kappa_ai) * xi0 + seq.kappa_bf * xb - seq.kappa_af * xa
    sep = -0.5 * (va + seq.kappa_af + vb + seq.kappa_bf) * (xb - xa)
    return laser, sep


def zeroth_order_phase(seq: InterferometerSequence, a: ArmTrack, b: ArmTrack) -> float:
    xi0 = seq.initial.x
    return (seq.xi + 0.5 * (a.x0 * b.v0 - b.x0 * a.v0)
            + 0.5 * (seq.kappa_bi - seq.kappa_ai) * xi0
            + 0.5 * (seq.kappa_bf - seq.kappa_af) * (a.x0 + b.x0))


def assemble_phase(seq: InterferometerSequence, a: ArmTrack, b: ArmTrack,
                   method: str, visibility: float = 1.0) -> PhaseReport:
    """Two-arm phase from final trajectory data; ``seq`` in oscillator units.

    The mixed term is x_b1 v_b0 - v_b1 x_b0 - x_a1 v_a0 + v_a1 x_a0, which is
    what the single-arm propagation phase integrated by parts produces.
    """
    xi0 = seq.initial.x
    theta = (seq.xi
             + 0.5 * (a.x * b.v - b.x * a.v)
             + 0.5 * (seq.kappa_bi - seq.kappa_ai) * xi0
             + 0.5 * (seq.kappa_bf - seq.kappa_af) * (a.x + b.x)
             + 0.5 * (b.x1 * b.v0 - b.v1 * b.x0 - a.x1 * a.v0 + a.v1 * a.x0)
             - (b.potential_integral - a.potential_integral))
    theta0 = zeroth_order_phase(seq, a, b)
    laser, sep = laser_and_separation(seq, a.x, a.v, b.x, b.v)
    return PhaseReport(
        method=method,
        theta_total=theta,
        theta0=theta0,
        theta1=theta - theta0,
        propagation=theta - laser - sep,
        laser=laser,
        separation=sep,
        gap=packet_gap(a.x, a.v, b.x, b.v, seq.kappa_af, seq.kappa_bf),
        visibility=visibility,
    )


def first_order_split(seq: InterferometerSequence, a: ArmTrack, b: ArmTrack) -> dict:
    """The three pieces of the first-order phase, term by term."""
    trajectory = 0.5 * ((b.v0 - a.v0) * (a.x1 + b.x1) - (a.v1 + b.v1) * (b.x0 - a.x0))
    kick = 0.5 * (seq.kappa_bf - seq.kappa_af) * (a.x1 + b.x1)
    integral = -(b.potential_integral - a.potential_integral)
    return {"trajectory": trajectory, "kick": kick, "integral": integral}


class PacketGapWarning(UserWarning):
    pass


def validate_gap(gap: float, warn_above: float = 0.1, fail_above: float = 1.0):
    if gap > fail_above:
        raise PacketGapTooLarge(
            f"final packets separated by |alpha_af - alpha_bf| = {gap:.3g} > {fail_above}")
    if gap > warn_above:
        warnings.warn(f"final packet gap {gap:.3g} exceeds {warn_above}; "
                      "the first-order overlap is approximate", PacketGapWarning, stacklevel=3)
