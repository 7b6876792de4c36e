"""Classical trajectories and the semi-classical interferometer phase.

Perturbative trajectories are closed-form :class:`TrigPoly` objects; the
exact classical path is integrated with fixed-step RK4.  All internal work
is in oscillator units; public functions take physical values together with
a :class:`~aai.units.TrapSpec`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import StepTooLarge
from .sequence import (
    ArmTrack,
    InterferometerSequence,
    PhaseReport,
    assemble_phase,
    first_order_split,
    packet_gap,
)
from .trigpoly import TrigPoly
from .units import DIMENSIONLESS, PhaseSpacePoint, PolyPotential, TrapSpec, as_poly

DEFAULT_STEPS_PER_PERIOD = 2000
ENERGY_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class ClassicalTrajectory:
    """x(t) = x0(t) + x1(t) with both pieces as trig polynomials in omega t.

    The polynomials live in oscillator units; :meth:`x` and :meth:`v` take
    and return physical values.
    """

    x0: TrigPoly
    x1: TrigPoly
    trap: TrapSpec = DIMENSIONLESS

    @property
    def v0(self) -> TrigPoly:
        return self.x0.derivative()

    @property
    def v1(self) -> TrigPoly:
        return self.x1.derivative()

    def x(self, t, order: int = 1):
        tau = np.asarray(t, dtype=float) * self.trap.omega
        out = self.x0(tau).real
        if order >= 1:
            out = out + self.x1(tau).real
        return out * self.trap.ell

    def v(self, t, order: int = 1):
        tau = np.asarray(t, dtype=float) * self.trap.omega
        out = self.v0(tau).real
        if order >= 1:
            out = out + self.v1(tau).real
        return out * self.trap.velocity_scale


def _unperturbed(x: float, v: float) -> TrigPoly:
    return TrigPoly.harmonic(x, v)


def path_powers(x: TrigPoly, top: int) -> list:
    """[1, x, x**2, ..., x**top] as trig polynomials."""
    powers = [TrigPoly.constant(1.0, x.omega)]
    for _ in range(top):
        powers.append(powers[-1] * x)
    return powers


def poly_of(p: PolyPotential, x: TrigPoly, derivative: bool = False, powers=None) -> TrigPoly:
    """V(x(t)) or V'(x(t)) for a polynomial potential and a trig-poly path."""
    out = TrigPoly.zero()
    if powers is None:
        powers = path_powers(x, max(p.terms) if p.terms else 0)
    for k, c in p.terms.items():
        if derivative:
            if k:
                out = out + powers[k - 1] * (k * c)
        else:
            out = out + powers[k] * c
    return out


def driven_response(force: TrigPoly) -> TrigPoly:
    """Solution of y'' + y = force with y(0) = y'(0) = 0 (Duhamel integral).

    y(t) = int_0^t sin(t - s) force(s) ds
         = [e^{it} G_-(t) - e^{-it} G_+(t)] / 2i,  G_{+-}(t) = int_0^t e^{+-is} force(s) ds.
    """
    g_minus = force.shift(-1).antiderivative()
    g_plus = force.shift(1).antiderivative()
    return (g_minus.shift(1) - g_plus.shift(-1)) / 2j


def unperturbed_trajectory(init: PhaseSpacePoint, trap: TrapSpec = DIMENSIONLESS) -> ClassicalTrajectory:
    x = init.x / trap.ell
    v = init.v / trap.velocity_scale
    return ClassicalTrajectory(_unperturbed(x, v), TrigPoly.zero(), trap)


def first_order_trajectory(init: PhaseSpacePoint, pert, trap: TrapSpec = DIMENSIONLESS) -> ClassicalTrajectory:
    """x0 + x1 with x1'' + omega^2 x1 = -V'(x0)/m and x1(0) = x1'(0) = 0."""
    x = init.x / trap.ell
    v = init.v / trap.velocity_scale
    x0 = _unperturbed(x, v)
    x1 = -driven_response(poly_of(as_poly(pert, trap), x0, derivative=True))
    return ClassicalTrajectory(x0, x1, trap)


@dataclass(frozen=True)
class SampledPath:
    """Uniformly sampled exact classical path (physical units)."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    energy_drift: float


def _rk4(x, v, force, dt, n):
    """Classic RK4 for x'' = force(x); x and v may be arrays (one entry per arm)."""
    xs = np.empty((n + 1,) + np.shape(x))
    vs = np.empty_like(xs)
    xs[0], vs[0] = x, v
    h2, h6 = dt / 2, dt / 6
    for i in range(n):
        k1x, k1v = v, force(x)
        k2x, k2v = v + h2 * k1v, force(x + h2 * k1x)
        k3x, k3v = v + h2 * k2v, force(x + h2 * k2x)
        k4x, k4v = v + dt * k3v, force(x + dt * k3x)
        x = x + h6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        xs[i + 1], vs[i + 1] = x, v
    return xs, vs


def _integrate_dimless(x, v, p: PolyPotential, t_max: float, dt: float | None):
    if dt is None:
        dt = 2 * math.pi / DEFAULT_STEPS_PER_PERIOD
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = max(2, math.ceil(t_max / dt - 1e-9))
    n += n % 2  # even step count keeps Simpson's rule on its exact-weight form
    h = t_max / n

    def force(y):
        return -y - p.derivative(y)

    xs, vs = _rk4(np.asarray(x, float), np.asarray(v, float), force, h, n)
    t = np.linspace(0.0, t_max, n + 1)
    energy = 0.5 * vs**2 + 0.5 * xs**2 + p(xs)
    scale = np.maximum(np.abs(energy[0]), 1e-300)
    drift = float(np.max(np.abs(energy - energy[0]) / scale))
    if drift > ENERGY_DRIFT_LIMIT:
        raise StepTooLarge(f"relative energy drift {drift:.3g} exceeds {ENERGY_DRIFT_LIMIT:g}; reduce dt")
    return t, xs, vs, drift


def exact_trajectory(init: PhaseSpacePoint, pert, trap: TrapSpec = DIMENSIONLESS,
                     t_max: float = 2 * math.pi, dt: float | None = None) -> SampledPath:
    """RK4 solution of x'' + omega^2 x = -V'(x)/m sampled every step.

    ``dt`` defaults to 1/2000 of a trap period; the run raises
    :class:`StepTooLarge` if the relative energy drift exceeds 1e-6.
    """
    p = as_poly(pert, trap)
    w = trap.omega
    t, xs, vs, drift = _integrate_dimless(
        init.x / trap.ell, init.v / trap.velocity_scale, p, t_max * w,
        None if dt is None else dt * w)
    return SampledPath(t / w, xs * trap.ell, vs * trap.velocity_scale, drift)


# ---------------------------------------------------------------------------
# semi-classical phase

def perturbative_arm(x: float, v: float, p: PolyPotential, hold: float) -> ArmTrack:
    """First-order classical arm data for a hold of ``hold`` (oscillator units)."""
    x0 = _unperturbed(x, v)
    powers = path_powers(x0, max(p.terms) if p.terms else 0)
    x1 = -driven_response(poly_of(p, x0, derivative=True, powers=powers))
    action = poly_of(p, x0, powers=powers).integrate(hold)
    c, s = math.cos(hold), math.sin(hold)
    return ArmTrack(x * c + v * s, v * c - x * s,
                    x1(hold).real, x1.derivative()(hold).real, float(np.real(action)))


def _perturbative_stage_phase(arm: ArmTrack, x_start: float, v_start: float) -> float:
    """Propagation phase of one stage from its closed first-order form."""
    return (0.5 * (arm.x * arm.v - x_start * v_start - arm.x0 * arm.v1 + arm.x1 * arm.v0)
            - arm.potential_integral)


def _exact_stage(x, v, p: PolyPotential, hold: float, dt: float | None):
    """Exact path for one stage: returns final (x, v) arrays and the action integral."""
    t, xs, vs, drift = _integrate_dimless(x, v, p, hold, dt)
    lagrangian = 0.5 * vs**2 - 0.5 * xs**2 - p(xs)
    return xs[-1], vs[-1], simpson(lagrangian, x=t, axis=0), drift


def sca_phase(seq: InterferometerSequence, pert, trap: TrapSpec = DIMENSIONLESS,
              mode: str = "perturbative", dt: float | None = None) -> PhaseReport:
    """Semi-classical interferometer phase.

    ``mode="perturbative"`` evaluates the first-order closed form, with the
    potential integral done exactly on trig polynomials.
    ``mode="exact-classical"`` integrates both arms with RK4 and sums the
    propagation (action), laser and separation phases directly.
    """
    p = as_poly(pert, trap)
    s = seq.dimensionless(trap)
    if mode == "perturbative":
        return _sca_perturbative(s, p)
    if mode in ("exact-classical", "exact"):
        return _sca_exact(s, p, None if dt is None else dt * trap.omega)
    raise ValueError(f"unknown SCA mode {mode!r}")


def _sca_perturbative(s: InterferometerSequence, p: PolyPotential,
                      method: str = "sca-perturbative") -> PhaseReport:
    if not s.stages:
        xi0, vi0 = s.initial.x, s.initial.v
        a = perturbative_arm(xi0, vi0 + s.kappa_ai, p, s.hold)
        b = perturbative_arm(xi0, vi0 + s.kappa_bi, p, s.hold)
        report = assemble_phase(s, a, b, method)
        report.extras["first_order_terms"] = first_order_split(s, a, b)
        report.extras["arms"] = (a, b)
        return report
    return _staged_classical(s, p, method, exact=False)


def _sca_exact(s: InterferometerSequence, p: PolyPotential, dt) -> PhaseReport:
    return _staged_classical(s, p, "sca-exact", exact=True, dt=dt)


def _staged_classical(s: InterferometerSequence, p: PolyPotential, method: str,
                      exact: bool, dt=None) -> PhaseReport:
    """Per-arm accumulation: laser phase at every pulse, action per stage, separation at the end.

    Perturbative stages restart the first-order expansion from the perturbed
    end state of the previous stage, which is accurate to first order.
    """
    xi0, vi0 = s.initial.x, s.initial.v
    sched_a, kaf = s.arm_schedule("a")
    sched_b, kbf = s.arm_schedule("b")
    zero = PolyPotential({})

    def run(potential):
        x = np.array([xi0, xi0])
        v = np.array([vi0, vi0], dtype=float)
        action = np.zeros(2)
        laser = np.zeros(2)
        for (ka, hold), (kb, _) in zip(sched_a, sched_b):
            kick = np.array([ka, kb])
            laser += kick * x
            v = v + kick
            if exact:
                x_new, v_new, stage_action, _ = _exact_stage(x, v, potential, hold, dt)
                action += stage_action
            else:
                x_new, v_new = np.empty(2), np.empty(2)
                for j in range(2):
                    arm = perturbative_arm(x[j], v[j], potential, hold)
                    action[j] += _perturbative_stage_phase(arm, x[j], v[j])
                    x_new[j], v_new[j] = arm.x, arm.v
            x, v = x_new, v_new
        laser_diff = laser[1] - laser[0] + s.kappa_bf * x[1] - s.kappa_af * x[0] + s.xi
        sep = -0.5 * (v[0] + kaf + v[1] + kbf) * (x[1] - x[0])
        return x, v, action[1] - action[0], laser_diff, sep

    x, v, prop, laser, sep = run(p)
    _, _, prop0, laser0, sep0 = run(zero)
    theta = prop + laser + sep
    theta0 = prop0 + laser0 + sep0
    report = PhaseReport(
        method=method,
        theta_total=float(theta),
        theta0=float(theta0),
        theta1=float(theta - theta0),
        propagation=float(prop),
        laser=float(laser),
        separation=float(sep),
        gap=packet_gap(x[0], v[0], x[1], v[1], kaf, kbf),
    )
    report.extras["final_state"] = (x.copy(), v.copy())
    return report
