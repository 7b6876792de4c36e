"""Interferometer phase by method: semi-classical, coherent-state perturbative, grid.

All perturbative routes share :func:`~aai.sequence.assemble_phase`; only the
per-arm inputs differ.  For the quantum route an arm's final position and
velocity are the GC mean values and its potential integral is the time
integral of <V>, which equals -Im D_0.

Sequences with extra stages use the replacement rule: after each hold the
first-order state is swapped for the displaced ground state at the mean
amplitude alpha_bar = alpha(t) + D_1, picking up the phase
Im D_0 - Im(alpha(t)^* D_1).  A kick exp(i kappa x) moves alpha by
i kappa / sqrt 2 and adds kappa x_c / 2.  The interferometer phase is then

    theta = Phi_b - Phi_a + xi + Im(alpha_a^* alpha_b)

with Phi the phase accumulated by each arm; for one stage this is the same
number as the assembly formula.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

from .classical import sca_phase
from .errors import PhaseUndefined, UnsupportedLambda
from .gc import GCFirstOrderState, GCState, first_order_coeffs
from .oracle import GridSpec, apply_kick, evolve, init_gaussian_packet, observables, overlap
from .oracle.grid import OVERLAP_LIMIT, unwrap_near
from .sequence import (
    ArmTrack,
    InterferometerSequence,
    PhaseReport,
    assemble_phase,
    first_order_split,
    packet_gap,
    validate_gap,
)
from .units import DIMENSIONLESS, SQRT2, PolyPotential, PowerLawPerturbation, TrapSpec, as_poly

METHODS = ("sca-perturbative", "sca-exact", "quantum-first-order", "oracle", "sca-veff")


def effective_potential_cubic(pert, trap: TrapSpec = DIMENSIONLESS) -> PolyPotential:
    """beta (x^3 + 3/2 ell^2 x): the cubic averaged over the ground-state Gaussian."""
    if not isinstance(pert, PowerLawPerturbation) or pert.power != 3:
        power = getattr(pert, "power", None)
        raise UnsupportedLambda(f"the Gaussian effective potential needs a cubic term, got power {power}")
    beta = pert.dimensionless_beta(trap)
    return PolyPotential({3: beta, 1: 1.5 * beta})


def stage_replace(state: GCFirstOrderState) -> GCState:
    """|alpha_bar, 0>, the first-order-accurate stand-in for the perturbed state."""
    return GCState(state.alpha_bar, 0)


def _quantum_arm(x: float, v: float, potential: PolyPotential, hold: float) -> ArmTrack:
    state = first_order_coeffs(complex(x, v) / SQRT2, potential, DIMENSIONLESS, hold, max_level=1)
    a, d0, d1 = state.alpha_t, state.coefficient(0), state.coefficient(1)
    return ArmTrack(SQRT2 * a.real, SQRT2 * a.imag, SQRT2 * d1.real, SQRT2 * d1.imag, -d0.imag)


def _quantum_single(s: InterferometerSequence, potential: PolyPotential) -> PhaseReport:
    xi0, vi0 = s.initial.x, s.initial.v
    a = _quantum_arm(xi0, vi0 + s.kappa_ai, potential, s.hold)
    b = _quantum_arm(xi0, vi0 + s.kappa_bi, potential, s.hold)
    report = assemble_phase(s, a, b, "quantum-first-order")
    report.extras["first_order_terms"] = first_order_split(s, a, b)
    report.extras["arms"] = (a, b)
    return report


def _replacement_arm(s: InterferometerSequence, arm: str, potential: PolyPotential):
    """(final alpha after the recombination kick, accumulated phase) for one arm."""
    schedule, final_kick = s.arm_schedule(arm)
    alpha = complex(s.initial.x, s.initial.v) / SQRT2
    phase = 0.0
    for kick, hold in schedule + [(final_kick, None)]:
        phase += 0.5 * kick * SQRT2 * alpha.real
        alpha += 1j * kick / SQRT2
        if hold is None:
            break
        state = first_order_coeffs(alpha, potential, DIMENSIONLESS, hold, max_level=1)
        d0, d1 = state.coefficient(0), state.coefficient(1)
        end = state.alpha_t
        phase += d0.imag - (end.conjugate() * d1).imag
        alpha = stage_replace(state).alpha
    return alpha, phase


def quantum_phase_replacement(s: InterferometerSequence, potential: PolyPotential,
                              method: str = "quantum-first-order") -> PhaseReport:
    """Quantum phase via the alpha_bar replacement rule (oscillator-unit sequence)."""
    alpha_a, phi_a = _replacement_arm(s, "a", potential)
    alpha_b, phi_b = _replacement_arm(s, "b", potential)
    theta = phi_b - phi_a + s.xi + (alpha_a.conjugate() * alpha_b).imag
    zero = PolyPotential({})
    za, pa = _replacement_arm(s, "a", zero)
    zb, pb = _replacement_arm(s, "b", zero)
    theta0 = pb - pa + s.xi + (za.conjugate() * zb).imag
    nan = float("nan")
    report = PhaseReport(method, theta, theta0, theta - theta0, nan, nan, nan, abs(alpha_a - alpha_b))
    report.extras["final_alpha"] = (alpha_a, alpha_b)
    return report


def _quantum(s: InterferometerSequence, potential: PolyPotential) -> PhaseReport:
    if s.stages:
        return quantum_phase_replacement(s, potential)
    return _quantum_single(s, potential)


def oracle_amplitude(s: InterferometerSequence) -> float:
    """Largest harmonic excursion of either arm (oscillator lengths)."""
    reach = 0.0
    for arm in ("a", "b"):
        x, v = s.initial.x, s.initial.v
        schedule, _ = s.arm_schedule(arm)
        for kick, hold in schedule:
            v += kick
            reach = max(reach, math.hypot(x, v))
            x, v = x * math.cos(hold) + v * math.sin(hold), v * math.cos(hold) - x * math.sin(hold)
    return reach


def oracle_arm(s: InterferometerSequence, arm: str, pert, trap: TrapSpec, grid: GridSpec):
    """Final grid state of one arm, recombination kick (and xi for arm b) applied.

    ``s`` is in oscillator units; ``pert`` and ``trap`` are passed through so
    the potential is built in the same units.
    """
    schedule, final_kick = s.arm_schedule(arm)
    psi = init_gaussian_packet(s.initial, DIMENSIONLESS, grid)
    for kick, hold in schedule:
        psi = apply_kick(psi, kick)
        psi = evolve(psi, DIMENSIONLESS, as_poly(pert, trap), hold)
    return apply_kick(psi, final_kick, phase=s.xi if arm == "b" else 0.0)


def _oracle(s: InterferometerSequence, pert, trap: TrapSpec, grid: GridSpec | None,
            reference: float, threads: int = 2) -> PhaseReport:
    if grid is None:
        grid = GridSpec.default(oracle_amplitude(s) + abs(s.initial.x))
    with ThreadPoolExecutor(max_workers=max(1, min(2, threads))) as pool:
        fa = pool.submit(oracle_arm, s, "a", pert, trap, grid)
        fb = pool.submit(oracle_arm, s, "b", pert, trap, grid)
        psi_a, psi_b = fa.result(), fb.result()
    ov = overlap(psi_a, psi_b)
    if abs(ov) < OVERLAP_LIMIT:
        raise PhaseUndefined(f"|<psi_a|psi_b>| = {abs(ov):.3g} is below {OVERLAP_LIMIT:g}")
    theta = unwrap_near(math.atan2(ov.imag, ov.real), reference)
    theta0 = _quantum(s, PolyPotential({})).theta_total
    oa, ob = observables(psi_a), observables(psi_b)
    nan = float("nan")
    report = PhaseReport("oracle", theta, theta0, theta - theta0, nan, nan, nan,
                         packet_gap(oa.mean_x, oa.mean_v, ob.mean_x, ob.mean_v, 0.0, 0.0),
                         visibility=min(1.0, abs(ov)))
    report.extras["grid"] = grid
    report.extras["states"] = (psi_a, psi_b)
    return report


def run_sequence(seq: InterferometerSequence, pert, trap: TrapSpec = DIMENSIONLESS,
                 method: str = "quantum-first-order", grid: GridSpec | None = None,
                 dt: float | None = None, check_gap: bool = True, threads: int = 2) -> PhaseReport:
    """Interferometer phase by ``method`` (one of :data:`METHODS`).

    The final packet gap |alpha_af - alpha_bf| is checked for every method:
    above 0.1 a :class:`~aai.sequence.PacketGapWarning` is issued, above 1 the
    run fails with PacketGapTooLarge.  ``grid`` and ``threads`` apply to the
    oracle; ``dt`` to the exact classical integrator.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    s = seq.dimensionless(trap)
    potential = as_poly(pert, trap)
    if method == "sca-perturbative":
        report = sca_phase(seq, pert, trap, "perturbative")
    elif method == "sca-exact":
        report = sca_phase(seq, pert, trap, "exact-classical", dt)
    elif method == "sca-veff":
        report = sca_phase(seq, effective_potential_cubic(pert, trap), trap, "perturbative")
        report.method = "sca-veff"
    elif method == "quantum-first-order":
        report = _quantum(s, potential)
    else:
        report = _oracle(s, pert, trap, grid, _quantum(s, potential).theta_total, threads)
    if check_gap:
        validate_gap(report.gap)
    return report
