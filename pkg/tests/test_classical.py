import math

import numpy as np
import pytest

from aai.classical import (
    exact_trajectory,
    first_order_trajectory,
    sca_phase,
    unperturbed_trajectory,
)
from aai.errors import StepTooLarge
from aai.sequence import InterferometerSequence
from aai.units import PhaseSpacePoint, PowerLawPerturbation, TrapSpec

from conftest import AMPLITUDE, BETA


def cubic_x1(t, beta=BETA, amp=AMPLITUDE):
    """Driven response of x'' + x = -3 beta (A sin t)^2, zero initial data."""
    return -(beta * amp**2 / 2) * (3 - 4 * np.cos(t) + np.cos(2 * t))


class TestUnperturbed:
    def test_quarter_period(self):
        tr = unperturbed_trajectory(PhaseSpacePoint(0, 10))
        assert tr.x(math.pi / 2) == pytest.approx(10.0, rel=1e-15)
        assert tr.v(math.pi / 2) == pytest.approx(0.0, abs=1e-14)

    def test_sine_orbit_and_full_period(self):
        t = np.linspace(0, 7, 31)
        tr = unperturbed_trajectory(PhaseSpacePoint(0, 4.0))
        assert np.allclose(tr.x(t), 4.0 * np.sin(t), atol=1e-13)
        back = unperturbed_trajectory(PhaseSpacePoint(1.7, 0))
        assert back.x(2 * math.pi) == pytest.approx(1.7, rel=1e-14)
        assert back.v(2 * math.pi) == pytest.approx(0.0, abs=1e-14)

    def test_equation_of_motion(self):
        tr = unperturbed_trajectory(PhaseSpacePoint(0.4, -2.0))
        t, h = np.linspace(0.3, 5, 20), 1e-4
        acc = (tr.x(t + h) - 2 * tr.x(t) + tr.x(t - h)) / h**2
        assert np.allclose(acc + tr.x(t), 0, atol=1e-6)

    def test_physical_units(self):
        trap = TrapSpec(mass=2.0, omega=3.0)
        tr = unperturbed_trajectory(PhaseSpacePoint(0.5, 1.2), trap)
        t = 0.37
        assert tr.x(t) == pytest.approx(0.5 * math.cos(3 * t) + 0.4 * math.sin(3 * t), rel=1e-14)


class TestFirstOrder:
    def test_cubic_closed_form(self, cubic):
        tr = first_order_trajectory(PhaseSpacePoint(0, AMPLITUDE), cubic)
        t = np.linspace(0, 4 * math.pi, 57)
        assert np.allclose(tr.x1(t).real, cubic_x1(t), atol=1e-13)

    def test_half_period_values(self, cubic):
        tr = first_order_trajectory(PhaseSpacePoint(0, AMPLITUDE), cubic)
        assert tr.x1(math.pi).real == pytest.approx(-2.0, rel=1e-14)
        assert tr.v1(math.pi).real == pytest.approx(0.0, abs=1e-13)

    def test_initial_conditions(self):
        tr = first_order_trajectory(PhaseSpacePoint(1.3, -0.4), PowerLawPerturbation(5, 0.01))
        assert tr.x1(0.0) == pytest.approx(0, abs=1e-14)
        assert tr.v1(0.0) == pytest.approx(0, abs=1e-14)

    def test_zero_beta(self):
        tr = first_order_trajectory(PhaseSpacePoint(1.0, 2.0), PowerLawPerturbation(4, 0.0))
        assert np.allclose(tr.x1(np.linspace(0, 5, 9)), 0)

    def test_driven_equation_quartic(self):
        # x1'' + x1 = -V'(x0) checked by finite differences
        beta = 0.003
        tr = first_order_trajectory(PhaseSpacePoint(2.0, 3.0), PowerLawPerturbation(4, beta))
        t, h = np.linspace(0.5, 9, 15), 1e-4
        x1 = lambda s: tr.x1(s).real  # noqa: E731
        acc = (x1(t + h) - 2 * x1(t) + x1(t - h)) / h**2
        force = -4 * beta * tr.x0(t).real ** 3
        assert np.allclose(acc + x1(t), force, atol=2e-5)


class TestExact:
    def test_harmonic_limit(self):
        path = exact_trajectory(PhaseSpacePoint(0, 10), PowerLawPerturbation(3, 0.0))
        assert np.max(np.abs(path.x - 10 * np.sin(path.t))) < 1e-10

    def test_energy_drift_over_ten_periods(self, cubic):
        path = exact_trajectory(PhaseSpacePoint(0, 10), cubic, t_max=20 * math.pi)
        assert path.energy_drift < 1e-8

    def test_fourth_order_convergence(self, cubic):
        ref = exact_trajectory(PhaseSpacePoint(0, 10), cubic, t_max=math.pi, dt=math.pi / 4000).x[-1]
        coarse = exact_trajectory(PhaseSpacePoint(0, 10), cubic, t_max=math.pi, dt=math.pi / 200).x[-1]
        fine = exact_trajectory(PhaseSpacePoint(0, 10), cubic, t_max=math.pi, dt=math.pi / 400).x[-1]
        assert abs(coarse - ref) / abs(fine - ref) == pytest.approx(16, rel=0.1)

    def test_step_too_large(self, cubic):
        with pytest.raises(StepTooLarge):
            exact_trajectory(PhaseSpacePoint(0, 10), cubic, t_max=math.pi, dt=0.5)

    def test_departs_from_first_order(self, cubic):
        # after about a period the first-order path is visibly off
        path = exact_trajectory(PhaseSpacePoint(0, 10), cubic, t_max=2 * math.pi)
        tr = first_order_trajectory(PhaseSpacePoint(0, 10), cubic)
        gap = np.abs(path.x - tr.x(path.t))
        assert gap[: len(gap) // 8].max() < 0.01
        assert gap[-1] > 0.3


class TestPhase:
    def test_reference_value(self, symmetric, cubic):
        report = sca_phase(symmetric, cubic)
        assert report.theta_total == pytest.approx(8 / 3 * BETA * AMPLITUDE**3, abs=1e-9)
        assert report.theta0 == 0.0

    def test_integral_term_carries_phase(self, symmetric, cubic):
        terms = sca_phase(symmetric, cubic).extras["first_order_terms"]
        # the velocity-difference and kick-difference terms cancel each other
        assert terms["trajectory"] == pytest.approx(-40.0, rel=1e-13)
        assert terms["trajectory"] + terms["kick"] == pytest.approx(0, abs=1e-12)
        assert terms["integral"] == pytest.approx(40 / 3, rel=1e-14)

    def test_harmonic_phase_is_xi(self):
        seq = InterferometerSequence.symmetric(7.0, 1.3, xi=0.4)
        assert sca_phase(seq, PowerLawPerturbation(3, 0.0)).theta_total == pytest.approx(0.4, abs=1e-13)

    def test_linear_in_beta(self, symmetric):
        one = sca_phase(symmetric, PowerLawPerturbation(3, 0.002)).theta1
        two = sca_phase(symmetric, PowerLawPerturbation(3, 0.004)).theta1
        assert two == pytest.approx(2 * one, rel=1e-13)

    def test_odd_parity_for_cubic(self, symmetric):
        up = sca_phase(symmetric, PowerLawPerturbation(3, 0.002)).theta1
        down = sca_phase(symmetric, PowerLawPerturbation(3, -0.002)).theta1
        assert up == pytest.approx(-down, rel=1e-13)

    def test_exact_mode_agrees_to_second_order(self, symmetric):
        ratios = []
        for beta in (1e-4, 2e-4, 4e-4):
            pert = PowerLawPerturbation(3, beta)
            diff = (sca_phase(symmetric, pert, mode="exact-classical").theta_total
                    - sca_phase(symmetric, pert).theta_total)
            ratios.append(abs(diff) / beta**2)
        # bounded as beta -> 0; here the beta^2 term even cancels by symmetry, leaving beta^3
        assert ratios[0] <= ratios[1] <= ratios[2]
        assert ratios[1] / ratios[0] == pytest.approx(2, rel=0.01)

    def test_exact_mode_reference(self, symmetric, cubic):
        # converged value from a 4x finer step; the default step is within 1e-9 of it
        theta = sca_phase(symmetric, cubic, mode="exact-classical").theta_total
        finer = sca_phase(symmetric, cubic, mode="exact-classical", dt=2 * math.pi / 8000).theta_total
        assert finer == pytest.approx(13.815833380035, abs=1e-11)
        assert theta == pytest.approx(finer, abs=1e-9)

    def test_unknown_mode(self, symmetric, cubic):
        with pytest.raises(ValueError):
            sca_phase(symmetric, cubic, mode="magic")

    def test_physical_units_match(self, cubic):
        trap = TrapSpec(mass=2.0, omega=3.0, hbar=0.5)
        seq = InterferometerSequence.symmetric(AMPLITUDE * trap.ell, math.pi / trap.omega, trap)
        pert = PowerLawPerturbation(3, BETA * trap.beta_scale(3))
        assert sca_phase(seq, pert, trap).theta_total == pytest.approx(40 / 3, rel=1e-12)
