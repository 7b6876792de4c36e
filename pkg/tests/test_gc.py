import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from aai.errors import UnsupportedIndex
from aai.gc import (
    ETA,
    GCState,
    central_phase_perturbed,
    d_series,
    f_n,
    first_order_coeffs,
    gaussian_moments,
    gc_overlap,
    gc_wavefunction_eval,
    h_n,
    mean_force,
    mean_phase_space,
    mean_trajectory,
    oscillator_functions,
    p_lambda,
)
from aai.units import PowerLawPerturbation, TrapSpec

from conftest import BETA
from oracles import d_by_quadrature, fock_element

REF_ALPHA = 10j / math.sqrt(2)


class TestPolynomials:
    def test_gaussian_moments_are_double_factorials(self):
        q = gaussian_moments(12)
        for k in range(0, 13, 2):
            assert q[k] == math.factorial(k) // (2 ** (k // 2) * math.factorial(k // 2))
        assert q[4] == 3 and q[6] == 15
        assert all(q[k] == 0 for k in range(1, 13, 2))

    def test_p3_and_p4(self):
        p3 = p_lambda(3)
        assert p3.coefficient(3) == 1.0
        assert p3.coefficient(1) == pytest.approx(3 * ETA**2)
        assert p3.coefficient(2) == 0 and p3.coefficient(0) == 0
        p4 = p_lambda(4)
        assert [p4.coefficient(j) for j in range(5)] == pytest.approx([3 * ETA**4, 0, 6 * ETA**2, 0, 1])

    def test_p6_quadratic_coefficient(self):
        assert p_lambda(6).coefficient(2) == pytest.approx(45 * ETA**4)

    @pytest.mark.parametrize("power", range(1, 9))
    def test_p_lambda_general_coefficient(self, power):
        p = p_lambda(power)
        for k in range(0, power + 1):
            expected = 0.0
            if k % 2 == 0:
                expected = (math.factorial(power)
                            / (2 ** (k // 2) * math.factorial(k // 2) * math.factorial(power - k)) * ETA**k)
            assert p.coefficient(power - k) == pytest.approx(expected, rel=1e-15)

    def test_f_examples(self):
        assert f_n(3, 0) == p_lambda(3)
        f1 = f_n(3, 1)
        assert f1.coefficient(2) == pytest.approx(3 * ETA)
        assert f1.coefficient(0) == pytest.approx(3 * ETA**3)
        f3 = f_n(3, 3)
        assert f3.degree == 0
        assert f3.coefficient(0) == pytest.approx(math.sqrt(6) * ETA**3)
        assert f_n(3, 4).is_zero

    def test_f_coefficients_are_exact(self):
        from fractions import Fraction
        assert all(isinstance(c, Fraction) and c.denominator == 1 for c in f_n(6, 2).coeffs)

    @pytest.mark.parametrize("power", range(1, 7))
    def test_recursion_matches_fock_elements(self, power):
        rng = np.random.default_rng(power)
        for xc in rng.uniform(-5, 5, 50):
            for level in range(power + 1):
                brute = fock_element(power, level, xc)
                assert f_n(power, level)(xc) == pytest.approx(brute, rel=1e-12, abs=1e-12)


class TestCoefficients:
    def test_reference_d0(self, cubic):
        state = first_order_coeffs(REF_ALPHA, cubic, t=math.pi)
        # -beta int_0^pi (1000 sin^3 s + 15 sin s) ds
        expected = -BETA * (1000 * 4 / 3 + 30)
        assert state.coefficient(0) == pytest.approx(1j * expected, rel=1e-13)

    def test_reference_d1(self, cubic):
        d1 = first_order_coeffs(REF_ALPHA, cubic, t=math.pi).coefficient(1)
        # beta (-300 - 806 - 606 + 100) / (4 sqrt 2) from the D_1 closed form at t = pi
        assert d1.real == pytest.approx(-1612 * BETA / (4 * math.sqrt(2)), rel=1e-13)
        assert abs(d1.imag) < 1e-12

    def test_zero_beta_and_zero_time(self):
        assert np.all(first_order_coeffs(REF_ALPHA, PowerLawPerturbation(4, 0.0), t=2.0).D == 0)
        assert np.allclose(first_order_coeffs(REF_ALPHA, PowerLawPerturbation(4, 1.0), t=0.0).D, 0)

    def test_levels_stop_at_power(self):
        state = first_order_coeffs(1 + 2j, PowerLawPerturbation(5, 0.1), t=1.0)
        assert state.max_level == 5
        assert state.coefficient(6) == 0

    @pytest.mark.parametrize("power", [3, 4, 5, 6])
    def test_against_direct_quadrature(self, power):
        alpha, t = 0.8 - 1.3j, 2.3
        state = first_order_coeffs(alpha, PowerLawPerturbation(power, 1.0), t=t)
        for level in range(power + 1):
            assert state.coefficient(level) == pytest.approx(
                d_by_quadrature(power, level, alpha, t), rel=1e-9, abs=1e-11)

    def test_series_matches_pointwise(self, cubic):
        series = d_series(REF_ALPHA, cubic.as_poly())
        for t in (0.4, 2.0, 5.1):
            state = first_order_coeffs(REF_ALPHA, cubic, t=t)
            assert np.allclose([s(t) for s in series], state.D, rtol=1e-12, atol=1e-14)

    def test_physical_units(self):
        trap = TrapSpec(mass=2.0, omega=3.0, hbar=0.5)
        pert = PowerLawPerturbation(4, 0.01 * trap.beta_scale(4))
        phys = first_order_coeffs(0.3 + 1j, pert, trap, t=1.1 / trap.omega)
        dimless = first_order_coeffs(0.3 + 1j, PowerLawPerturbation(4, 0.01), t=1.1)
        assert np.allclose(phys.D, dimless.D, rtol=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1e-4, 1e-2))
    def test_norm_defect_is_second_order(self, beta):
        one = first_order_coeffs(REF_ALPHA, PowerLawPerturbation(3, beta), t=1.7).D
        two = first_order_coeffs(REF_ALPHA, PowerLawPerturbation(3, 2 * beta), t=1.7).D
        assert np.sum(np.abs(two) ** 2) == pytest.approx(4 * np.sum(np.abs(one) ** 2), rel=1e-12)


class TestMeanMotion:
    def test_reference_point(self, cubic):
        xbar, vbar, abar = mean_phase_space(first_order_coeffs(REF_ALPHA, cubic, t=math.pi))
        assert xbar == pytest.approx(-2.015, abs=1e-9)
        # the velocity correction vanishes at half period (Im D_1 = 0); v_c itself is -10
        assert vbar == pytest.approx(-10.0, abs=1e-9)
        assert abar == pytest.approx(complex(-2.015, -10.0) / math.sqrt(2), abs=1e-9)

    def test_harmonic_motion(self):
        t = np.linspace(0, 6, 13)
        x, v = mean_trajectory(REF_ALPHA, PowerLawPerturbation(3, 0.0), times=t)
        assert np.allclose(x, 10 * np.sin(t), atol=1e-13)
        assert np.allclose(v, 10 * np.cos(t), atol=1e-13)

    def test_trajectory_matches_pointwise_states(self, cubic):
        t = np.array([0.3, 1.0, 2.5, 4.0])
        x, v = mean_trajectory(REF_ALPHA, cubic, times=t)
        for ti, xi, vi in zip(t, x, v):
            xb, vb, _ = mean_phase_space(first_order_coeffs(REF_ALPHA, cubic, t=ti))
            assert (xi, vi) == pytest.approx((xb, vb), abs=1e-12)

    def test_ehrenfest_at_first_order(self):
        alpha, pert = 1.5 - 2.0j, PowerLawPerturbation(4, 0.002)
        h = 1e-3
        for t in np.linspace(0.2, 6, 12):
            _, v_plus = mean_trajectory(alpha, pert, times=t + h)
            _, v_minus = mean_trajectory(alpha, pert, times=t - h)
            dv = (v_plus - v_minus) / (2 * h)
            assert dv == pytest.approx(mean_force(first_order_coeffs(alpha, pert, t=t)), abs=1e-6)


class TestStates:
    def test_overlap_examples(self):
        assert gc_overlap(GCState(0.3 + 0.2j), GCState(0.3 + 0.2j)) == pytest.approx(1.0)
        assert gc_overlap(GCState(0), GCState(1)) == pytest.approx(math.exp(-0.5))
        assert gc_overlap(GCState(0, 1), GCState(1)) == pytest.approx(math.exp(-0.5))
        with pytest.raises(ValueError):
            gc_overlap(GCState(0), GCState(1, 1))

    def test_overlap_matches_wavefunctions(self):
        x = np.linspace(-15, 15, 6001)
        a, b = GCState(0.5 - 1j, 2), GCState(1.2 + 0.3j, 0)
        numeric = np.trapezoid(np.conj(gc_wavefunction_eval(a, x)) * gc_wavefunction_eval(b, x), x)
        assert numeric == pytest.approx(gc_overlap(a, b), abs=1e-10)

    def test_peak_value(self):
        assert gc_wavefunction_eval(GCState(0j), 0.0) == pytest.approx(math.pi**-0.25)
        trap = TrapSpec(mass=2.0, omega=2.0)  # ell = 1/2
        psi = gc_wavefunction_eval(GCState(0j), 0.0, trap=trap)
        assert psi == pytest.approx(math.pi**-0.25 * trap.ell**-0.5)

    def test_orthonormal_levels(self):
        rng = np.random.default_rng(7)
        x = np.linspace(-20, 20, 8001)
        for _ in range(3):
            alpha = complex(*rng.uniform(-2, 2, 2))
            waves = [gc_wavefunction_eval(GCState(alpha, n), x) for n in range(7)]
            gram = np.array([[np.trapezoid(np.conj(a) * b, x) for b in waves] for a in waves])
            assert np.allclose(gram, np.eye(7), atol=1e-10)

    def test_central_phase_alternative_form(self):
        alpha, t, n = 1.0 + 2.0j, 0.9, 3
        a_t = alpha * np.exp(-1j * t)
        xc, vc = math.sqrt(2) * a_t.real, math.sqrt(2) * a_t.imag
        psi = gc_wavefunction_eval(GCState(alpha, n), xc + 1e-9, t)
        # phi_n is real at the centre; only its sign can flip the phase by pi
        expected = 0.5 * xc * vc - (n + 0.5) * t
        diff = (np.angle(psi) - expected) % math.pi
        assert min(diff, math.pi - diff) < 1e-6

    def test_oscillator_functions_cap(self):
        assert oscillator_functions(np.array([0.0]), 64).shape == (65, 1)
        with pytest.raises(UnsupportedIndex):
            oscillator_functions(0.0, 65)

    def test_high_levels_stay_finite(self):
        y = np.linspace(-16, 16, 6001)
        phi = oscillator_functions(y, 64)
        assert np.all(np.isfinite(phi))
        assert np.trapezoid(phi[64] ** 2, y) == pytest.approx(1.0, rel=1e-8)

    def test_first_order_wavefunction_norm(self):
        beta = 1e-3
        state = first_order_coeffs(1 + 1j, PowerLawPerturbation(3, beta), t=1.3)
        x = np.linspace(-15, 15, 6001)
        norm = np.trapezoid(np.abs(gc_wavefunction_eval(state, x)) ** 2, x)
        assert norm - 1 == pytest.approx(np.sum(np.abs(state.D) ** 2) + 2 * state.D[0].real, abs=1e-10)


class TestCentralPhase:
    def test_mixing_weights(self):
        assert h_n(2) == pytest.approx(-1 / math.sqrt(2))
        assert h_n(4) == pytest.approx(math.sqrt(6) / 4)
        assert h_n(1) == 0 and h_n(3) == 0
        for n in range(0, 12, 2):
            hermite_at_zero = (-1) ** (n // 2) * math.factorial(n) / math.factorial(n // 2)
            assert h_n(n) == pytest.approx(hermite_at_zero / math.sqrt(2**n * math.factorial(n)))

    def test_harmonic_central_phase(self):
        alpha, t = 0.7 + 1.1j, 1.4
        state = first_order_coeffs(alpha, PowerLawPerturbation(3, 0.0), t=t)
        a_t = state.alpha_t
        x0, v0 = math.sqrt(2) * a_t.real, math.sqrt(2) * a_t.imag
        xi, vi = math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag
        cp = central_phase_perturbed(state)
        assert cp.perturbed == pytest.approx(0.5 * (x0 * v0 - xi * vi))
        assert cp.propagation == pytest.approx(cp.perturbed)

    def test_components(self, cubic):
        state = first_order_coeffs(REF_ALPHA, cubic, t=1.0)
        cp = central_phase_perturbed(state)
        mixing = state.D[0].imag + h_n(2) * state.D[2].imag
        assert cp.perturbed - cp.propagation == pytest.approx(mixing - state.D[0].imag, abs=1e-14)

    def test_first_order_wavefunction_phase_small_beta(self):
        # arg psi(x_bar) of the first-order state agrees with the linearised formula as beta -> 0
        errs = []
        for beta in (1e-5, 2e-5):
            state = first_order_coeffs(1 + 2j, PowerLawPerturbation(3, beta), t=0.8)
            xbar, _, _ = mean_phase_space(state)
            psi = complex(gc_wavefunction_eval(state, xbar))
            # the formula is relative to the initial centre phase x_i v_i / 2
            start = 0.5 * 2 * state.alpha_i.real * state.alpha_i.imag
            pred = central_phase_perturbed(state).perturbed + state.global_phase + start
            errs.append(abs(np.angle(psi * np.exp(-1j * pred))))
        assert errs[0] < 1e-8
        assert errs[1] / errs[0] == pytest.approx(4, rel=0.05)


def test_quad_integral_sanity():
    # the quadrature helper itself on a known integral
    assert quad(lambda s: math.sin(s) ** 3, 0, math.pi)[0] == pytest.approx(4 / 3)
