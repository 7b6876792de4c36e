import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aai.errors import PowerOverflow
from aai.trigpoly import TrigPoly, trigpoly_integrate, trigpoly_mul

coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def real_polys(draw, max_k=4):
    """Random real-valued TrigPoly: c[-k] = conj(c[k])."""
    K = draw(st.integers(0, max_k))
    terms = {}
    for p in (0, 1):
        for k in range(0, K + 1):
            c = draw(coef)
            if k == 0:
                terms[(0, p)] = c.real
            else:
                terms[(k, p)] = c
                terms[(-k, p)] = c.conjugate()
    return TrigPoly.from_terms(terms)


def test_inverse_frequencies_cancel():
    prod = trigpoly_mul(TrigPoly.exp(1), TrigPoly.exp(-1))
    assert prod.terms == {(0, 0): 1 + 0j}


def test_cos_squared_product_to_sum():
    prod = TrigPoly.cos(1) * TrigPoly.cos(1)
    assert prod.coeff(2) == pytest.approx(0.25)
    assert prod.coeff(0) == pytest.approx(0.5)
    assert prod.coeff(-2) == pytest.approx(0.25)
    assert prod.kmax == 2


def test_secular_times_inverse_is_t():
    t_exp = TrigPoly.from_terms({(1, 1): 1.0})
    prod = t_exp * TrigPoly.exp(-1)
    assert prod.terms == {(0, 1): 1 + 0j}
    assert prod(2.5) == pytest.approx(2.5)


def test_secular_squared_overflows():
    t_exp = TrigPoly.from_terms({(1, 1): 1.0})
    with pytest.raises(PowerOverflow):
        t_exp * t_exp


def test_mixed_carrier_rejected():
    with pytest.raises(ValueError):
        TrigPoly.exp(1, omega=1.0) + TrigPoly.exp(1, omega=2.0)


def test_integral_of_exponential():
    t = 0.731
    assert trigpoly_integrate(TrigPoly.exp(2), t) == pytest.approx((np.exp(2j * t) - 1) / 2j, rel=1e-14)


def test_integral_of_constant_is_secular():
    anti = TrigPoly.constant(1.0).antiderivative()
    assert anti.terms == {(0, 1): 1 + 0j}


def test_sin_cubed_over_half_period():
    assert trigpoly_integrate(TrigPoly.sin(1) ** 3, math.pi).real == pytest.approx(4 / 3, rel=1e-14)


def test_resonant_secular_integral():
    # int_0^t s ds = t^2/2 has no TrigPoly form but the definite integral exists
    f = TrigPoly.from_terms({(0, 1): 1.0})
    assert trigpoly_integrate(f, 3.0) == pytest.approx(4.5)
    with pytest.raises(PowerOverflow):
        f.antiderivative()


def test_secular_by_parts():
    # int_0^T s e^{is} ds = -i T e^{iT} + e^{iT} - 1
    T = 1.9
    f = TrigPoly.from_terms({(1, 1): 1.0})
    expected = -1j * T * np.exp(1j * T) + np.exp(1j * T) - 1
    assert trigpoly_integrate(f, T) == pytest.approx(expected, rel=1e-14)


def test_carrier_frequency_scales_time():
    f = TrigPoly.sin(1, omega=3.0)
    assert f(0.2).real == pytest.approx(math.sin(0.6))
    assert trigpoly_integrate(f, 0.2).real == pytest.approx((1 - math.cos(0.6)) / 3)


def test_power_matches_repeated_product():
    f = TrigPoly.harmonic(0.3, -1.2)
    assert np.allclose((f**5).coeffs, (f * f * f * f * f).coeffs)


@settings(max_examples=60, deadline=None)
@given(real_polys(), st.lists(st.floats(-20, 20), min_size=5, max_size=20))
def test_reality_invariant(f, ts):
    values = f(np.array(ts))
    scale = max(np.abs(f.coeffs).max(), 1.0) * (1 + max(abs(t) for t in ts))
    assert np.all(np.abs(values.imag) < 1e-12 * scale)
    assert f.is_real()


@settings(max_examples=60, deadline=None)
@given(real_polys(), real_polys(max_k=3), st.floats(-6, 6))
def test_product_is_pointwise(f, g, t):
    if f.max_power + g.max_power > 1:
        return
    lhs = (f * g)(t)
    rhs = f(t) * g(t)
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)


@settings(max_examples=60, deadline=None)
@given(real_polys(), st.floats(0.5, 10))
def test_antiderivative_differentiates_back(f, t):
    f = f - TrigPoly.from_terms({(0, 1): f.coeff(0, 1)})  # drop the resonant secular term
    F = f.antiderivative()
    h = 1e-5
    fd = (F(t + h) - F(t - h)) / (2 * h)
    scale = max(abs(f(t)), np.abs(f.coeffs).sum(), 1.0)
    assert abs(fd - f(t)) <= 1e-8 * scale
    assert F.derivative()(t) == pytest.approx(f(t), rel=1e-12, abs=1e-12 * scale)
    assert F(0.0) == pytest.approx(0, abs=1e-13 * scale)
