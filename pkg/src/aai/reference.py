"""Hand-written closed forms for the first-order GC coefficients.

These are written out term by term, independently of the trig-polynomial
engine, and serve as its golden reference.  Arguments are dimensionless:
x~ = x_c(0)/ell, v~ = v_c(0)/(omega ell), the phase omega t, and beta in
units of hbar omega / ell**lambda.

The lambda = 6, n = 0 expression differs from a commonly quoted version in
two factors (the cos 4wt and sin 6wt brackets); the forms below were checked
against a symbolic integration of <alpha,0|x^6|alpha,0>.
"""

from __future__ import annotations

import cmath
import math

from .errors import UnsupportedIndex

SUPPORTED = tuple((lam, n) for lam in (3, 4, 5, 6) for n in (0, 1))


def _d30(x, v, T):
    c, s = math.cos, math.sin
    return 1j / 12 * (-2 * v * (9 + 4 * v**2 + 6 * x**2)
                      + 9 * v * (2 + v**2 + x**2) * c(T)
                      - v * (v**2 - 3 * x**2) * c(3 * T)
                      - 9 * x * (2 + v**2 + x**2) * s(T)
                      + x * (3 * v**2 - x**2) * s(3 * T))


def _d31(x, v, T):
    e = lambda k: cmath.exp(1j * k * T)  # noqa: E731
    return 1 / (4 * math.sqrt(2)) * (-3 * (v - 1j * x) ** 2 * e(-2)
                                     + 2 * (3 + 4 * v**2 - 4j * v * x + 2 * x**2) * e(-1)
                                     - 6 * (1 + v**2 + x**2)
                                     + (v + 1j * x) ** 2 * e(2))


def _d40(x, v, T):
    c, s = math.cos, math.sin
    r2 = v**2 + x**2
    return -1j / 32 * (4 * v * x * (12 + 3 * v**2 + 5 * x**2)
                       + 12 * (2 + 4 * v**2 + 4 * x**2 + v**4 + 2 * v**2 * x**2 + x**4) * T
                       - 16 * v * x * (3 + r2) * c(2 * T)
                       + 4 * v * x * (v**2 - x**2) * c(4 * T)
                       - 8 * (v**2 - x**2) * (3 + r2) * s(2 * T)
                       + (v**4 - 6 * v**2 * x**2 + x**4) * s(4 * T))


def _d41(x, v, T):
    e = lambda k: cmath.exp(1j * k * T)  # noqa: E731
    w, wb = v - 1j * x, v + 1j * x
    r2 = v**2 + x**2
    return -1j / (8 * math.sqrt(2)) * (
        2 * w**3 * e(-3)
        + (12 * v + 12j * x + 3 * v**3 + 9j * v**2 * x + 15 * v * x**2 + 5j * x**3) * e(-1)
        + 12j * w * (2 + r2) * T * e(-1)
        - 6 * wb * (2 + r2) * e(1)
        + wb**3 * e(3))


def _d50(x, v, T):
    c, s = math.cos, math.sin
    big = 6 + 6 * v**2 + 6 * x**2 + v**4 + 2 * v**2 * x**2 + x**4
    return -1j / 240 * (
        4 * v * (225 + 200 * v**2 + 300 * x**2 + 32 * v**4 + 80 * v**2 * x**2 + 60 * x**4)
        - 150 * v * big * c(T)
        + 25 * v * (4 * v**2 - 12 * x**2 + v**4 - 2 * v**2 * x**2 - 3 * x**4) * c(3 * T)
        - 3 * v * (v**4 - 10 * v**2 * x**2 + 5 * x**4) * c(5 * T)
        + 150 * x * big * s(T)
        - 25 * x * (12 * v**2 - 4 * x**2 + 3 * v**4 + 2 * v**2 * x**2 - x**4) * s(3 * T)
        + 3 * x * (5 * v**4 - 10 * v**2 * x**2 + x**4) * s(5 * T))


def _d51(x, v, T):
    e = lambda k: cmath.exp(1j * k * T)  # noqa: E731
    w, wb = v - 1j * x, v + 1j * x
    r2 = v**2 + x**2
    return 1 / (48 * math.sqrt(2)) * (
        5 * w**4 * e(-4)
        - 60 * w**2 * (3 + r2) * e(-2)
        + 4 * (45 + 120 * v**2 - 120j * v * x + 60 * x**2 + 32 * v**4 - 32j * v**3 * x
               + 48 * v**2 * x**2 - 48j * v * x**3 + 12 * x**4) * e(-1)
        - 90 * (2 + 4 * v**2 + 4 * x**2 + v**4 + 2 * v**2 * x**2 + x**4)
        + 20 * wb**2 * (3 + r2) * e(2)
        - 3 * wb**4 * e(4))


def _d60(x, v, T):
    c, s = math.cos, math.sin
    r2 = v**2 + x**2
    d2 = v**2 - x**2
    mid = 12 + 8 * v**2 + 8 * x**2 + v**4 + 2 * v**2 * x**2 + x**4
    return -1j / 192 * (
        4 * v * x * (270 + 135 * v**2 + 225 * x**2 + 15 * v**4 + 40 * v**2 * x**2 + 33 * x**4)
        + 60 * (6 + 18 * v**2 + 18 * x**2 + 9 * v**4 + 18 * v**2 * x**2 + 9 * x**4
                + v**6 + 3 * v**4 * x**2 + 3 * v**2 * x**4 + x**6) * T
        - 90 * v * x * mid * c(2 * T)
        + 36 * v * x * d2 * (5 + r2) * c(4 * T)
        - 2 * v * x * (3 * v**4 - 10 * v**2 * x**2 + 3 * x**4) * c(6 * T)
        - 45 * d2 * mid * s(2 * T)
        + 9 * (5 * v**4 - 30 * v**2 * x**2 + 5 * x**4
               + v**6 - 5 * v**4 * x**2 - 5 * v**2 * x**4 + x**6) * s(4 * T)
        - d2 * (v**4 - 14 * v**2 * x**2 + x**4) * s(6 * T))


def _d61(x, v, T):
    e = lambda k: cmath.exp(1j * k * T)  # noqa: E731
    w, wb = v - 1j * x, v + 1j * x
    r2 = v**2 + x**2
    big = 6 + 6 * v**2 + 6 * x**2 + v**4 + 2 * v**2 * x**2 + x**4
    return 1j / (64 * math.sqrt(2)) * (
        3 * w**5 * e(-5)
        - 30 * w**3 * (4 + r2) * e(-3)
        - 4 * (90 * v + 90j * x + 45 * v**3 + 135j * v**2 * x + 225 * v * x**2 + 75j * x**3
               + 5 * v**5 + 25j * v**4 * x + 40 * v**3 * x**2 + 40j * v**2 * x**3
               + 55 * v * x**4 + 11j * x**5) * e(-1)
        - 120j * w * big * T * e(-1)
        + 60 * wb * big * e(1)
        - 15 * wb**3 * (4 + r2) * e(3)
        + 2 * wb**5 * e(5))


_TABLE = {
    (3, 0): _d30, (3, 1): _d31,
    (4, 0): _d40, (4, 1): _d41,
    (5, 0): _d50, (5, 1): _d51,
    (6, 0): _d60, (6, 1): _d61,
}


def closed_form_D_reference(lam: int, n: int, xt: float, vt: float, omega_t: float,
                            beta: float = 1.0) -> complex:
    """D_n for V = beta x**lam from the closed-form table (lam 3..6, n 0..1)."""
    try:
        form = _TABLE[(lam, n)]
    except KeyError:
        raise UnsupportedIndex(f"no closed form for lambda={lam}, n={n}") from None
    return beta * complex(form(float(xt), float(vt), float(omega_t)))
