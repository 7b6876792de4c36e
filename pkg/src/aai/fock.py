"""Second-order mean position from truncated Fock-space matrices.

Working in the frame that follows the classical packet, the state is
e^{-it/2} D(alpha(t)) sum_n a_n(t) |n> with a_n = e^{-int} chi_n and

    i d chi / dt = W(t) chi,   W(t)_{nk} = <n| V(X + x_c(t)) |k> e^{i(n-k)t},

X = eta (a + a^dagger).  Expanding chi = e_0 + c1 + c2 + ... gives

    c1_n(t) = -i int_0^t W_{n0}(s) ds                     (so D_n = e^{-int} c1_n)
    c2_n(t) = -i int_0^t sum_k W_{nk}(s) c1_k(s) ds

and, since <x> = x_c + sqrt2 Re sum_n sqrt(n+1) a_n^* a_{n+1} for the exactly
normalized state, the second-order part of the mean position is

    x2 = sqrt2 Re[ e^{-it} c2_1(t) + sum_{n>=0} sqrt(n+1) D_n^* D_{n+1} ].

The D_n come from the analytic first-order engine; c2 is a nested
Gauss-Legendre double integral whose order is doubled until two successive
results agree to 1e-8 relative.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DimensionTooSmall, QuadratureNotConverged
from .gc import ETA, first_order_coeffs
from .units import DIMENSIONLESS, SQRT2, PolyPotential, TrapSpec, as_poly

QUAD_RTOL = 1e-8
MAX_QUAD_ORDER = 512


def position_matrix(dim: int) -> np.ndarray:
    """eta (a + a^dagger) truncated to ``dim`` levels."""
    off = ETA * np.sqrt(np.arange(1, dim))
    return np.diag(off, 1) + np.diag(off, -1)


def shifted_position_power_matrix(power: int, x_c: float, dim: int) -> np.ndarray:
    """(X + x_c)**power on the first ``dim`` levels, free of truncation error.

    The power is taken in dimension dim + power and then cropped, so every
    retained entry sees all the intermediate levels it needs.
    """
    if power < 0:
        raise ValueError("power must be non-negative")
    if dim < power + 1:
        raise DimensionTooSmall(f"dimension {dim} cannot hold x**{power}|0> (need {power + 1})")
    big = dim + power
    m = position_matrix(big) + x_c * np.eye(big)
    return np.linalg.matrix_power(m, power)[:dim, :dim]


@lru_cache(maxsize=32)
def _x_powers(top: int, dim: int) -> np.ndarray:
    big = dim + top
    x = position_matrix(big)
    out = np.empty((top + 1, dim, dim))
    acc = np.eye(big)
    for j in range(top + 1):
        out[j] = acc[:dim, :dim]
        acc = acc @ x
    out.setflags(write=False)
    return out


def _centre_polynomial(potential: PolyPotential, dim: int) -> np.ndarray:
    """P[m] with V(X + x_c) = sum_m x_c**m P[m] on ``dim`` levels."""
    top = max(potential.terms)
    xp = _x_powers(top, dim)
    out = np.zeros((top + 1, dim, dim))
    for power, beta in potential.terms.items():
        for m in range(power + 1):
            out[m] += beta * math.comb(power, m) * xp[power - m]
    return out


def _centre(alpha: complex, t):
    return SQRT2 * (alpha.real * np.cos(t) + alpha.imag * np.sin(t))


def _monomials(x, top):
    return np.asarray(x)[..., None] ** np.arange(top + 1)


def _c2_level1(alpha: complex, poly: np.ndarray, tau: float, order: int) -> complex:
    """c2_1(tau) by nested Gauss-Legendre quadrature of the given order."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    top, dim = poly.shape[0] - 1, poly.shape[1]
    levels = np.arange(dim)
    col0 = poly[:, :, 0]   # (top+1, dim): column <k|.|0>
    row1 = poly[:, 1, :]   # (top+1, dim): row <1|.|k>

    t2 = 0.5 * tau * (nodes + 1)
    w2 = 0.5 * tau * weights
    t1 = 0.5 * t2[:, None] * (nodes + 1)          # (outer, inner)
    w1 = 0.5 * t2[:, None] * weights

    inner = _monomials(_centre(alpha, t1), top) @ col0         # (outer, inner, dim)
    inner = inner * np.exp(1j * levels * t1[..., None])
    c1 = -1j * np.einsum("ab,abk->ak", w1, inner)              # c1_k(t2)

    outer = _monomials(_centre(alpha, t2), top) @ row1          # (outer, dim)
    outer = outer * np.exp(1j * (1 - levels) * t2[:, None])
    return complex(-1j * np.sum(w2 * np.sum(outer * c1, axis=1)))


def second_order_amplitude(alpha_i: complex, potential: PolyPotential, tau: float,
                           quad_order: int = 16, dim: int | None = None,
                           max_order: int = MAX_QUAD_ORDER):
    """(c2_1(tau), order used), doubling the order until converged."""
    top = max(potential.terms)
    dim = 2 * top + 1 if dim is None else dim
    if dim < 2 * top + 1:
        raise DimensionTooSmall(f"second order needs at least {2 * top + 1} levels, got {dim}")
    if quad_order < 2:
        raise ValueError("quadrature order must be at least 2")
    poly = _centre_polynomial(potential, dim)
    order = quad_order
    prev = _c2_level1(alpha_i, poly, tau, order)
    while True:
        order *= 2
        cur = _c2_level1(alpha_i, poly, tau, order)
        if abs(cur - prev) <= QUAD_RTOL * abs(cur) or cur == prev:
            return cur, order
        if order >= max_order:
            raise QuadratureNotConverged(
                f"c2 changed by {abs(cur - prev):.3g} between orders {order // 2} and {order}")
        prev = cur


def second_order_mean_position(alpha_i: complex, pert, trap: TrapSpec = DIMENSIONLESS, t: float = 0.0,
                               quad_order: int = 16, dim: int | None = None) -> float:
    """x2 with <x> = x0 + x1 + x2 + O(beta**3), in the trap's length units."""
    alpha_i = complex(alpha_i)
    potential = as_poly(pert, trap)
    tau = float(t) * trap.omega
    if potential.is_zero or tau == 0:
        return 0.0
    c2, _ = second_order_amplitude(alpha_i, potential, tau, quad_order, dim)
    d = first_order_coeffs(alpha_i, potential, DIMENSIONLESS, tau).D
    cross = sum(math.sqrt(n + 1) * d[n].conjugate() * d[n + 1] for n in range(len(d) - 1))
    x2 = SQRT2 * (complex(math.cos(tau), -math.sin(tau)) * c2 + cross).real
    return float(x2 * trap.ell)


def cubic_x2_closed_form(beta: float, amplitude: float, omega_t: float) -> float:
    """Closed-form second-order shift for V = beta x**3, x_i = 0, v_i = amplitude (oscillator units)."""
    T = omega_t
    return (beta**2 * amplitude**3 / 16
            * (-60 * T * math.cos(T) + 5 * math.sin(T) + 32 * math.sin(2 * T) - 3 * math.sin(3 * T))
            + 2.5 * beta**2 * amplitude * (-3 * T * math.cos(T) + math.sin(T) + math.sin(2 * T)))
