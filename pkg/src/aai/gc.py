"""First-order perturbation theory in the generalized-coherent-state basis.

A generalized coherent state |alpha, n> is the displaced number state
D(alpha)|n>.  Under H0 + V with V = sum_lam beta_lam x**lam the initial
ground-state packet |alpha, 0> evolves, to first order, into

    e^{-i t/2} [ |alpha(t), 0> + sum_{n=0}^{lam} D_n(t) |alpha(t), n> ],
    D_n(t) = -i e^{-i n t} int_0^t e^{i n s} <alpha(s), n| V |alpha(s), 0> ds,

with alpha(t) = alpha e^{-it}.  The matrix element is a polynomial in the
packet centre x_c(s), which is a two-frequency trig polynomial, so every D_n
is an exact :class:`~aai.trigpoly.TrigPoly`.

Everything here runs in oscillator units (eta = 1/sqrt 2).  Public functions
take a :class:`~aai.units.TrapSpec` and convert at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import UnsupportedIndex
from .trigpoly import TrigPoly, trigpoly_integrate
from .units import DIMENSIONLESS, SQRT2, PolyPotential, TrapSpec, as_poly

ETA = 1.0 / SQRT2
HERMITE_MAX_LEVEL = 64


# ---------------------------------------------------------------------------
# matrix-element polynomials

@lru_cache(maxsize=None)
def gaussian_moments(k_max: int) -> tuple:
    """q_k = <0|(a + a^dagger)**k|0> for k = 0..k_max.

    Built from the ladder recursion q_{k+2} = k(k-1) q_{k-2} + q_k with
    q_0 = q_2 = 1 and zero odd moments.
    """
    q = [0] * (k_max + 1)
    for k in range(0, k_max + 1, 2):
        if k < 4:
            q[k] = 1
        else:
            j = k - 2
            q[k] = j * (j - 1) * q[j - 2] + q[j]
    return tuple(q)


@dataclass(frozen=True)
class LadderPoly:
    """<alpha, n| x**power |alpha, 0> as a polynomial in the packet centre.

    The coefficient of x_c**j is ``coeffs[j] * eta**(power - j) / sqrt(n!)``
    with integer ``coeffs``; every term carries the same total length
    dimension, so the eta bookkeeping never needs storing.
    """

    power: int
    level: int
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def coefficient(self, j: int, eta: float = ETA) -> float:
        if not 0 <= j < len(self.coeffs):
            return 0.0
        return float(self.coeffs[j]) * eta ** (self.power - j) / math.sqrt(math.factorial(self.level))

    def float_coeffs(self, eta: float = ETA) -> np.ndarray:
        """Ascending floating-point coefficients for the given eta."""
        return np.array([self.coefficient(j, eta) for j in range(len(self.coeffs))])

    def __call__(self, xc, eta: float = ETA):
        return np.polynomial.polynomial.polyval(xc, self.float_coeffs(eta))


@lru_cache(maxsize=None)
def _float_coeffs(power: int, level: int) -> np.ndarray:
    c = f_n(power, level).float_coeffs()
    c.setflags(write=False)
    return c


def p_lambda(power: int) -> LadderPoly:
    """<alpha,0| x**power |alpha,0> = sum_even k C(power,k) q_k eta**k x_c**(power-k)."""
    if power < 0:
        raise ValueError("power must be non-negative")
    return f_n(power, 0)


@lru_cache(maxsize=None)
def f_n(power: int, level: int) -> LadderPoly:
    """<alpha,n| x**power |alpha,0>, via f_n = (eta/sqrt n) d f_{n-1} / dx_c.

    Coefficients are exact integers (kept as Fractions); the recursion never
    touches floating point.
    """
    if power < 0 or level < 0:
        raise ValueError("power and level must be non-negative")
    if level == 0:
        q = gaussian_moments(power)
        coeffs = [Fraction(0)] * (power + 1)
        for k in range(0, power + 1, 2):
            coeffs[power - k] = Fraction(math.comb(power, k) * q[k])
        return LadderPoly(power, 0, tuple(coeffs))
    if level > power:
        return LadderPoly(power, level, (Fraction(0),))
    prev = f_n(power, level - 1).coeffs
    coeffs = tuple(j * prev[j] for j in range(1, len(prev)))
    return LadderPoly(power, level, coeffs)


# ---------------------------------------------------------------------------
# states

@dataclass(frozen=True)
class GCState:
    """The displaced number state D(alpha)|n>."""

    alpha: complex
    n: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("level must be non-negative")
        object.__setattr__(self, "alpha", complex(self.alpha))


@dataclass(frozen=True)
class GCFirstOrderState:
    """First-order state at time ``t`` (oscillator units).

    ``D[n]`` are the coefficients of |alpha_t, n>; the global factor
    e^{-it/2} is kept out of them and exposed as :attr:`global_phase`.
    """

    alpha_i: complex
    t: float
    D: np.ndarray
    potential: PolyPotential
    trap: TrapSpec = DIMENSIONLESS

    @property
    def alpha_t(self) -> complex:
        return self.alpha_i * complex(math.cos(self.t), -math.sin(self.t))

    @property
    def global_phase(self) -> float:
        return -0.5 * self.t

    @property
    def max_level(self) -> int:
        return len(self.D) - 1

    def coefficient(self, n: int) -> complex:
        return complex(self.D[n]) if 0 <= n < len(self.D) else 0j

    @property
    def alpha_bar(self) -> complex:
        return self.alpha_t + self.coefficient(1)


def _centre_powers(alpha: complex, top: int) -> np.ndarray:
    """Coefficient stack of x_c(s)**j, j = 0..top, padded to frequency top."""
    xc = TrigPoly.harmonic(SQRT2 * alpha.real, SQRT2 * alpha.imag)
    width = 2 * top + 1
    out = np.zeros((top + 1, 2, width), dtype=complex)
    power = TrigPoly.constant(1.0)
    for j in range(top + 1):
        c = power.coeffs
        k = (c.shape[1] - 1) // 2
        out[j, :, top - k : top + k + 1] = c
        if j < top:
            power = power * xc
    return out


def matrix_element_series(alpha: complex, potential: PolyPotential, levels=None) -> list:
    """<alpha(s), n| V |alpha(s), 0> as trig polynomials in s.

    ``levels`` defaults to n = 0..max power; levels above a term's power get
    nothing from it.
    """
    top = max(potential.terms) if potential.terms else 0
    if levels is None:
        levels = range(top + 1)
    stack = _centre_powers(alpha, top).reshape(top + 1, -1)
    acc = np.zeros((len(levels), stack.shape[1]), dtype=complex)
    for power, beta in potential.terms.items():
        if beta == 0:
            continue
        for i, n in enumerate(levels):
            if n <= power:
                c = _float_coeffs(power, n)
                acc[i] += beta * (c @ stack[: len(c)])
    return [TrigPoly._raw(row.reshape(2, -1), 1.0) for row in acc]


def d_series(alpha: complex, potential: PolyPotential) -> list:
    """D_n(t) as trig polynomials in t (oscillator units), n = 0..max power."""
    out = []
    for n, g in enumerate(matrix_element_series(alpha, potential)):
        out.append(g.shift(n).antiderivative().shift(-n) * -1j)
    return out


def _d_values(alpha: complex, potential: PolyPotential, tau: float, levels=None) -> np.ndarray:
    series = matrix_element_series(alpha, potential, levels)
    if levels is None:
        levels = range(len(series))
    out = np.empty(len(series), dtype=complex)
    for n, g in zip(levels, series):
        out[n] = -1j * complex(math.cos(n * tau), -math.sin(n * tau)) * trigpoly_integrate(g.shift(n), tau)
    return out


def first_order_coeffs(alpha_i: complex, pert, trap: TrapSpec = DIMENSIONLESS, t: float = 0.0,
                       max_level: int | None = None) -> GCFirstOrderState:
    """First-order GC coefficients D_0..D_lambda after time ``t``.

    ``alpha_i`` is the dimensionless coherent amplitude at t = 0 and ``t`` is
    in the trap's time units.  The integrals are done analytically.  Pass
    ``max_level`` to stop early when only the low coefficients are needed
    (the mean trajectory uses D_0 and D_1 alone).
    """
    alpha_i = complex(alpha_i)
    potential = as_poly(pert, trap)
    tau = float(t) * trap.omega
    levels = None if max_level is None else range(max_level + 1)
    return GCFirstOrderState(alpha_i, tau, _d_values(alpha_i, potential, tau, levels), potential, trap)


def mean_phase_space(state: GCFirstOrderState):
    """(x_bar, v_bar, alpha_bar) in physical units, from alpha_bar = alpha(t) + D_1."""
    a = state.alpha_bar
    scale = SQRT2 * state.trap.ell
    return scale * a.real, scale * state.trap.omega * a.imag, a


def mean_trajectory(alpha_i: complex, pert, trap: TrapSpec = DIMENSIONLESS, times=0.0):
    """x_bar(t), v_bar(t) on an array of times via the D_1 trig polynomial."""
    potential = as_poly(pert, trap)
    tau = np.asarray(times, dtype=float) * trap.omega
    alpha_i = complex(alpha_i)
    series = d_series(alpha_i, potential)
    d1 = series[1](tau) if len(series) > 1 else np.zeros_like(tau, dtype=complex)
    a = alpha_i * np.exp(-1j * tau) + d1
    scale = SQRT2 * trap.ell
    return scale * np.real(a), scale * trap.omega * np.imag(a)


def mean_force(state: GCFirstOrderState) -> float:
    """-<dU/dx> to first order (oscillator units).

    The harmonic part contributes -x_bar; the perturbation is averaged over
    the unperturbed packet, <alpha,0| V'(x) |alpha,0> = sum lam beta p_{lam-1}(x_c).
    """
    xc = SQRT2 * state.alpha_t.real
    force = -SQRT2 * state.alpha_bar.real
    for power, beta in state.potential.terms.items():
        if power:
            force -= power * beta * p_lambda(power - 1)(xc)
    return float(force)


def gc_overlap(a: GCState, b: GCState) -> complex:
    """<alpha, n| beta, 0> = <alpha|beta> (beta - alpha)**n / sqrt(n!)."""
    if b.n != 0:
        raise ValueError("the right-hand state must be a displaced ground state")
    alpha, beta = a.alpha, b.alpha
    diff = beta - alpha
    base = np.exp(-0.5 * abs(diff) ** 2 + 0.5 * (alpha.conjugate() * beta - beta.conjugate() * alpha))
    return complex(base * diff**a.n / math.sqrt(math.factorial(a.n)))


# ---------------------------------------------------------------------------
# wave functions

def oscillator_functions(y, n_max: int) -> np.ndarray:
    """Normalized eigenfunctions phi_0..phi_{n_max} at y (oscillator units).

    Uses phi_{n+1} = sqrt(2/(n+1)) y phi_n - sqrt(n/(n+1)) phi_{n-1}, which
    never forms a bare Hermite polynomial and so cannot overflow.
    """
    if n_max > HERMITE_MAX_LEVEL:
        raise UnsupportedIndex(f"levels above {HERMITE_MAX_LEVEL} are not supported")
    y = np.asarray(y, dtype=float)
    out = np.empty((n_max + 1,) + y.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * y * y)
    if n_max >= 1:
        out[1] = SQRT2 * y * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * y * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def h_n(n: int) -> float:
    """H_n(0) / sqrt(2**n n!), the value of phi_n / phi_0 at the packet centre."""
    if n % 2:
        return 0.0
    value = 1.0
    for m in range(1, n, 2):
        value *= -math.sqrt(m / (m + 1))
    return value


def _displaced_levels(alpha: complex, x, n_max: int):
    """<x| D(alpha) |n> for n = 0..n_max (oscillator units)."""
    xc, vc = SQRT2 * alpha.real, SQRT2 * alpha.imag
    x = np.asarray(x, dtype=float)
    carrier = np.exp(1j * (vc * (x - xc) + 0.5 * xc * vc))
    return oscillator_functions(x - xc, n_max) * carrier


def gc_wavefunction_eval(state, x, t: float = 0.0, trap: TrapSpec = DIMENSIONLESS):
    """Position-space amplitude of a GC state, in units of ell**-1/2.

    A :class:`GCState` is propagated by H0 for time ``t`` first, giving the
    central phase x_c v_c / 2 - (n + 1/2) t.  A :class:`GCFirstOrderState`
    already carries its time; ``t`` is ignored and the global e^{-it/2} is
    included.
    """
    x = np.asarray(x, dtype=float) / trap.ell
    norm = trap.ell**-0.5
    if isinstance(state, GCState):
        tau = float(t) * trap.omega
        alpha = state.alpha * complex(math.cos(tau), -math.sin(tau))
        levels = _displaced_levels(alpha, x, state.n)
        return norm * levels[state.n] * np.exp(-1j * (state.n + 0.5) * tau)
    if isinstance(state, GCFirstOrderState):
        levels = _displaced_levels(state.alpha_t, x, state.max_level)
        amp = np.tensordot(state.D, levels, axes=1) + levels[0]
        return norm * amp * np.exp(1j * state.global_phase)
    raise TypeError(f"unsupported state type {type(state).__name__}")


@dataclass(frozen=True)
class CentralPhase:
    """Phase at the shifted packet centre, relative to the initial centre.

    ``perturbed`` includes the level-mixing correction sum_even h_n Im D_n;
    ``propagation`` is the path form with Im D_0 in its place.  Neither
    includes the global -omega t / 2.
    """

    perturbed: float
    propagation: float


def central_phase_perturbed(state: GCFirstOrderState) -> CentralPhase:
    xi, vi = SQRT2 * state.alpha_i.real, SQRT2 * state.alpha_i.imag
    a = state.alpha_t
    x0, v0 = SQRT2 * a.real, SQRT2 * a.imag
    x1 = SQRT2 * state.coefficient(1).real
    path = 0.5 * (x0 * v0 - xi * vi + 2 * x1 * v0)
    mixing = sum(h_n(n) * state.D[n].imag for n in range(0, len(state.D), 2))
    return CentralPhase(path + mixing, path + state.coefficient(0).imag)
