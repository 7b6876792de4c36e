"""Exponential trigonometric polynomials with at most linear secular growth.

A :class:`TrigPoly` is the finite sum

    f(t) = sum_{k, p} c[k, p] * t**p * exp(i k omega t),   p in {0, 1},

which is closed under the operations first-order perturbation theory needs:
products (as long as no t**2 appears), definite integrals from 0, and
derivatives.  Frequencies are integer multiples of omega, so resonance
(k == 0) is an exact test on the index rather than a float comparison.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import PowerOverflow


class TrigPoly:
    __slots__ = ("_c", "omega")

    def __init__(self, coeffs, omega: float = 1.0):
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 1:
            c = np.stack([c, np.zeros_like(c)])
        if c.ndim != 2 or c.shape[0] != 2 or c.shape[1] % 2 != 1:
            raise ValueError("coefficient array must have shape (2, 2K+1)")
        self._c = _trim(c)
        self._c.setflags(write=False)
        self.omega = float(omega)

    @classmethod
    def _raw(cls, c, omega):
        # trusted internal constructor: c is a fresh (2, 2K+1) complex array
        obj = object.__new__(cls)
        c = _trim(c)
        c.setflags(write=False)
        obj._c = c
        obj.omega = omega
        return obj

    # construction ------------------------------------------------------
    @classmethod
    def from_terms(cls, terms, omega: float = 1.0) -> "TrigPoly":
        """Build from a mapping ``{(k, p): coefficient}``."""
        if not terms:
            return cls.zero(omega)
        kmax = max(abs(k) for k, _ in terms)
        c = np.zeros((2, 2 * kmax + 1), dtype=complex)
        for (k, p), value in terms.items():
            if p not in (0, 1):
                raise PowerOverflow(f"t-power {p} not representable")
            c[p, k + kmax] += value
        return cls(c, omega)

    @classmethod
    def zero(cls, omega: float = 1.0) -> "TrigPoly":
        return cls(np.zeros((2, 1)), omega)

    @classmethod
    def constant(cls, value, omega: float = 1.0) -> "TrigPoly":
        return cls([[value], [0]], omega)

    @classmethod
    def exp(cls, k: int, coeff=1.0, omega: float = 1.0) -> "TrigPoly":
        """coeff * exp(i k omega t)."""
        return cls.from_terms({(int(k), 0): coeff}, omega)

    @classmethod
    def cos(cls, k: int = 1, coeff=1.0, omega: float = 1.0) -> "TrigPoly":
        return cls.from_terms({(k, 0): coeff / 2, (-k, 0): coeff / 2}, omega)

    @classmethod
    def sin(cls, k: int = 1, coeff=1.0, omega: float = 1.0) -> "TrigPoly":
        return cls.from_terms({(k, 0): coeff / 2j, (-k, 0): -coeff / 2j}, omega)

    @classmethod
    def harmonic(cls, x0: float, v0: float, omega: float = 1.0) -> "TrigPoly":
        """Free oscillator x0 cos(omega t) + (v0/omega) sin(omega t)."""
        a = (x0 - 1j * v0 / omega) / 2
        return cls.from_terms({(1, 0): a, (-1, 0): np.conj(a)}, omega)

    # inspection ---------------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def kmax(self) -> int:
        return (self._c.shape[1] - 1) // 2

    @property
    def max_power(self) -> int:
        return 1 if _nz(self._c[1]) else 0

    @property
    def terms(self) -> dict:
        K = self.kmax
        return {
            (j - K, p): complex(self._c[p, j])
            for p in (0, 1)
            for j in range(self._c.shape[1])
            if self._c[p, j] != 0
        }

    def coeff(self, k: int, p: int = 0) -> complex:
        j = k + self.kmax
        if 0 <= j < self._c.shape[1] and p in (0, 1):
            return complex(self._c[p, j])
        return 0j

    def is_real(self, rtol: float = 1e-13) -> bool:
        """Whether c[-k, p] == conj(c[k, p]) for all terms."""
        scale = max(np.abs(self._c).max(), 1e-300)
        return bool(np.all(np.abs(self._c - np.conj(self._c[:, ::-1])) <= rtol * scale))

    def __call__(self, t):
        K = self.kmax
        k = np.arange(-K, K + 1)
        if np.ndim(t) == 0:
            t = float(t)
            phase = np.exp((1j * self.omega * t) * k)
            out = complex(phase @ self._c[0])
            if _nz(self._c[1]):
                out += t * complex(phase @ self._c[1])
            return out
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * self.omega * np.multiply.outer(t, k))
        out = phase @ self._c[0]
        if _nz(self._c[1]):
            out = out + t * (phase @ self._c[1])
        return out

    # algebra ------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, TrigPoly):
            return TrigPoly.constant(other, self.omega)
        if other.omega != self.omega:
            raise ValueError("trig polynomials with different carrier frequencies")
        return other

    def __add__(self, other):
        other = self._check(other)
        K = max(self.kmax, other.kmax)
        return TrigPoly._raw(_pad(self._c, K) + _pad(other._c, K), self.omega)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly._raw(-self._c, self.omega)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TrigPoly):
            return TrigPoly._raw(self._c * complex(other), self.omega)
        return trigpoly_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return TrigPoly._raw(self._c / complex(scalar), self.omega)

    def __pow__(self, n: int):
        if n < 0 or int(n) != n:
            raise ValueError("only non-negative integer powers")
        out = TrigPoly.constant(1.0, self.omega)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def shift(self, k: int) -> "TrigPoly":
        """Multiply by exp(i k omega t)."""
        if k == 0:
            return self
        K = self.kmax
        width = 2 * K + 1
        c = np.zeros((2, width + 2 * abs(k)), dtype=complex)
        start = abs(k) + k
        c[:, start : start + width] = self._c
        return TrigPoly._raw(c, self.omega)

    def conj(self) -> "TrigPoly":
        """Complex conjugate as a function of real t."""
        return TrigPoly._raw(np.conj(self._c[:, ::-1]), self.omega)

    @property
    def real(self) -> "TrigPoly":
        return (self + self.conj()) / 2

    @property
    def imag(self) -> "TrigPoly":
        return (self - self.conj()) / 2j

    def derivative(self) -> "TrigPoly":
        K = self.kmax
        ik = 1j * self.omega * np.arange(-K, K + 1)
        c = np.empty_like(self._c)
        c[0] = ik * self._c[0] + self._c[1]
        c[1] = ik * self._c[1]
        return TrigPoly._raw(c, self.omega)

    def antiderivative(self) -> "TrigPoly":
        """Symbolic integral from 0 to t; vanishes at t = 0."""
        return trigpoly_antiderivative(self)

    def integrate(self, t):
        return trigpoly_integrate(self, t)

    def __repr__(self):
        parts = []
        for (k, p), c in sorted(self.terms.items()):
            parts.append(f"({c:.6g})" + ("*t" if p else "") + (f"*e^{{{k}iwt}}" if k else ""))
        return "TrigPoly(" + (" + ".join(parts) or "0") + ")"


def _pad(c, K):
    k0 = (c.shape[1] - 1) // 2
    if k0 == K:
        return c
    out = np.zeros((2, 2 * K + 1), dtype=complex)
    out[:, K - k0 : K + k0 + 1] = c
    return out


def _nz(row) -> bool:
    return np.count_nonzero(row) > 0


def _trim(c):
    if c.shape[1] == 1 or c[0, 0] != 0 or c[1, 0] != 0 or c[0, -1] != 0 or c[1, -1] != 0:
        return c
    K = (c.shape[1] - 1) // 2
    nz = np.nonzero(np.any(c != 0, axis=0))[0]
    if nz.size == 0:
        return np.zeros((2, 1), dtype=complex)
    need = int(max(abs(nz[0] - K), abs(nz[-1] - K)))
    return np.ascontiguousarray(c[:, K - need : K + need + 1])


def trigpoly_mul(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """Pointwise product; raises PowerOverflow if a t**2 term would appear."""
    b = a._check(b)
    a1, b1 = _nz(a._c[1]), _nz(b._c[1])
    if a1 and b1:
        raise PowerOverflow("product of two secular trig polynomials has a t**2 term")
    out = np.zeros((2, a._c.shape[1] + b._c.shape[1] - 1), dtype=complex)
    out[0] = np.convolve(a._c[0], b._c[0])
    if b1:
        out[1] = np.convolve(a._c[0], b._c[1])
    elif a1:
        out[1] = np.convolve(a._c[1], b._c[0])
    return TrigPoly._raw(out, a.omega)


@lru_cache(maxsize=64)
def _safe_k(K: int) -> np.ndarray:
    # frequency indices with the resonant slot set to 1 so division is safe there
    k = np.arange(-K, K + 1, dtype=float)
    k[K] = 1.0
    k.setflags(write=False)
    return k


def trigpoly_antiderivative(a: TrigPoly) -> TrigPoly:
    c = a._c
    K = (c.shape[1] - 1) // 2
    ikw = 1j * a.omega * _safe_k(K)
    out = np.zeros_like(c)
    # p = 0: (e^{ikwt} - 1)/(ikw); resonant k = 0 gives t
    out[0] = c[0] / ikw
    out[0, K] = 0
    out[0, K] = -out[0].sum()
    out[1, K] = c[0, K]
    # p = 1: t e^{ikwt}/(ikw) - (e^{ikwt} - 1)/(ikw)^2
    if _nz(c[1]):
        if c[1, K] != 0:
            raise PowerOverflow("integral of a resonant secular term is quadratic in t")
        lin = c[1] / ikw
        quad = lin / ikw
        quad[K] = 0
        lin[K] = c[0, K]
        out[1] = lin
        out[0] -= quad
        out[0, K] += quad.sum()
    return TrigPoly._raw(out, a.omega)


def trigpoly_integrate(a: TrigPoly, t):
    """Definite integral of ``a`` from 0 to ``t`` (scalar or array).

    Unlike :func:`trigpoly_antiderivative` this also accepts a resonant
    secular term, whose integral t**2/2 has no TrigPoly form.
    """
    K = a.kmax
    c1 = a._c[1]
    if c1[K] == 0:
        return trigpoly_antiderivative(a)(t)
    c = a._c.copy()
    c[1, K] = 0
    t = np.asarray(t, dtype=float)
    return TrigPoly._raw(c, a.omega).antiderivative()(t) + c1[K] * t**2 / 2
