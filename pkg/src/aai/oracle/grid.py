"""Grid solution of the 1D Schroedinger equation with a staggered leapfrog.

The real part of psi lives on integer time steps and the imaginary part on
half steps (Visscher's scheme):

    Re psi(t + dt)      = Re psi(t)      + dt H Im psi(t + dt/2)
    Im psi(t + 3dt/2)   = Im psi(t + dt/2) - dt H Re psi(t + dt)

H uses a central finite-difference Laplacian of selectable order with hard
walls at the grid ends.  The grid, its step and all arrays are in oscillator
units; the public entry points take a TrapSpec and convert.

A :class:`GridWavefunction` stores psi synchronized at its time ``t`` and, if
it came out of :func:`evolve`, the staggered imaginary part too, so that
continuing with the same step and potential is bit-for-bit the same as one
long run.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import AliasRisk, BoundaryLeak, GridTooNarrow, PhaseUndefined, UnstableStep
from ..units import DIMENSIONLESS, PhaseSpacePoint, TrapSpec, as_poly
from . import backend

DEFAULT_DX = 1.0 / 32
DEFAULT_MARGIN = 10.0
DEFAULT_STENCIL_ORDER = 8
DT_ACCURACY = 2.5e-3        # default step is DT_ACCURACY / (1 + <H>)
STABILITY_SAFETY = 0.5
TAIL_LIMIT = 1e-12
LEAK_LIMIT = 1e-9
NORM_LIMIT = 1e-6
OVERLAP_LIMIT = 1e-6
CHECK_EVERY = 4096
SNAPSHOT_MAGIC = b"AAIWF1\0\0"


def fd2_weights(order: int) -> np.ndarray:
    """Central weights for f'' with error O(dx**order), length order + 1."""
    if order < 2 or order % 2:
        raise ValueError("stencil order must be an even integer >= 2")
    p = order // 2
    c = np.zeros(p + 1)
    for k in range(1, p + 1):
        c[k] = 2 * (-1) ** (k + 1) * math.factorial(p) ** 2 / (
            k * k * math.factorial(p - k) * math.factorial(p + k))
    c[0] = -2 * c[1:].sum()
    return np.concatenate([c[:0:-1], c])


def fd1_weights(order: int) -> np.ndarray:
    """Central weights for f' with error O(dx**order), as a convolution kernel."""
    if order < 2 or order % 2:
        raise ValueError("stencil order must be an even integer >= 2")
    p = order // 2
    c = np.zeros(2 * p + 1)
    for k in range(1, p + 1):
        w = (-1) ** (k + 1) * math.factorial(p) ** 2 / (k * math.factorial(p - k) * math.factorial(p + k))
        c[p + k], c[p - k] = w, -w
    # np.convolve flips the kernel, so store it reversed
    return c[::-1].copy()


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [x_min, x_max] (oscillator lengths).

    ``dt`` (oscillator times) fixes the leapfrog step; ``None`` picks it per
    run from the accuracy rule and the stability bound.
    """

    x_min: float
    x_max: float
    n_points: int
    dt: float | None = None
    stencil_order: int = DEFAULT_STENCIL_ORDER

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n_points < self.stencil_order + 1:
            raise ValueError("too few grid points for the stencil")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        fd2_weights(self.stencil_order)

    @classmethod
    def default(cls, amplitude: float, dx: float = DEFAULT_DX, margin: float = DEFAULT_MARGIN,
                centre: float = 0.0, dt: float | None = None,
                stencil_order: int = DEFAULT_STENCIL_ORDER) -> "GridSpec":
        """Half-width amplitude + margin around ``centre`` at spacing ``dx``."""
        half = abs(amplitude) + margin
        n = int(round(2 * half / dx)) + 1
        return cls(centre - half, centre - half + (n - 1) * dx, n, dt, stencil_order)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n_points)
        x.setflags(write=False)
        return x

    @cached_property
    def kinetic_stencil(self) -> np.ndarray:
        """Convolution kernel of -1/2 d^2/dx^2."""
        k = -0.5 * fd2_weights(self.stencil_order) / self.dx**2
        k.setflags(write=False)
        return k

    @property
    def kinetic_bound(self) -> float:
        """Upper bound on the spectrum of the discrete kinetic operator."""
        return 0.5 * float(np.abs(fd2_weights(self.stencil_order)).sum()) / self.dx**2

    def stable_dt(self, potential: np.ndarray) -> float:
        """Largest dt with dt (kinetic_bound / 2 + max|V|) <= 1/2.

        For the three-point stencil this is dt (1/dx^2 + max|V|) <= 1/2.
        """
        return STABILITY_SAFETY / (0.5 * self.kinetic_bound + float(np.max(np.abs(potential))))

    def check_step(self, dt: float, potential: np.ndarray):
        limit = self.stable_dt(potential)
        if abs(dt) > limit * (1 + 1e-12):
            raise UnstableStep(f"time step {abs(dt):.3g} exceeds the stability limit {limit:.3g}")


@dataclass(frozen=True)
class _Stagger:
    dt: float
    key: tuple
    imag_half: np.ndarray


@dataclass(frozen=True)
class GridWavefunction:
    """psi on a :class:`GridSpec` at time ``t`` (oscillator units)."""

    grid: GridSpec
    psi: np.ndarray
    t: float = 0.0
    stagger: _Stagger | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.shape != (self.grid.n_points,):
            raise ValueError("wave function does not match the grid")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def real(self) -> np.ndarray:
        return self.psi.real

    @property
    def imag_staggered(self):
        """Im psi at t + dt/2 if the state came from a leapfrog run, else None."""
        return None if self.stagger is None else self.stagger.imag_half

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)


def potential_on_grid(grid: GridSpec, pert=None, trap: TrapSpec = DIMENSIONLESS) -> np.ndarray:
    """x^2/2 + V(x) on the grid, in units of hbar omega."""
    x = grid.x
    v = 0.5 * x * x
    if pert is not None:
        v = v + as_poly(pert, trap)(x)
    return v


def _potential_key(pert, trap) -> tuple:
    if pert is None:
        return ()
    return tuple(sorted(as_poly(pert, trap).terms.items()))


def _apply_h(grid: GridSpec, pot: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.convolve(f, grid.kinetic_stencil, "same") + pot * f


def _edge_density(grid: GridSpec, re: np.ndarray, im: np.ndarray) -> float:
    w = max(grid.stencil_order // 2, 8)
    d = re * re + im * im
    return float(max(d[:w].max(), d[-w:].max()))


def init_gaussian_packet(p: PhaseSpacePoint, trap: TrapSpec = DIMENSIONLESS,
                         grid: GridSpec | None = None) -> GridWavefunction:
    """Ground-state packet centred at (x, v) with zero phase at its centre."""
    xc, vc = p.x / trap.ell, p.v / trap.velocity_scale
    if grid is None:
        grid = GridSpec.default(max(abs(xc), abs(vc)))
    x = grid.x
    psi = math.pi**-0.25 * np.exp(-0.5 * (x - xc) ** 2 + 1j * vc * (x - xc))
    tail = max(abs(psi[0]) ** 2, abs(psi[-1]) ** 2)
    if tail > TAIL_LIMIT:
        raise GridTooNarrow(f"packet density {tail:.3g} at the grid edge exceeds {TAIL_LIMIT:g}")
    return GridWavefunction(grid, psi, 0.0)


def apply_kick(psi: GridWavefunction, kappa: float, trap: TrapSpec = DIMENSIONLESS,
               phase: float = 0.0) -> GridWavefunction:
    """Multiply by exp(i (kappa x + phase)); ``kappa`` in inverse trap length units."""
    k = kappa * trap.ell
    if abs(k) * psi.grid.dx > math.pi / 4:
        raise AliasRisk(f"kick {k:.3g}/ell is not resolved by dx = {psi.grid.dx:.3g} ell")
    if k == 0 and phase == 0:
        return psi
    return GridWavefunction(psi.grid, psi.psi * np.exp(1j * (k * psi.x + phase)), psi.t)


def _default_dt(grid: GridSpec, pot: np.ndarray, psi: np.ndarray) -> float:
    energy = float(np.real(np.vdot(psi, _apply_h(grid, pot, psi))) * grid.dx)
    return min(grid.stable_dt(pot), DT_ACCURACY / (1.0 + max(energy, 0.0)))


def default_step(psi: GridWavefunction, trap: TrapSpec = DIMENSIONLESS, pert=None) -> float:
    """The step :func:`evolve` would pick for ``psi`` (trap time units)."""
    pot = potential_on_grid(psi.grid, pert, trap)
    return _default_dt(psi.grid, pot, psi.psi) / trap.omega


def evolve(psi: GridWavefunction, trap: TrapSpec = DIMENSIONLESS, pert=None, t: float = 0.0,
           dt: float | None = None) -> GridWavefunction:
    """Propagate by ``t`` (trap time units; negative runs backwards).

    The step is ``dt`` if given, else the grid's, else the one the state was
    last run with under the same potential, else the default rule.  It is
    shrunk so a whole number of steps spans ``t``.
    """
    grid = psi.grid
    tau = float(t) * trap.omega
    if tau == 0:
        return psi
    pot = potential_on_grid(grid, pert, trap)
    key = _potential_key(pert, trap)
    cached = psi.stagger if psi.stagger is not None and psi.stagger.key == key else None
    if dt is not None:
        step = float(dt) * trap.omega
    elif grid.dt is not None:
        step = grid.dt
    elif cached is not None:
        step = abs(cached.dt)
    else:
        step = _default_dt(grid, pot, psi.psi)
    n = max(1, math.ceil(abs(tau) / step - 1e-9))
    h = tau / n
    grid.check_step(h, pot)

    re = np.ascontiguousarray(psi.psi.real, dtype=float).copy()
    if cached is not None and cached.dt == h:
        im = cached.imag_half.copy()
    else:
        hr = _apply_h(grid, pot, re)
        im = psi.psi.imag - 0.5 * h * hr

    def norm(re, im):
        return float(np.sum(re * re + im * (im + h * _apply_h(grid, pot, re))) * grid.dx)

    norm0 = norm(re, im)
    done = 0
    while done < n:
        chunk = min(CHECK_EVERY, n - done)
        backend.leapfrog(re, im, pot, grid.kinetic_stencil, h, chunk)
        done += chunk
        if not np.all(np.isfinite(re)):
            raise UnstableStep("wave function became non-finite")
        drift = abs(norm(re, im) - norm0)
        if drift > NORM_LIMIT * norm0:
            raise UnstableStep(f"norm drifted by {drift:.3g}")
        edge = _edge_density(grid, re, im)
        if edge > LEAK_LIMIT:
            raise BoundaryLeak(f"density {edge:.3g} reached the grid boundary")

    stagger = _Stagger(h, key, im.copy())
    synced = im + 0.5 * h * _apply_h(grid, pot, re)
    return GridWavefunction(grid, re + 1j * synced, psi.t + tau, stagger)


def staggered_norm(psi: GridWavefunction, trap: TrapSpec = DIMENSIONLESS, pert=None) -> float:
    """The leapfrog's conserved norm: sum Re(t)^2 + Im(t - dt/2) Im(t + dt/2)."""
    st = psi.stagger
    if st is None:
        return psi.norm()
    pot = potential_on_grid(psi.grid, pert, trap)
    re, im = psi.psi.real, st.imag_half
    return float(np.sum(re * re + im * (im + st.dt * _apply_h(psi.grid, pot, re))) * psi.grid.dx)


@dataclass(frozen=True)
class Observables:
    """Grid expectation values in the trap's physical units."""

    norm: float
    mean_x: float
    mean_v: float
    energy: float
    phase: float | None


def _interpolate(psi: GridWavefunction, x0: float, carrier: float) -> complex:
    # demodulate by the mean wavenumber, then 4-point Lagrange on the smooth envelope
    grid = psi.grid
    s = (x0 - grid.x_min) / grid.dx
    i0 = min(max(int(math.floor(s)) - 1, 0), grid.n_points - 4)
    nodes = range(i0, i0 + 4)
    weights = [math.prod((s - m) / (j - m) for m in nodes if m != j) for j in nodes]
    env = psi.psi[i0 : i0 + 4] * np.exp(-1j * carrier * grid.x[i0 : i0 + 4])
    return complex(np.dot(weights, env) * np.exp(1j * carrier * x0))


def unwrap_near(phase: float, reference: float) -> float:
    """The representative of ``phase`` mod 2 pi closest to ``reference``."""
    return phase + 2 * math.pi * round((reference - phase) / (2 * math.pi))


def observables(psi: GridWavefunction, trap: TrapSpec = DIMENSIONLESS, pert=None,
                phase_at: float | None = None, reference_phase: float | None = None) -> Observables:
    """Norm, mean position and velocity, energy and optionally arg psi(phase_at).

    ``pert=None`` means the bare harmonic trap.  The phase is put on the
    branch nearest ``reference_phase`` when one is supplied.
    """
    grid, f = psi.grid, psi.psi
    dx = grid.dx
    density = np.abs(f) ** 2
    n = float(density.sum() * dx)
    mean_x = float((grid.x * density).sum() * dx) / n
    deriv = np.convolve(f, fd1_weights(grid.stencil_order), "same") / dx
    mean_k = float(np.sum(np.imag(np.conj(f) * deriv)) * dx) / n
    pot = potential_on_grid(grid, pert, trap)
    energy = float(np.real(np.vdot(f, _apply_h(grid, pot, f))) * dx) / n * trap.energy_scale
    phase = None
    if phase_at is not None:
        value = _interpolate(psi, phase_at / trap.ell, mean_k)
        phase = math.atan2(value.imag, value.real)
        if reference_phase is not None:
            phase = unwrap_near(phase, reference_phase)
    return Observables(n, mean_x * trap.ell, mean_k * trap.velocity_scale, energy, phase)


def overlap(psi_a: GridWavefunction, psi_b: GridWavefunction) -> complex:
    """<psi_a|psi_b> on a shared grid."""
    if psi_a.grid != psi_b.grid:
        raise ValueError("wave functions live on different grids")
    return complex(np.vdot(psi_a.psi, psi_b.psi) * psi_a.grid.dx)


def overlap_phase(psi_a: GridWavefunction, psi_b: GridWavefunction) -> float:
    """arg <psi_a|psi_b>; raises PhaseUndefined when the packets barely overlap."""
    ov = overlap(psi_a, psi_b)
    if abs(ov) < OVERLAP_LIMIT:
        raise PhaseUndefined(f"|<psi_a|psi_b>| = {abs(ov):.3g} is below {OVERLAP_LIMIT:g}")
    return math.atan2(ov.imag, ov.real)


def write_snapshot(psi: GridWavefunction, path) -> None:
    """Little-endian dump: 32-byte header, then interleaved (Re, Im) float64."""
    grid = psi.grid
    header = SNAPSHOT_MAGIC + struct.pack("<qdd", grid.n_points, grid.x_min, grid.dx)
    data = np.empty(2 * grid.n_points, dtype="<f8")
    data[0::2] = psi.psi.real
    data[1::2] = psi.psi.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_snapshot(path):
    """(x_min, dx, psi) from a snapshot file."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 32 or raw[:8] != SNAPSHOT_MAGIC:
        raise ValueError("not a wave-function snapshot")
    n, x_min, dx = struct.unpack("<qdd", raw[8:32])
    data = np.frombuffer(raw, dtype="<f8", offset=32)
    if data.size != 2 * n:
        raise ValueError("snapshot length does not match its header")
    return x_min, dx, data[0::2] + 1j * data[1::2]
