import math

import numpy as np
import pytest

from aai.errors import AliasRisk, BoundaryLeak, GridTooNarrow, PhaseUndefined, UnstableStep
from aai.oracle import (
    GridSpec,
    apply_kick,
    evolve,
    init_gaussian_packet,
    observables,
    overlap,
    overlap_phase,
    read_snapshot,
    staggered_norm,
    write_snapshot,
)
from aai.oracle.backend import BACKENDS
from aai.oracle.grid import fd1_weights, fd2_weights, potential_on_grid
from aai.units import PhaseSpacePoint, PowerLawPerturbation, TrapSpec

from conftest import AMPLITUDE, BETA


@pytest.fixture(scope="module")
def launched():
    return init_gaussian_packet(PhaseSpacePoint(0.0, AMPLITUDE))


@pytest.fixture(scope="module")
def half_period(launched):
    return evolve(launched, t=math.pi)


class TestStencils:
    def test_three_point(self):
        assert np.allclose(fd2_weights(2), [1, -2, 1])

    @pytest.mark.parametrize("order", [2, 4, 8])
    def test_exact_on_polynomials(self, order):
        x = np.arange(-order, order + 1) * 0.1
        for deg in range(order + 1):
            f = x**deg
            second = np.convolve(f, fd2_weights(order), "valid") / 0.01
            first = np.convolve(f, fd1_weights(order), "valid") / 0.1
            mid = len(f) // 2 - order // 2
            expect2 = deg * (deg - 1) * x[len(x) // 2] ** (deg - 2) if deg >= 2 else 0.0
            expect1 = deg * x[len(x) // 2] ** (deg - 1) if deg >= 1 else 0.0
            assert second[mid] == pytest.approx(expect2, abs=1e-8)
            assert first[mid] == pytest.approx(expect1, abs=1e-10)

    def test_odd_order_rejected(self):
        with pytest.raises(ValueError):
            fd2_weights(3)


class TestInitialState:
    def test_moments(self, launched):
        o = observables(launched)
        assert o.norm == pytest.approx(1, abs=1e-12)
        assert o.mean_x == pytest.approx(0, abs=1e-12)
        assert o.mean_v == pytest.approx(AMPLITUDE, rel=1e-6)
        assert o.energy == pytest.approx(0.5 + AMPLITUDE**2 / 2, rel=1e-7)

    def test_physical_units(self):
        trap = TrapSpec(mass=2.0, omega=3.0, hbar=0.5)
        psi = init_gaussian_packet(PhaseSpacePoint(1.5 * trap.ell, -2 * trap.velocity_scale), trap)
        o = observables(psi, trap)
        assert o.mean_x == pytest.approx(1.5 * trap.ell, rel=1e-10)
        assert o.mean_v == pytest.approx(-2 * trap.velocity_scale, rel=1e-6)
        assert o.energy == pytest.approx((0.5 + 0.5 * (1.5**2 + 2**2)) * trap.energy_scale, rel=1e-7)

    def test_kick_shifts_velocity(self, launched):
        o = observables(apply_kick(launched, -3.0))
        assert o.mean_v == pytest.approx(AMPLITUDE - 3, rel=1e-6)
        assert o.norm == pytest.approx(1, abs=1e-12)

    def test_unresolved_kick(self, launched):
        with pytest.raises(AliasRisk):
            apply_kick(launched, 30.0)

    def test_narrow_grid(self):
        with pytest.raises(GridTooNarrow):
            init_gaussian_packet(PhaseSpacePoint(3.0, 0.0), grid=GridSpec.default(0.0, margin=5.0))


class TestHarmonic:
    def test_half_period(self, launched, half_period):
        o = observables(half_period)
        assert abs(o.norm - 1) < 1e-8
        assert abs(o.mean_x) < 1e-4
        assert o.mean_v == pytest.approx(-AMPLITUDE, abs=1e-3)
        assert half_period.t == pytest.approx(math.pi, rel=1e-15)

    def test_time_reversal(self, launched, half_period):
        back = evolve(half_period, t=-math.pi)
        assert abs(overlap(launched, back)) ** 2 > 1 - 1e-6

    def test_energy_conserved(self, launched, half_period):
        assert observables(half_period).energy == pytest.approx(observables(launched).energy, rel=1e-7)
        # the leapfrog invariant differs from the plain norm by O(dt^2) but is kept to roundoff
        step = half_period.stagger.dt
        early = evolve(launched, t=20 * step, dt=step)
        assert staggered_norm(half_period) == pytest.approx(staggered_norm(early), abs=1e-12)

    def test_spacing_convergence_second_order_stencil(self):
        # the three-point stencil's position error falls 4x per halving of dx
        errors = []
        for dx in (1 / 8, 1 / 16, 1 / 32):
            grid = GridSpec.default(5.0, dx=dx, stencil_order=2)
            psi = evolve(init_gaussian_packet(PhaseSpacePoint(0, 5.0), grid=grid), t=1.0, dt=1e-4)
            errors.append(abs(observables(psi).mean_x - 5 * math.sin(1.0)))
        assert errors[0] / errors[1] == pytest.approx(4, rel=0.05)
        assert errors[1] / errors[2] == pytest.approx(4, rel=0.05)


def test_ehrenfest_cubic(launched):
    pert = PowerLawPerturbation(3, BETA)
    x = launched.grid.x
    h = 0.002
    psi, vs, forces = launched, [], []
    for _ in range(9):
        density = np.abs(psi.psi) ** 2 * psi.grid.dx
        vs.append(observables(psi, pert=pert).mean_v)
        forces.append(-np.sum(density * (x + 3 * BETA * x * x)))
        psi = evolve(psi, pert=pert, t=h)
    vs, forces = np.array(vs), np.array(forces)
    dvdt = (vs[:-4] - 8 * vs[1:-3] + 8 * vs[3:-1] - vs[4:]) / (12 * h)
    assert np.max(np.abs(dvdt - forces[2:-2])) < 1e-5


class TestBackends:
    def test_backends_agree(self, launched):
        grid = launched.grid
        pot = potential_on_grid(grid, PowerLawPerturbation(3, BETA))
        results = []
        for name, kernel in BACKENDS.items():
            re = launched.psi.real.copy()
            im = launched.psi.imag.copy()
            kernel(re, im, pot, grid.kinetic_stencil, 2e-4, 200)
            results.append(re + 1j * im)
        assert len(results) >= 1
        for other in results[1:]:
            assert np.max(np.abs(other - results[0])) < 1e-12

    def test_compiled_kernel_built(self):
        assert "cython" in BACKENDS


class TestStepping:
    def test_chunked_equals_single(self, launched):
        pert = PowerLawPerturbation(3, BETA)
        whole = evolve(launched, pert=pert, t=0.05, dt=2e-4)
        part = evolve(evolve(launched, pert=pert, t=0.025, dt=2e-4), pert=pert, t=0.025)
        assert np.max(np.abs(whole.psi - part.psi)) < 1e-13

    def test_unstable_step(self, launched):
        with pytest.raises(UnstableStep):
            evolve(launched, t=0.1, dt=0.05)

    def test_boundary_leak(self):
        grid = GridSpec.default(0.0, margin=6.0)
        psi = init_gaussian_packet(PhaseSpacePoint(0.0, 5.0), grid=grid)
        with pytest.raises(BoundaryLeak):
            evolve(psi, t=math.pi / 2)


class TestOverlap:
    def test_phase_of_global_factor(self, launched):
        shifted = apply_kick(launched, 0.0, phase=0.3)
        assert overlap_phase(launched, shifted) == pytest.approx(0.3, abs=1e-14)
        assert abs(overlap(launched, shifted)) == pytest.approx(1, abs=1e-12)

    def test_disjoint_packets(self):
        grid = GridSpec.default(12.0)
        a = init_gaussian_packet(PhaseSpacePoint(-10.0, 0.0), grid=grid)
        b = init_gaussian_packet(PhaseSpacePoint(10.0, 0.0), grid=grid)
        with pytest.raises(PhaseUndefined):
            overlap_phase(a, b)

    def test_grids_must_match(self, launched):
        other = init_gaussian_packet(PhaseSpacePoint(0.0, 1.0), grid=GridSpec.default(3.0))
        with pytest.raises(ValueError):
            overlap(launched, other)


def test_snapshot_round_trip(tmp_path, launched):
    path = tmp_path / "psi.bin"
    write_snapshot(launched, path)
    assert path.stat().st_size == 32 + 16 * launched.grid.n_points
    x_min, dx, psi = read_snapshot(path)
    assert x_min == launched.grid.x_min and dx == launched.grid.dx
    assert np.array_equal(psi, launched.psi)
    path.write_bytes(b"garbage")
    with pytest.raises(ValueError):
        read_snapshot(path)
