"""Position of a single packet versus time, by every available method.

Each column is sampled on the same uniform time grid ``0..t_max``:

* ``x_sca0``             harmonic (zeroth-order) classical path
* ``x_sca_total``        classical path to first order in the perturbation
* ``x_classical_exact``  RK4 solution of the full classical equation of motion
* ``x_quantum1``         first-order quantum mean position
* ``x_quantum2``         second-order increment only, so the second-order
                         estimate of <x> is ``x_quantum1 + x_quantum2``
* ``x_oracle``           <x> of the grid wave function
"""

from __future__ import annotations

import math

import numpy as np

from .classical import (
    DEFAULT_STEPS_PER_PERIOD,
    exact_trajectory,
    first_order_trajectory,
    unperturbed_trajectory,
)
from .fock import second_order_mean_position
from .gc import mean_trajectory
from .oracle import GridSpec, default_step, evolve, init_gaussian_packet, observables
from .units import DIMENSIONLESS, PhaseSpacePoint, TrapSpec, alpha_from_phase_space

COLUMNS = ("x_sca0", "x_sca_total", "x_classical_exact", "x_quantum1", "x_quantum2", "x_oracle")

# method names (as used for phases) accepted as aliases for column groups
METHOD_COLUMNS = {
    "sca-perturbative": ("x_sca0", "x_sca_total"),
    "sca-exact": ("x_classical_exact",),
    "quantum-first-order": ("x_quantum1",),
    "quantum-second-order": ("x_quantum1", "x_quantum2"),
    "oracle": ("x_oracle",),
}


def resolve_columns(names) -> tuple:
    """Column names for a mix of column and method names, in canonical order."""
    wanted = set()
    for name in names:
        if name in COLUMNS:
            wanted.add(name)
        elif name in METHOD_COLUMNS:
            wanted.update(METHOD_COLUMNS[name])
        else:
            raise ValueError(f"unknown trajectory column or method {name!r}")
    return tuple(c for c in COLUMNS if c in wanted)


def _exact_column(init, pert, trap, times, dt):
    """RK4 sampled exactly on ``times``: the step divides the output spacing."""
    t_max = times[-1]
    spacing = t_max / (len(times) - 1)
    target = (2 * math.pi / trap.omega) / DEFAULT_STEPS_PER_PERIOD if dt is None else dt
    sub = max(1, math.ceil(spacing / target - 1e-9))
    sub += sub % 2
    path = exact_trajectory(init, pert, trap, t_max, spacing / sub)
    return path.x[::sub][: len(times)]


def _oracle_column(init, pert, trap, times, grid, dt):
    if grid is None:
        reach = math.hypot(init.x / trap.ell, init.v / trap.velocity_scale)
        grid = GridSpec.default(reach)
    psi = init_gaussian_packet(init, trap, grid)
    spacing = times[1] - times[0]
    step = dt if dt is not None else default_step(psi, trap, pert)
    # one fixed step for every interval lets each run resume the leapfrog stagger exactly
    h = spacing / max(1, math.ceil(spacing / step - 1e-9))
    out = np.empty(len(times))
    out[0] = observables(psi, trap, pert).mean_x
    for i in range(1, len(times)):
        psi = evolve(psi, trap, pert, spacing, dt=h)
        out[i] = observables(psi, trap, pert).mean_x
    return out


def trajectory_table(init: PhaseSpacePoint, pert, trap: TrapSpec = DIMENSIONLESS,
                     t_max: float = 2 * math.pi, steps: int = 100, columns=COLUMNS,
                     grid: GridSpec | None = None, oracle_dt: float | None = None,
                     classical_dt: float | None = None, quad_order: int = 16,
                     fock_dim: int | None = None) -> dict:
    """{"t": times, column: values, ...} for the requested columns.

    ``steps`` is the number of intervals, so there are ``steps + 1`` rows.
    Columns not requested are absent from the result.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    columns = resolve_columns(columns)
    times = np.linspace(0.0, t_max, steps + 1)
    table = {"t": times}
    alpha = alpha_from_phase_space(init, trap)
    if "x_sca0" in columns:
        table["x_sca0"] = np.asarray(unperturbed_trajectory(init, trap).x(times, order=0), float)
    if "x_sca_total" in columns:
        table["x_sca_total"] = np.asarray(first_order_trajectory(init, pert, trap).x(times), float)
    if "x_classical_exact" in columns:
        table["x_classical_exact"] = _exact_column(init, pert, trap, times, classical_dt)
    if "x_quantum1" in columns:
        table["x_quantum1"] = np.asarray(mean_trajectory(alpha, pert, trap, times)[0], float)
    if "x_quantum2" in columns:
        table["x_quantum2"] = np.array([
            second_order_mean_position(alpha, pert, trap, t, quad_order, fock_dim) for t in times])
    if "x_oracle" in columns:
        table["x_oracle"] = _oracle_column(init, pert, trap, times, grid, oracle_dt)
    return table
