"""Grid Schroedinger oracle: exact (to discretization) reference dynamics."""

from .backend import BACKEND
from .grid import (
    GridSpec,
    GridWavefunction,
    Observables,
    apply_kick,
    default_step,
    evolve,
    init_gaussian_packet,
    observables,
    overlap,
    overlap_phase,
    potential_on_grid,
    read_snapshot,
    staggered_norm,
    unwrap_near,
    write_snapshot,
)

__all__ = [
    "BACKEND", "GridSpec", "GridWavefunction", "Observables", "apply_kick", "default_step", "evolve",
    "init_gaussian_packet", "observables", "overlap", "overlap_phase", "potential_on_grid",
    "read_snapshot", "staggered_norm", "unwrap_near", "write_snapshot",
]
