"""Numpy implementation of the staggered leapfrog, used when the compiled kernel is absent."""

import numpy as np


def leapfrog(re, im, pot, kin, dt, n_steps):
    """Same contract as the compiled kernel: in-place update of (re, im)."""
    if not (len(re) == len(im) == len(pot)):
        raise ValueError("array length mismatch")
    if len(kin) % 2 != 1 or len(kin) > len(re):
        raise ValueError("stencil must have odd length no longer than the grid")
    for _ in range(int(n_steps)):
        re += dt * (np.convolve(im, kin, "same") + pot * im)
        im -= dt * (np.convolve(re, kin, "same") + pot * re)
