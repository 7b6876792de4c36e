# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled staggered leapfrog for the grid Schroedinger solver."""

from libc.stdlib cimport free, malloc


cdef void _half_step(double* out, const double* f, const double* pot, const double* kin,
                     double* acc, Py_ssize_t n, Py_ssize_t half, double h) noexcept nogil:
    # out += h * (K f + pot * f) with a symmetric stencil and zero values off the grid;
    # the loops run along the grid so the compiler can vectorize them
    cdef Py_ssize_t i, d
    cdef double c
    for i in range(n):
        acc[i] = (pot[i] + kin[half]) * f[i]
    for d in range(1, half + 1):
        c = kin[half + d]
        for i in range(n - d):
            acc[i] += c * f[i + d]
        for i in range(d, n):
            acc[i] += c * f[i - d]
    for i in range(n):
        out[i] += h * acc[i]


def leapfrog(double[::1] re, double[::1] im, const double[::1] pot, const double[::1] kin,
             double dt, Py_ssize_t n_steps):
    """Advance (re, im) in place by ``n_steps`` staggered steps.

    On entry ``re`` holds Re psi(t) and ``im`` holds Im psi(t + dt/2); on exit
    both are advanced by n_steps * dt.  ``kin`` must be symmetric.  The GIL
    is released throughout.
    """
    cdef Py_ssize_t n = re.shape[0]
    cdef Py_ssize_t half = (kin.shape[0] - 1) // 2
    cdef Py_ssize_t step
    cdef double* acc
    if im.shape[0] != n or pot.shape[0] != n:
        raise ValueError("array length mismatch")
    if kin.shape[0] % 2 != 1 or kin.shape[0] > n:
        raise ValueError("stencil must have odd length no longer than the grid")
    acc = <double*> malloc(n * sizeof(double))
    if acc == NULL:
        raise MemoryError()
    try:
        with nogil:
            for step in range(n_steps):
                _half_step(&re[0], &im[0], &pot[0], &kin[0], acc, n, half, dt)
                _half_step(&im[0], &re[0], &pot[0], &kin[0], acc, n, half, -dt)
    finally:
        free(acc)
