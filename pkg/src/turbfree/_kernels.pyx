# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-pixel fluctuation-correlation kernel.

Pixels are split into tiles that are distributed across OpenMP threads.
Within a pixel the temporal sums always run over frames in ascending order,
so the result does not depend on the thread count and matches the numpy
fallback bit for bit. Must be compiled without -ffast-math and with
-ffp-contract=off.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport fabs

cnp.import_array()

ctypedef fused count_t:
    cnp.uint8_t
    cnp.uint16_t

cdef Py_ssize_t TILE = 512


cdef void _tile(const count_t[:, ::1] counts, double[::1] out,
                double[::1] nbar, double[::1] acc, cnp.int64_t[::1] total,
                Py_ssize_t start, Py_ssize_t stop, bint cross) noexcept nogil:
    cdef Py_ssize_t m = counts.shape[0]
    cdef Py_ssize_t npairs = m - 1 if cross else m
    cdef Py_ssize_t a, p, k
    cdef Py_ssize_t width = stop - start
    cdef double nb, n, d, dp, dn, n2, d2, dp2, dn2

    for k in range(width):
        total[start + k] = 0
        acc[start + k] = 0.0
    # integer sums are exact, so the mean is a single correctly rounded division
    for a in range(m):
        for k in range(width):
            total[start + k] += counts[a, start + k]
    for k in range(width):
        nbar[start + k] = (<double> total[start + k]) / (<double> m)

    for a in range(npairs):
        for k in range(width):
            p = start + k
            nb = nbar[start + k]
            n = <double> counts[a, p]
            d = n - nb
            dp = d if n > nb else 0.0
            dn = d if n < nb else 0.0
            if cross:
                n2 = <double> counts[a + 1, p]
                d2 = n2 - nb
                dp2 = d2 if n2 > nb else 0.0
                dn2 = d2 if n2 < nb else 0.0
            else:
                dp2 = dp
                dn2 = dn
            acc[start + k] += ((fabs(dp * dp2) + fabs(dn * dn2))
                               + (fabs((nb - dp) * (nb - dn2)) + fabs((nb - dn) * (nb - dp2))))

    for k in range(width):
        out[start + k] = acc[start + k] / (<double> npairs)


def g2(const count_t[:, ::1] counts, bint cross, int threads=1):
    """Return the per-pixel correlation image for an ``(m, P)`` count array."""
    cdef Py_ssize_t npix = counts.shape[1]
    cdef Py_ssize_t ntiles = (npix + TILE - 1) // TILE
    cdef Py_ssize_t t
    out_arr = np.empty(npix, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] nbar = np.empty(npix, dtype=np.float64)
    cdef double[::1] acc = np.empty(npix, dtype=np.float64)
    cdef cnp.int64_t[::1] total = np.empty(npix, dtype=np.int64)
    if threads < 1:
        threads = 1
    with nogil:
        for t in prange(ntiles, num_threads=threads, schedule="static"):
            _tile(counts, out, nbar, acc, total, t * TILE, min((t + 1) * TILE, npix), cross)
    return out_arr


def temporal_mean(const count_t[:, ::1] counts):
    """Exact-sum temporal mean of an ``(m, P)`` count array."""
    cdef Py_ssize_t m = counts.shape[0], npix = counts.shape[1]
    cdef Py_ssize_t a, p
    total_arr = np.zeros(npix, dtype=np.int64)
    cdef cnp.int64_t[::1] total = total_arr
    with nogil:
        for a in range(m):
            for p in range(npix):
                total[p] += counts[a, p]
    return total_arr / <double> m
