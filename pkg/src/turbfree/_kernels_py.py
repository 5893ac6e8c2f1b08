"""Pure numpy fallback for the compiled kernel in ``_kernels.pyx``.

Vectorised across pixels, sequential over frames; every per-pixel operation
is performed in the same order as the compiled kernel, so both backends give
bit-identical results.
"""

import numpy as np


def temporal_mean(counts):
    """Exact-sum temporal mean of an ``(m, P)`` count array."""
    m = counts.shape[0]
    return counts.sum(axis=0, dtype=np.int64) / float(m)


def _split(n, nbar):
    d = n - nbar
    zero = np.zeros_like(d)
    return np.where(n > nbar, d, zero), np.where(n < nbar, d, zero)


def g2(counts, cross, threads=1):
    """Return the per-pixel correlation image for an ``(m, P)`` count array.

    ``threads`` is accepted for signature compatibility and ignored.
    """
    m = counts.shape[0]
    npairs = m - 1 if cross else m
    nbar = temporal_mean(counts)
    acc = np.zeros(counts.shape[1], dtype=np.float64)
    nxt = _split(counts[0].astype(np.float64), nbar)
    for a in range(npairs):
        dp, dn = nxt
        if cross:
            nxt = _split(counts[a + 1].astype(np.float64), nbar)
            dp2, dn2 = nxt
        else:
            dp2, dn2 = dp, dn
            if a + 1 < m:
                nxt = _split(counts[a + 1].astype(np.float64), nbar)
        acc += ((np.abs(dp * dp2) + np.abs(dn * dn2))
                + (np.abs((nbar - dp) * (nbar - dn2)) + np.abs((nbar - dn) * (nbar - dp2))))
    return acc / float(npairs)
