# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled EM step for IBM Model 1 over the flat pair-id encoding.

Mirror of ``_ibm1_py``; both must sum in the same order so results agree
to the last bit.
"""

from libc.math cimport log


def em_step(const long[::1] pair_ids, const long[::1] src_lens,
            const long[::1] tgt_lens, const long[::1] pair_src,
            double[::1] t, long n_src):
    """One E+M step, updating ``t`` in place.

    Returns the corpus log-likelihood under the parameters *before* the update.
    """
    cdef Py_ssize_t n_pairs = t.shape[0]
    cdef Py_ssize_t n_sent = src_lens.shape[0]
    cdef double[::1] counts = _zeros(n_pairs)
    cdef double[::1] totals = _zeros(n_src)
    cdef Py_ssize_t s, j, i, base = 0, m, n, p
    cdef double z, ll = 0.0
    for s in range(n_sent):
        m = src_lens[s]
        n = tgt_lens[s]
        for j in range(n):
            z = 0.0
            for i in range(m):
                z += t[pair_ids[base + i]]
            ll += log(z / m)
            for i in range(m):
                p = pair_ids[base + i]
                counts[p] += t[p] / z
            base += m
    for p in range(n_pairs):
        totals[pair_src[p]] += counts[p]
    for p in range(n_pairs):
        t[p] = counts[p] / totals[pair_src[p]]
    return ll


def log_likelihood(const long[::1] pair_ids, const long[::1] src_lens,
                   const long[::1] tgt_lens, const double[::1] t):
    cdef Py_ssize_t n_sent = src_lens.shape[0]
    cdef Py_ssize_t s, j, i, base = 0, m, n
    cdef double z, ll = 0.0
    for s in range(n_sent):
        m = src_lens[s]
        n = tgt_lens[s]
        for j in range(n):
            z = 0.0
            for i in range(m):
                z += t[pair_ids[base + i]]
            ll += log(z / m)
            base += m
    return ll


cdef double[::1] _zeros(Py_ssize_t n):
    import numpy as np
    return np.zeros(n, dtype=np.float64)
