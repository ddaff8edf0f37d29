# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled replay kernel; the hot inner loop of the permutation engine.

Same arithmetic, in the same order, as the pure-Python twin in
``_kernel_py.py`` (compiled with -ffp-contract=off so results stay
bit-identical).  See that module for the algorithm description.
"""

from libc.math cimport log, sqrt

import numpy as np

from .errors import InfiniteDivergenceError

BACKEND = "cython"

METRIC_HELLINGER = 0
METRIC_KL = 1


def replay(order, rec_cat, rec_j0, rec_j1, rec_val, rec_unit_off, rec_units,
           side_off, side_units, n_units, n_intervals, n_categories, alpha0,
           metric_id, out_comp, out_interval, out_draw, out_phi):
    """Replay ``order`` and fill the output arrays; returns samples written."""
    cdef long[::1] order_v = np.ascontiguousarray(order, dtype=np.int64)
    cdef int[::1] cat_v = np.ascontiguousarray(rec_cat, dtype=np.int32)
    cdef int[::1] j0_v = np.ascontiguousarray(rec_j0, dtype=np.int32)
    cdef int[::1] j1_v = np.ascontiguousarray(rec_j1, dtype=np.int32)
    cdef double[::1] val_v = np.ascontiguousarray(rec_val, dtype=np.float64)
    cdef int[::1] ruoff_v = np.ascontiguousarray(rec_unit_off, dtype=np.int32)
    cdef int[::1] runits_v = np.ascontiguousarray(rec_units, dtype=np.int32)
    cdef int[::1] soff_v = np.ascontiguousarray(side_off, dtype=np.int32)
    cdef int[::1] sunits_v = np.ascontiguousarray(side_units, dtype=np.int32)

    cdef int U = n_units
    cdef int J = n_intervals
    cdef int K = n_categories
    cdef double a0 = alpha0
    cdef bint hell = metric_id == METRIC_HELLINGER
    cdef int C = (soff_v.shape[0] - 1) // 2
    cdef long N = order_v.shape[0]

    cdef double[:, :, ::1] acc = np.zeros((U, J, K))
    cdef double[:, ::1] nj = np.zeros((U, J))
    cdef double[::1] buf_a = np.zeros(K)
    cdef double[::1] buf_b = np.zeros(K)

    cdef int[::1] ocomp_v = out_comp
    cdef int[::1] oint_v = out_interval
    cdef int[::1] odraw_v = out_draw
    cdef double[::1] ophi_v = out_phi

    cdef double kalpha = K * a0
    cdef long m = 0, t, i
    cdef int cat, j0, j1, j, c, k, uu, u
    cdef double v, bc, rad, phi, s, pk, qk
    cdef bint ok_a, ok_b

    for t in range(N):
        i = order_v[t]
        cat = cat_v[i]
        v = val_v[i]
        j0 = j0_v[i]
        j1 = j1_v[i]
        for uu in range(ruoff_v[i], ruoff_v[i + 1]):
            u = runits_v[uu]
            for j in range(j0, j1 + 1):
                acc[u, j, cat] += v
                nj[u, j] += v
        for c in range(C):
            for j in range(j0, j1 + 1):
                ok_a = _side_mean(soff_v, sunits_v, acc, nj, 2 * c, j, K,
                                  a0, kalpha, buf_a)
                if not ok_a:
                    continue
                ok_b = _side_mean(soff_v, sunits_v, acc, nj, 2 * c + 1, j, K,
                                  a0, kalpha, buf_b)
                if not ok_b:
                    continue
                if hell:
                    bc = 0.0
                    for k in range(K):
                        bc += sqrt(buf_a[k] * buf_b[k])
                    rad = 2.0 * (1.0 - bc)
                    phi = sqrt(rad) if rad > 0.0 else 0.0
                else:
                    s = 0.0
                    for k in range(K):
                        pk = buf_a[k]
                        if pk > 0.0:
                            qk = buf_b[k]
                            if qk <= 0.0:
                                raise InfiniteDivergenceError(
                                    f"infinite divergence at comparison {c}, "
                                    f"interval {j}, draw {t + 1}: zero mass "
                                    f"in the reference side"
                                )
                            s += pk * log(pk / qk)
                    phi = s if s > 0.0 else 0.0
                ocomp_v[m] = c
                oint_v[m] = j
                odraw_v[m] = t + 1
                ophi_v[m] = phi
                m += 1
    return m


cdef inline bint _side_mean(int[::1] side_off, int[::1] side_units,
                            double[:, :, ::1] acc, double[:, ::1] nj,
                            int side, int j, int K, double a0, double kalpha,
                            double[::1] buf):
    cdef int lo = side_off[side]
    cdef int hi = side_off[side + 1]
    cdef int t, u, k
    cdef double nuj, denom, d
    for k in range(K):
        buf[k] = 0.0
    for t in range(lo, hi):
        u = side_units[t]
        nuj = nj[u, j]
        if a0 == 0.0 and nuj == 0.0:
            return False
        denom = kalpha + nuj
        for k in range(K):
            buf[k] += (a0 + acc[u, j, k]) / denom
    d = <double> (hi - lo)
    for k in range(K):
        buf[k] /= d
    return True
