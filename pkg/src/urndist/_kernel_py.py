"""Pure-Python replay kernel.

Replays one permutation of the record stream through the Dirichlet update
and emits one distance value per (comparison, touched interval) after every
draw.  This is the fallback twin of the compiled kernel in
``_kernel_cy.pyx``; both perform the same floating-point operations in the
same order, so their outputs are bit-identical.

The "unit" abstraction makes unweighted and weighted aggregation one code
path: a unit is a posterior accumulator (a pooled scope in unweighted mode,
a single context in weighted mode) and each comparison side is the uniform
average of its units' posterior means.
"""

from __future__ import annotations

from math import log, sqrt

from .errors import InfiniteDivergenceError

BACKEND = "python"

METRIC_HELLINGER = 0
METRIC_KL = 1


def replay(order, rec_cat, rec_j0, rec_j1, rec_val, rec_unit_off, rec_units,
           side_off, side_units, n_units, n_intervals, n_categories, alpha0,
           metric_id, out_comp, out_interval, out_draw, out_phi):
    """Replay ``order`` and fill the output arrays; returns samples written.

    Outputs are emitted per draw in (comparison, interval) order.  Under a
    zero prior a sample whose side has an empty interval is skipped.
    """
    order = [int(x) for x in order]
    rec_cat = [int(x) for x in rec_cat]
    rec_j0 = [int(x) for x in rec_j0]
    rec_j1 = [int(x) for x in rec_j1]
    rec_val = [float(x) for x in rec_val]
    rec_unit_off = [int(x) for x in rec_unit_off]
    rec_units = [int(x) for x in rec_units]
    side_off = [int(x) for x in side_off]
    side_units = [int(x) for x in side_units]
    alpha0 = float(alpha0)

    K = n_categories
    n_comparisons = (len(side_off) - 1) // 2
    hellinger = metric_id == METRIC_HELLINGER

    # acc[u][j][k] accumulated counts, nj[u][j] interval totals
    acc = [[[0.0] * K for _ in range(n_intervals)] for _ in range(n_units)]
    nj = [[0.0] * n_intervals for _ in range(n_units)]
    buf_a = [0.0] * K
    buf_b = [0.0] * K
    kalpha = K * alpha0

    def side_mean(side, j, buf):
        lo = side_off[side]
        hi = side_off[side + 1]
        for k in range(K):
            buf[k] = 0.0
        for t in range(lo, hi):
            u = side_units[t]
            nuj = nj[u][j]
            if alpha0 == 0.0 and nuj == 0.0:
                return False
            denom = kalpha + nuj
            row = acc[u][j]
            for k in range(K):
                buf[k] += (alpha0 + row[k]) / denom
        d = float(hi - lo)
        for k in range(K):
            buf[k] /= d
        return True

    m = 0
    for t, i in enumerate(order):
        cat = rec_cat[i]
        v = rec_val[i]
        j0 = rec_j0[i]
        j1 = rec_j1[i]
        for uu in range(rec_unit_off[i], rec_unit_off[i + 1]):
            u = rec_units[uu]
            acc_u = acc[u]
            nj_u = nj[u]
            for j in range(j0, j1 + 1):
                acc_u[j][cat] += v
                nj_u[j] += v
        draw = t + 1
        for c in range(n_comparisons):
            for j in range(j0, j1 + 1):
                if not side_mean(2 * c, j, buf_a):
                    continue
                if not side_mean(2 * c + 1, j, buf_b):
                    continue
                if hellinger:
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
                                    f"interval {j}, draw {draw}: zero mass in "
                                    f"the reference side"
                                )
                            s += pk * log(pk / qk)
                    phi = s if s > 0.0 else 0.0
                out_comp[m] = c
                out_interval[m] = j
                out_draw[m] = draw
                out_phi[m] = phi
                m += 1
    return m
