# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled log-kernel routines; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, atan2, fabs

cnp.import_array()

cdef double[4] GX = [0.0694318442029737, 0.3300094782075719, 0.6699905217924281, 0.9305681557970263]
cdef double[4] GW = [0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269]


cdef double NEAR_FACTOR = 2.5
cdef double SIZE_RATIO = 4.0


cdef inline double prim(double u, double d) nogil:
    cdef double r2 = u * u + d * d
    cdef double v = -u
    if r2 > 0.0:
        v += 0.5 * u * log(r2)
    if d > 0.0:
        v += d * atan2(u, d)
    return v


cdef inline double seg_avg(double px, double py, double sx, double sy, double ex, double ey) nogil:
    cdef double tx = ex - sx
    cdef double ty = ey - sy
    cdef double h = sqrt(tx * tx + ty * ty)
    tx = tx / h
    ty = ty / h
    cdef double rx = px - sx
    cdef double ry = py - sy
    cdef double u0 = -(rx * tx + ry * ty)
    cdef double d = fabs(rx * ty - ry * tx)
    return -(prim(u0 + h, d) - prim(u0, d)) / h


cdef inline long cyclic_gap(long a, long b, long n) nogil:
    cdef long d = a - b
    if d < 0:
        d = -d
    d = d % n
    if n - d < d:
        return n - d
    return d


def kernel_block(sa, ea, ia, sb, eb, ib, long n_total):
    cdef double[:, ::1] SA = np.ascontiguousarray(sa, dtype=np.float64)
    cdef double[:, ::1] EA = np.ascontiguousarray(ea, dtype=np.float64)
    cdef double[:, ::1] SB = np.ascontiguousarray(sb, dtype=np.float64)
    cdef double[:, ::1] EB = np.ascontiguousarray(eb, dtype=np.float64)
    cdef long[::1] IA = np.ascontiguousarray(ia, dtype=np.int64)
    cdef long[::1] IB = np.ascontiguousarray(ib, dtype=np.int64)
    cdef Py_ssize_t na = SA.shape[0]
    cdef Py_ssize_t nb = SB.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] K = out
    cdef Py_ssize_t i, j, p, q
    cdef long gap
    cdef double max_, may, mbx, mby, dx, dy, r2, acc, hx, hy
    cdef double ax, ay, bx, by, ha, hb, hmax, hmin
    cdef bint refine
    cdef bint ok = True
    with nogil:
        for i in range(na):
            max_ = 0.5 * (SA[i, 0] + EA[i, 0])
            may = 0.5 * (SA[i, 1] + EA[i, 1])
            for j in range(nb):
                gap = cyclic_gap(IA[i], IB[j], n_total)
                if gap == 0:
                    hx = EA[i, 0] - SA[i, 0]
                    hy = EA[i, 1] - SA[i, 1]
                    K[i, j] = 1.5 - 0.5 * log(hx * hx + hy * hy)
                    continue
                hx = EA[i, 0] - SA[i, 0]
                hy = EA[i, 1] - SA[i, 1]
                ha = sqrt(hx * hx + hy * hy)
                hx = EB[j, 0] - SB[j, 0]
                hy = EB[j, 1] - SB[j, 1]
                hb = sqrt(hx * hx + hy * hy)
                hmax = ha if ha > hb else hb
                hmin = hb if ha > hb else ha
                mbx = 0.5 * (SB[j, 0] + EB[j, 0])
                mby = 0.5 * (SB[j, 1] + EB[j, 1])
                dx = max_ - mbx
                dy = may - mby
                r2 = dx * dx + dy * dy
                if gap <= 2:
                    refine = hmax > SIZE_RATIO * hmin
                else:
                    refine = r2 < NEAR_FACTOR * NEAR_FACTOR * hmax * hmax
                if refine:
                    acc = 0.0
                    for p in range(4):
                        if ha <= hb:
                            ax = SA[i, 0] + GX[p] * (EA[i, 0] - SA[i, 0])
                            ay = SA[i, 1] + GX[p] * (EA[i, 1] - SA[i, 1])
                            acc = acc + GW[p] * seg_avg(ax, ay, SB[j, 0], SB[j, 1], EB[j, 0], EB[j, 1])
                        else:
                            bx = SB[j, 0] + GX[p] * (EB[j, 0] - SB[j, 0])
                            by = SB[j, 1] + GX[p] * (EB[j, 1] - SB[j, 1])
                            acc = acc + GW[p] * seg_avg(bx, by, SA[i, 0], SA[i, 1], EA[i, 0], EA[i, 1])
                    K[i, j] = acc
                    if gap > 2 and r2 <= 0.0:
                        ok = False
                elif gap <= 2:
                    acc = 0.0
                    for p in range(4):
                        ax = SA[i, 0] + GX[p] * (EA[i, 0] - SA[i, 0])
                        ay = SA[i, 1] + GX[p] * (EA[i, 1] - SA[i, 1])
                        for q in range(4):
                            bx = SB[j, 0] + GX[q] * (EB[j, 0] - SB[j, 0])
                            by = SB[j, 1] + GX[q] * (EB[j, 1] - SB[j, 1])
                            dx = ax - bx
                            dy = ay - by
                            acc = acc - 0.5 * GW[p] * GW[q] * log(dx * dx + dy * dy)
                    K[i, j] = acc
                else:
                    K[i, j] = -0.5 * log(r2)
    return out, bool(ok)


def segment_log_average(x, s, e):
    cdef double[:, ::1] X = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
    cdef double[:, ::1] S = np.ascontiguousarray(s, dtype=np.float64)
    cdef double[:, ::1] E = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0]
    cdef Py_ssize_t n = S.shape[0]
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] A = out
    cdef Py_ssize_t i, j
    cdef double tx, ty, h, rx, ry, u0, d
    with nogil:
        for j in range(n):
            tx = E[j, 0] - S[j, 0]
            ty = E[j, 1] - S[j, 1]
            h = sqrt(tx * tx + ty * ty)
            tx = tx / h
            ty = ty / h
            for i in range(m):
                rx = X[i, 0] - S[j, 0]
                ry = X[i, 1] - S[j, 1]
                u0 = -(rx * tx + ry * ty)
                d = fabs(rx * ty - ry * tx)
                A[i, j] = -(prim(u0 + h, d) - prim(u0, d)) / h
    return out
