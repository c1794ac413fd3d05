"""Pure-numpy log-kernel routines; reference fallback for the compiled core."""

from __future__ import annotations

import numpy as np

# 4-point Gauss-Legendre on [0, 1]
_GX, _GW = np.polynomial.legendre.leggauss(4)
GAUSS_X = 0.5 * (_GX + 1.0)
GAUSS_W = 0.5 * _GW


def _cyclic_gap(ia: np.ndarray, ib: np.ndarray, n_total: int) -> np.ndarray:
    d = np.abs(ia[:, None] - ib[None, :]) % n_total
    return np.minimum(d, n_total - d)


NEAR_FACTOR = 2.5  # far pairs closer than this many (larger) panel lengths are refined
SIZE_RATIO = 4.0  # neighbour pairs more unequal than this are refined


def _pair_segment_average(x, s, e):
    """Elementwise exact mean of -log|x_k - y| over segment k."""
    d = e - s
    h = np.hypot(d[:, 0], d[:, 1])
    t = d / h[:, None]
    rel = x - s
    u0 = -(rel * t).sum(axis=1)
    u1 = u0 + h
    dist = np.abs(rel[:, 0] * t[:, 1] - rel[:, 1] * t[:, 0])

    def prim(u):
        r2 = u * u + dist * dist
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(r2 > 0.0, 0.5 * u * np.log(r2), 0.0)
            at = np.where(dist > 0.0, dist * np.arctan2(u, dist), 0.0)
        return lg - u + at

    return -(prim(u1) - prim(u0)) / h


def kernel_block(sa, ea, ia, sb, eb, ib, n_total):
    """Panel-averaged ``-log|x - y|`` between panel sets A and B.

    Panels are given by start/end points and their index along the boundary
    (``n_total`` panels in the closed curve).  Same index: exact self term
    ``3/2 - log h``; boundary gap 1 or 2: 4x4 Gauss product rule; otherwise
    the midpoint rule.  Pairs that are geometrically close for their size
    (gap > 2 but midpoint distance below 2.5 times the larger length, or
    neighbours with length ratio above 4) use 4 Gauss points on the smaller
    panel against the exact average over the larger one.  Returns (K, ok)
    where ok is False when two distinct far panels share a midpoint.
    """
    sa = np.asarray(sa, dtype=float)
    ea = np.asarray(ea, dtype=float)
    sb = np.asarray(sb, dtype=float)
    eb = np.asarray(eb, dtype=float)
    ia = np.asarray(ia, dtype=np.int64)
    ib = np.asarray(ib, dtype=np.int64)
    ma = 0.5 * (sa + ea)
    mb = 0.5 * (sb + eb)
    ha = np.hypot(*(ea - sa).T)
    hb = np.hypot(*(eb - sb).T)
    dx = ma[:, 0][:, None] - mb[:, 0][None, :]
    dy = ma[:, 1][:, None] - mb[:, 1][None, :]
    r2 = dx * dx + dy * dy
    gap = _cyclic_gap(ia, ib, n_total)
    far = gap > 2
    ok = bool(np.all(r2[far] > 0.0))
    with np.errstate(divide="ignore"):
        K = -0.5 * np.log(r2)
    diag = np.nonzero(gap == 0)
    if diag[0].size:
        K[diag] = 1.5 - np.log(ha[diag[0]])
    hmax = np.maximum(ha[:, None], hb[None, :])
    hmin = np.minimum(ha[:, None], hb[None, :])
    refine = (gap > 0) & ((far & (r2 < (NEAR_FACTOR * hmax) ** 2)) | (~far & (hmax > SIZE_RATIO * hmin)))
    near = np.nonzero(((gap == 1) | (gap == 2)) & ~refine)
    if near[0].size:
        pa = sa[near[0]][:, None, :] + GAUSS_X[None, :, None] * (ea - sa)[near[0]][:, None, :]
        pb = sb[near[1]][:, None, :] + GAUSS_X[None, :, None] * (eb - sb)[near[1]][:, None, :]
        d = pa[:, :, None, :] - pb[:, None, :, :]
        lg = -0.5 * np.log(np.einsum("pijk,pijk->pij", d, d))
        K[near] = np.einsum("pij,i,j->p", lg, GAUSS_W, GAUSS_W)
    ref = np.nonzero(refine)
    if ref[0].size:
        i, j = ref
        a_small = ha[i] <= hb[j]
        s_small = np.where(a_small[:, None], sa[i], sb[j])
        e_small = np.where(a_small[:, None], ea[i], eb[j])
        s_big = np.where(a_small[:, None], sb[j], sa[i])
        e_big = np.where(a_small[:, None], eb[j], ea[i])
        acc = np.zeros(len(i))
        for x, w in zip(GAUSS_X, GAUSS_W):
            acc += w * _pair_segment_average(s_small + x * (e_small - s_small), s_big, e_big)
        K[ref] = acc
    return K, ok


def segment_log_average(x, s, e):
    """Exact mean of ``-log|x - y|`` for y uniform on each segment [s_j, e_j].

    Returns an (m, n) array for m points and n segments.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = np.asarray(s, dtype=float)
    e = np.asarray(e, dtype=float)
    d = e - s
    h = np.hypot(d[:, 0], d[:, 1])
    t = d / h[:, None]
    rel = x[:, None, :] - s[None, :, :]
    u0 = -(rel * t[None]).sum(axis=2)  # segment start relative to the projection
    u1 = u0 + h[None, :]
    dist = np.abs(rel[..., 0] * t[None, :, 1] - rel[..., 1] * t[None, :, 0])

    def prim(u):
        r2 = u * u + dist * dist
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(r2 > 0.0, 0.5 * u * np.log(r2), 0.0)
            at = np.where(dist > 0.0, dist * np.arctan2(u, dist), 0.0)
        return lg - u + at

    return -(prim(u1) - prim(u0)) / h[None, :]
