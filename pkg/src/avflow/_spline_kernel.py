"""Numba tensor-product quintic B-spline evaluator (hot path of composition).

Coefficient arrays are spline-filtered and periodically padded (2 cells low, 3
cells high per axis) so the inner loop is branch-free; all components of a
vector field are evaluated in one pass over the points.
"""

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def eval_quintic(coeffs, pts, out):
    """coeffs (C, M+5, M+5, M+5) padded; pts (P, 3) in [0, M); out (C, P)."""
    ncomp = coeffs.shape[0]
    npts = pts.shape[0]
    wx = np.empty(6)
    wy = np.empty(6)
    wz = np.empty(6)
    ib = np.empty(3, np.int64)
    for p in range(npts):
        for ax in range(3):
            w = wx if ax == 0 else (wy if ax == 1 else wz)
            x = pts[p, ax]
            i = int(np.floor(x))
            t = x - i
            ib[ax] = i
            om = 1.0 - t
            w[0] = om * om * om * om * om / 120.0
            w[5] = t * t * t * t * t / 120.0
            s = 1.0 + t
            w[1] = (((((5.0 * s - 45.0) * s + 150.0) * s - 210.0) * s + 75.0) * s + 51.0) / 120.0
            s = 2.0 - t
            w[4] = (((((5.0 * s - 45.0) * s + 150.0) * s - 210.0) * s + 75.0) * s + 51.0) / 120.0
            t2 = t * t
            w[2] = (((-10.0 * t + 30.0) * t2 - 60.0) * t2 + 66.0) / 120.0
            o2 = om * om
            w[3] = (((-10.0 * om + 30.0) * o2 - 60.0) * o2 + 66.0) / 120.0
        ix, iy, iz = ib[0], ib[1], ib[2]
        for c in range(ncomp):
            acc = 0.0
            for a in range(6):
                sa = 0.0
                for b in range(6):
                    sb = 0.0
                    for d in range(6):
                        sb += wz[d] * coeffs[c, ix + a, iy + b, iz + d]
                    sa += wy[b] * sb
                acc += wx[a] * sa
            out[c, p] = acc
    return out
