"""Gauss-Legendre rules on piecewise partitions of intervals and rectangles.

Everything returns flat ``(nodes..., weights)`` arrays so that an integral
is a single dot product with the integrand evaluated at the nodes.
"""
import os
from functools import lru_cache

import numpy as np

from .errors import ConfigError

DEFAULT_ORDER = 96
ORDER_ENV = "ARE_LAB_QUAD_ORDER"


def quad_order(order=None):
    """Resolve the tensor quadrature order; the environment wins over the default."""
    if order is not None:
        return int(order)
    env = os.environ.get(ORDER_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{ORDER_ENV} must be an integer, got {env!r}") from None
        if value < 2:
            raise ConfigError(f"{ORDER_ENV} must be >= 2, got {value}")
        return value
    return DEFAULT_ORDER


@lru_cache(maxsize=64)
def _leggauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def partition(lo, hi, breaks=()):
    """Sorted unique breakpoints of [lo, hi], keeping only interior extras."""
    pts = np.asarray(list(breaks), dtype=float).ravel()
    pts = pts[np.isfinite(pts) & (pts > lo) & (pts < hi)]
    return np.unique(np.concatenate(([lo], pts, [hi])))


def interval_rule(breaks, order):
    """Composite Gauss-Legendre rule on consecutive intervals of ``breaks``."""
    b = np.asarray(breaks, dtype=float)
    x01, w01 = _leggauss01(order)
    lengths = np.diff(b)
    keep = lengths > 0
    left = b[:-1][keep]
    lengths = lengths[keep]
    nodes = (left[:, None] + lengths[:, None] * x01[None, :]).ravel()
    weights = (lengths[:, None] * w01[None, :]).ravel()
    return nodes, weights


def batched_interval_rule(breaks, order):
    """Interval rule for many partitions at once.

    ``breaks`` has shape (m, K) with each row sorted; repeated entries give
    zero-length intervals that simply carry zero weight. Returns nodes and
    weights of shape (m, (K - 1) * order).
    """
    b = np.asarray(breaks, dtype=float)
    x01, w01 = _leggauss01(order)
    lengths = np.diff(b, axis=1)
    left = b[:, :-1]
    nodes = left[:, :, None] + lengths[:, :, None] * x01[None, None, :]
    weights = lengths[:, :, None] * w01[None, None, :]
    m = b.shape[0]
    return nodes.reshape(m, -1), weights.reshape(m, -1)


def triangle_rule(p0, p1, p2, order):
    """Collapsed (Duffy) Gauss-Legendre rule on a triangle.

    Exact for polynomials of total degree up to ``2 * order - 2``.
    """
    x01, w01 = _leggauss01(order)
    s, t = np.meshgrid(x01, x01, indexing="ij")
    ws, wt = np.meshgrid(w01, w01, indexing="ij")
    p0, p1, p2 = (np.asarray(p, dtype=float) for p in (p0, p1, p2))
    e1 = p1 - p0
    e2 = p2 - p0
    area2 = abs(e1[0] * e2[1] - e1[1] * e2[0])
    px = p0[0] + s * ((1 - t) * e1[0] + t * e2[0])
    py = p0[1] + s * ((1 - t) * e1[1] + t * e2[1])
    w = ws * wt * s * area2
    return px.ravel(), py.ravel(), w.ravel()


def rectangle_rule(xb, yb, order):
    """Tensor rule on the grid of cells spanned by two partitions."""
    xn, xw = interval_rule(xb, order)
    yn, yw = interval_rule(yb, order)
    X, Y = np.meshgrid(xn, yn, indexing="ij")
    W = np.outer(xw, yw)
    return X.ravel(), Y.ravel(), W.ravel()


def cell_rule(breaks, order, cell_weight=None, diagonal=False):
    """Rule over the square grid ``breaks x breaks``.

    ``cell_weight(xc, yc)`` gives a constant density per cell from the cell
    centre (cells with weight 0 are dropped). With ``diagonal=True`` every
    cell on the main diagonal is split into its two triangles so that
    integrands with a kink along ``y = x`` are integrated exactly.
    """
    b = np.asarray(breaks, dtype=float)
    xs, ys, ws = [], [], []
    k = len(b) - 1
    rect_x, rect_w = _leggauss01(order)
    for i in range(k):
        x0, x1 = b[i], b[i + 1]
        for j in range(k):
            y0, y1 = b[j], b[j + 1]
            dens = 1.0 if cell_weight is None else cell_weight(0.5 * (x0 + x1), 0.5 * (y0 + y1))
            if dens == 0.0:
                continue
            if diagonal and i == j:
                for tri in (((x0, y0), (x1, y0), (x1, y1)), ((x0, y0), (x1, y1), (x0, y1))):
                    tx, ty, tw = triangle_rule(*tri, order)
                    xs.append(tx)
                    ys.append(ty)
                    ws.append(tw * dens)
            else:
                gx = x0 + (x1 - x0) * rect_x
                gy = y0 + (y1 - y0) * rect_x
                X, Y = np.meshgrid(gx, gy, indexing="ij")
                W = np.outer((x1 - x0) * rect_w, (y1 - y0) * rect_w) * dens
                xs.append(X.ravel())
                ys.append(Y.ravel())
                ws.append(W.ravel())
    if not xs:
        empty = np.empty(0)
        return empty, empty, empty
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)
