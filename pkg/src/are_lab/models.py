"""Concrete dependence models and the name registry.

Copula-style families (linear/FGM, Plackett, Frank) live on the unit
square, the bivariate normal on the plane with standard normal marginals,
and the four MICD mixtures on ``[-1/2, 1/2]^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConfigError, DomainError, NumericError
from .model_core import DependenceModel
from .quadrature import cell_rule, interval_rule, partition, quad_order, rectangle_rule


# ---------------------------------------------------------------------------
# conditional inversion
# ---------------------------------------------------------------------------

def invert_conditional(h, dens, u, p, tol=1e-12, max_iter=200):
    """Solve ``h(u, v) = p`` for ``v`` in [0, 1], elementwise.

    ``h`` is the conditional CDF ``dC/du`` (increasing in ``v``) and
    ``dens`` its ``v``-derivative. Newton steps are taken inside a
    shrinking bisection bracket and rejected whenever they leave it.
    """
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    lo = np.zeros_like(p)
    hi = np.ones_like(p)
    v = p.copy()
    active = np.ones(p.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        vi = v[idx]
        f = h(u[idx], vi) - p[idx]
        pos = f > 0
        hi[idx] = np.where(pos, vi, hi[idx])
        lo[idx] = np.where(pos, lo[idx], vi)
        d = dens(u[idx], vi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = vi - f / d
        ok = np.isfinite(step) & (step > lo[idx]) & (step < hi[idx])
        new = np.where(ok, step, 0.5 * (lo[idx] + hi[idx]))
        hit = np.abs(f) <= tol
        new = np.where(hit, vi, new)
        v[idx] = new
        done = hit | (hi[idx] - lo[idx] <= tol) | (np.abs(new - vi) <= tol * 1e-2)
        active[idx[done]] = False
    # a collapsed bracket is only a success if the residual is small too
    if not active.any():
        resid = np.abs(h(u, v) - p)
        active = ~(resid <= 1e-6)
    if active.any():
        bad = np.nonzero(active)[0]
        raise NumericError(
            "conditional inversion did not converge",
            {"count": int(bad.size), "u": u[bad[:5]].tolist(), "p": p[bad[:5]].tolist()},
        )
    return np.clip(v, 0.0, 1.0)


class CopulaModel(DependenceModel):
    """Absolutely continuous family on the unit square.

    Subclasses provide ``_copula``, ``_density`` and ``_h`` (``dC/du``).
    """

    support = (0.0, 1.0, 0.0, 1.0)

    def _copula(self, theta, u, v):
        raise NotImplementedError

    def _density(self, theta, u, v):
        raise NotImplementedError

    def _h(self, theta, u, v):
        raise NotImplementedError

    def cdf(self, theta, x, y):
        theta = self.check_theta(theta)
        return self._copula(theta, self.G(x), self.H(y))

    def copula(self, theta, u, v):
        theta = self.check_theta(theta)
        return self._copula(theta, np.clip(u, 0.0, 1.0), np.clip(v, 0.0, 1.0))

    def copula_density(self, theta, u, v):
        return self._density(self.check_theta(theta), np.asarray(u, float), np.asarray(v, float))

    def rule(self, theta, x_breaks=(), y_breaks=(), diagonal=0, order=None):
        theta = self.check_theta(theta)
        q = quad_order(order)
        ub = partition(0.0, 1.0, self.G(np.asarray(x_breaks, dtype=float)))
        vb = partition(0.0, 1.0, self.H(np.asarray(y_breaks, dtype=float)))
        U, V, W = rectangle_rule(ub, vb, q)
        W = W * self._density(theta, U, V)
        return self.G_inv(U), self.H_inv(V), W

    def _draw(self, theta, n, rng):
        u = rng.random(n)
        p = rng.random(n)
        v = invert_conditional(
            lambda a, b: self._h(theta, a, b),
            lambda a, b: self._density(theta, a, b),
            u,
            p,
        )
        return self.G_inv(u), self.H_inv(v)


# ---------------------------------------------------------------------------
# linear / Farlie
# ---------------------------------------------------------------------------

def _fd_du(f, u, v, step=1e-6):
    return (f(u + step, v) - f(u - step, v)) / (2 * step)


@dataclass(frozen=True)
class LinearModelSpec:
    """``F_theta = uv + theta * delta(u, v)`` on the unit square.

    ``delta`` must vanish on the boundary. Missing partial derivatives are
    taken by central differences. When ``theta_domain`` is omitted it is
    estimated from the range of the mixed partial on a 401 x 401 grid; that
    range is not claimed to be sharp.
    """

    delta: Callable
    delta_du: Callable | None = None
    delta_uv: Callable | None = None
    theta_domain: tuple[float, float] | None = None
    name: str = "linear"

    def mixed(self, u, v):
        if self.delta_uv is not None:
            return self.delta_uv(u, v)
        s = 1e-4
        d = self.delta
        return (d(u + s, v + s) - d(u + s, v - s) - d(u - s, v + s) + d(u - s, v - s)) / (4 * s * s)

    def du(self, u, v):
        if self.delta_du is not None:
            return self.delta_du(u, v)
        return _fd_du(self.delta, u, v)

    def domain(self):
        if self.theta_domain is not None:
            return tuple(float(t) for t in self.theta_domain)
        g = np.linspace(0.0, 1.0, 401)
        U, V = np.meshgrid(g, g, indexing="ij")
        m = self.mixed(U, V)
        mx, mn = float(m.max()), float(m.min())
        hi = -1.0 / mn if mn < 0 else math.inf
        lo = -1.0 / mx if mx > 0 else -math.inf
        return lo, hi


FGM_SPEC = LinearModelSpec(
    delta=lambda u, v: u * v * (1 - u) * (1 - v),
    delta_du=lambda u, v: (1 - 2 * u) * v * (1 - v),
    delta_uv=lambda u, v: (1 - 2 * u) * (1 - 2 * v),
    theta_domain=(-1.0, 1.0),
    name="fgm",
)


class LinearModel(CopulaModel):
    def __init__(self, spec: LinearModelSpec = FGM_SPEC):
        self.spec = spec
        self.name = spec.name
        self.theta_domain = spec.domain()

    def _copula(self, theta, u, v):
        return u * v + theta * self.spec.delta(u, v)

    def _density(self, theta, u, v):
        return 1.0 + theta * self.spec.mixed(u, v)

    def _h(self, theta, u, v):
        return v + theta * self.spec.du(u, v)


# ---------------------------------------------------------------------------
# Plackett
# ---------------------------------------------------------------------------

def _plackett_root(theta, u, v):
    r = np.sqrt(1.0 + 2.0 * theta * (u + v - 2.0 * u * v) + theta * theta * (u - v) ** 2)
    return r


def plackett_cdf(theta, u, v):
    """Plackett copula in the form ``F - uv = theta (u - F)(v - F)``, ``theta > -1``."""
    theta = float(theta)
    if not theta > -1.0:
        raise DomainError(f"Plackett needs theta > -1, got {theta}")
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    r = _plackett_root(theta, u, v)
    return 2.0 * (theta + 1.0) * u * v / (1.0 + theta * (u + v) + r)


class PlackettModel(CopulaModel):
    name = "plackett"
    theta_domain = (-1.0, math.inf)

    def _copula(self, theta, u, v):
        return plackett_cdf(theta, u, v)

    def _density(self, theta, u, v):
        r = _plackett_root(theta, u, v)
        return (1.0 + theta) * (1.0 + theta * (u + v - 2.0 * u * v)) / r**3

    def _h(self, theta, u, v):
        r = _plackett_root(theta, u, v)
        den = 1.0 + theta * (u + v) + r
        dr = (theta * (1.0 - 2.0 * v) + theta * theta * (u - v)) / r
        k = 2.0 * (theta + 1.0)
        return k * v * (den - u * (theta + dr)) / den**2


# ---------------------------------------------------------------------------
# Frank
# ---------------------------------------------------------------------------

FRANK_SERIES_CUTOFF = 1e-6


def _frank_series(theta, u, v):
    a = u * (1 - u)
    b = v * (1 - v)
    c1 = 0.5 * a * b
    c2 = a * b * (2 * u - 1) * (2 * v - 1) / 12.0
    poly = 6 * u * u * v * v - 6 * u * u * v + u * u - 6 * u * v * v + 6 * u * v - u + v * v - v
    c3 = a * b * poly / 24.0
    return u * v + theta * (c1 + theta * (c2 + theta * c3))


def _frank_density_series(theta, u, v):
    p = 2 * u - 1
    q = 2 * v - 1
    c1 = 0.5 * p * q
    c2 = (6 * u * u - 6 * u + 1) * (6 * v * v - 6 * v + 1) / 12.0
    poly = 12 * u * u * v * v - 12 * u * u * v + u * u - 12 * u * v * v + 12 * u * v - u + v * v - v
    c3 = p * q * poly / 12.0
    return 1.0 + theta * (c1 + theta * (c2 + theta * c3))


def _frank_h_series(theta, u, v):
    b = v * (v - 1)
    c1 = 0.5 * b * (2 * u - 1)
    c2 = b * (2 * v - 1) * (6 * u * u - 6 * u + 1) / 12.0
    poly = 12 * u * u * v * v - 12 * u * u * v + 2 * u * u - 12 * u * v * v + 12 * u * v - 2 * u + v * v - v
    c3 = b * (2 * u - 1) * poly / 24.0
    return v + theta * (c1 + theta * (c2 + theta * c3))


def _frank_pos(theta, u, v):
    # theta > 0: every exponent is non-positive, so nothing overflows
    x = np.expm1(-theta * u) * np.expm1(-theta * v) / np.expm1(-theta)
    # near the upper corner 1 + x cancels; rebuild it from positive terms
    eu, ev = np.exp(-theta * u), np.exp(-theta * v)
    rest = (-eu * np.expm1(-theta * v) - ev * np.expm1(-theta * (1.0 - v))) / -math.expm1(-theta)
    with np.errstate(divide="ignore"):
        return np.where(x > -0.5, -np.log1p(x), -np.log(rest)) / theta


def _frank_neg(s, u, v):
    # theta = -s < 0, ratio of expm1 terms assembled in logs to avoid overflow
    with np.errstate(divide="ignore"):
        log_r = (
            s * (u + v - 1.0)
            + np.log(-np.expm1(-s * u))
            + np.log(-np.expm1(-s * v))
            - math.log(-math.expm1(-s))
        )
    return np.logaddexp(0.0, log_r) / s


def frank_cdf(theta, u, v):
    """Frank copula, continuously extended to ``theta = 0``.

    Negative parameters evaluate the generator ratio in logs; a short
    Taylor series takes over for ``|theta| < 1e-6``.
    """
    theta = float(theta)
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    if abs(theta) < FRANK_SERIES_CUTOFF:
        return _frank_series(theta, u, v)
    if theta < 0:
        return _frank_neg(-theta, u, v)
    return _frank_pos(theta, u, v)


class FrankModel(CopulaModel):
    name = "frank"
    theta_domain = (-math.inf, math.inf)

    def _copula(self, theta, u, v):
        return frank_cdf(theta, u, v)

    def _density(self, theta, u, v):
        if abs(theta) < FRANK_SERIES_CUTOFF:
            return _frank_density_series(theta, u, v)
        if theta < 0:
            theta, v = -theta, 1.0 - v
        k = -np.expm1(-theta)
        den = k - np.expm1(-theta * u) * np.expm1(-theta * v)
        return theta * k * np.exp(-theta * (u + v)) / den**2

    def _h(self, theta, u, v):
        if abs(theta) < FRANK_SERIES_CUTOFF:
            return _frank_h_series(theta, u, v)
        if theta < 0:
            return 1.0 - self._h(-theta, u, 1.0 - v)
        k = -np.expm1(-theta)
        b = -np.expm1(-theta * v)
        den = k - np.expm1(-theta * u) * np.expm1(-theta * v)
        return np.exp(-theta * u) * b / den


# ---------------------------------------------------------------------------
# bivariate normal
# ---------------------------------------------------------------------------

_GL20_X, _GL20_W = np.polynomial.legendre.leggauss(20)
_TWOPI = 2.0 * math.pi


def _bvnu(h, k, r):
    """``P(X > h, Y > k)`` for a standard BVN with correlation ``r``.

    Drezner-Wesolowsky as refined by Genz, with a 20-point Gauss-Legendre
    rule throughout; arguments are broadcast 1-D arrays.
    """
    out = np.empty(h.shape)
    hk = h * k
    low = np.abs(r) < 0.925
    if low.any():
        hl, kl, rl, hkl = h[low], k[low], r[low], hk[low]
        hs = 0.5 * (hl * hl + kl * kl)
        asr = np.arcsin(rl)
        sn = np.sin(asr[:, None] * (_GL20_X[None, :] + 1.0) * 0.5)
        terms = np.exp((sn * hkl[:, None] - hs[:, None]) / (1.0 - sn * sn))
        out[low] = terms @ _GL20_W * asr / (2.0 * _TWOPI) + ndtr(-hl) * ndtr(-kl)
    high = ~low
    if high.any():
        hh, kh, rh, hkh = h[high], k[high].copy(), r[high], hk[high].copy()
        neg = rh < 0
        kh[neg] = -kh[neg]
        hkh[neg] = -hkh[neg]
        res = np.zeros(hh.shape)
        inner = np.abs(rh) < 1.0
        if inner.any():
            hi_, ki, ri, hki = hh[inner], kh[inner], rh[inner], hkh[inner]
            as_ = (1.0 - ri) * (1.0 + ri)
            a = np.sqrt(as_)
            bs = (hi_ - ki) ** 2
            c = (4.0 - hki) / 8.0
            d = (12.0 - hki) / 16.0
            bvn = a * np.exp(-(bs / as_ + hki) / 2.0) * (
                1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0
            )
            tail = hki > -160.0
            b = np.sqrt(bs)
            with np.errstate(over="ignore", invalid="ignore"):
                corr = (
                    np.exp(-hki / 2.0)
                    * math.sqrt(_TWOPI)
                    * ndtr(-b / a)
                    * b
                    * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
                )
            bvn = bvn - np.where(tail, corr, 0.0)
            half = a / 2.0
            xs = (half[:, None] * (_GL20_X[None, :] + 1.0)) ** 2
            rs = np.sqrt(1.0 - xs)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                f = np.exp(-bs[:, None] / (2.0 * xs) - hki[:, None] / (1.0 + rs)) / rs - np.exp(
                    -(bs[:, None] / xs + hki[:, None]) / 2.0
                ) * (1.0 + c[:, None] * xs * (1.0 + d[:, None] * xs))
            f = np.where(np.isfinite(f), f, 0.0)
            bvn = bvn + half * (f @ _GL20_W)
            res[inner] = -bvn / _TWOPI
        pos = rh > 0
        res[pos] += ndtr(-np.maximum(hh[pos], kh[pos]))
        res[neg] = -res[neg] + np.maximum(0.0, ndtr(-hh[neg]) - ndtr(-kh[neg]))
        out[high] = res
    return out


def bvn_cdf(rho, x, y):
    """Standard bivariate normal CDF with correlation ``rho``, ``|rho| < 1``."""
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf = x.ravel()
    yf = y.ravel()
    out = np.empty(xf.shape)
    lowx = xf == -np.inf
    lowy = yf == -np.inf
    infx = xf == np.inf
    infy = yf == np.inf
    zero = lowx | lowy
    out[zero] = 0.0
    only_y = infx & ~zero
    out[only_y] = ndtr(yf[only_y])
    only_x = infy & ~zero & ~infx
    out[only_x] = ndtr(xf[only_x])
    rest = ~(zero | infx | infy)
    if rest.any():
        xr, yr = xf[rest], yf[rest]
        if rho == 0.0:
            out[rest] = ndtr(xr) * ndtr(yr)
        else:
            out[rest] = _bvnu(-xr, -yr, np.full(xr.shape, rho))
    out = np.clip(out, 0.0, 1.0)
    return out.reshape(shape) if shape else float(out[0])


_BVN_EDGES = np.array([1e-8, 1e-5, 1e-3, 0.03])
_BVN_GRADING = np.concatenate([_BVN_EDGES, [0.5], 1.0 - _BVN_EDGES])


class BvnModel(DependenceModel):
    name = "bvn"
    theta_domain = (-1.0, 1.0)
    support = (-math.inf, math.inf, -math.inf, math.inf)
    marginal_note = "G and H are the standard normal CDF and do not depend on theta"

    def G(self, x):
        return ndtr(np.asarray(x, dtype=float))

    def H(self, y):
        return ndtr(np.asarray(y, dtype=float))

    def G_inv(self, u):
        return ndtri(np.asarray(u, dtype=float))

    def H_inv(self, v):
        return ndtri(np.asarray(v, dtype=float))

    def cdf(self, theta, x, y):
        return bvn_cdf(self.check_theta(theta), x, y)

    def _gauss_density(self, rho, x, y):
        s = 1.0 - rho * rho
        return np.exp(-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * s)) / math.sqrt(s)

    def copula_density(self, theta, u, v):
        theta = self.check_theta(theta)
        return self._gauss_density(theta, self.G_inv(u), self.H_inv(v))

    def rule(self, theta, x_breaks=(), y_breaks=(), diagonal=0, order=None):
        theta = self.check_theta(theta)
        # the density in copula coordinates blows up in the corners, so
        # grade the cells geometrically towards the edges
        q = max(8, quad_order(order) // 4)
        ub = partition(0.0, 1.0, np.concatenate([self.G(np.asarray(x_breaks, dtype=float)).ravel(), _BVN_GRADING]))
        vb = partition(0.0, 1.0, np.concatenate([self.H(np.asarray(y_breaks, dtype=float)).ravel(), _BVN_GRADING]))
        U, V, W = rectangle_rule(ub, vb, q)
        X, Y = self.G_inv(U), self.H_inv(V)
        return X, Y, W * self._gauss_density(theta, X, Y)

    def _draw(self, theta, n, rng):
        z = rng.standard_normal((n, 2))
        x = z[:, 0]
        y = theta * z[:, 0] + math.sqrt(1.0 - theta * theta) * z[:, 1]
        return x, y


# ---------------------------------------------------------------------------
# MICD mixtures
# ---------------------------------------------------------------------------

MICD_VARIANTS = ("AS", "AL", "OS", "OL")


@dataclass(frozen=True)
class MicdSpec:
    """One of the four independence / complete-dependence mixtures.

    All geometry below is for ``t = |theta|``; negative parameters are the
    image under ``(x, y) -> (x, -y)``.
    """

    variant: str

    def __post_init__(self):
        if self.variant not in MICD_VARIANTS:
            raise ConfigError(f"unknown MICD variant {self.variant!r}")

    @property
    def is_and(self):
        return self.variant[0] == "A"

    @property
    def is_small(self):
        return self.variant[1] == "S"

    def weight(self, theta):
        t = abs(float(theta))
        return t if self.is_and else t * t

    def edge(self, t):
        """Half-width of the central strip: ``(1 - t)/2`` (S variants) or ``t/2`` (L)."""
        return 0.5 * (1.0 - t) if self.is_small else 0.5 * t

    def region_area(self, t):
        return (1.0 - t) ** 2 if self.is_and else 1.0 - t * t

    def rectangles(self, t):
        """Disjoint rectangles ``(x0, x1, y0, y1)`` whose union is the region A."""
        e = self.edge(t)
        h = 0.5
        v = self.variant
        if v == "AS":
            return [(-e, e, -e, e)]
        if v == "OS":
            return [(-e, e, -h, h), (-h, -e, -e, e), (e, h, -e, e)]
        if v == "AL":
            return [(-h, -e, -h, -e), (-h, -e, e, h), (e, h, -h, -e), (e, h, e, h)]
        return [(-h, -e, -h, h), (e, h, -h, h), (-e, e, -h, -e), (-e, e, e, h)]

    def in_region(self, t, x, y):
        e = self.edge(t)
        if self.is_small:
            ax, ay = np.abs(x) <= e, np.abs(y) <= e
        else:
            ax, ay = np.abs(x) >= e, np.abs(y) >= e
        return (ax & ay) if self.is_and else (ax | ay)

    def segments(self, t):
        """Diagonal segments ``(lo, hi)`` carrying the singular part (points ``(u, u)``)."""
        if t == 0.0:
            return []
        if self.is_small:
            e = self.edge(t)
            return [(-0.5, -e), (e, 0.5)]
        return [(-0.5 * t, 0.5 * t)]

    def region_density(self, t):
        """Constant density of the continuous part on A (w.r.t. Lebesgue measure)."""
        mass = 1.0 - self.weight(t)
        area = self.region_area(t)
        if mass <= 0.0 or area <= 0.0:
            return 0.0
        return mass / area

    def segment_density(self, t):
        """Mass per unit of ``u`` along the segments."""
        return self.weight(t) / t if t > 0 else 0.0

    def breakpoints(self, t):
        e = self.edge(t)
        return np.unique(np.array([-0.5, -e, 0.0, e, 0.5]))


def _check_micd_theta(theta):
    theta = float(theta)
    if not abs(theta) <= 1.0:
        raise DomainError(f"MICD models need |theta| <= 1, got {theta}")
    return theta


def _micd_cdf_pos(spec, t, x, y):
    total = np.zeros(np.broadcast(x, y).shape)
    dens = spec.region_density(t)
    if dens > 0.0:
        for x0, x1, y0, y1 in spec.rectangles(t):
            ox = np.clip(np.minimum(x, x1) - x0, 0.0, None)
            oy = np.clip(np.minimum(y, y1) - y0, 0.0, None)
            total = total + dens * ox * oy
    sdens = spec.segment_density(t)
    if sdens > 0.0:
        m = np.minimum(x, y)
        for lo, hi in spec.segments(t):
            total = total + sdens * np.clip(np.minimum(m, hi) - lo, 0.0, None)
    return total


def micd_cdf(spec, theta, u, v):
    """Joint CDF of an MICD mixture at ``(u, v)``, clamped to ``[-1/2, 1/2]^2``."""
    theta = _check_micd_theta(theta)
    if isinstance(spec, str):
        spec = MicdSpec(spec)
    x = np.clip(np.asarray(u, dtype=float), -0.5, 0.5)
    y = np.clip(np.asarray(v, dtype=float), -0.5, 0.5)
    t = abs(theta)
    if theta >= 0.0:
        out = _micd_cdf_pos(spec, t, x, y)
    else:
        # (X, Y) = (X', -Y') with (X', Y') at |theta|
        out = (x + 0.5) - _micd_cdf_pos(spec, t, x, -y)
    out = np.clip(out, 0.0, 1.0)
    return out if out.shape else float(out)


def micd_rule(spec, theta, x_breaks=(), y_breaks=(), diagonal=0, order=8):
    """Nodes and weights reproducing ``E_theta g`` for piecewise-polynomial ``g``.

    The continuous part is integrated cell by cell over a symmetric grid
    that contains every breakpoint of the model and the caller; cells on
    the diagonal are split into triangles when ``diagonal`` asks for it.
    The singular part is a 1-D rule along each segment.
    """
    theta = _check_micd_theta(theta)
    t = abs(theta)
    flip = theta < 0
    yb = -np.asarray(y_breaks, dtype=float) if flip else np.asarray(y_breaks, dtype=float)
    extra = np.concatenate([np.asarray(x_breaks, dtype=float).ravel(), yb.ravel()])
    pts = np.concatenate([spec.breakpoints(t), extra, -extra])
    grid = partition(-0.5, 0.5, pts)
    need = int(np.sign(diagonal)) * (-1 if flip else 1)

    xs, ys, ws = [], [], []
    dens = spec.region_density(t)
    if dens > 0.0:
        def weight(xc, yc):
            return dens if spec.in_region(t, xc, yc) else 0.0

        cx, cy, cw = cell_rule(grid, order, weight, diagonal=need != 0)
        if need < 0:
            # region and grid are symmetric in y, so reflect the y = x split
            cy = -cy
        xs.append(cx)
        ys.append(cy)
        ws.append(cw)
    sdens = spec.segment_density(t)
    if sdens > 0.0:
        for lo, hi in spec.segments(t):
            nodes, weights = interval_rule(partition(lo, hi, grid), order)
            xs.append(nodes)
            ys.append(nodes.copy())
            ws.append(weights * sdens)
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    w = np.concatenate(ws)
    if flip:
        y = -y
    return x, y, w


def micd_expectation(spec, theta, g, x_breaks=(), y_breaks=(), diagonal=0, order=8):
    """``E_theta g(X, Y)`` through the region + segment decomposition."""
    if isinstance(spec, str):
        spec = MicdSpec(spec)
    x, y, w = micd_rule(spec, theta, x_breaks, y_breaks, diagonal, order)
    return float(np.dot(w, g(x, y)))


class MicdModel(DependenceModel):
    support = (-0.5, 0.5, -0.5, 0.5)
    theta_domain = (-1.0, 1.0)
    exact_decomposition = True

    def __init__(self, variant):
        self.spec = MicdSpec(variant)
        self.name = f"micd-{variant.lower()}"

    def check_theta(self, theta):
        # the mixtures stay well defined at |theta| = 1 (pure line mass)
        theta = float(theta)
        if not abs(theta) <= 1.0:
            raise DomainError(f"theta={theta!r} outside [-1, 1] for model {self.name!r}")
        return theta

    def cdf(self, theta, x, y):
        return micd_cdf(self.spec, self.check_theta(theta), x, y)

    def kinks(self, theta):
        t = abs(float(theta))
        sign = int(np.sign(theta)) if self.spec.weight(t) > 0 else 0
        return self.spec.breakpoints(t), sign

    def inner_order(self, order=None):
        return max(8, quad_order(order) // 12)

    def rule(self, theta, x_breaks=(), y_breaks=(), diagonal=0, order=None):
        theta = self.check_theta(theta)
        return micd_rule(self.spec, theta, x_breaks, y_breaks, diagonal, self.inner_order(order))

    def copula_density(self, theta, u, v):
        t = abs(self.check_theta(theta))
        x = self.G_inv(u)
        y = self.H_inv(v)
        return np.where(self.spec.in_region(t, x, y), self.spec.region_density(t), 0.0)

    def singular_mass(self, theta):
        return self.spec.weight(self.check_theta(theta))

    def exact_variation(self, theta):
        t = abs(self.check_theta(theta))
        if t == 0.0:
            return 0.0
        area = self.spec.region_area(t)
        dens = self.spec.region_density(t)
        return area * abs(dens - 1.0) + (1.0 - area) + self.spec.weight(t)

    def _draw(self, theta, n, rng):
        t = abs(theta)
        spec = self.spec
        w = spec.weight(t)
        on_line = rng.random(n) < w
        x = np.empty(n)
        y = np.empty(n)
        k = int((~on_line).sum())
        if k:
            rects = spec.rectangles(t)
            areas = np.array([(r[1] - r[0]) * (r[3] - r[2]) for r in rects])
            pick = rng.choice(len(rects), size=k, p=areas / areas.sum())
            r = np.array(rects)[pick]
            x[~on_line] = r[:, 0] + (r[:, 1] - r[:, 0]) * rng.random(k)
            y[~on_line] = r[:, 2] + (r[:, 3] - r[:, 2]) * rng.random(k)
        m = n - k
        if m:
            segs = np.array(spec.segments(t))
            lengths = segs[:, 1] - segs[:, 0]
            pick = rng.choice(len(segs), size=m, p=lengths / lengths.sum())
            s = segs[pick]
            u = s[:, 0] + (s[:, 1] - s[:, 0]) * rng.random(m)
            x[on_line] = u
            y[on_line] = u
        if theta < 0:
            y = -y
        return x, y


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

MODELS: dict[str, DependenceModel] = {
    "fgm": LinearModel(FGM_SPEC),
    "bvn": BvnModel(),
    "plackett": PlackettModel(),
    "frank": FrankModel(),
    "micd-as": MicdModel("AS"),
    "micd-al": MicdModel("AL"),
    "micd-os": MicdModel("OS"),
    "micd-ol": MicdModel("OL"),
}


def get_model(name):
    try:
        return MODELS[name]
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; choose from {', '.join(MODELS)}") from None


def register_model(model: DependenceModel, name=None):
    MODELS[name or model.name] = model
    return model
