"""Asymptotic means and variances of Kendall's T and Spearman's S.

With ``U = G(X)`` and ``V = H(Y)``:

* ``mu_T = 4 E F(X, Y) - 1``
* ``sigma2_T = 16 Var(2 F(X, Y) - U - V)``
* ``mu_S = 12 E U V - 3``
* ``sigma2_S = 144 Var((1 - U)(1 - V) + int F(X, y) dH(y) + int F(x, Y) dG(x))``

All expectations go through the model's integration rule, with the
breakpoints of ``F_theta`` passed along so that piecewise models are
integrated cell by cell. Constants are subtracted inside the integrands
(``E[F - 1/4]``, ``E[(U - 1/2)(V - 1/2)]``) so that small means keep
their relative accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError
from .quadrature import quad_order

VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class AsymptoticMoments:
    theta: float
    mu_t: float
    sigma2_t: float
    mu_s: float
    sigma2_s: float
    method: str
    est_error: float

    def mu(self, which):
        return self.mu_t if which == "T" else self.mu_s

    def sigma2(self, which):
        return self.sigma2_t if which == "T" else self.sigma2_s


def _method(model):
    return "exact-decomposition" if model.exact_decomposition else "quadrature"


def _kink_args(model, theta):
    points, sign = model.kinks(theta)
    return points, points, sign


def mu_t(model, theta, order=None):
    theta = model.check_theta(theta)
    xb, yb, sign = _kink_args(model, theta)
    e = model.expectation(theta, lambda x, y: model.cdf(theta, x, y) - 0.25, xb, yb, sign, order)
    return 4.0 * e


def mu_s(model, theta, order=None):
    theta = model.check_theta(theta)
    xb, yb, _ = _kink_args(model, theta)
    e = model.expectation(theta, lambda x, y: (model.G(x) - 0.5) * (model.H(y) - 0.5), xb, yb, 0, order)
    return 12.0 * e


def _centered_variance(model, theta, w_fn, xb, yb, sign, order):
    x, y, w = model.rule(theta, xb, yb, sign, order)
    vals = w_fn(x, y)
    mean = np.dot(w, vals)
    return float(np.dot(w, (vals - mean) ** 2))


def _check_variance(value, label, theta):
    if not value > VARIANCE_FLOOR:
        raise DegeneracyError(f"{label}({theta}) = {value:.3e} is below {VARIANCE_FLOOR:g}")
    return value


def sigma2_t(model, theta, order=None):
    theta = model.check_theta(theta)
    xb, yb, sign = _kink_args(model, theta)

    def w_fn(x, y):
        return 2.0 * model.cdf(theta, x, y) - model.G(x) - model.H(y)

    value = 16.0 * _centered_variance(model, theta, w_fn, xb, yb, sign, order)
    return _check_variance(value, "sigma2_t", theta)


def sigma2_s(model, theta, order=None):
    theta = model.check_theta(theta)
    xb, yb, _ = _kink_args(model, theta)

    def w_fn(x, y):
        return (
            (1.0 - model.G(x)) * (1.0 - model.H(y))
            + model.inner_y_integral(theta, x, order)
            + model.inner_x_integral(theta, y, order)
        )

    value = 144.0 * _centered_variance(model, theta, w_fn, xb, yb, 0, order)
    return _check_variance(value, "sigma2_s", theta)


def _all(model, theta, order):
    return (
        mu_t(model, theta, order),
        sigma2_t(model, theta, order),
        mu_s(model, theta, order),
        sigma2_s(model, theta, order),
    )


def moments(model, theta, order=None, with_error=True):
    """All four functionals at ``theta``; ``est_error`` compares against doubled order."""
    theta = model.check_theta(theta)
    q = quad_order(order)
    vals = _all(model, theta, q)
    err = 0.0
    if with_error:
        fine = _all(model, theta, 2 * q)
        err = max(abs(a - b) for a, b in zip(vals, fine))
    return AsymptoticMoments(theta, vals[0], vals[1], vals[2], vals[3], _method(model), err)


def null_moments(model, theta0=0.0, order=None):
    """Moments at the null without the order-doubling error estimate."""
    return moments(model, theta0, order, with_error=False)
