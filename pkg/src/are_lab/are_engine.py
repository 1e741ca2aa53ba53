"""Pitman ARE of Kendall's T versus Spearman's S.

``ARE = (sigma2_S / sigma2_T) * (mu_T' / mu_S')**2`` at the null point
``theta0``. When the derivatives vanish the engine falls back to the
secant form of the definition,

    (sigma2_S / sigma2_T) * ((mu_T(th) - mu_T(th0)) / (mu_S(th) - mu_S(th0)))**2,

evaluated on a shrinking sequence ``th -> th0``.

Also here: closed forms for the four MICD mixtures, a checker for the
equivalent conditions characterising ``ARE = 1`` at ``theta = 0``, and the
smoothness/nondegeneracy diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics
from .errors import ConfigError, DomainError, InconclusiveError
from .model_core import DependenceModel, association, kolmogorov_distance, variation_distance
from .models import MICD_VARIANTS

SIDES = ("two-sided", "left", "right")
METHODS = ("auto", "derivative-ratio", "limit-ratio")

DEGENERACY_THRESHOLD = 1e-6
LIMIT_STEPS = tuple(0.1 * 2.0 ** -k for k in range(6))
GROWTH_FACTOR = 1.5
TREND_TOLERANCE = 1e-3
E0_THRESHOLD = 1e-14


@dataclass(frozen=True)
class AreResult:
    model: str
    theta0: float
    side: str
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_infinite(self):
        return math.isinf(self.value)


# ---------------------------------------------------------------------------
# closed forms for the MICD mixtures
# ---------------------------------------------------------------------------

def _poly(coeffs, t):
    """``sum c_k t**k`` by Horner; ``coeffs`` in increasing degree."""
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


_OS_K1 = (10, 10, 10, 10, -230, 400, -267, 66)
_OS_K2 = (1, 1, 1, 1, -11, 31, -27, 9)


def are_closed_micd(variant, theta):
    """Closed-form ARE of the MICD mixture ``variant`` at ``|theta|``.

    Returns ``math.inf`` for AL at 0.
    """
    variant = variant.upper().removeprefix("MICD-")
    if variant not in MICD_VARIANTS:
        raise ConfigError(f"unknown MICD variant {variant!r}")
    theta = float(theta)
    if not abs(theta) < 1.0:
        raise DomainError(f"closed-form MICD ARE needs |theta| < 1, got {theta}")
    t = abs(theta)
    if variant == "AS":
        return 1.0
    if variant == "OS":
        num = 9.0 * (2.0 - 3.0 * t + 2.0 * t * t) ** 2 * _poly(_OS_K1, t)
        den = 10.0 * (6.0 - 9.0 * t + 4.0 * t * t) ** 2 * _poly(_OS_K2, t)
        return num / den
    if variant == "AL":
        if t == 0.0:
            return math.inf
        num = 2.0 * _poly((1, 2, 3, 2, 1, 9), t)
        den = t * t * _poly((2, 5, 11, 18), t)
        return num / den
    num = 9.0 * _poly((5, 0, 0, 0, 0, 0, 4, 24, -33), t)
    den = 20.0 * _poly((1, 0, 0, 0, 0, 0, 8, 0, -9), t)
    return num / den


def are_closed(model, theta0):
    """Closed-form ARE as an :class:`AreResult`; only the MICD models have one."""
    name = model if isinstance(model, str) else model.name
    if not name.startswith("micd-"):
        raise ConfigError(f"no closed form for model {name!r}; use the numeric method")
    value = are_closed_micd(name[5:], theta0)
    return AreResult(name, float(theta0), "two-sided", value, "closed-form", {})


# ---------------------------------------------------------------------------
# numeric ARE
# ---------------------------------------------------------------------------

def _step(theta0):
    return max(1e-4, 1e-3 * abs(theta0))


def _derivative(f, theta0, h, side):
    """Richardson-extrapolated derivative from steps h, h/2, h/4.

    Returns ``(estimate, residual)``; the residual is the change made by
    the last extrapolation level.
    """
    steps = (h, h / 2.0, h / 4.0)
    f0 = None if side == "two-sided" else f(theta0)
    d = []
    for s in steps:
        if side == "two-sided":
            d.append((f(theta0 + s) - f(theta0 - s)) / (2.0 * s))
        elif side == "right":
            d.append((f(theta0 + s) - f0) / s)
        else:
            d.append((f0 - f(theta0 - s)) / s)
    # Eliminate an h and then an h**2 error term. Central differences of a
    # smooth function have no h term, but at a kink of mu (MICD at 0) they do.
    r1 = [2.0 * d[i + 1] - d[i] for i in range(2)]
    r2 = (4.0 * r1[1] - r1[0]) / 3.0
    return r2, abs(r2 - r1[1])


def _secant_ratios(model, theta0, base, steps, direction):
    out = []
    for h in steps:
        th = theta0 + direction * h
        dt = asymptotics.mu_t(model, th) - base[0]
        ds = asymptotics.mu_s(model, th) - base[1]
        out.append(math.inf if ds == 0.0 else (dt / ds) ** 2)
    return out


def _aitken(seq):
    """Aitken delta-squared extrapolation of the last three terms."""
    a, b, c = seq[-3:]
    den = (c - b) - (b - a)
    if den == 0.0 or not math.isfinite(den):
        return c
    est = c - (c - b) ** 2 / den
    # fall back to the last term when the sequence is not geometric enough
    if not math.isfinite(est) or abs(est - c) > 10.0 * abs(c - b) + 1e-15:
        return c
    return est


def _diverges(seq):
    tail = seq[-4:]
    return all(math.isinf(x) for x in tail[-2:]) or all(
        tail[i + 1] >= GROWTH_FACTOR * tail[i] > 0.0 for i in range(len(tail) - 1)
    )


def _limit_ratio(model, theta0, side, sig_ratio, base, steps=LIMIT_STEPS):
    lo, hi = model.theta_domain
    directions = {"two-sided": (1, -1), "right": (1,), "left": (-1,)}[side]
    per_side = {}
    for direction in directions:
        usable = [h for h in steps if lo < theta0 + direction * h < hi]
        if len(usable) < 4:
            raise DomainError(f"theta0={theta0} is too close to the edge of the domain for a secant limit")
        seq = _secant_ratios(model, theta0, base, usable, direction)
        name = "right" if direction > 0 else "left"
        if _diverges(seq):
            per_side[name] = (math.inf, seq)
            continue
        finite = [x for x in seq if math.isfinite(x)]
        if len(finite) < 3:
            raise InconclusiveError("secant ratios are not finite", {"secant_" + name: seq})
        per_side[name] = (sig_ratio * _aitken(finite), seq)
    values = [v for v, _ in per_side.values()]
    diagnostics = {"secant_steps": list(steps)}
    for name, (v, seq) in per_side.items():
        diagnostics[f"secant_{name}"] = [sig_ratio * r for r in seq]
        diagnostics[f"limit_{name}"] = v
    diagnostics["lower"] = min(values)
    diagnostics["upper"] = max(values)
    if all(math.isinf(v) for v in values):
        return math.inf, diagnostics
    if any(math.isinf(v) for v in values):
        raise InconclusiveError("one-sided secant limits disagree (one diverges)", diagnostics)
    value = float(np.mean(values))
    spread = max(values) - min(values)
    diagnostics["side_spread"] = spread
    if spread > 1e-3 * max(1.0, abs(value)):
        raise InconclusiveError("left and right secant limits differ; use --side", diagnostics)
    return value, diagnostics


def are_numeric(model: DependenceModel, theta0, side="two-sided", method="auto"):
    """ARE of T relative to S at ``theta0`` from the model's moment functionals.

    ``method="auto"`` uses derivative ratios and switches to the secant
    limit when the derivatives degenerate. ``"limit-ratio"`` forces the
    secant limit.
    """
    if side not in SIDES:
        raise ConfigError(f"side must be one of {SIDES}, got {side!r}")
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {method!r}")
    theta0 = model.check_theta(theta0)
    s2t = asymptotics.sigma2_t(model, theta0)
    s2s = asymptotics.sigma2_s(model, theta0)
    sig_ratio = s2s / s2t
    diagnostics = {"sigma2_t": s2t, "sigma2_s": s2s}

    if method != "limit-ratio":
        h = _step(theta0)
        dt, res_t = _derivative(lambda th: asymptotics.mu_t(model, th), theta0, h, side)
        ds, res_s = _derivative(lambda th: asymptotics.mu_s(model, th), theta0, h, side)
        diagnostics.update(
            mu_t_prime=dt, mu_s_prime=ds, step=h, richardson_residual=max(res_t, res_s)
        )
        small_t = abs(dt) < DEGENERACY_THRESHOLD
        small_s = abs(ds) < DEGENERACY_THRESHOLD
        if not small_s:
            value = sig_ratio * (dt / ds) ** 2
            return AreResult(model.name, theta0, side, value, "derivative-ratio", diagnostics)
        if method == "derivative-ratio":
            raise InconclusiveError(f"mu_S'({theta0}) = {ds:.3e} is below the degeneracy threshold", diagnostics)
        base = (asymptotics.mu_t(model, theta0), asymptotics.mu_s(model, theta0))
        if not small_t:
            # confirm that the secant ratio blows up as the step shrinks
            seq = _secant_ratios(model, theta0, base, (h, h / 2.0, h / 4.0), 1 if side != "left" else -1)
            diagnostics["secant_confirmation"] = [sig_ratio * r for r in seq]
            if all(seq[i + 1] > seq[i] for i in range(2)) or any(math.isinf(r) for r in seq):
                return AreResult(model.name, theta0, side, math.inf, "limit-ratio", diagnostics)
            raise InconclusiveError("mu_S' vanishes but the secant ratio does not grow", diagnostics)
    else:
        base = (asymptotics.mu_t(model, theta0), asymptotics.mu_s(model, theta0))

    value, extra = _limit_ratio(model, theta0, side, sig_ratio, base)
    diagnostics.update(extra)
    return AreResult(model.name, theta0, side, value, "limit-ratio", diagnostics)


# ---------------------------------------------------------------------------
# conditions for ARE = 1 at theta = 0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremCheck:
    model: str
    theta_grid: tuple
    e_theta_a: tuple
    e_zero_a: tuple
    ratio_ii: tuple
    ratio_iii: tuple
    extrapolated: float
    verdict: str
    tolerance: float
    notes: str = ""


def _a_integrand(model, theta):
    return lambda x, y: association(model, theta, x, y)


def expected_association(model, theta, under=None, order=None):
    """``E a_theta(X, Y)`` with ``(X, Y)`` drawn from ``F_under`` (default ``F_theta``)."""
    theta = model.check_theta(theta)
    under = theta if under is None else model.check_theta(under)
    points, sign = model.kinks(theta)
    return model.expectation(under, _a_integrand(model, theta), points, points, sign, order)


def _neville_at_zero(xs, ys):
    """Value at 0 of the interpolating polynomial through ``(xs, ys)``."""
    p = list(ys)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            p[i] = (x0 * p[i + 1] - x1 * p[i]) / (x0 - x1)
    return p[0]


def theorem_check(model, theta_grid, tolerance=TREND_TOLERANCE):
    """Ratios ``E_th a_th / E_0 a_th`` and ``int a_th d a_th / E_0 a_th`` on a grid.

    The verdict extrapolates ``ratio_II`` to ``theta = 0`` through the three
    smallest grid points. The equivalence it relies on presumes that
    ``mu_T`` and ``mu_S`` have the sign of ``theta`` near 0.
    """
    grid = [float(t) for t in theta_grid]
    if not grid or any(t == 0.0 for t in grid):
        raise ConfigError("theta grid must be nonempty and exclude 0")
    e_t, e_0, r2, r3 = [], [], [], []
    for th in grid:
        a = expected_association(model, th)
        b = expected_association(model, th, under=0.0)
        e_t.append(a)
        e_0.append(b)
        if abs(b) < E0_THRESHOLD:
            r2.append(math.nan)
            r3.append(math.nan)
        else:
            r2.append(a / b)
            r3.append((a - b) / b)
    notes = "assumes mu_T and mu_S share the sign of theta near 0"
    usable = [(abs(t), r) for t, r in zip(grid, r2) if math.isfinite(r)]
    if not usable:
        verdict, extra = "inconclusive", math.nan
        notes += "; E_0 a_theta vanishes on the whole grid (nondegeneracy fails)"
    else:
        usable.sort()
        pts = usable[:3]
        extra = _neville_at_zero([p[0] for p in pts], [p[1] for p in pts])
        if not math.isfinite(extra):
            verdict = "inconclusive"
        else:
            verdict = "ARE-is-1" if abs(extra - 1.0) <= tolerance else "ARE-not-1"
    return TheoremCheck(
        model.name, tuple(grid), tuple(e_t), tuple(e_0), tuple(r2), tuple(r3),
        float(extra), verdict, tolerance, notes,
    )


# ---------------------------------------------------------------------------
# smoothness / nondegeneracy diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SndDiagnostics:
    theta: float
    slope: float
    deriv_integral: float
    d: float
    rho: float
    product_over_theta: float


def snd_diagnostics(model, theta, step=1e-3, resolution=256):
    """Numbers behind the sufficient conditions for nondegeneracy at ``theta``.

    ``slope`` is ``E_0 a_theta / theta``; ``deriv_integral`` is the central
    difference of ``E_0 a`` at 0 with the given step; ``d`` and ``rho`` are
    the variation and Kolmogorov distances.
    """
    theta = model.check_theta(theta)
    if theta == 0.0:
        raise ConfigError("snd_diagnostics needs theta != 0")
    slope = expected_association(model, theta, under=0.0) / theta
    hi = expected_association(model, step, under=0.0)
    lo = expected_association(model, -step, under=0.0)
    deriv = (hi - lo) / (2.0 * step)
    d = variation_distance(model, theta, resolution)
    rho = kolmogorov_distance(model, theta, resolution)
    return SndDiagnostics(theta, slope, deriv, d, rho, d * rho / abs(theta))
