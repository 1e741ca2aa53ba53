"""Monte Carlo size, power and sample-size search for the right-sided z-tests.

Each test rejects when ``Z = (stat - mu(theta0)) / (sigma(theta0) / sqrt(n))``
exceeds the upper ``alpha`` quantile of the standard normal. Power is
estimated by simulation at ``theta_alt``.

Replicate ``r`` of a stream draws from its own generator seeded with
``seed XOR splitmix64(r + stream offset)``, so results do not depend on the
order in which replicates are produced. Samples for different ``n`` are
prefixes of one pool of size ``n_cap`` per replicate (common random
numbers), which keeps the estimated power curve nearly monotone in ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import asymptotics
from .errors import ConfigError, DegeneracyError, SearchCapError
from .models import get_model
from .rank_stats import kendall_t_batch, spearman_s_batch

STATISTICS = ("T", "S")
N_MIN = 3
N_CAP = 10_000_000
POOL_BUDGET = 12_000_000  # floats per coordinate kept in memory
_MASK64 = (1 << 64) - 1
_STREAM_ALT = 0
_STREAM_NULL = 1


def splitmix64(x):
    """One output of the SplitMix64 generator seeded with ``x``."""
    z = (int(x) + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replicate_seed(seed, r, stream=_STREAM_ALT):
    return (int(seed) ^ splitmix64(int(r) + (int(stream) << 40))) & _MASK64


@dataclass(frozen=True)
class PowerExperiment:
    model: str
    theta0: float
    theta_alt: float
    alpha: float = 0.05
    beta: float = 0.1
    replications: int = 10_000
    seed: int = 0
    tolerance: float = 0.0
    second_pair: tuple = (0.01, 0.2)

    def __post_init__(self):
        _check_levels(self.alpha, self.beta)
        _check_levels(*self.second_pair)
        if int(self.replications) < 1:
            raise ConfigError("replications must be positive")
        if int(self.seed) < 0:
            raise ConfigError("seed must be unsigned")
        if not 0.0 <= self.tolerance < 1.0:
            raise ConfigError("tolerance must lie in [0, 1)")
        model = get_model(self.model)
        model.check_theta(self.theta0)
        model.check_theta(self.theta_alt)

    @property
    def model_obj(self):
        return get_model(self.model)

    def with_levels(self, alpha, beta):
        return PowerExperiment(
            self.model, self.theta0, self.theta_alt, alpha, beta,
            self.replications, self.seed, self.tolerance, self.second_pair,
        )


def _check_levels(alpha, beta):
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    if not alpha + beta < 1.0:
        raise ConfigError(f"need alpha + beta < 1, got {alpha} + {beta}")


@dataclass(frozen=True)
class PowerEstimate:
    which: str
    n: int
    theta: float
    rate: float
    se: float


@dataclass(frozen=True)
class SampleSizeResult:
    which: str
    n_required: int
    n_analytic: float
    power: float
    power_se: float
    n_se: float
    size: float
    size_se: float
    evaluations: int


@dataclass(frozen=True)
class EfficiencyResult:
    alpha: float
    beta: float
    ratio: float
    ratio_se: float
    t: SampleSizeResult
    s: SampleSizeResult


@dataclass(frozen=True)
class ExperimentResult:
    experiment: PowerExperiment
    primary: EfficiencyResult
    secondary: EfficiencyResult
    invariant: bool
    notes: dict = field(default_factory=dict)

    @property
    def ratio(self):
        return self.primary.ratio


def z_statistic(value, moments, n, which="T"):
    """Standardise a statistic with its null moments.

    ``moments`` is an :class:`AsymptoticMoments` (``which`` picks T or S)
    or a ``(mu, sigma2)`` pair. Works elementwise on arrays.
    """
    if isinstance(moments, asymptotics.AsymptoticMoments):
        mu, s2 = moments.mu(which), moments.sigma2(which)
    else:
        mu, s2 = moments
    if not s2 > 0.0:
        raise DegeneracyError(f"asymptotic variance {s2!r} is not positive")
    n = int(n)
    if n < 1:
        raise ConfigError("n must be positive")
    return (np.asarray(value, dtype=float) - mu) / math.sqrt(s2 / n)


def _critical(alpha):
    return float(norm.isf(alpha))


class _Pool:
    """Per-replicate samples of size ``n_cap`` at one ``theta``."""

    def __init__(self, model, theta, reps, n_cap, seed, stream):
        self.model = model
        self.theta = theta
        self.reps = reps
        self.n_cap = n_cap
        self.seed = seed
        self.stream = stream
        self._cache = {}
        self._xy = None
        if reps * n_cap <= POOL_BUDGET:
            self._xy = self._generate(0, reps)

    def _generate(self, start, stop):
        x = np.empty((stop - start, self.n_cap))
        y = np.empty_like(x)
        for i, r in enumerate(range(start, stop)):
            s = self.model.sample(self.theta, self.n_cap, replicate_seed(self.seed, r, self.stream))
            x[i] = s.x
            y[i] = s.y
        return x, y

    def _chunks(self):
        if self._xy is not None:
            yield self._xy
            return
        size = max(1, POOL_BUDGET // self.n_cap)
        for start in range(0, self.reps, size):
            yield self._generate(start, min(self.reps, start + size))

    def statistics(self, which, n):
        key = (which, n)
        if key not in self._cache:
            fn = kendall_t_batch if which == "T" else spearman_s_batch
            self._cache[key] = np.concatenate([fn(x, y, n) for x, y in self._chunks()])
        return self._cache[key]


class PowerSimulator:
    """Holds null moments and sample pools for one experiment."""

    def __init__(self, experiment: PowerExperiment):
        self.experiment = experiment
        self.model = experiment.model_obj
        self.null = asymptotics.null_moments(self.model, experiment.theta0)
        self.alt_mu = {
            "T": asymptotics.mu_t(self.model, experiment.theta_alt),
            "S": asymptotics.mu_s(self.model, experiment.theta_alt),
        }
        self._pools = {}
        self.evaluations = 0

    def _pool(self, theta, n, stream):
        pool = self._pools.get(stream)
        if pool is None or pool.n_cap < n or pool.theta != theta:
            cap = max(n, self._default_cap())
            if pool is not None and pool.n_cap < n:
                cap = max(cap, 2 * n)
            pool = _Pool(self.model, theta, int(self.experiment.replications), cap, self.experiment.seed, stream)
            self._pools[stream] = pool
        return pool

    def _default_cap(self):
        e = self.experiment
        ns = []
        for which in STATISTICS:
            try:
                ns.append(analytic_n(self, which, e.alpha, e.beta))
            except ConfigError:
                pass
        base = max(ns) if ns else 100.0
        return int(min(N_CAP, math.ceil(1.5 * base) + 10))

    def power(self, which, n, alpha=None, theta=None):
        e = self.experiment
        alpha = e.alpha if alpha is None else alpha
        theta = e.theta_alt if theta is None else float(theta)
        n = int(n)
        if n < N_MIN:
            raise ConfigError(f"n must be at least {N_MIN}")
        if theta == e.theta_alt:
            pool = self._pool(theta, n, _STREAM_ALT)
        elif theta == e.theta0:
            pool = self._pool(theta, n, _STREAM_NULL)
        else:
            pool = _Pool(self.model, theta, int(e.replications), n, e.seed, _STREAM_ALT)
        self.evaluations += 1
        z = z_statistic(pool.statistics(which, n), self.null, n, which)
        rate = float(np.mean(z > _critical(alpha)))
        reps = int(e.replications)
        return PowerEstimate(which, n, theta, rate, math.sqrt(rate * (1.0 - rate) / reps))


def analytic_n(sim, which, alpha, beta):
    """Plug-in sample size ``((z_alpha + z_beta) sigma(theta0) / (mu(theta) - mu(theta0)))**2``."""
    diff = sim.alt_mu[which] - sim.null.mu(which)
    if not diff > 0.0:
        raise ConfigError(
            f"right-sided test needs mu_{which}(theta_alt) > mu_{which}(theta0); difference is {diff:.3e}"
        )
    z = _critical(alpha) + _critical(beta)
    return (z * math.sqrt(sim.null.sigma2(which)) / diff) ** 2


def estimate_power(experiment, which, n, theta=None, simulator=None):
    """Rejection rate of the ``which`` z-test at sample size ``n`` (default at ``theta_alt``)."""
    if which not in STATISTICS:
        raise ConfigError(f"statistic must be T or S, got {which!r}")
    sim = simulator or PowerSimulator(experiment)
    return sim.power(which, n, theta=theta)


def _n_standard_error(sim, which, n, alpha, power_se):
    """Delta method: power SE divided by the slope of the asymptotic power curve."""
    e = sim.experiment
    diff = sim.alt_mu[which] - sim.null.mu(which)
    sigma = math.sqrt(sim.null.sigma2(which))
    arg = math.sqrt(n) * diff / sigma - _critical(alpha)
    slope = norm.pdf(arg) * diff / (2.0 * sigma * math.sqrt(n))
    se = max(power_se, 0.5 / int(e.replications))
    return float(se / slope) if slope > 0 else math.inf


def required_n(experiment, which, simulator=None, alpha=None, beta=None):
    """Smallest ``n`` whose simulated power reaches ``1 - beta - tolerance``.

    The search starts from the plug-in size, brackets geometrically and
    then bisects over integers.
    """
    if which not in STATISTICS:
        raise ConfigError(f"statistic must be T or S, got {which!r}")
    sim = simulator or PowerSimulator(experiment)
    alpha = experiment.alpha if alpha is None else alpha
    beta = experiment.beta if beta is None else beta
    _check_levels(alpha, beta)
    target = 1.0 - beta - experiment.tolerance
    n_a = analytic_n(sim, which, alpha, beta)
    start_evals = sim.evaluations

    def ok(n):
        return sim.power(which, n, alpha).rate >= target

    if n_a > N_CAP:
        raise SearchCapError(f"plug-in n for {which} is {n_a:.3g}, above the cap {N_CAP}", {"n_analytic": n_a})
    n = max(N_MIN, math.ceil(n_a))
    if ok(n):
        hi = n
        lo = None
        while hi > N_MIN:
            cand = max(N_MIN, int(hi / 1.25))
            if ok(cand):
                hi = cand
            else:
                lo = cand
                break
        if lo is None:
            hi = N_MIN
    else:
        lo = n
        hi = None
        while hi is None:
            cand = int(math.ceil(lo * 1.5))
            if cand > N_CAP:
                raise SearchCapError(
                    f"required n for {which} exceeds {N_CAP}",
                    {"last_n": lo, "power": sim.power(which, lo, alpha).rate},
                )
            if ok(cand):
                hi = cand
            else:
                lo = cand
    if lo is not None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
    est = sim.power(which, hi, alpha)
    size = sim.power(which, hi, alpha, theta=experiment.theta0)
    return SampleSizeResult(
        which=which,
        n_required=hi,
        n_analytic=n_a,
        power=est.rate,
        power_se=est.se,
        n_se=_n_standard_error(sim, which, hi, alpha, est.se),
        size=size.rate,
        size_se=size.se,
        evaluations=sim.evaluations - start_evals,
    )


def efficiency_at(sim, alpha, beta):
    """Efficiency ratio at an arbitrary ``(alpha, beta)`` reusing the simulator's pools."""
    t = required_n(sim.experiment, "T", sim, alpha, beta)
    s = required_n(sim.experiment, "S", sim, alpha, beta)
    ratio = s.n_required / t.n_required
    rel = math.hypot(s.n_se / s.n_required, t.n_se / t.n_required)
    return EfficiencyResult(alpha, beta, ratio, ratio * rel, t, s)


def efficiency_ratio(experiment, simulator=None):
    """``n_S / n_T`` at the experiment's ``(alpha, beta)``."""
    sim = simulator or PowerSimulator(experiment)
    return efficiency_at(sim, experiment.alpha, experiment.beta)


def run_experiment(experiment):
    """Efficiency ratio at both ``(alpha, beta)`` pairs, plus the invariance check.

    The two ratios count as consistent when they differ by at most twice
    the standard error of their difference.
    """
    sim = PowerSimulator(experiment)
    first = efficiency_at(sim, experiment.alpha, experiment.beta)
    second = efficiency_at(sim, *experiment.second_pair)
    gap = abs(first.ratio - second.ratio)
    band = 2.0 * math.hypot(first.ratio_se, second.ratio_se)
    return ExperimentResult(experiment, first, second, gap <= band, {"ratio_gap": gap, "band": band})
