import math

import numpy as np
import pytest

from are_lab import asymptotics
from are_lab.errors import ConfigError, DegeneracyError, SearchCapError
from are_lab.models import get_model
from are_lab.power_sim import (
    PowerExperiment,
    PowerSimulator,
    analytic_n,
    efficiency_ratio,
    estimate_power,
    replicate_seed,
    required_n,
    run_experiment,
    splitmix64,
    z_statistic,
)


# z statistic -------------------------------------------------------------------

def test_z_statistic_examples():
    m = asymptotics.null_moments(get_model("fgm"))
    assert z_statistic(0.1, m, 400, "T") == pytest.approx(3.0, abs=1e-9)
    assert z_statistic(m.mu_s, m, 50, "S") == pytest.approx(0.0, abs=1e-9)
    assert z_statistic(0.1, (0.0, 4 / 9), 800) == pytest.approx(3.0 * math.sqrt(2), rel=1e-12)
    values = z_statistic(np.array([0.0, 0.1]), (0.0, 1.0), 100)
    assert values.tolist() == [0.0, 1.0]


def test_z_statistic_errors():
    with pytest.raises(DegeneracyError):
        z_statistic(0.1, (0.0, 0.0), 10)
    with pytest.raises(ConfigError):
        z_statistic(0.1, (0.0, 1.0), 0)


# seeds ---------------------------------------------------------------------------

def test_splitmix64_reference_value():
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_replicate_seeds_are_distinct_per_stream():
    seeds = {replicate_seed(42, r, s) for r in range(1000) for s in (0, 1)}
    assert len(seeds) == 2000
    assert all(0 <= s < 2**64 for s in seeds)


# configuration ---------------------------------------------------------------------

@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0.0},
        {"alpha": 1.0},
        {"beta": 0.0},
        {"alpha": 0.6, "beta": 0.5},
        {"replications": 0},
        {"seed": -1},
        {"tolerance": 1.5},
        {"second_pair": (0.5, 0.6)},
        {"theta_alt": 2.0},
    ],
)
def test_experiment_validation(kwargs):
    base = dict(model="bvn", theta0=0.0, theta_alt=0.15)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        PowerExperiment(**base)


def test_unknown_model_and_statistic():
    with pytest.raises(ConfigError):
        PowerExperiment("nope", 0.0, 0.1)
    e = PowerExperiment("bvn", 0.0, 0.2, replications=10)
    with pytest.raises(ConfigError):
        estimate_power(e, "U", 50)
    with pytest.raises(ConfigError):
        required_n(e, "U")
    with pytest.raises(ConfigError):
        estimate_power(e, "T", 2)


def test_wrong_direction_is_a_config_error():
    e = PowerExperiment("bvn", 0.0, -0.2, replications=10)
    with pytest.raises(ConfigError):
        required_n(e, "T")


# size and power ----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["bvn", "plackett", "micd-os"])
@pytest.mark.parametrize("which", ["T", "S"])
def test_size_under_null(name, which):
    reps = 2000
    e = PowerExperiment(name, 0.0, 0.0, alpha=0.05, replications=reps, seed=9)
    est = estimate_power(e, which, 500)
    assert abs(est.rate - 0.05) <= 3 * math.sqrt(0.05 * 0.95 / reps)


def test_power_tends_to_one_at_strong_dependence():
    e = PowerExperiment("bvn", 0.0, 0.95, replications=300, seed=1)
    assert estimate_power(e, "T", 60).rate == 1.0
    assert estimate_power(e, "S", 60).rate == 1.0


def test_bvn_power_at_plug_in_n():
    e = PowerExperiment("bvn", 0.0, 0.15, alpha=0.05, beta=0.1, replications=3000, seed=3)
    sim = PowerSimulator(e)
    n = math.ceil(analytic_n(sim, "T", 0.05, 0.1))
    est = sim.power("T", n)
    assert est.rate == pytest.approx(0.9, abs=0.03)


def test_power_is_monotone_in_n_with_common_random_numbers():
    e = PowerExperiment("bvn", 0.0, 0.15, replications=1500, seed=4)
    sim = PowerSimulator(e)
    for which in ("T", "S"):
        rates = [sim.power(which, n).rate for n in range(100, 701, 50)]
        assert all(b >= a for a, b in zip(rates, rates[1:]))


def test_estimates_are_reproducible():
    e = PowerExperiment("frank", 0.0, 2.0, replications=400, seed=123)
    assert estimate_power(e, "S", 40) == estimate_power(e, "S", 40)


# sample size search -----------------------------------------------------------------

def test_required_n_against_plug_in():
    e = PowerExperiment("bvn", 0.0, 0.15, replications=2000, seed=5)
    sim = PowerSimulator(e)
    res = required_n(e, "T", sim)
    assert res.n_required == pytest.approx(res.n_analytic, rel=0.15)
    assert sim.power("T", res.n_required).rate >= 0.9
    assert sim.power("T", res.n_required - 1).rate < 0.9
    assert 0.0 <= res.size <= 1.0 and res.n_se > 0


def test_required_n_decreases_with_beta():
    e = PowerExperiment("bvn", 0.0, 0.2, replications=1000, seed=6)
    sim = PowerSimulator(e)
    sizes = [required_n(e, "S", sim, beta=b).n_required for b in (0.05, 0.1, 0.2, 0.4)]
    assert sizes == sorted(sizes, reverse=True)


def test_search_cap():
    e = PowerExperiment("plackett", 0.0, 1e-4, replications=10)
    with pytest.raises(SearchCapError) as exc:
        required_n(e, "T")
    assert exc.value.diagnostics["n_analytic"] > 1e7


@pytest.mark.parametrize("theta", [0.2, 0.25])
def test_micd_as_ratio_is_near_one(theta):
    e = PowerExperiment("micd-as", 0.0, theta, replications=3000, seed=7)
    res = efficiency_ratio(e)
    assert 0.85 <= res.ratio <= 1.15


@pytest.mark.slow
def test_micd_ol_ratio_exceeds_one():
    # power 1/2 keeps n small enough for the sample pool to stay in memory
    e = PowerExperiment("micd-ol", 0.0, 0.3, alpha=0.05, beta=0.5, replications=150, seed=8)
    res = efficiency_ratio(e)
    assert res.ratio - 2 * res.ratio_se > 1.0


def test_run_experiment_is_reproducible_and_reports_invariance():
    e = PowerExperiment("micd-os", 0.0, 0.5, replications=800, seed=10)
    a = run_experiment(e)
    b = run_experiment(e)
    assert a == b
    assert a.primary.alpha == 0.05 and a.secondary.alpha == 0.01
    gap = abs(a.primary.ratio - a.secondary.ratio)
    assert a.invariant == (gap <= 2 * math.hypot(a.primary.ratio_se, a.secondary.ratio_se))
