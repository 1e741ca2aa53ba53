"""Monte Carlo efficiency ratio n_S/n_T for the bivariate normal model."""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from are_lab.cli import dumps
from are_lab.power_sim import PowerExperiment, run_experiment


@dataclass(frozen=True)
class BvnPowerConfig:
    theta_alt: float = 0.15
    alpha: float = 0.05
    beta: float = 0.1
    replications: int = 10_000
    seed: int = 42


def run(cfg: BvnPowerConfig):
    exp = PowerExperiment("bvn", 0.0, cfg.theta_alt, cfg.alpha, cfg.beta, cfg.replications, cfg.seed)
    res = run_experiment(exp)
    summary = {"config": asdict(cfg)}
    for label, eff in (("primary", res.primary), ("secondary", res.secondary)):
        summary[label] = {
            "alpha": eff.alpha,
            "beta": eff.beta,
            "n_T": eff.t.n_required,
            "n_S": eff.s.n_required,
            "n_T_plug_in": eff.t.n_analytic,
            "n_S_plug_in": eff.s.n_analytic,
            "size_T": eff.t.size,
            "size_S": eff.s.size,
            "ratio": eff.ratio,
            "ratio_se": eff.ratio_se,
        }
    summary["invariant"] = res.invariant
    return summary


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--theta", type=float, default=BvnPowerConfig.theta_alt)
    p.add_argument("--reps", type=int, default=BvnPowerConfig.replications)
    p.add_argument("--seed", type=int, default=BvnPowerConfig.seed)
    a = p.parse_args()
    print(dumps(run(BvnPowerConfig(theta_alt=a.theta, replications=a.reps, seed=a.seed))), end="")


if __name__ == "__main__":
    main()
