"""Tabulate E_theta a_theta, E_0 a_theta and their ratio for every model."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from are_lab.are_engine import theorem_check
from are_lab.models import MODELS


@dataclass(frozen=True)
class TableConfig:
    grid: tuple = (0.4, 0.2, 0.1, 0.05, 0.025)


def table(cfg: TableConfig):
    print(f"{'model':10} {'theta':>7} {'E_th a':>13} {'E_0 a':>13} {'ratio_II':>10}")
    for name, model in MODELS.items():
        chk = theorem_check(model, cfg.grid)
        for t, et, e0, r in zip(chk.theta_grid, chk.e_theta_a, chk.e_zero_a, chk.ratio_ii):
            print(f"{name:10} {t:7.3f} {et:13.6e} {e0:13.6e} {r:10.5f}")
        print(f"{name:10} extrapolated ratio_II at 0 = {chk.extrapolated:.6f} -> {chk.verdict}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=float, nargs="+", default=list(TableConfig.grid))
    table(TableConfig(grid=tuple(p.parse_args().grid)))


if __name__ == "__main__":
    main()
