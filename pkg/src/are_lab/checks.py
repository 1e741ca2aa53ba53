"""Verification suites run by ``are-lab check``.

Each suite returns a list of :class:`Check` records carrying the measured
value, the expected value and the tolerance. The brute-force statistic
oracles live here too so that the suites and the test-suite share them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import chain, combinations, permutations

import numpy as np

from . import asymptotics
from .errors import ConfigError
from .are_engine import are_closed_micd, are_numeric, expected_association, theorem_check
from .models import MICD_VARIANTS, MODELS, get_model
from .rank_stats import kendall_t, ranks, spearman_s, spearman_u_tilde

SUITES = ("constants", "micd", "theorem", "oracle")


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: measured={self.measured!r} expected={self.expected!r} tol={self.tolerance!r}"


def _close(name, measured, expected, tol, relative=False):
    if math.isinf(expected):
        ok = math.isinf(measured) and (measured > 0) == (expected > 0)
    else:
        scale = abs(expected) if relative else 1.0
        ok = abs(measured - expected) <= tol * scale
    return Check(name, float(measured), float(expected), tol, bool(ok))


def _at_least(name, measured, bound):
    return Check(name, float(measured), float(bound), 0.0, bool(measured >= bound))


# brute-force oracles ---------------------------------------------------------

def brute_kendall(x, y):
    """Kendall's T from the full matrix of pairwise difference signs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    signs = np.sign(np.subtract.outer(x, x) * np.subtract.outer(y, y)).astype(np.int64)
    return int(np.triu(signs, 1).sum()) / math.comb(n, 2)


def pearson_of_ranks(x, y):
    return float(np.corrcoef(ranks(x), ranks(y))[0, 1])


def h3_kernel(p, q, r):
    """Sum over the six orderings ``(i; j, k)`` of ``1{X_i > X_j} 1{Y_i > Y_k}``."""
    pts = (p, q, r)
    total = 0
    for i, j, k in permutations(range(3)):
        total += int(pts[i][0] > pts[j][0]) * int(pts[i][1] > pts[k][1])
    return total


def brute_u_tilde(x, y):
    """S-tilde by evaluating the kernel on every triple (vectorised over triples)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    tri = np.fromiter(chain.from_iterable(combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    total = 0
    for i, j, k in permutations(range(3)):
        a, b, c = tri[:, i], tri[:, j], tri[:, k]
        total += int(np.sum((x[a] > x[b]) & (y[a] > y[c])))
    return total / math.comb(n, 3)


# suites --------------------------------------------------------------------

def suite_constants():
    out = []
    for name, model in MODELS.items():
        out.append(_close(f"sigma2_t({name}, 0) = 4/9", asymptotics.sigma2_t(model, 0.0), 4.0 / 9.0, 1e-9))
        out.append(_close(f"sigma2_s({name}, 0) = 1", asymptotics.sigma2_s(model, 0.0), 1.0, 1e-9))
    for variant, expected in (("AS", 1.0), ("OS", 1.0), ("OL", 2.25), ("AL", math.inf)):
        out.append(_close(f"closed ARE {variant}(0)", are_closed_micd(variant, 0.0), expected, 0.0))
    for name in ("fgm", "plackett", "frank", "bvn"):
        out.append(_close(f"numeric ARE {name}(0) = 1", are_numeric(get_model(name), 0.0).value, 1.0, 1e-3))
    out.append(_close("numeric ARE micd-ol(0) = 9/4", are_numeric(get_model("micd-ol"), 0.0).value, 2.25, 1e-2, True))
    out.append(_close("numeric ARE micd-al(0) = inf", are_numeric(get_model("micd-al"), 0.0).value, math.inf, 0.0))
    return out


def suite_micd(thetas=tuple(k / 10 for k in range(1, 10)), scan_step=1e-3):
    out = []
    for variant in MICD_VARIANTS:
        model = get_model(f"micd-{variant.lower()}")
        for th in thetas:
            closed = are_closed_micd(variant, th)
            numeric = are_numeric(model, th).value
            out.append(_close(f"{variant} numeric vs closed at {th:g}", numeric, closed, 5e-3, True))
        grid = np.arange(-1.0 + scan_step, 1.0 - scan_step / 2, scan_step)
        low = min(are_closed_micd(variant, t) for t in grid)
        out.append(_at_least(f"{variant} closed ARE >= 1 on a {scan_step:g} grid", low, 1.0 - 1e-12))
    return out


def suite_theorem(thetas=tuple(k / 20 for k in range(1, 11))):
    out = []
    ol = theorem_check(get_model("micd-ol"), sorted(thetas, reverse=True))
    worst = max(abs(r - 2.0) for r in ol.ratio_ii)
    out.append(_close("OL ratio_II = 2 (max deviation)", 2.0 + worst, 2.0, 1e-6))
    al = get_model("micd-al")
    for th in thetas:
        out.append(_close(f"AL E_0 a at {th:g} = th^3/12", expected_association(al, th, under=0.0), th ** 3 / 12, 1e-9))
        out.append(_close(f"AL E_th a at {th:g} = (3-th)th^2/12", expected_association(al, th), (3 - th) * th ** 2 / 12, 1e-9))
    chk = theorem_check(al, sorted(thetas, reverse=True))
    for th, r in zip(chk.theta_grid, chk.ratio_ii):
        out.append(_close(f"AL ratio_II at {th:g} = (3-th)/th", r, (3 - th) / th, 1e-6, True))
    return out


def suite_oracle(samples=200, max_n=200, tilde_samples=20, tilde_max_n=60, seed=20240101):
    rng = np.random.default_rng(seed)
    out = []
    bad_t = bad_s = 0
    worst_s = 0.0
    for _ in range(samples):
        n = int(rng.integers(3, max_n + 1))
        x = rng.permutation(n).astype(float) + rng.random()
        y = rng.permutation(n).astype(float)
        t_fast = kendall_t((x, y))
        if t_fast != brute_kendall(x, y):
            bad_t += 1
        dev = abs(spearman_s((x, y)) - pearson_of_ranks(x, y))
        worst_s = max(worst_s, dev)
        bad_s += dev > 1e-12
    out.append(_close(f"fast Kendall == brute force ({samples} samples, mismatches)", bad_t, 0, 0))
    out.append(_close("simplified Spearman vs Pearson of ranks (max deviation)", worst_s, 0.0, 1e-12))
    bad_u = 0
    for _ in range(tilde_samples):
        n = int(rng.integers(3, tilde_max_n + 1))
        x = rng.permutation(n).astype(float)
        y = rng.permutation(n).astype(float)
        if spearman_u_tilde((x, y)) != brute_u_tilde(x, y):
            bad_u += 1
    out.append(_close(f"S-tilde identity == triple enumeration ({tilde_samples} samples, mismatches)", bad_u, 0, 0))
    return out


def run_suite(name):
    fns = {
        "constants": suite_constants,
        "micd": suite_micd,
        "theorem": suite_theorem,
        "oracle": suite_oracle,
    }
    if name not in fns:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return fns[name]()
