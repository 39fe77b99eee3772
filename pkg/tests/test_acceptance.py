"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line. Running this file
directly (``python tests/test_acceptance.py``) prints the same lines
without pytest.
"""

import itertools
import math
import sys

import numpy as np
import pytest

from ehmac import PolicySpec, build_fully_correlated, build_iid_product
from ehmac import gaussmi as gm
from ehmac import regions as rg
from ehmac.arrivals import bernoulli
from ehmac.policies import check_admissibility, exact_output_entropy
from ehmac.throughput import (
    exact_throughput,
    mc_throughput,
    supadditivity_gaps,
    throughput_set_function,
)

TOL = 1e-9


def half_log(x):
    return 0.5 * math.log2(1 + x)


def criterion_1():
    """Fixed-fraction single-user gap, Monte Carlo at n = 1e5."""
    n, paths = 100_000, 20
    worst = math.inf
    failures = []
    for k, (p, cap) in enumerate(itertools.product([0.1, 0.3, 0.5, 0.7, 0.9], [1, 5, 25])):
        model = build_iid_product([bernoulli(p, high=cap)], [cap])
        est = mc_throughput(PolicySpec.fixed_fraction(), model, [0], n, paths, seed=7000 + k)
        delta = max(3 * est.std_error, 0.02)
        bound = half_log(p * cap) - rg.FIXED_FRACTION_GAP - delta
        margin = est.value - bound
        worst = min(worst, margin)
        if margin < 0:
            failures.append((p, cap, est.value, bound))
    return not failures, f"15 configs, min margin {worst:.4f}, failures {failures}"


def criterion_2():
    """K=3 sandwich of the exact n=8 fixed-fraction throughput set function."""
    model = build_iid_product([bernoulli(0.3), bernoulli(0.5), bernoulli(0.7)], [1, 1, 1])
    f = throughput_set_function(PolicySpec.fixed_fraction(), model, 8)
    outer = rg.awgn_outer(model.means).f.values
    lower = np.maximum(outer - rg.FIXED_FRACTION_GAP, 0) - 0.05
    ok_hi = bool(np.all(f.values <= outer + TOL))
    ok_lo = bool(np.all(f.values[1:] >= lower[1:]))
    return ok_hi and ok_lo, (f"max(T-outer)={np.max(f.values - outer):.3g}, "
                             f"min(T-lower)={np.min(f.values[1:] - lower[1:]):.4f}")


def _vertices_ok(f):
    total = f.values[-1]
    for perm in itertools.permutations(range(f.K)):
        v = rg.vertex(f, perm)
        if abs(v.sum() - total) > TOL or np.any(v < -TOL):
            return False
    return True


def criterion_3():
    """Exhaustive submodularity and permutation vertices."""
    rng = np.random.default_rng(2016)
    outer = rg.awgn_outer(rng.uniform(0.1, 10.0, 5)).f
    models = [
        build_iid_product([bernoulli(0.2), bernoulli(0.4), bernoulli(0.6), bernoulli(0.8)], [1] * 4),
        build_iid_product([{0: 0.5, 0.5: 0.5}, {0: 0.3, 1: 0.7}, {0: 0.6, 2: 0.4}, {0.25: 0.5, 1: 0.5}],
                          [1, 1, 2, 1]),
    ]
    tputs = [throughput_set_function(PolicySpec.fixed_fraction(), m, 6) for m in models]
    sub = rg.is_submodular(outer, TOL) and all(rg.is_submodular(t, TOL) for t in tputs)
    vert = _vertices_ok(outer) and all(_vertices_ok(t) for t in tputs)
    return sub and vert, f"submodular={sub}, vertices={vert} (outer K=5, 2 throughput K=4 n=6)"


def criterion_4():
    """Uniform-input MI between the EPI floor and the Gaussian ceiling."""
    rows = []
    ok = True
    for P in (0.25, 1, 4, 16, 64):
        mi = gm.sum_uniform_awgn_mi([P])
        lo, hi = gm.epi_lower_bound(P) - 1e-4, half_log(P) + 1e-4
        gap = half_log(P) - mi
        ok &= lo <= mi <= hi and gap <= gm.EPI_CONSTANT + 1e-4
        rows.append(f"P={P}: mi={mi:.5f} gap={gap:.4f}")
    return ok, "; ".join(rows)


def criterion_5():
    """Relative sum-capacity gap decreasing in K."""
    ks = [2 ** k for k in range(21)]
    a = rg.gap_report(1.77, 1.0, ks)
    b = rg.gap_report(3.85, 1.0, ks)
    dec = all(all(y.relative < x.relative for x, y in zip(r, r[1:])) for r in (a, b))
    r1024 = a[10].relative
    r2_20 = b[20].relative
    ok = dec and r1024 < 0.36 and r2_20 < 0.50
    return ok, f"decreasing={dec}, rel(1.77, 1024)={r1024:.4f}, rel(3.85, 2^20)={r2_20:.4f}"


def criterion_6():
    """Entropy of the spend process: collapse, subadditivity, fair coin."""
    marg = {0: 0.3, 0.5: 0.3, 1: 0.4}
    pols = [PolicySpec.fixed_fraction(), PolicySpec.quantized_fixed_fraction(3), PolicySpec.greedy()]
    corr2, corr1 = build_fully_correlated(marg, 2, 1), build_fully_correlated(marg, 1, 1)
    indep = build_iid_product([marg, {0: 0.5, 1: 0.5}], [1, 1])
    worst_collapse, worst_sub = 0.0, -math.inf
    for pol, n in itertools.product(pols, range(1, 9)):
        worst_collapse = max(worst_collapse, abs(exact_output_entropy(pol, corr2, n)
                                                 - exact_output_entropy(pol, corr1, n)))
        joint = exact_output_entropy(pol, indep, n)
        parts = sum(exact_output_entropy(pol, indep, n, users=[i]) for i in range(2))
        worst_sub = max(worst_sub, joint - parts)
    coin = exact_output_entropy(PolicySpec.greedy(), build_iid_product([bernoulli(0.5)], [1]), 8)
    ok = worst_collapse <= TOL and worst_sub <= TOL and abs(coin - 1.0) <= TOL
    return ok, f"collapse err={worst_collapse:.2g}, max(joint-sum)={worst_sub:.3g}, greedy coin={coin!r}"


def random_table_policy(rng, cap):
    grid = np.concatenate([[0.0], np.sort(rng.uniform(0, cap, int(rng.integers(1, 8))))])
    spends = grid * rng.uniform(0, 1, grid.size)
    return PolicySpec.table(grid, spends)


def criterion_7():
    """Jensen outer bound for 100 random admissible table policies."""
    rng = np.random.default_rng(77)
    worst, violations = -math.inf, 0
    for _ in range(100):
        cap = float(rng.uniform(0.5, 4))
        model = build_iid_product([bernoulli(float(rng.uniform(0.05, 0.95)), high=float(rng.uniform(0.1, cap)))],
                                  [cap])
        pol = random_table_policy(rng, cap)
        assert check_admissibility(pol, model, 10)
        t = exact_throughput(pol, model, [0], 10).value
        excess = t - half_log(model.means[0])
        worst = max(worst, excess)
        violations += excess > TOL
    return violations == 0, f"violations={violations}, max(T - bound)={worst:.4f}"


def criterion_8():
    """Sup-additivity of n T_n at a fixed policy for n + m <= 10."""
    models = [build_iid_product([bernoulli(p, high=h)], [1]) for p, h in [(0.5, 1), (0.2, 1), (0.7, 0.4)]]
    worst, count = math.inf, 0
    for model, pol in itertools.product(models, [PolicySpec.fixed_fraction(), PolicySpec.greedy()]):
        for n in range(1, 10):
            for m in range(1, 11 - n):
                worst = min(worst, float(supadditivity_gaps(pol, model, n, m)[0]))
                count += 1
    return worst >= -TOL, f"{count} (n, m) pairs, min gap={worst:.3g}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def _line(k, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}"


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print("\n" + _line(k, ok, detail))
    return emit


@pytest.mark.parametrize("k", range(1, 9))
def test_criterion(k, report):
    ok, detail = CRITERIA[k - 1]()
    report(k, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        print(_line(k, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
