"""Invariant suite run by ``ehmac verify``.

Each check returns a :class:`CheckResult`; the suite never raises on a
failed property, only on configuration errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gaussmi, regions
from .battery import simulate_trajectory
from .policies import check_admissibility, exact_output_entropy
from .scenario import Scenario
from .throughput import (
    concavity_split_sides,
    supadditivity_gaps,
    throughput_set_function,
)

TOL = 1e-9
MI_TOL = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check(name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash inside a check counts as a failure
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(ok), detail)


def run_suite(sc: Scenario, seed=None, workers: int = 1) -> list[CheckResult]:
    model, pol, n = sc.model, sc.policies, sc.horizon
    seed = sc.seed if seed is None else seed
    out = []
    cache = {}

    def tput():
        if "f" not in cache:
            cache["f"] = throughput_set_function(pol, model, n)
        return cache["f"]

    def pmf():
        s = float(model.pmf.sum())
        return abs(s - 1) <= 1e-12 and bool(np.all(model.pmf > 0)), f"sum={s!r}"

    def trajectory():
        tr = simulate_trajectory(model, pol, max(n, 64), seed)
        caps = model.caps[:, None]
        ok = (np.all(tr.spends >= -TOL) and np.all(tr.spends <= tr.levels + TOL)
              and np.all(tr.levels <= caps + TOL))
        # B_{t+1} = min(B_t - g_t + E_{t+1}, cap)
        nxt = np.minimum(tr.levels[:, :-1] - tr.spends[:, :-1] + tr.arrivals[:, 1:], caps)
        ok = ok and np.allclose(nxt, tr.levels[:, 1:], atol=TOL)
        return ok, f"{tr.n} slots"

    def admissible():
        return check_admissibility(pol, model, n), f"n={n}"

    def structure():
        f = tput()
        return f.is_normalized() and f.is_monotone() and regions.is_submodular(f), "normalized, monotone, submodular"

    def domination():
        f, outer = tput(), regions.awgn_outer(model.means)
        worst = float(np.max(f.values - outer.f.values))
        return worst <= TOL, f"max(T - outer)={worst:.3g}"

    def sandwich():
        f, outer = tput(), regions.awgn_outer(model.means)
        inner = regions.inner_txrx(f)
        ok = regions.region_contains(inner, f) and regions.region_contains(f, outer)
        return ok, f"clamped={inner.clamped}"

    def vertices():
        f = tput()
        s1 = regions.sum_rate(regions.RateRegion(f))
        s2 = regions.sum_rate(regions.awgn_outer(model.means))
        return True, f"sum_rate tput={s1:.6f} outer={s2:.6f}"

    def concavity():
        lhs, rhs = concavity_split_sides(pol, model, range(model.K), n)
        return lhs >= rhs - TOL, f"{lhs:.6f} >= {rhs:.6f}"

    def supadd():
        if n < 2:
            return True, "horizon too short, skipped"
        a = n // 2
        gaps = supadditivity_gaps(pol, model, a, n - a)
        return bool(np.all(gaps >= -TOL)), f"min gap={gaps.min():.3g} at ({a},{n - a})"

    def entropy():
        m = min(n, 6)
        joint = exact_output_entropy(pol, model, m)
        single = sum(exact_output_entropy(pol, model, m, users=[i]) for i in range(model.K))
        return joint <= single + TOL, f"n={m}: {joint:.6f} <= {single:.6f}"

    def mc_vs_exact():
        if seed is None:
            return True, "no seed, skipped"
        f = tput()
        g = throughput_set_function(pol, model, n, "mc", paths=sc.paths, seed=seed, workers=workers)
        se = g.half_widths[-1] / 1.96
        diff = abs(g.values[-1] - f.values[-1])
        return diff <= 3 * se + TOL, f"|mc-exact|={diff:.3g}, 3se={3 * se:.3g}"

    def epi():
        worst = []
        for P in (0.25, 1.0, 4.0, 16.0):
            mi = gaussmi.sum_uniform_awgn_mi([P])
            ok = (gaussmi.epi_lower_bound(P) - MI_TOL <= mi <= gaussmi.gaussian_ceiling(P) + MI_TOL
                  and gaussmi.gaussian_ceiling(P) - mi <= gaussmi.EPI_CONSTANT + MI_TOL)
            worst.append(ok)
        return all(worst), "P in 0.25,1,4,16"

    def gap_sweep():
        reps = regions.gap_report(regions.gap_txrx(), 1.0, [2 ** k for k in range(21)])
        rel = [r.relative for r in reps]
        return all(b < a for a, b in zip(rel, rel[1:])), f"relative at 2^20 = {rel[-1]:.4f}"

    for name, fn in [
        ("arrival_pmf_normalized", pmf),
        ("trajectory_recursion", trajectory),
        ("policies_admissible", admissible),
        ("throughput_polymatroid", structure),
        ("outer_domination", domination),
        ("region_sandwich", sandwich),
        ("vertex_sum_rates", vertices),
        ("concavity_split", concavity),
        ("supadditivity", supadd),
        ("entropy_subadditivity", entropy),
        ("mc_matches_exact", mc_vs_exact),
        ("epi_sandwich", epi),
        ("gap_sweep_decreasing", gap_sweep),
    ]:
        out.append(_check(name, fn))
    return out


def format_table(results) -> str:
    w = max(len(r.name) for r in results)
    lines = [f"{r.name:<{w}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}" for r in results]
    return "\n".join(lines) + "\n"

