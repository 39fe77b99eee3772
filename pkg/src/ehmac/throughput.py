"""n-horizon expected throughput, exactly and by Monte Carlo.

For a subset I of users the n-horizon throughput is

    T_n(g_I) = (1/n) E[ sum_t 1/2 log2(1 + sum_{i in I} g_it) ],

with batteries starting empty. The exact routine enumerates every
arrival sequence, breadth first, merging prefixes that leave all
batteries in the same state; the Monte Carlo routine averages
independently seeded paths.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _enum
from .arrivals import ArrivalModel, child_seeds, sample_path
from .battery import run_policies
from .errors import AdmissibilityError
from .policies import ADMISSIBILITY_TOL, allocate_all, bind_policies
from .regions import SetFunction, mask_of, members

LN2 = math.log(2.0)
Z95 = 1.96
# rows of the expanded layer processed at once
CHUNK_ROWS = 1 << 20
# floats per Monte Carlo block
MC_BLOCK = 1 << 22


@dataclass(frozen=True)
class ThroughputEstimate:
    value: float
    half_width: float
    n: int
    samples: int
    method: str

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("negative half width")
        if self.method == "exact" and self.half_width != 0:
            raise ValueError("exact estimates carry no half width")

    @property
    def std_error(self) -> float:
        return self.half_width / Z95


def _rate(x):
    return 0.5 * np.log1p(x) / LN2


def _weights_for(masks, K):
    W = np.zeros((len(masks), K))
    for r, m in enumerate(masks):
        W[r, members(m, K)] = 1.0
    return W


def slot_means(policies, model: ArrivalModel, n: int, weights, budget=None) -> np.ndarray:
    """Exact E[1/2 log2(1 + w . g_t)] for every slot t and weight row w.

    Returns an (n, R) array. Summing the first n rows and dividing by n
    gives T_n for the corresponding subsets.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    bound = bind_policies(policies, model)
    _enum.check_budget(len(model.pmf), n, budget)
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    E, pe, caps = model.support, model.pmf, model.caps
    M, K = E.shape
    out = np.zeros((n, W.shape[0]))
    r = np.zeros((1, K))
    p = np.ones(1)
    rows = max(1, CHUNK_ROWS // M)
    for t in range(n):
        last = t == n - 1
        nxt_r, nxt_p = [], []
        for s0 in range(0, p.shape[0], rows):
            b = np.minimum(r[s0:s0 + rows, None, :] + E[None, :, :], caps).reshape(-1, K)
            pp = (p[s0:s0 + rows, None] * pe[None, :]).ravel()
            g = allocate_all(bound, b, caps)
            bad = (g > b + ADMISSIBILITY_TOL) | (g < -ADMISSIBILITY_TOL)
            if bad.any():
                j, i = np.argwhere(bad)[0]
                raise AdmissibilityError(int(i), float(g[j, i]), float(b[j, i]), slot=t + 1)
            out[t] += pp @ _rate(g @ W.T)
            if not last:
                nxt_r.append(np.maximum(b - g, 0.0))
                nxt_p.append(pp)
        if not last:
            p, (r,) = _enum.merge_states(np.concatenate(nxt_p), np.concatenate(nxt_r))
    return out


def exact_throughput(policies, model: ArrivalModel, subset, n: int, budget=None) -> ThroughputEstimate:
    """T_n(g_I) by exhaustive enumeration of arrival sequences."""
    mask = mask_of(subset)
    if mask == 0:
        return ThroughputEstimate(0.0, 0.0, n, 1, "exact")
    per_slot = slot_means(policies, model, n, _weights_for([mask], model.K), budget)
    return ThroughputEstimate(float(per_slot[:, 0].sum() / n), 0.0, n, 1, "exact")


def _mc_block(bound, model, n, W, seeds):
    arrivals = np.stack([sample_path(model, n, s) for s in seeds])
    _, spends = run_policies(bound, model.caps, arrivals)
    # (P, K, n) x (R, K) -> (P, R) time averages
    return _rate(np.einsum("pkn,rk->prn", spends, W)).mean(axis=2)


def path_averages(policies, model: ArrivalModel, n: int, weights, paths: int, seed=None, workers: int = 1):
    """Per-path time-average throughput, shape (paths, R).

    Path j always uses sub-seed j of ``seed``, so the result does not
    depend on the block size or on ``workers``.
    """
    bound = bind_policies(policies, model)
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    seeds = child_seeds(seed, paths)
    per_block = max(1, MC_BLOCK // (n * max(model.K, W.shape[0])))
    blocks = [seeds[j:j + per_block] for j in range(0, paths, per_block)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda s: _mc_block(bound, model, n, W, s), blocks))
    else:
        parts = [_mc_block(bound, model, n, W, s) for s in blocks]
    return np.concatenate(parts, axis=0)


def _summarize(samples):
    paths = samples.shape[0]
    mean = samples.mean(axis=0)
    hw = Z95 * samples.std(axis=0, ddof=1) / math.sqrt(paths)
    return mean, hw


def mc_throughput(policies, model: ArrivalModel, subset, n: int, paths: int, seed=None,
                  workers: int = 1) -> ThroughputEstimate:
    """Monte Carlo T_n(g_I) with a 95% half-width 1.96 s / sqrt(paths)."""
    if paths < 2:
        raise ValueError("need at least 2 paths")
    mask = mask_of(subset)
    if mask == 0:
        return ThroughputEstimate(0.0, 0.0, n, paths, "monte_carlo")
    samples = path_averages(policies, model, n, _weights_for([mask], model.K), paths, seed, workers)
    mean, hw = _summarize(samples)
    return ThroughputEstimate(float(mean[0]), float(hw[0]), n, paths, "monte_carlo")


def throughput_set_function(policies, model: ArrivalModel, n: int, method: str = "exact",
                            paths: int = 1000, seed=None, budget=None, workers: int = 1) -> SetFunction:
    """T_n(g_I) for all 2^K subsets in one pass."""
    K = model.K
    if K > 16:
        raise ValueError("set functions are limited to K <= 16")
    masks = list(range(1, 1 << K))
    W = _weights_for(masks, K)
    if method == "exact":
        vals = slot_means(policies, model, n, W, budget).sum(axis=0) / n
        return SetFunction(np.concatenate([[0.0], vals]))
    if method in ("mc", "monte_carlo"):
        if paths < 2:
            raise ValueError("need at least 2 paths")
        samples = path_averages(policies, model, n, W, paths, seed, workers)
        mean, hw = _summarize(samples)
        return SetFunction(np.concatenate([[0.0], mean]), np.concatenate([[0.0], hw]))
    raise ValueError(f"unknown method {method!r}")


def concavity_split_sides(policies, model: ArrivalModel, subset, n: int, budget=None):
    """Both sides of the per-slot concavity split used for the 0.72 inner bound.

    Left: T_n(g_I). Right: sum_i lam_i (1/n) E[sum_t 1/2 log2(1 + g_it / lam_i)]
    with lam_i = E[E_i] / sum_{j in I} E[E_j].
    """
    users = members(mask_of(subset), model.K)
    if not users:
        return 0.0, 0.0
    means = model.means[users]
    lam = means / means.sum()
    W = np.zeros((1 + len(users), model.K))
    W[0, users] = 1.0
    for r, (i, li) in enumerate(zip(users, lam), start=1):
        W[r, i] = 1.0 / li
    avg = slot_means(policies, model, n, W, budget).sum(axis=0) / n
    return float(avg[0]), float(lam @ avg[1:])


def concavity_split_check(policies, model: ArrivalModel, subset, n: int, tol=1e-9, budget=None) -> bool:
    lhs, rhs = concavity_split_sides(policies, model, subset, n, budget)
    return lhs >= rhs - tol


def supadditivity_gaps(policies, model: ArrivalModel, n: int, m: int, budget=None) -> np.ndarray:
    """(n+m) T_{n+m} - n T_n - m T_m for every nonempty subset (bitmask order).

    Each horizon starts from empty batteries, so all three terms come
    from prefixes of one exact enumeration to depth n+m.
    """
    if n < 1 or m < 1:
        raise ValueError("horizons must be >= 1")
    W = _weights_for(range(1, 1 << model.K), model.K)
    cum = np.cumsum(slot_means(policies, model, n + m, W, budget), axis=0)
    return cum[n + m - 1] - cum[n - 1] - cum[m - 1]


def supadditivity_check(policies, model: ArrivalModel, n: int, m: int, tol=1e-9, budget=None) -> bool:
    return bool(np.all(supadditivity_gaps(policies, model, n, m, budget) >= -tol))
