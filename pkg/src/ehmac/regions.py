"""Set functions, polymatroid rate regions, and sum-capacity gap reports.

A rate region here is always ``{R >= 0 : sum_{i in I} R_i <= f(I) for all I}``
for a set function ``f`` stored as a vector indexed by bitmask (bit i set
means user i, 0-based, is in the subset). Containment and distances are
computed on the set functions directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import PolymatroidError
from .gaussmi import EPI_CONSTANT

TOL = 1e-9

# Gap of the fixed-fraction policy to the AWGN throughput (cited result).
FIXED_FRACTION_GAP = 0.72
# Throughput gap and entropy-rate bound of the online policy used for the
# transmitter-only inner bound (cited result, not constructed here).
ONLINE_POLICY_GAP = 1.80
ONLINE_POLICY_ENTROPY = 1.0


def gap_txrx() -> float:
    """Receiver-side-information sum-rate gap, 0.72 + 1.05 (quoted as 1.77)."""
    return FIXED_FRACTION_GAP + EPI_CONSTANT


def gap_tx(K: int) -> float:
    """Transmitter-only region gap, 1.80 + 1.05 + K (quoted as 2.85 + K)."""
    return ONLINE_POLICY_GAP + EPI_CONSTANT + K * ONLINE_POLICY_ENTROPY


def gap_tx_correlated() -> float:
    """Fully-correlated arrivals, transmitter-only: entropy rate stays <= 1 (quoted as 3.85)."""
    return ONLINE_POLICY_GAP + EPI_CONSTANT + ONLINE_POLICY_ENTROPY


def mask_of(subset: Iterable[int] | int) -> int:
    if isinstance(subset, (int, np.integer)):
        return int(subset)
    m = 0
    for i in subset:
        m |= 1 << int(i)
    return m


def members(mask: int, K: int) -> list[int]:
    return [i for i in range(K) if mask >> i & 1]


@dataclass(frozen=True, eq=False)
class SetFunction:
    """Values of f on all 2^K subsets, indexed by bitmask.

    ``half_widths`` carries 95% confidence half-widths when the values are
    Monte Carlo estimates.
    """

    values: np.ndarray
    half_widths: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        K = int(round(math.log2(v.shape[0]))) if v.size else -1
        if v.ndim != 1 or K < 0 or 1 << K != v.shape[0]:
            raise ValueError("a set function needs 2^K values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.half_widths is not None:
            h = np.asarray(self.half_widths, dtype=float)
            if h.shape != v.shape:
                raise ValueError("half_widths must match values")
            h.setflags(write=False)
            object.__setattr__(self, "half_widths", h)

    @property
    def K(self) -> int:
        return self.values.shape[0].bit_length() - 1

    @property
    def full(self) -> int:
        return (1 << self.K) - 1

    def __call__(self, subset) -> float:
        return float(self.values[mask_of(subset)])

    @classmethod
    def from_callable(cls, K: int, fn) -> "SetFunction":
        """Tabulate ``fn(list_of_members)`` on every subset."""
        return cls(np.array([fn(members(m, K)) for m in range(1 << K)], dtype=float))

    def is_normalized(self, tol=TOL) -> bool:
        return abs(self.values[0]) <= tol

    def monotone_violations(self, tol=TOL) -> list[tuple[int, int]]:
        """Pairs (I, I + {i}) with f(I) > f(I + {i}) + tol."""
        out = []
        v = self.values
        for m in range(1 << self.K):
            for i in range(self.K):
                if not m >> i & 1 and v[m] > v[m | 1 << i] + tol:
                    out.append((m, m | 1 << i))
        return out

    def is_monotone(self, tol=TOL) -> bool:
        return not self.monotone_violations(tol)


@dataclass(frozen=True)
class RateRegion:
    f: SetFunction
    clamped: bool = False
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def K(self) -> int:
        return self.f.K

    def is_polymatroid(self, tol=TOL) -> bool:
        return self.f.is_normalized(tol) and self.f.is_monotone(tol) and is_submodular(self.f, tol)

    def contains_point(self, rates, tol=TOL) -> bool:
        rates = np.asarray(rates, dtype=float)
        if np.any(rates < -tol):
            return False
        sums = np.array([rates[members(m, self.K)].sum() for m in range(1 << self.K)])
        return bool(np.all(sums <= self.f.values + tol))


def _as_setfn(obj) -> SetFunction:
    return obj.f if isinstance(obj, RateRegion) else obj


def awgn_outer(meansE: Sequence[float]) -> RateRegion:
    """AWGN MAC region with per-user average power equal to the mean arrival."""
    means = np.asarray(meansE, dtype=float)
    if np.any(means <= 0):
        raise ValueError("mean arrivals must be positive")
    K = means.shape[0]
    sums = np.array([means[members(m, K)].sum() for m in range(1 << K)])
    return RateRegion(SetFunction(0.5 * np.log2(1 + sums)), label="awgn_outer")


def _shift(f: SetFunction, gamma: float, label: str, **meta) -> RateRegion:
    raw = f.values - gamma
    clamped = bool(np.any(raw[1:] < 0))
    vals = np.maximum(raw, 0.0)
    vals[0] = 0.0
    return RateRegion(SetFunction(vals), clamped=clamped, label=label, meta={"gamma": gamma, **meta})


def shifted_region(base, gamma: float) -> RateRegion:
    """f'(I) = max(f(I) - gamma, 0). Clamping can break submodularity; it is flagged."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    return _shift(_as_setfn(base), gamma, f"shifted({gamma:g})")


def inner_txrx(tput) -> RateRegion:
    """Inner bound with arrival side information at the receiver."""
    return _shift(_as_setfn(tput), EPI_CONSTANT, "inner_txrx")


def inner_tx(tput, entropy_rate: float) -> RateRegion:
    """Transmitter-only inner bound: the spend-process entropy rate is also paid."""
    if entropy_rate < 0:
        raise ValueError("entropy rate must be nonnegative")
    return _shift(_as_setfn(tput), entropy_rate + EPI_CONSTANT, "inner_tx", entropy_rate=entropy_rate)


def is_submodular(f, tol=TOL) -> bool:
    """Exhaustive pairwise test f(I+s) + f(I+u) >= f(I) + f(I+s+u).

    For Monte Carlo set functions the four half-widths are added to the
    tolerance of each comparison.
    """
    f = _as_setfn(f)
    v = f.values
    h = f.half_widths
    K = f.K
    for m in range(1 << K):
        free = [i for i in range(K) if not m >> i & 1]
        for s, u in itertools.combinations(free, 2):
            ms, mu = m | 1 << s, m | 1 << u
            msu = ms | 1 << u
            slack = tol
            if h is not None:
                slack += h[m] + h[ms] + h[mu] + h[msu]
            if v[ms] + v[mu] < v[m] + v[msu] - slack:
                return False
    return True


def vertex(region, perm: Sequence[int]) -> np.ndarray:
    """Greedy (Edmonds) vertex: incremental values of f along ``perm`` (0-based)."""
    f = _as_setfn(region)
    K = f.K
    if sorted(perm) != list(range(K)):
        raise PolymatroidError(f"{list(perm)} is not a permutation of 0..{K - 1}")
    if not f.is_normalized():
        raise PolymatroidError("set function is not normalized")
    rates = np.empty(K)
    m = 0
    for i in perm:
        nxt = m | 1 << i
        rates[i] = f.values[nxt] - f.values[m]
        m = nxt
    return rates


def _perms_to_check(K: int):
    if K <= 7:
        return itertools.permutations(range(K))
    base = list(range(K))
    rots = [base[j:] + base[:j] for j in range(K)]
    return rots + [r[::-1] for r in rots]


def sum_rate(region, tol=TOL) -> float:
    """Sum capacity f(full) of a polymatroid region.

    Every checked permutation vertex must lie in the region and sum to
    f(full); otherwise the region is not a polymatroid. All K! vertices
    are checked for K <= 7, rotations and their reversals beyond that.
    """
    reg = region if isinstance(region, RateRegion) else RateRegion(region)
    total = float(reg.f.values[-1])
    for perm in _perms_to_check(reg.K):
        R = vertex(reg, perm)
        if abs(R.sum() - total) > tol:
            raise PolymatroidError(f"vertex {perm} sums to {R.sum()} != {total}")
        if not reg.contains_point(R, tol):
            raise PolymatroidError(f"vertex {perm} = {R} lies outside the region")
    return total


def support_value(region, mask: int) -> float:
    """max over the region of sum_{i in mask} R_i.

    Equals f(mask) for polymatroids; otherwise solved as a small LP.
    """
    reg = region if isinstance(region, RateRegion) else RateRegion(region)
    if reg.is_polymatroid():
        return float(reg.f.values[mask])
    from scipy.optimize import linprog

    K = reg.K
    A = np.array([[m >> i & 1 for i in range(K)] for m in range(1, 1 << K)], dtype=float)
    c = -np.array([mask >> i & 1 for i in range(K)], dtype=float)
    res = linprog(c, A_ub=A, b_ub=reg.f.values[1:], bounds=[(0, None)] * K, method="highs")
    if res.status != 0:
        raise PolymatroidError(f"support LP failed: {res.message}")
    return float(-res.fun)


def region_contains(inner, outer, tol=TOL) -> bool:
    """True iff region ``inner`` is a subset of region ``outer``.

    Compares support values in every direction 1_I against f_outer(I),
    which is exact because the outer region is cut out by exactly those
    constraints.
    """
    fi, fo = _as_setfn(inner), _as_setfn(outer)
    if fi.K != fo.K:
        raise ValueError(f"dimension mismatch: K={fi.K} vs K={fo.K}")
    if not (fi.is_normalized() and fo.is_normalized()):
        raise PolymatroidError("set functions must satisfy f(empty) = 0")
    if np.all(fi.values <= fo.values + tol):
        return True
    reg = inner if isinstance(inner, RateRegion) else RateRegion(inner)
    return all(support_value(reg, m) <= fo.values[m] + tol for m in range(1, 1 << fi.K))


def setfn_distance(f, g) -> float:
    """sup_I |f(I) - g(I)|, a proxy for the Hausdorff distance of the regions."""
    f, g = _as_setfn(f), _as_setfn(g)
    if f.K != g.K:
        raise ValueError(f"dimension mismatch: K={f.K} vs K={g.K}")
    return float(np.max(np.abs(f.values - g.values)))


@dataclass(frozen=True)
class GapReport:
    K: int
    meanE: float
    gamma: float
    upper: float
    lower: float

    @property
    def absolute(self) -> float:
        return self.upper - self.lower

    @property
    def relative(self) -> float:
        return self.gamma / self.upper


def gap_report(gamma: float, meanE: float, K_list: Sequence[int]) -> list[GapReport]:
    """Sum-capacity sandwich 1/2 log2(1 + K E[E]) - gamma <= C_sum <= 1/2 log2(1 + K E[E])."""
    if meanE <= 0:
        raise ValueError("meanE must be positive")
    if len(K_list) == 0:
        raise ValueError("K_list is empty")
    out = []
    for K in K_list:
        upper = 0.5 * math.log2(1 + K * meanE)
        out.append(GapReport(int(K), meanE, gamma, upper, max(upper - gamma, 0.0)))
    return out
