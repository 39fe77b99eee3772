"""Online power-control policies and the entropy of their spend process.

Every built-in policy is stationary: the energy spent in a slot is a
function of the current (post-arrival) battery level only. ``allocate``
is vectorised over numpy arrays of levels.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import _enum
from .arrivals import ArrivalModel
from .errors import AdmissibilityError

VARIANTS = (
    "fixed_fraction",
    "constant",
    "greedy",
    "quantized_fixed_fraction",
    "table",
    "custom",
)
ADMISSIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class PolicySpec:
    """Immutable description of a stationary policy.

    ``q`` of the fixed-fraction variants may be left as ``None``; it is
    then bound to E[E_i]/cap_i when the policy meets an arrival model
    (see :func:`bind_policies`).
    """

    variant: str
    q: float | None = None
    c: float | None = None
    levels: int | None = None
    grid: tuple | None = None
    spends: tuple | None = None
    func: Callable | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown policy variant {self.variant!r}")
        if self.q is not None and not 0 < self.q <= 1:
            raise ValueError(f"fixed fraction q={self.q} outside (0, 1]")
        if self.variant == "constant" and (self.c is None or self.c < 0):
            raise ValueError("constant policy needs c >= 0")
        if self.variant == "quantized_fixed_fraction" and (self.levels is None or self.levels < 2):
            raise ValueError("quantized policy needs levels >= 2")
        if self.variant == "table":
            if self.grid is None or self.spends is None or len(self.grid) != len(self.spends):
                raise ValueError("table policy needs equally long grid and spends")
            if len(self.grid) == 0 or self.grid[0] != 0 or list(self.grid) != sorted(self.grid):
                raise ValueError("table grid must be sorted and start at 0")
        if self.variant == "custom" and not callable(self.func):
            raise ValueError("custom policy needs a callable func(level, cap)")

    @classmethod
    def fixed_fraction(cls, q=None):
        return cls("fixed_fraction", q=q)

    @classmethod
    def constant(cls, c):
        return cls("constant", c=float(c))

    @classmethod
    def greedy(cls):
        return cls("greedy")

    @classmethod
    def quantized_fixed_fraction(cls, levels, q=None):
        return cls("quantized_fixed_fraction", q=q, levels=int(levels))

    @classmethod
    def table(cls, grid, spends):
        return cls("table", grid=tuple(map(float, grid)), spends=tuple(map(float, spends)))

    @classmethod
    def custom(cls, func):
        return cls("custom", func=func)

    @property
    def needs_rate(self) -> bool:
        return self.variant in ("fixed_fraction", "quantized_fixed_fraction")

    def to_json(self) -> dict:
        out = {"variant": self.variant}
        for key in ("q", "c", "levels"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.variant == "table":
            out["grid"] = list(self.grid)
            out["spends"] = list(self.spends)
        return out


def fixed_fraction_rate(meanE: float, cap: float) -> float:
    """Fraction q = E[E]/cap spent each slot by the fixed-fraction policy."""
    if meanE <= 0:
        raise ValueError(f"mean arrival must be positive, got {meanE}")
    if meanE > cap * (1 + 1e-12):
        raise ValueError(f"mean arrival {meanE} exceeds battery capacity {cap}")
    return min(meanE / cap, 1.0)


def bind(policy: PolicySpec, meanE: float, cap: float) -> PolicySpec:
    if policy.needs_rate and policy.q is None:
        return replace(policy, q=fixed_fraction_rate(meanE, cap))
    return policy


def bind_policies(policies, model: ArrivalModel) -> list[PolicySpec]:
    """One bound policy per user; a single spec is shared by all users."""
    if isinstance(policies, PolicySpec):
        policies = [policies] * model.K
    policies = list(policies)
    if len(policies) != model.K:
        raise ValueError(f"{len(policies)} policies for {model.K} users")
    means = model.means
    return [bind(p, means[i], model.caps[i]) for i, p in enumerate(policies)]


def allocate(policy: PolicySpec, level, cap):
    """Energy spent at battery ``level`` (scalar or array).

    Built-in variants never spend more than ``level``. Table and custom
    policies are returned unclamped so that inadmissible ones can be
    detected by :func:`check_admissibility` or by the battery.
    """
    b = np.asarray(level, dtype=float)
    v = policy.variant
    if v == "greedy":
        g = b.copy()
    elif v == "constant":
        g = np.minimum(policy.c, b)
    elif v in ("fixed_fraction", "quantized_fixed_fraction"):
        if policy.q is None:
            raise ValueError("fixed-fraction policy has no rate; bind it to a model first")
        g = policy.q * b
        if v == "quantized_fixed_fraction":
            step = np.asarray(cap, dtype=float) / (policy.levels - 1)
            g = np.floor(g / step + 1e-9) * step
            g = np.minimum(g, b)
    elif v == "table":
        grid = np.asarray(policy.grid)
        idx = np.searchsorted(grid, b + ADMISSIBILITY_TOL, side="right") - 1
        g = np.asarray(policy.spends)[np.clip(idx, 0, len(grid) - 1)]
    else:
        g = np.vectorize(policy.func, otypes=[float])(b, np.broadcast_to(cap, b.shape))
    return g if g.ndim else float(g)


def allocate_all(policies: Sequence[PolicySpec], levels: np.ndarray, caps) -> np.ndarray:
    """Per-user allocation for a (..., K) array of levels."""
    out = np.empty_like(levels, dtype=float)
    for i, pol in enumerate(policies):
        out[..., i] = allocate(pol, levels[..., i], caps[i])
    return out


def _expand(r, p, model):
    """All one-slot extensions of residual states r (S,K) with masses p."""
    E, pe = model.support, model.pmf
    M, K = E.shape
    b = np.minimum(r[:, None, :] + E[None, :, :], model.caps).reshape(-1, K)
    pp = (p[:, None] * pe[None, :]).ravel()
    return b, pp, M


def check_admissibility(policies, model: ArrivalModel, n: int, budget=None) -> bool:
    """True iff no arrival sequence of length n drives a spend outside [0, level].

    Reachable battery states are enumerated exactly, merging arrival
    histories that lead to the same levels.
    """
    bound = bind_policies(policies, model)
    _enum.check_budget(len(model.pmf), n, budget)
    r = np.zeros((1, model.K))
    p = np.ones(1)
    for _ in range(n):
        b, pp, _m = _expand(r, p, model)
        g = allocate_all(bound, b, model.caps)
        if np.any(g > b + ADMISSIBILITY_TOL) or np.any(g < -ADMISSIBILITY_TOL):
            return False
        p, (r,) = _enum.merge_states(pp, b - g)
    return True


def output_entropy_profile(policies, model: ArrivalModel, n: int, users=None, budget=None) -> np.ndarray:
    """H(G^t)/t in bits for t = 1..n, where G^t is the joint spend history.

    The distribution of spend histories is computed exactly: states carry
    (history id, battery residuals), histories are re-indexed every slot
    and states with equal history and residuals are merged.
    """
    if users is not None:
        users = list(users)
        bound_all = bind_policies(policies, model)
        model = model.marginal(users)
        bound = [bound_all[i] for i in users]
    else:
        bound = bind_policies(policies, model)
    _enum.check_budget(len(model.pmf), n, budget)
    K = model.K
    r = np.zeros((1, K))
    hist = np.zeros(1, dtype=np.int64)
    p = np.ones(1)
    out = np.empty(n)
    for t in range(n):
        b, pp, M = _expand(r, p, model)
        g = allocate_all(bound, b, model.caps)
        for i in range(K):
            bad = np.flatnonzero(g[:, i] > b[:, i] + ADMISSIBILITY_TOL)
            if bad.size:
                j = bad[0]
                raise AdmissibilityError(i, float(g[j, i]), float(b[j, i]), slot=t + 1)
        _, code = _enum.group_rows(g)
        _, new_hist = _enum.group_rows(np.repeat(hist, M), code)
        p, (r, hist) = _enum.merge_states(pp, b - g, new_hist)
        hist_mass = np.bincount(hist, weights=p)
        hist_mass = hist_mass[hist_mass > 0]
        out[t] = -np.sum(hist_mass * np.log2(hist_mass)) / (t + 1)
    return out


def exact_output_entropy(policies, model: ArrivalModel, n: int, users=None, budget=None) -> float:
    """Exact H(G^n)/n in bits per slot for the joint spend process."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    return float(output_entropy_profile(policies, model, n, users=users, budget=budget)[-1])
