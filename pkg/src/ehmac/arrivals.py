"""Joint energy-arrival models over finite alphabets.

Arrivals are i.i.d. across slots; within a slot the K users' arrivals
follow an arbitrary joint pmf. Values are in energy units and are
truncated at each user's battery capacity, since energy above the cap
can never be stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

MERGE_TOL = 1e-12
PMF_TOL = 1e-12


def _as_pairs(pmf):
    """Accept ``{value: prob}`` or ``[(value, prob), ...]``; return two arrays."""
    if isinstance(pmf, Mapping):
        items = [(float(k), float(v)) for k, v in pmf.items()]
    else:
        items = [(float(k), float(v)) for k, v in pmf]
    if not items:
        raise ValueError("empty alphabet")
    vals, probs = zip(*items)
    return np.asarray(vals, dtype=float), np.asarray(probs, dtype=float)


def _snap(values, tol=MERGE_TOL):
    """Map values lying within ``tol`` of each other onto one representative."""
    order = np.argsort(values, kind="stable")
    out = values.copy()
    rep = None
    for j in order:
        if rep is not None and values[j] - rep <= tol:
            out[j] = rep
        else:
            rep = values[j]
    return out


def _check_probs(probs, what):
    if np.any(probs < 0):
        raise ValueError(f"{what}: negative probability")
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{what}: probabilities sum to {total!r}, not 1")
    return probs / total


@dataclass(frozen=True, eq=False)
class ArrivalModel:
    """Joint per-slot arrival distribution for K users.

    ``support`` has one row per joint outcome (e_1, ..., e_K) with
    positive mass; ``pmf`` holds the masses; ``caps`` the battery
    capacities. Build instances with :func:`build_iid_product`,
    :func:`build_fully_correlated` or :func:`build_joint`.
    """

    support: np.ndarray
    pmf: np.ndarray
    caps: np.ndarray

    def __post_init__(self):
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        pmf = np.asarray(self.pmf, dtype=float)
        caps = np.asarray(self.caps, dtype=float)
        if support.shape[0] != pmf.shape[0] or support.shape[1] != caps.shape[0]:
            raise ValueError("support, pmf and caps have inconsistent shapes")
        if np.any(caps <= 0):
            raise ValueError("battery capacities must be positive")
        if abs(pmf.sum() - 1.0) > PMF_TOL or np.any(pmf <= 0):
            raise ValueError("joint pmf must be positive and sum to 1")
        if np.any(support < 0) or np.any(support > caps + MERGE_TOL):
            raise ValueError("arrival values must lie in [0, cap]")
        means = pmf @ support
        if np.any(means <= 0):
            bad = int(np.flatnonzero(means <= 0)[0])
            raise ValueError(f"user {bad} has zero mean arrival")
        for name, arr in (("support", support), ("pmf", pmf), ("caps", caps)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def K(self) -> int:
        return self.caps.shape[0]

    @property
    def alphabets(self) -> list[np.ndarray]:
        return [np.unique(self.support[:, i]) for i in range(self.K)]

    @property
    def means(self) -> np.ndarray:
        return self.pmf @ self.support

    def marginal(self, users: Sequence[int]) -> "ArrivalModel":
        """Joint model of the listed users only."""
        users = list(users)
        if not users:
            raise ValueError("need at least one user")
        return build_joint(self.support[:, users], self.pmf, self.caps[users])

    def __repr__(self):
        return f"ArrivalModel(K={self.K}, outcomes={len(self.pmf)}, caps={self.caps.tolist()})"


def build_joint(points, probs, caps) -> ArrivalModel:
    """Joint model from explicit outcome rows and probabilities.

    Values above a user's cap are truncated to the cap; outcomes that
    coincide afterwards (to within 1e-12) are merged and zero-mass rows
    dropped.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    probs = _check_probs(np.asarray(probs, dtype=float), "joint pmf")
    caps = np.atleast_1d(np.asarray(caps, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("empty alphabet")
    if points.shape[1] != caps.shape[0]:
        raise ValueError(f"outcomes have {points.shape[1]} users but {caps.shape[0]} caps given")
    if np.any(points < 0):
        raise ValueError("negative arrival value")
    points = np.minimum(points, caps)
    for i in range(points.shape[1]):
        points[:, i] = _snap(points[:, i])
    keep = probs > 0
    points, probs = points[keep], probs[keep]
    rows, inverse = np.unique(points, axis=0, return_inverse=True)
    merged = np.bincount(inverse.ravel(), weights=probs, minlength=rows.shape[0])
    merged = merged / merged.sum()
    return ArrivalModel(rows, merged, caps)


def build_iid_product(marginals, caps) -> ArrivalModel:
    """Independent users: the joint pmf is the product of the marginals."""
    caps = np.atleast_1d(np.asarray(caps, dtype=float))
    if len(marginals) != caps.shape[0]:
        raise ValueError(f"{len(marginals)} marginals but {caps.shape[0]} caps")
    pairs = []
    for i, m in enumerate(marginals):
        vals, probs = _as_pairs(m)
        if np.any(vals < 0):
            raise ValueError(f"user {i}: negative support value")
        probs = _check_probs(probs, f"user {i}")
        if probs @ vals <= 0:
            raise ValueError(f"user {i}: zero-mean marginal")
        pairs.append((vals, probs))
    grids = np.meshgrid(*[v for v, _ in pairs], indexing="ij")
    pgrids = np.meshgrid(*[p for _, p in pairs], indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    probs = np.prod(np.stack([g.ravel() for g in pgrids], axis=1), axis=1)
    return build_joint(points, probs, caps)


def build_fully_correlated(marginal, K: int, cap: float) -> ArrivalModel:
    """All K users see the same arrival E_1 = ... = E_K = E each slot."""
    if K < 1:
        raise ValueError("K must be at least 1")
    vals, probs = _as_pairs(marginal)
    if np.any(vals < 0):
        raise ValueError("negative support value")
    probs = _check_probs(probs, "marginal")
    if probs @ vals <= 0:
        raise ValueError("zero-mean marginal")
    points = np.repeat(vals[:, None], K, axis=1)
    return build_joint(points, probs, np.full(K, float(cap)))


def bernoulli(p: float, high: float = 1.0, low: float = 0.0) -> dict:
    """Two-point pmf ``{low: 1-p, high: p}``."""
    return {low: 1.0 - p, high: p}


def sample_path(model: ArrivalModel, n: int, seed=None) -> np.ndarray:
    """Draw n i.i.d. slots; returns a K x n array of arrivals.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(model.pmf), size=n, p=model.pmf)
    return model.support[idx].T.copy()


def child_seeds(seed, count: int) -> list[np.random.SeedSequence]:
    """Deterministic per-path sub-seeds, independent of how paths are batched."""
    if isinstance(seed, np.random.SeedSequence):
        # fresh copy: spawn() advances the parent's child counter
        root = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        root = np.random.SeedSequence(seed)
    return root.spawn(count)


def mean_arrival(model: ArrivalModel, i: int) -> float:
    if not 0 <= i < model.K:
        raise IndexError(f"user index {i} out of range for K={model.K}")
    return float(model.pmf @ model.support[:, i])
