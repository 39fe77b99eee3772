"""Helpers shared by the exact (enumeration-based) routines."""

from __future__ import annotations

import os

import numpy as np

from .errors import EnumerationBudgetError

# Arrival-sequence count |support|^n allowed for exact enumeration.
DEFAULT_BUDGET = 2**25
BUDGET_ENV = "EHMAC_ENUM_BUDGET"
KEY_DECIMALS = 12


def resolve_budget(budget=None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    return int(float(env)) if env else DEFAULT_BUDGET


def check_budget(outcomes: int, n: int, budget=None) -> None:
    budget = resolve_budget(budget)
    # compare in integers; outcomes**n can be astronomically large
    if outcomes**n > budget:
        raise EnumerationBudgetError(
            f"{outcomes}^{n} arrival sequences exceed the enumeration budget {budget}"
        )


def group_rows(*cols):
    """Group identical rows of the given columns.

    Float columns are compared after rounding to ``KEY_DECIMALS`` digits.
    Returns ``(first, inverse)``: the index of one representative per
    group (in sorted-key order) and each row's group id.
    """
    keys = []
    for c in cols:
        c = np.asarray(c)
        if c.dtype.kind == "f":
            c = np.round(c, KEY_DECIMALS) + 0.0  # +0.0 folds -0.0 into 0.0
        keys.append(c.reshape(c.shape[0], -1))
    keys = np.concatenate([k.astype(np.float64) for k in keys], axis=1)
    n = keys.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    order = np.lexsort(keys.T[::-1])
    sk = keys[order]
    new = np.ones(n, dtype=bool)
    new[1:] = np.any(sk[1:] != sk[:-1], axis=1)
    gid_sorted = np.cumsum(new) - 1
    inverse = np.empty(n, dtype=np.int64)
    inverse[order] = gid_sorted
    first = order[new]
    return first, inverse


def merge_states(probs, *cols):
    """Collapse duplicate states, summing their probabilities."""
    first, inverse = group_rows(*cols)
    merged = np.bincount(inverse, weights=probs, minlength=first.shape[0])
    return merged, [np.asarray(c)[first] for c in cols]
