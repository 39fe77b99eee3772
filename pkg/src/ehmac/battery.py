"""Battery recursion and trajectory simulation.

The level in slot t already includes that slot's arrival:

    B_t = min(B_{t-1} - g_{t-1} + E_t, cap),   B_0 = 0,

and the spend g_t must satisfy 0 <= g_t <= B_t.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .arrivals import ArrivalModel, sample_path
from .errors import AdmissibilityError
from .policies import ADMISSIBILITY_TOL, allocate_all, bind_policies


@dataclass(frozen=True)
class BatteryState:
    levels: np.ndarray
    caps: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        caps = np.asarray(self.caps, dtype=float)
        if levels.shape != caps.shape:
            raise ValueError("levels and caps differ in shape")
        if np.any(levels < -ADMISSIBILITY_TOL) or np.any(levels > caps + ADMISSIBILITY_TOL):
            raise ValueError("battery level outside [0, cap]")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "caps", caps)

    @classmethod
    def empty(cls, caps):
        caps = np.asarray(caps, dtype=float)
        return cls(np.zeros_like(caps), caps)


def step(state: BatteryState, spends, arrivals) -> BatteryState:
    """Spend from the current level, then credit the next slot's arrival."""
    spends = np.asarray(spends, dtype=float)
    arrivals = np.asarray(arrivals, dtype=float)
    for i, (g, b) in enumerate(zip(spends, state.levels)):
        if g > b + ADMISSIBILITY_TOL or g < -ADMISSIBILITY_TOL:
            raise AdmissibilityError(i, float(g), float(b))
    new = np.minimum(np.maximum(state.levels - spends, 0.0) + arrivals, state.caps)
    return BatteryState(new, state.caps)


@dataclass(frozen=True)
class Trajectory:
    """K x n arrays of arrivals, post-arrival levels, and spends."""

    arrivals: np.ndarray
    levels: np.ndarray
    spends: np.ndarray

    @property
    def K(self):
        return self.arrivals.shape[0]

    @property
    def n(self):
        return self.arrivals.shape[1]

    def to_csv(self, fh=None) -> str | None:
        """Write rows ``t,user,arrival,level,spend`` (1-based t and user).

        With no file handle the CSV text is returned.
        """
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "user", "arrival", "level", "spend"])
        for t in range(self.n):
            for i in range(self.K):
                w.writerow([t + 1, i + 1, repr(float(self.arrivals[i, t])),
                            repr(float(self.levels[i, t])), repr(float(self.spends[i, t]))])
        return None if fh is not None else buf.getvalue()


def run_policies(bound, caps, arrivals: np.ndarray):
    """Vectorised battery recursion over a batch of paths.

    ``arrivals`` has shape (P, K, n); returns (levels, spends) of the same
    shape. Raises :class:`AdmissibilityError` on the first overspend.
    """
    caps = np.asarray(caps, dtype=float)
    P, K, n = arrivals.shape
    levels = np.empty_like(arrivals)
    spends = np.empty_like(arrivals)
    resid = np.zeros((P, K))
    for t in range(n):
        b = np.minimum(resid + arrivals[:, :, t], caps)
        g = allocate_all(bound, b, caps)
        over = g > b + ADMISSIBILITY_TOL
        if over.any() or np.any(g < -ADMISSIBILITY_TOL):
            j, i = np.argwhere(over | (g < -ADMISSIBILITY_TOL))[0]
            raise AdmissibilityError(int(i), float(g[j, i]), float(b[j, i]), slot=t + 1)
        levels[:, :, t] = b
        spends[:, :, t] = g
        resid = np.maximum(b - g, 0.0)
    return levels, spends


def simulate_trajectory(model: ArrivalModel, policies, n: int, seed=None) -> Trajectory:
    """Sample arrivals and run every user's policy from empty batteries."""
    bound = bind_policies(policies, model)
    arrivals = sample_path(model, n, seed)
    levels, spends = run_policies(bound, model.caps, arrivals[None])
    return Trajectory(arrivals, levels[0], spends[0])
