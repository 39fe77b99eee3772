"""Mutual information of the unit-variance AWGN channel with uniform or discrete inputs.

For Y = U_1 + ... + U_K + N with U_i ~ Unif[-a_i, a_i] and N ~ N(0, 1),
the output density is a K-fold central difference of an iterated
integral of the Gaussian CDF,

    p(y) = D_{a_1} ... D_{a_K} J_{K-1}(y) / prod_i (2 a_i),
    D_a F(y) = F(y + a) - F(y - a),   J_k(x) = E[(x - Z)_+^k] / k!,

and h(Y) follows by adaptive quadrature. All results are in bits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special
from scipy.stats import norm

from .errors import QuadratureError

EPI_CONSTANT = 0.5 * math.log2(math.pi * math.e / 2)
GAUSS_ENTROPY = 0.5 * math.log2(2 * math.pi * math.e)
QUAD_TOL = 1e-4
TAIL_SIGMAS = 10.0
# half-widths below this are treated as point masses (MI error < 1e-6 bits)
TINY_HALF_WIDTH = 1e-3


@dataclass(frozen=True)
class InputSpec:
    """Channel input description.

    ``kind="uniform"``: independent users, user i uniform on
    [-sqrt(P_i), sqrt(P_i)]. ``kind="discrete"``: a single input on
    ``points`` with masses ``probs``.
    """

    kind: str
    powers: tuple = ()
    points: tuple = ()
    probs: tuple = ()

    def __post_init__(self):
        if self.kind == "uniform":
            if any(p < 0 for p in self.powers):
                raise ValueError("powers must be nonnegative")
        elif self.kind == "discrete":
            if len(self.points) == 0 or len(self.points) != len(self.probs):
                raise ValueError("discrete input needs matching points and probs")
            if any(p < 0 for p in self.probs) or abs(sum(self.probs) - 1) > 1e-9:
                raise ValueError("discrete pmf must be nonnegative and sum to 1")
        else:
            raise ValueError(f"unknown input kind {self.kind!r}")


def _gauss_partial_moments(x, kmax):
    """T_j(x) = E[Z^j 1{Z < x}] for j = 0..kmax."""
    T = [norm.cdf(x), -norm.pdf(x)]
    for j in range(2, kmax + 1):
        T.append(-(x ** (j - 1)) * norm.pdf(x) + (j - 1) * T[j - 2])
    return T[: kmax + 1]


def iterated_cdf(k: int, x):
    """J_k(x) = E[(x - Z)_+^k] / k!; J_0 is the standard normal CDF and J_k' = J_{k-1}."""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return norm.cdf(x)
    T = _gauss_partial_moments(x, k)
    acc = np.zeros_like(x)
    for j in range(k + 1):
        acc = acc + math.comb(k, j) * x ** (k - j) * (-1) ** j * T[j]
    return acc / math.factorial(k)


def uniform_sum_density(y, half_widths):
    """Density of sum_i Unif[-a_i, a_i] + N(0, 1) at y."""
    a = [float(v) for v in half_widths if v >= TINY_HALF_WIDTH]
    y = np.asarray(y, dtype=float)
    if not a:
        return norm.pdf(y)
    K = len(a)
    acc = np.zeros_like(y)
    for signs in itertools.product((1.0, -1.0), repeat=K):
        shift = sum(s * ai for s, ai in zip(signs, a))
        acc = acc + math.prod(signs) * iterated_cdf(K - 1, y + shift)
    return acc / math.prod(2 * ai for ai in a)


def _neg_plogp(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = -p[pos] * np.log2(p[pos])
    return out


def _quad(fn, lo, hi, points):
    pts = sorted({float(x) for x in points if lo < x < hi})
    val, err = integrate.quad(fn, lo, hi, points=pts or None, limit=500,
                              epsabs=1e-10, epsrel=1e-10)
    if not math.isfinite(val) or err > QUAD_TOL / 10:
        raise QuadratureError(f"quadrature error estimate {err:.3g} exceeds tolerance")
    return val


def output_entropy_uniform(powers) -> float:
    """h(Y) in bits for uniform inputs with the given powers plus unit noise."""
    if any(p < 0 for p in powers):
        raise ValueError("powers must be nonnegative")
    a = [v for v in map(math.sqrt, powers) if v >= TINY_HALF_WIDTH]
    if not a:
        return GAUSS_ENTROPY
    L = sum(a) + TAIL_SIGMAS
    kinks = [abs(sum(s * v for s, v in zip(signs, a)))
             for signs in itertools.product((1.0, -1.0), repeat=len(a))]
    # density is even: integrate the left half-line, where every J_k argument is small
    half = _quad(lambda y: float(_neg_plogp(uniform_sum_density(-y, a))), 0.0, L, kinks)
    return 2.0 * half


def sum_uniform_awgn_mi(powers) -> float:
    """I(U_1..U_K ; sum U_i + N) for U_i uniform on [-sqrt(P_i), sqrt(P_i)]."""
    return max(output_entropy_uniform(powers) - GAUSS_ENTROPY, 0.0)


def mixture_awgn_mi(points, probs=None) -> float:
    """I(X; X + N) for a discrete input X on ``points`` (an InputSpec also accepted)."""
    if isinstance(points, InputSpec):
        spec = points
    else:
        spec = InputSpec("discrete", points=tuple(map(float, points)), probs=tuple(map(float, probs)))
    x = np.asarray(spec.points, dtype=float)
    w = np.asarray(spec.probs, dtype=float)
    keep = w > 0
    x, logw = x[keep], np.log(w[keep])
    if np.ptp(x) == 0:
        return 0.0

    def integrand(y):
        lp = special.logsumexp(logw - 0.5 * (y - x) ** 2) - 0.5 * math.log(2 * math.pi)
        return -math.exp(lp) * lp / math.log(2)

    lo, hi = x.min() - TAIL_SIGMAS, x.max() + TAIL_SIGMAS
    pts = np.unique(np.concatenate([x, (x[:-1] + x[1:]) / 2 if x.size > 1 else x]))
    h = _quad(integrand, lo, hi, pts)
    return max(h - GAUSS_ENTROPY, 0.0)


def mutual_information(spec: InputSpec) -> float:
    if spec.kind == "uniform":
        return sum_uniform_awgn_mi(spec.powers)
    return mixture_awgn_mi(spec)


def gaussian_ceiling(total_power: float) -> float:
    """1/2 log2(1 + P): the Gaussian-input maximum at power P."""
    return 0.5 * math.log2(1 + total_power)


def epi_lower_bound(total_power: float) -> float:
    """Entropy-power floor 1/2 log2(1 + 2P / (pi e)) for uniform inputs of total power P."""
    if total_power < 0:
        raise ValueError("power must be nonnegative")
    return 0.5 * math.log2(1 + 2 * total_power / (math.pi * math.e))


def epi_loose_bound(total_power: float) -> float:
    """1/2 log2(1 + P) - 1/2 log2(pi e / 2); never exceeds :func:`epi_lower_bound`."""
    if total_power < 0:
        raise ValueError("power must be nonnegative")
    return gaussian_ceiling(total_power) - EPI_CONSTANT
