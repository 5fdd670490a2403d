"""Hyperbolic-time machinery: expansion constants, Pliss times, hyperbolic cylinders.

A prefix length m of a word is a hyperbolic time when every suffix sum of
the per-symbol log-expansion lower bounds beats 2c per step.  The symbolic
bounds are b1 = b3 = -1 (worst case on the slow rectangles) and
b2 = log(1/sigma); the same Pliss machinery applies to true pointwise
log-expansions along an orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError
from .maps import Parameters, PlanePoint, center_log_expansion
from .symbolic import LOG_OMEGA, is_admissible


@dataclass(frozen=True)
class HyperbolicConstants:
    gamma: float
    c: float
    theta: float
    b1: float
    b2: float
    b3: float
    A_sup: float
    beta_exp: float
    epsilon: float

    def b_of(self, symbol: int) -> float:
        return (self.b1, self.b2, self.b3)[symbol - 1]


def default_gamma(sigma: float) -> float:
    """Half the admissible threshold log(1/sigma) / (log(1/sigma) + 1)."""
    if not 0.0 < sigma < 1.0 / 3.0:
        raise ConstraintError(f"sigma must satisfy 0 < sigma < 1/3, got {sigma}")
    ls = math.log(1.0 / sigma)
    return 0.5 * ls / (ls + 1.0)


def counting_gamma(beta: float = LOG_OMEGA / 2.0) -> float:
    """Threshold near 1 for which the bad-word count stays below e^(beta n).

    Solves a(1 + log((1-a)/a)) = beta/2 for the 2-density a by bisection and
    returns gamma = 1 - a.  Words with fewer than (1-gamma) n twos then grow
    strictly slower than e^(beta n).
    """

    def rate(a: float) -> float:
        return a * (1.0 + math.log((1.0 - a) / a))

    lo, hi = 1e-9, 0.2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rate(mid) < beta / 2.0:
            lo = mid
        else:
            hi = mid
    return 1.0 - 0.5 * (lo + hi)


def choose_c(gamma: float, sigma: float) -> float:
    """c with e^{4c} the geometric mean of 1 and sigma^{-(1-gamma)} e^{-gamma}."""
    margin = (1.0 - gamma) * math.log(1.0 / sigma) - gamma
    if margin <= 0.0:
        raise ConstraintError(
            f"gamma={gamma} violates sigma^-(1-gamma) e^-gamma > 1 for sigma={sigma}"
        )
    return margin / 8.0


def derive_constants(params: Parameters, gamma: float | None = None) -> HyperbolicConstants:
    """Bundle of expansion constants for the given parameters."""
    if gamma is None:
        gamma = default_gamma(params.sigma)
    c = choose_c(gamma, params.sigma)
    a_sup = math.log(1.0 / params.sigma)
    theta = 2.0 * c / (a_sup - 2.0 * c)
    min_side = min(params.rho, params.sigma, 1.0)
    return HyperbolicConstants(
        gamma=gamma,
        c=c,
        theta=theta,
        b1=-1.0,
        b2=math.log(1.0 / params.sigma),
        b3=-1.0,
        A_sup=a_sup,
        beta_exp=LOG_OMEGA / 2.0,
        epsilon=min_side / 4.0,
    )


def _pliss_indices(a: np.ndarray, c1: float) -> list[int]:
    """All m in 1..n whose every suffix sum over a[:m] is >= c1 per step.

    Equivalent formulation: m qualifies iff the drifted prefix sum
    S_m = sum(a[:m]) - c1 m is a weak running maximum of (S_0=0, S_1, ...).
    """
    s = np.cumsum(a - c1)
    run_max = np.maximum.accumulate(np.concatenate(([0.0], s[:-1])))
    mask = s >= run_max
    return [int(i) + 1 for i in np.nonzero(mask)[0]]


def pliss_times(a, c1: float, c2: float, A_sup: float) -> list[int]:
    """Pliss times of a real sequence, with validated hypotheses.

    Preconditions: every a_t <= A_sup, sum(a) > c2 n, and c1 < c2.  The
    returned indices are exactly those m whose suffix sums all satisfy
    a_k + ... + a_{m-1} >= c1 (m - k); their count exceeds
    theta n with theta = (c2 - c1) / (A_sup - c1).
    """
    a = np.asarray(a, dtype=float)
    n = len(a)
    if n == 0:
        raise ConstraintError("empty sequence")
    if not c1 < c2:
        raise ConstraintError(f"need c1 < c2, got c1={c1}, c2={c2}")
    if np.max(a) > A_sup:
        raise ConstraintError(f"sequence exceeds the stated bound A_sup={A_sup}")
    if not np.sum(a) > c2 * n:
        raise ConstraintError(f"sum {np.sum(a)} does not exceed c2 n = {c2 * n}")
    return _pliss_indices(a, c1)


def word_expansions(word, k: HyperbolicConstants) -> np.ndarray:
    """Per-symbol log-expansion lower bounds b_{a_j} of a word."""
    b = np.array([k.b1, k.b2, k.b3])
    w = np.asarray(word, dtype=np.int64)
    return b[w - 1]


def hyperbolic_times_of_word(word, k: HyperbolicConstants) -> list[int]:
    """Prefix lengths m whose length-m cylinder is hyperbolic (symbolic test)."""
    if not is_admissible(word):
        raise ConstraintError(f"word {tuple(word)} is not admissible")
    return _pliss_indices(word_expansions(word, k), 2.0 * k.c)


def is_hyperbolic_cylinder(word, k: HyperbolicConstants) -> bool:
    """True iff every suffix of the word has b-sum >= 2c per step."""
    word = tuple(word)
    times = hyperbolic_times_of_word(word, k)
    return len(word) in times


def hyperbolic_word_mask(word_matrix: np.ndarray, k: HyperbolicConstants) -> np.ndarray:
    """Vectorized is_hyperbolic_cylinder over an (N, n) word matrix."""
    b = np.array([k.b1, k.b2, k.b3])
    vals = b[word_matrix.astype(np.int64) - 1] - 2.0 * k.c
    s = np.cumsum(vals, axis=1)
    if s.shape[1] == 1:
        return s[:, -1] >= 0.0
    prior = np.maximum.accumulate(
        np.concatenate([np.zeros((s.shape[0], 1)), s[:, :-1]], axis=1), axis=1
    )
    return s[:, -1] >= np.maximum(0.0, prior[:, -1])


def pointwise_hyperbolic_times(log_expansions, c: float) -> list[int]:
    """Hyperbolic times along an orbit from its true log-expansion sequence."""
    return _pliss_indices(np.asarray(log_expansions, dtype=float), 2.0 * c)


def orbit_log_expansions(points: list[PlanePoint], params: Parameters) -> np.ndarray:
    """log |J^c| along a list of orbit points."""
    return np.array([center_log_expansion(p, params) for p in points])
