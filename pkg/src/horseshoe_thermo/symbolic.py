"""Exact symbolic dynamics on the 3-symbol subshift.

Admissible words follow the transition matrix A = [[1,1,0],[0,0,1],[1,1,0]]
over the alphabet {1, 2, 3}: every 2 is immediately followed by a 3, and 1s
and 3s are followed by 1 or 2.  Counting is done in exact integer arithmetic;
floats appear only in the Stirling-style bounds.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import CapacityError, ConstraintError, InvalidSymbolError, MapDomainError

SYMBOLS = (1, 2, 3)
TRANSITIONS = {1: (1, 2), 2: (3,), 3: (1, 2)}
A_MATRIX = ((1, 1, 0), (0, 0, 1), (1, 1, 0))

OMEGA = (1.0 + math.sqrt(5.0)) / 2.0
LOG_OMEGA = math.log(OMEGA)

DEFAULT_MAX_DEPTH = 22

_word_cache: dict[int, np.ndarray] = {}
_tuple_cache: dict[int, list[tuple[int, ...]]] = {}


def max_depth() -> int:
    """Enumeration depth cap; override with the HT_MAX_DEPTH env variable."""
    return int(os.environ.get("HT_MAX_DEPTH", DEFAULT_MAX_DEPTH))


def _check_symbols(symbols) -> None:
    for s in symbols:
        if s not in (1, 2, 3):
            raise InvalidSymbolError(f"symbol {s!r} is not in {{1, 2, 3}}")


def is_admissible(symbols) -> bool:
    """True iff every adjacent pair of symbols is an allowed transition."""
    symbols = tuple(symbols)
    if not symbols:
        raise InvalidSymbolError("empty symbol sequence")
    _check_symbols(symbols)
    return all(A_MATRIX[a - 1][b - 1] == 1 for a, b in zip(symbols, symbols[1:]))


def word_matrix(n: int) -> np.ndarray:
    """All admissible words of length n as an (N, n) int8 array, lexicographic."""
    if n < 1:
        raise CapacityError(f"word length must be >= 1, got {n}")
    if n > max_depth():
        raise CapacityError(f"length {n} exceeds the depth cap {max_depth()}")
    if n in _word_cache:
        return _word_cache[n]
    if n == 1:
        arr = np.array([[1], [2], [3]], dtype=np.int8)
    else:
        prev = word_matrix(n - 1)
        rows = []
        for word in prev:
            for nxt in TRANSITIONS[int(word[-1])]:
                rows.append(np.append(word, np.int8(nxt)))
        arr = np.array(rows, dtype=np.int8)
    arr.setflags(write=False)
    _word_cache[n] = arr
    return arr


def enumerate_words(n: int) -> list[tuple[int, ...]]:
    """Admissible words of length n as tuples, in lexicographic order."""
    if n not in _tuple_cache:
        _tuple_cache[n] = [tuple(int(s) for s in row) for row in word_matrix(n)]
    return _tuple_cache[n]


def count_words(n: int) -> int:
    """Exact number of admissible words of length n (integer matrix power)."""
    if n < 1:
        raise CapacityError(f"word length must be >= 1, got {n}")
    # Row vector of per-last-symbol counts, multiplied through A n-1 times.
    counts = [1, 1, 1]
    for _ in range(n - 1):
        counts = [
            sum(counts[i] * A_MATRIX[i][j] for i in range(3)) for j in range(3)
        ]
    return sum(counts)


def count_words_with_k_twos(n: int) -> list[int]:
    """Exact count of admissible length-n words per number of 2-symbols.

    Returns a list c with c[k] = #{admissible words of length n with k twos}.
    """
    if n < 1:
        raise CapacityError(f"word length must be >= 1, got {n}")
    kmax = (n + 1) // 2
    # table[s][k]: words of current length ending in symbol s+1 with k twos
    table = [[0] * (kmax + 1) for _ in range(3)]
    table[0][0] = 1
    table[2][0] = 1
    if kmax >= 1:
        table[1][1] = 1
    for _ in range(n - 1):
        new = [[0] * (kmax + 1) for _ in range(3)]
        for s in range(3):
            for k in range(kmax + 1):
                cnt = table[s][k]
                if cnt == 0:
                    continue
                for t in TRANSITIONS[s + 1]:
                    dk = 1 if t == 2 else 0
                    if k + dk <= kmax:
                        new[t - 1][k + dk] += cnt
        table = new
    return [sum(table[s][k] for s in range(3)) for k in range(kmax + 1)]


def is_bad_word(word, gamma: float) -> bool:
    """True iff the count of symbols in {1, 3} strictly exceeds gamma * n."""
    word = tuple(word)
    _check_symbols(word)
    n = len(word)
    weak = sum(1 for s in word if s != 2)
    return weak > gamma * n


def count_bad_words_exact(gamma: float, n: int) -> int:
    """Exact cardinality of the bad-word set at proportion threshold gamma.

    Uses the exact per-k-twos counts, which agrees with filtering the full
    enumeration by is_bad_word (a word with k twos has n - k weak symbols).
    """
    per_k = count_words_with_k_twos(n)
    return sum(cnt for k, cnt in enumerate(per_k) if (n - k) > gamma * n)


def bad_words_upper_bound(gamma: float, n: int) -> int:
    """Combinatorial upper-bound sum 2 * C(n-k, k) for k up to floor((1-gamma)n).

    Exact integer arithmetic.  The bound is only meaningful for gamma large
    enough that bad words are 2-poor; see bad_word_exponent_check.
    """
    if not 0.0 < gamma < 1.0:
        raise ConstraintError(f"gamma must lie in (0, 1), got {gamma}")
    # Nudge against float noise in (1-gamma)*n (e.g. 0.1*10 = 0.999...98);
    # rounding the cut upward only loosens an upper bound.
    kmax = math.floor((1.0 - gamma) * n + 1e-9)
    total = 0
    for k in range(0, kmax + 1):
        if n - k >= 0:
            total += 2 * math.comb(n - k, k)  # comb is 0 when k > n - k
    return total


def binomial_stirling_bound(n: int, k: int) -> float:
    """Stirling-style upper bound for C(n-k, k); requires 0 < k and n-2k >= 0."""
    if k <= 0 or n - 2 * k < 0:
        raise MapDomainError(f"need 0 < k and n - 2k >= 0, got n={n}, k={k}")
    return (
        math.exp(k)
        / (math.sqrt(2.0 * math.pi * k) * math.exp(1.0 / (12.0 * k + 1.0)))
        * (n / k - 1.0) ** k
    )


def binomial_monotonicity_check(n: int, alpha: float) -> bool:
    """True iff C(n-k, k) < C(n-(k+1), k+1) for all k <= floor(alpha * n)."""
    kmax = math.floor(alpha * n)
    for k in range(0, kmax + 1):
        lhs = math.comb(n - k, k) if n - k >= 0 else 0
        rhs = math.comb(n - k - 1, k + 1) if n - k - 1 >= 0 else 0
        if not lhs < rhs:
            return False
    return True


def bad_word_exponent_check(
    gamma: float, n_lo: int, n_hi: int, beta: float = LOG_OMEGA / 2.0
) -> dict:
    """Compare exact bad-word counts against e^(beta n) over a length range.

    Returns per-n rows (n, exact count, e^(beta n), holds) and the first n0
    from which the bound holds through n_hi (None if it never does).
    """
    rows = []
    for n in range(n_lo, n_hi + 1):
        exact = count_bad_words_exact(gamma, n)
        bound = math.exp(beta * n)
        rows.append({"n": n, "count": exact, "bound": bound, "holds": exact <= bound})
    n0 = None
    for row in rows:
        if row["holds"]:
            if n0 is None:
                n0 = row["n"]
        else:
            n0 = None
    return {"gamma": gamma, "beta": beta, "rows": rows, "n0": n0}


def entropy_growth_estimate(n: int) -> float:
    """Word-count growth estimate log N(n) - log N(n-1); converges to log omega."""
    if n < 2:
        raise CapacityError("growth estimate needs n >= 2")
    return math.log(count_words(n)) - math.log(count_words(n - 1))


def entropy_cesaro_estimate(n: int) -> float:
    """The slow estimator log(N(n))/n; biased by O(1/n), reported for context."""
    return math.log(count_words(n)) / n


def random_word(length: int, rng: np.random.Generator) -> tuple[int, ...]:
    """A uniformly-branching random admissible word (for test ensembles)."""
    word = [int(rng.integers(1, 4))]
    for _ in range(length - 1):
        nxt = TRANSITIONS[word[-1]]
        word.append(int(nxt[rng.integers(0, len(nxt))]))
    return tuple(word)
