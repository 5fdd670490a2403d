import math

import numpy as np
import pytest

from horseshoe_thermo import symbolic as sy
from horseshoe_thermo.errors import CapacityError, ConstraintError, InvalidSymbolError, MapDomainError


def test_admissibility_examples():
    assert sy.is_admissible((1, 1, 2, 3))
    assert not sy.is_admissible((2, 1))
    assert sy.is_admissible((3, 2, 3, 1, 2, 3))


def test_admissibility_rejects_bad_symbols():
    with pytest.raises(InvalidSymbolError):
        sy.is_admissible((1, 4))
    with pytest.raises(InvalidSymbolError):
        sy.is_admissible(())


def test_every_two_followed_by_three():
    for n in range(2, 10):
        for w in sy.enumerate_words(n):
            for a, b in zip(w, w[1:]):
                if a == 2:
                    assert b == 3


def test_enumeration_small():
    assert sy.enumerate_words(1) == [(1,), (2,), (3,)]
    assert sy.enumerate_words(2) == [(1, 1), (1, 2), (2, 3), (3, 1), (3, 2)]
    words3 = sy.enumerate_words(3)
    assert len(words3) == 8
    assert words3[-1] == (3, 2, 3)
    assert words3 == sorted(words3)


def test_count_matches_enumeration():
    for n in range(1, 15):
        assert sy.count_words(n) == len(sy.enumerate_words(n))


def test_fibonacci_recurrence():
    for n in range(3, 40):
        assert sy.count_words(n) == sy.count_words(n - 1) + sy.count_words(n - 2)


def test_count_examples():
    assert sy.count_words(1) == 3
    assert sy.count_words(3) == 8
    assert sy.count_words(10) == 233


def test_entropy_estimates():
    assert abs(sy.entropy_growth_estimate(40) - sy.LOG_OMEGA) < 1e-12
    # The plain (1/n) log N(n) estimator carries a provable O(1/n) offset.
    assert abs(sy.entropy_cesaro_estimate(40) - sy.LOG_OMEGA) < 0.02


def test_capacity_cap(monkeypatch):
    monkeypatch.setenv("HT_MAX_DEPTH", "6")
    with pytest.raises(CapacityError):
        sy.word_matrix(7)


def test_bad_word_examples():
    assert sy.is_bad_word((1, 1), 0.5)
    assert not sy.is_bad_word((2, 3), 0.5)
    assert sy.is_bad_word((3, 1, 2, 3), 0.5)


def test_bad_count_examples():
    assert sy.count_bad_words_exact(0.5, 2) == 2
    assert sy.count_bad_words_exact(0.99, 1) == 2
    # gamma near 1 counts words with zero 2s: (1,1,1) and (3,1,1).
    assert sy.count_bad_words_exact(0.99, 3) == 2


def test_bad_count_equals_filter():
    for n in range(1, 13):
        for gamma in (0.29, 0.5, 0.75, 0.9, 0.99):
            brute = sum(1 for w in sy.enumerate_words(n) if sy.is_bad_word(w, gamma))
            assert sy.count_bad_words_exact(gamma, n) == brute


def test_k_twos_totals():
    for n in range(1, 20):
        assert sum(sy.count_words_with_k_twos(n)) == sy.count_words(n)


def test_upper_bound_examples():
    assert sy.bad_words_upper_bound(0.5, 2) == 4
    assert sy.bad_words_upper_bound(0.9, 10) == 20
    for gamma in (0.3, 0.6, 0.9):
        assert sy.bad_words_upper_bound(gamma, 1) == 2
    with pytest.raises(ConstraintError):
        sy.bad_words_upper_bound(1.5, 4)


def test_upper_bound_dominates_exact_in_counting_regime():
    # The combinatorial expression undercounts words ending in a lone 2 (e.g.
    # gamma=0.9, n=11: exact 23 > 22), so domination is asserted only where
    # it provably holds: the counting threshold, where bad words carry no 2s.
    from horseshoe_thermo.hyperbolic import counting_gamma

    gamma = counting_gamma()
    for n in range(1, 39):
        assert sy.count_bad_words_exact(gamma, n) <= sy.bad_words_upper_bound(gamma, n)
    assert sy.count_bad_words_exact(0.5, 2) <= sy.bad_words_upper_bound(0.5, 2)
    assert sy.count_bad_words_exact(0.99, 1) <= sy.bad_words_upper_bound(0.99, 1)


def test_upper_bound_known_undercount():
    # Frozen counterexample documenting the trailing-2 gap in the expression.
    assert sy.count_bad_words_exact(0.9, 11) == 23
    assert sy.bad_words_upper_bound(0.9, 11) == 22


def test_stirling_bound_values():
    b = sy.binomial_stirling_bound(10, 3)
    assert math.comb(7, 3) <= b
    assert abs(b - 57.20388848578262) < 1e-9
    b2 = sy.binomial_stirling_bound(6, 1)
    assert math.comb(5, 1) <= b2
    assert abs(b2 - 5.0207348241619) < 1e-9
    assert math.comb(2, 2) <= sy.binomial_stirling_bound(4, 2)
    with pytest.raises(MapDomainError):
        sy.binomial_stirling_bound(4, 0)
    with pytest.raises(MapDomainError):
        sy.binomial_stirling_bound(5, 3)


def test_stirling_bound_dominates():
    for n in range(2, 61):
        for k in range(1, n // 2 + 1):
            assert math.comb(n - k, k) <= sy.binomial_stirling_bound(n, k)


def test_binomial_monotonicity():
    assert sy.binomial_monotonicity_check(100, 0.2)
    assert sy.binomial_monotonicity_check(100, 0.207)
    # Small lengths violate the large-n hypothesis; failures recorded.
    failures = [n for n in range(1, 31) if not sy.binomial_monotonicity_check(n, 0.2)]
    assert failures == [1, 2, 5]


def test_exponent_check_counting_gamma():
    from horseshoe_thermo.hyperbolic import counting_gamma

    rep = sy.bad_word_exponent_check(counting_gamma(), 1, 40)
    assert rep["n0"] == 3
    by_n = {r["n"]: r for r in rep["rows"]}
    assert not by_n[1]["holds"] and not by_n[2]["holds"]
    assert all(by_n[n]["holds"] for n in range(3, 41))


def test_exponent_check_out_of_hypothesis_flags_failures():
    rep = sy.bad_word_exponent_check(0.01, 1, 12)
    assert rep["n0"] is None
    assert any(not r["holds"] for r in rep["rows"])


def test_random_words_admissible(rng):
    for _ in range(50):
        assert sy.is_admissible(sy.random_word(30, rng))
