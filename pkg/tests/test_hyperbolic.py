import math

import numpy as np
import pytest

from horseshoe_thermo import hyperbolic as H
from horseshoe_thermo import symbolic as sy
from horseshoe_thermo.errors import ConstraintError
from horseshoe_thermo.maps import Parameters


def pliss_oracle(a, c1):
    """Definition-literal Pliss times: direct suffix sums, O(n^2)."""
    n = len(a)
    out = []
    for m in range(1, n + 1):
        if all(sum(a[j] for j in range(k, m)) >= c1 * (m - k) for k in range(m)):
            out.append(m)
    return out


def test_default_gamma(params):
    g = H.default_gamma(params.sigma)
    assert abs(g - 0.5 * math.log(4.0) / (math.log(4.0) + 1.0)) < 1e-15
    assert abs(g - 0.2904701) < 1e-6
    # always satisfies the strict expansion-margin inequality
    for sigma in (0.05, 0.1, 0.2, 0.3, 0.33):
        gg = H.default_gamma(sigma)
        assert sigma ** (-(1.0 - gg)) * math.exp(-gg) > 1.0


def test_choose_c(params):
    g = H.default_gamma(params.sigma)
    c = H.choose_c(g, params.sigma)
    assert abs(c - 0.0866434) < 1e-6
    assert abs(math.exp(4 * c) - math.sqrt(2.0)) < 1e-12
    upper = params.sigma ** (-(1 - g)) * math.exp(-g)
    assert 1.0 < math.exp(4 * c) < upper
    assert abs(upper - 2.0) < 1e-12
    # limit gamma -> 0 gives log(sigma^-1)/8
    assert abs(H.choose_c(1e-12, params.sigma) - math.log(4.0) / 8.0) < 1e-9
    with pytest.raises(ConstraintError):
        H.choose_c(0.9, params.sigma)


def test_geometric_mean_property_grid():
    for sigma in (0.05, 0.15, 0.25, 0.32):
        for frac in (0.2, 0.5, 0.9):
            g = frac * math.log(1 / sigma) / (math.log(1 / sigma) + 1.0)
            c = H.choose_c(g, sigma)
            upper = sigma ** (-(1 - g)) * math.exp(-g)
            assert 1.0 < math.exp(4 * c) < upper


def test_constants_bundle(params, constants):
    k = constants
    assert k.b1 == k.b3 == -1.0
    assert k.b2 == math.log(1.0 / params.sigma)
    assert k.A_sup == math.log(1.0 / params.sigma)
    assert abs(k.theta - 2 * k.c / (k.A_sup - 2 * k.c)) < 1e-15
    assert abs(k.theta - 1.0 / 7.0) < 1e-12
    assert k.beta_exp == sy.LOG_OMEGA / 2.0
    assert k.epsilon == 0.0625


def test_pliss_examples(constants):
    k = constants
    # constant maximal sequence: every index is a Pliss time
    a = [k.A_sup] * 10
    assert H.pliss_times(a, 2 * k.c, 4 * k.c, k.A_sup) == list(range(1, 11))
    # (b2, b3): index 1 qualifies, index 2 fails
    assert H._pliss_indices(np.array([k.b2, k.b3]), 2 * k.c) == [1]


def test_pliss_preconditions(constants):
    k = constants
    with pytest.raises(ConstraintError):
        H.pliss_times([0.0, 0.0], 2 * k.c, 4 * k.c, k.A_sup)  # sum too small
    with pytest.raises(ConstraintError):
        H.pliss_times([k.A_sup + 1.0], 2 * k.c, 4 * k.c, k.A_sup)  # exceeds bound
    with pytest.raises(ConstraintError):
        H.pliss_times([k.A_sup], 4 * k.c, 2 * k.c, k.A_sup)  # c1 >= c2


def test_pliss_density_guarantee(constants, rng):
    k = constants
    for _ in range(200):
        n = int(rng.integers(5, 60))
        a = rng.uniform(-1.0, k.A_sup, n)
        if a.sum() <= 4 * k.c * n:
            continue
        times = H.pliss_times(a, 2 * k.c, 4 * k.c, k.A_sup)
        assert len(times) > k.theta * n
        assert times == pliss_oracle(list(a), 2 * k.c)


def test_hyperbolic_cylinder_examples(constants):
    k = constants
    assert not H.is_hyperbolic_cylinder((1, 1, 1, 1), k)
    assert H.is_hyperbolic_cylinder((3, 2), k)
    assert not H.is_hyperbolic_cylinder((2, 3), k)
    assert H.hyperbolic_times_of_word((1, 1, 1, 1, 1), k) == []
    # alternating word: odd prefixes (ending in 2) are hyperbolic
    assert H.hyperbolic_times_of_word((2, 3, 2, 3, 2, 3, 2), k) == [1, 3, 5, 7]


def test_oracle_equivalence_exhaustive(constants):
    k = constants
    for n in range(1, 15):
        words = sy.word_matrix(n)
        mask = H.hyperbolic_word_mask(words, k)
        for i, row in enumerate(words):
            w = tuple(int(s) for s in row)
            b = [k.b_of(s) for s in w]
            expected = pliss_oracle(b, 2 * k.c)
            assert H.hyperbolic_times_of_word(w, k) == expected
            assert bool(mask[i]) == (n in expected)


def test_oracle_equivalence_random(constants, rng):
    k = constants
    for _ in range(1000):
        w = sy.random_word(50, rng)
        b = [k.b_of(s) for s in w]
        assert H.hyperbolic_times_of_word(w, k) == pliss_oracle(b, 2 * k.c)


def test_symbolic_criterion_sound_for_pointwise(params, constants):
    """Symbolic hyperbolicity implies the pointwise product bound at samples."""
    from horseshoe_thermo.maps import apply_G, center_log_expansion, cylinder_sample

    k = constants
    for n in range(1, 13):
        words = sy.word_matrix(n)
        mask = H.hyperbolic_word_mask(words, k)
        for row in words[mask]:
            w = tuple(int(s) for s in row)
            p = cylinder_sample(w, params)
            logs = []
            cur = p
            for j in range(n):
                logs.append(center_log_expansion(cur, params))
                if j < n - 1:
                    cur = apply_G(cur, params)
            for kk in range(n):
                assert sum(logs[kk:]) >= 2 * k.c * (n - kk) - 1e-12


def test_prefix_monotone_structure(constants):
    """Appending a symbol keeps earlier hyperbolic times listed."""
    k = constants
    for w in sy.enumerate_words(8):
        times = set(H.hyperbolic_times_of_word(w, k))
        for m in range(1, 9):
            prefix_times = set(H.hyperbolic_times_of_word(w[:m], k))
            assert prefix_times == {t for t in times if t <= m}


def test_density_over_good_words_default(params, constants):
    k = constants
    checked = 0
    for n in range(1, 21):
        words = sy.word_matrix(n)
        weak = (words != 2).sum(axis=1)
        for i in np.nonzero(weak <= k.gamma * n)[0]:
            w = tuple(int(s) for s in words[i])
            assert len(H.hyperbolic_times_of_word(w, k)) > k.theta * n
            checked += 1
    # the default gamma sits below 1/2, so only (2) at n=1 is non-bad
    assert checked == 1


def test_density_over_good_words_nonvacuous(params):
    k = H.derive_constants(params, gamma=0.55)
    checked = 0
    for n in range(1, 19):
        words = sy.word_matrix(n)
        weak = (words != 2).sum(axis=1)
        for i in np.nonzero(weak <= k.gamma * n)[0]:
            w = tuple(int(s) for s in words[i])
            assert len(H.hyperbolic_times_of_word(w, k)) > k.theta * n
            checked += 1
    assert checked > 200


def test_counting_gamma_solves_rate_equation():
    g = H.counting_gamma()
    a = 1.0 - g
    assert abs(a * (1.0 + math.log((1.0 - a) / a)) - sy.LOG_OMEGA / 4.0) < 1e-10
    assert 0.97 < g < 0.98
