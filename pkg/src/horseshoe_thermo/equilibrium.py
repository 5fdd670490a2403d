"""Equilibrium state mu = h nu and its verification suites.

All integrals are exact sums over depth-d cylinders with the canonical
sample-point evaluation convention of the transfer module, under which the
discrete mu is shift-invariant to eigen-residual precision.  Orbit-level
estimators extend cylinder words by the mu-conditional symbol transitions,
giving arbitrarily long mu-typical itineraries from finite-depth data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, IntegrityError
from .hyperbolic import (
    HyperbolicConstants,
    _pliss_indices,
    hyperbolic_word_mask,
    word_expansions,
)
from .maps import Parameters, PlanePoint, center_log_expansion
from .symbolic import TRANSITIONS, enumerate_words, word_matrix
from .transfer import (
    CylinderFunction,
    CylinderMeasure,
    Potential,
    SpectralResult,
    T_n_bulk,
    birkhoff_sum,
    depth_samples,
    h_n_bulk,
)


@dataclass
class EquilibriumState:
    depth: int
    masses: CylinderMeasure
    h: CylinderFunction
    nu: CylinderMeasure
    lam: float
    pressure: float
    phi: Potential
    params: Parameters

    @property
    def words(self):
        return self.masses.words


def build_mu(spec: SpectralResult) -> EquilibriumState:
    """mu proportional to h(w) nu(w) per cylinder, renormalized."""
    h = spec.h.values
    if np.any(h <= 0.0):
        raise IntegrityError("eigenfunction has a nonpositive cylinder value")
    raw = h * spec.nu.masses
    masses = raw / raw.sum()
    return EquilibriumState(
        spec.depth,
        CylinderMeasure(spec.depth, masses, spec.nu.words),
        spec.h,
        spec.nu,
        spec.lam,
        spec.pressure,
        spec.phi,
        spec.params,
    )


def _marginal_pair(mu: EquilibriumState):
    """(shift marginal, prefix marginal) of mu at depth d-1, aligned arrays."""
    d = mu.depth
    prev = enumerate_words(d - 1)
    pidx = {w: i for i, w in enumerate(prev)}
    shift = np.zeros(len(prev))
    prefix = np.zeros(len(prev))
    sh = np.array([pidx[w[1:]] for w in mu.words], dtype=np.int64)
    pf = np.array([pidx[w[: d - 1]] for w in mu.words], dtype=np.int64)
    np.add.at(shift, sh, mu.masses.masses)
    np.add.at(prefix, pf, mu.masses.masses)
    return prev, shift, prefix


def invariance_residual(mu: EquilibriumState) -> float:
    """Max over depth-(d-1) cylinder indicators of |int psi o G dmu - int psi dmu|."""
    if mu.depth < 3:
        raise CapacityError("invariance residual needs depth >= 3")
    _, shift, prefix = _marginal_pair(mu)
    return float(np.abs(shift - prefix).max())


def integrate_potential(mu: EquilibriumState) -> float:
    """int phi dmu as an exact cylinder sum at the sample points."""
    rect, _, y = depth_samples(mu.depth, mu.params)
    vals = mu.phi.evaluate_arrays(rect.astype(np.int64), y)
    return float(np.dot(mu.masses.masses, vals))


def jacobian_nu(phi: Potential, lam: float, p: PlanePoint) -> float:
    """Conformal Jacobian of the reference measure: lam e^{-phi}."""
    return lam * math.exp(-phi.evaluate(p))


def jacobian_nu_n(phi: Potential, lam: float, p: PlanePoint, n: int, params: Parameters) -> float:
    """n-step Jacobian lam^n e^{-S_n phi} (chain rule in closed form)."""
    return lam**n * math.exp(-birkhoff_sum(phi, p, n, params))


def h_marginal(mu: EquilibriumState) -> CylinderFunction:
    """nu-weighted average of h on depth-(d-1) cylinders."""
    d = mu.depth
    prev = enumerate_words(d - 1)
    pidx = {w: i for i, w in enumerate(prev)}
    num = np.zeros(len(prev))
    den = np.zeros(len(prev))
    pf = np.array([pidx[w[: d - 1]] for w in mu.words], dtype=np.int64)
    np.add.at(num, pf, mu.h.values * mu.nu.masses)
    np.add.at(den, pf, mu.nu.masses)
    return CylinderFunction(d - 1, num / den, prev)


def jacobian_mu_word(mu: EquilibriumState, hbar: CylinderFunction, word) -> float:
    """J_mu G on a depth-d cylinder: lam (hbar o shift) / hbar e^{-phi(sample)}."""
    from .maps import cylinder_sample

    word = tuple(word)
    d = mu.depth
    p = cylinder_sample(word, mu.params)
    return (
        mu.lam
        * hbar[word[1:]]
        / hbar[word[: d - 1]]
        * math.exp(-mu.phi.evaluate(p))
    )


def preimage_jacobian_sum(mu: EquilibriumState, word) -> float:
    """sum over inverse branches y of 1 / J_mu G(y) at a cylinder target.

    Uses the word-level convention: the target is the sample of `word`, its
    preimages are the samples of the one-symbol extensions, and h is read on
    depth-d truncations.  Equals (M h)(word) / (lam h(word)).
    """
    from .symbolic import A_MATRIX

    word = tuple(word)
    d = mu.depth
    from .maps import cylinder_sample

    total = 0.0
    for source in (1, 2, 3):
        if A_MATRIX[source - 1][word[0] - 1] != 1:
            continue
        ext = (source,) + word
        y = cylinder_sample(ext, mu.params)
        h_y = mu.h[ext[:d]]
        h_gy = mu.h[word]
        j = mu.lam * h_gy / h_y * math.exp(-mu.phi.evaluate(y))
        total += 1.0 / j
    return total


@dataclass
class GibbsReport:
    rows: list
    k2_estimates: dict


def gibbs_report(
    mu: EquilibriumState,
    n_max: int,
    k: HyperbolicConstants,
    use_mu: bool = False,
) -> GibbsReport:
    """Per-n extremes of nu(R^n) / exp(S_n phi - P n) over hyperbolic cylinders.

    K2(n) is the smallest constant with ratios in [1/K2, K2] up to length n.
    """
    if n_max >= mu.depth:
        raise CapacityError("gibbs report needs n_max < depth")
    from .maps import cylinder_sample

    measure = mu.masses if use_mu else mu.nu
    rows = []
    running_k2 = 0.0
    k2 = {}
    for n in range(1, n_max + 1):
        marg = measure.marginal(n)
        words = word_matrix(n)
        mask = hyperbolic_word_mask(words, k)
        ratios = []
        for w in words[mask]:
            wt = tuple(int(s) for s in w)
            s_n = birkhoff_sum(mu.phi, cylinder_sample(wt, mu.params), n, mu.params)
            ratios.append(marg[wt] / math.exp(s_n - mu.pressure * n))
        if ratios:
            lo, hi = min(ratios), max(ratios)
            running_k2 = max(running_k2, hi, 1.0 / lo)
        else:
            lo = hi = float("nan")
        rows.append({"n": n, "count": len(ratios), "min": lo, "max": hi})
        k2[n] = running_k2
    return GibbsReport(rows, k2)


def bad_mass_decay(
    mu: EquilibriumState, gamma: float, n_max: int, use_mu: bool = False
) -> list[dict]:
    """nu-mass of bad cylinders per length, with the explicit decay envelope
    lam^-n e^{n sup phi} #I(gamma, n)."""
    if n_max > mu.depth:
        raise CapacityError("decay scan needs n_max <= depth")
    measure = mu.masses if use_mu else mu.nu
    rows = []
    for n in range(1, n_max + 1):
        marg = measure.marginal(n)
        words = word_matrix(n)
        weak = (words != 2).sum(axis=1)
        bad = weak > gamma * n
        s_n = float(marg.masses[bad].sum())
        envelope = mu.lam ** (-n) * math.exp(n * mu.phi.sup_val) * int(bad.sum())
        rows.append({"n": n, "mass": s_n, "count": int(bad.sum()), "envelope": envelope})
    return rows


def first_hyperbolic_time_stats(
    mu: EquilibriumState, k: HyperbolicConstants, n_max: int
) -> dict:
    """Tail masses nu{first hyperbolic time > n} and the truncated integral."""
    if n_max > mu.depth:
        raise CapacityError("tail scan needs n_max <= depth")
    tails = []
    integral = 1.0  # n = 0 term: nu{n1 > 0} = 1
    for n in range(1, n_max + 1):
        marg = mu.nu.marginal(n)
        words = word_matrix(n)
        # no prefix length m <= n is hyperbolic
        vals = word_expansions(words.reshape(-1), k).reshape(words.shape) - 2.0 * k.c
        s = np.cumsum(vals, axis=1)
        run = np.maximum.accumulate(
            np.concatenate([np.zeros((s.shape[0], 1)), s[:, :-1]], axis=1), axis=1
        )
        is_time = s >= np.maximum(0.0, run)
        never = ~is_time.any(axis=1)
        tail = float(marg.masses[never].sum())
        tails.append({"n": n, "tail": tail})
        integral += tail
    return {"tails": tails, "truncated_integral": integral}


# --- mu-conditional symbolic sampling -------------------------------------


class WordSampler:
    """Markov extension of mu: windows of d-1 symbols, child/parent ratios."""

    def __init__(self, mu: EquilibriumState):
        self.mu = mu
        d = mu.depth
        self.window_words = enumerate_words(d - 1)
        widx = {w: i for i, w in enumerate(self.window_words)}
        marg = mu.masses.marginal(d - 1)
        self.window_mass = marg.masses
        nwin = len(self.window_words)
        self.next_symbols = [TRANSITIONS[w[-1]] for w in self.window_words]
        self.next_prob = np.zeros((nwin, 2))
        self.next_window = np.zeros((nwin, 2), dtype=np.int64)
        for w, m in zip(mu.words, mu.masses.masses):
            i = widx[w[: d - 1]]
            s = w[-1]
            slot = self.next_symbols[i].index(s)
            self.next_prob[i, slot] += m
            self.next_window[i, slot] = widx[w[1:]]
        totals = self.next_prob.sum(axis=1, keepdims=True)
        totals[totals == 0.0] = 1.0
        self.next_prob /= totals

    def sample_word(self, length: int, rng: np.random.Generator) -> tuple[int, ...]:
        """A mu-distributed itinerary of the given length."""
        i = int(rng.choice(len(self.window_words), p=self.window_mass / self.window_mass.sum()))
        word = list(self.window_words[i])
        while len(word) < length:
            probs = self.next_prob[i]
            slot = 0 if len(self.next_symbols[i]) == 1 else int(rng.random() >= probs[0])
            word.append(self.next_symbols[i][slot])
            i = int(self.next_window[i, slot])
        return tuple(word[:length])


@dataclass
class OrbitSample:
    word: tuple
    hyperbolic_times: list
    pointwise_times: list
    flagged: bool = False


def sample_orbits(
    mu: EquilibriumState,
    k: HyperbolicConstants,
    orbit_len: int,
    count: int,
    seed: int,
) -> list[OrbitSample]:
    """mu-sampled symbolic orbits with symbolic and pointwise hyperbolic times.

    Pointwise times use true log-expansions along the realized pseudo-orbit
    (window sample points), which is the defining suffix-product test.
    """
    rng = np.random.default_rng(seed)
    sampler = WordSampler(mu)
    d = mu.depth
    rect, _, y = depth_samples(d - 1, mu.params)
    widx = {w: i for i, w in enumerate(enumerate_words(d - 1))}
    logexp_by_window = np.where(
        rect == 2,
        math.log(1.0 / mu.params.sigma),
        np.log(np.e / (y * (1.0 - np.e) + np.e) ** 2),
    )
    out = []
    for _ in range(count):
        word = sampler.sample_word(orbit_len + d, rng)
        sym_times = _pliss_indices(word_expansions(word[:orbit_len], k), 2.0 * k.c)
        windows = [word[j : j + d - 1] for j in range(orbit_len)]
        le = np.array([logexp_by_window[widx[w]] for w in windows])
        pw_times = _pliss_indices(le, 2.0 * k.c)
        out.append(
            OrbitSample(word[:orbit_len], sym_times, pw_times, flagged=len(pw_times) < 3)
        )
    return out


def nonlacunary_check(samples: list[OrbitSample], theta: float) -> dict:
    """Tail mean of consecutive hyperbolic-time ratios and the time density."""
    tail_means = []
    densities = []
    flagged = 0
    for s in samples:
        times = s.pointwise_times
        if len(times) < 3:
            flagged += 1
            continue
        ratios = [b / a for a, b in zip(times, times[1:])]
        tail = ratios[len(ratios) // 2 :]
        tail_means.append(sum(tail) / len(tail))
        densities.append(len(times) / len(s.word))
    return {
        "samples": len(samples),
        "flagged": flagged,
        "tail_mean": sum(tail_means) / len(tail_means) if tail_means else float("nan"),
        "min_density": min(densities) if densities else float("nan"),
        "theta": theta,
    }


def rokhlin_entropy(mu: EquilibriumState, mc_orbits: int = 100, mc_len: int = 200, seed: int = 1) -> dict:
    """Entropy three ways: formula Jacobian cylinder sum, Monte Carlo Birkhoff
    of the same log-Jacobian, and the block conditional entropy H_d - H_{d-1}."""
    hbar = h_marginal(mu)
    d = mu.depth
    log_lam = math.log(mu.lam)
    rect, _, y = depth_samples(d, mu.params)
    phi_vals = mu.phi.evaluate_arrays(rect.astype(np.int64), y)
    hb = hbar.values
    hidx = hbar.index
    sh = np.array([hidx[w[1:]] for w in mu.words], dtype=np.int64)
    pf = np.array([hidx[w[: d - 1]] for w in mu.words], dtype=np.int64)
    logj = log_lam + np.log(hb[sh]) - np.log(hb[pf]) - phi_vals
    masses = mu.masses.masses
    entropy_cyl = float(np.dot(masses, logj))

    # Monte Carlo Birkhoff average of the same word-level log-Jacobian.
    rng = np.random.default_rng(seed)
    sampler = WordSampler(mu)
    widx = {w: i for i, w in enumerate(mu.words)}
    acc = 0.0
    cnt = 0
    for _ in range(mc_orbits):
        word = sampler.sample_word(mc_len + d, rng)
        for j in range(mc_len):
            acc += logj[widx[word[j : j + d]]]
            cnt += 1
    entropy_mc = acc / cnt

    m_d = masses
    m_prev = mu.masses.marginal(d - 1).masses
    h_d = -float(np.dot(m_d, np.log(m_d, where=m_d > 0, out=np.zeros_like(m_d))))
    h_prev = -float(
        np.dot(m_prev, np.log(m_prev, where=m_prev > 0, out=np.zeros_like(m_prev)))
    )
    return {
        "cylinder": entropy_cyl,
        "monte_carlo": entropy_mc,
        "conditional_block": h_d - h_prev,
    }


def pressure_identity_residual(mu: EquilibriumState) -> dict:
    """|entropy + int phi dmu - log lam| for the cylinder and block estimators."""
    ent = rokhlin_entropy(mu)
    phi_int = integrate_potential(mu)
    log_lam = math.log(mu.lam)
    return {
        "entropy": ent,
        "phi_integral": phi_int,
        "pressure": log_lam,
        "residual_cylinder": abs(ent["cylinder"] + phi_int - log_lam),
        "residual_block": abs(ent["conditional_block"] + phi_int - log_lam),
        "residual_monte_carlo": abs(ent["monte_carlo"] + phi_int - log_lam),
    }


def lyapunov_estimate(
    mu: EquilibriumState,
    k: HyperbolicConstants,
    orbit_len: int = 500,
    count: int = 100,
    seed: int = 1,
) -> dict:
    """Birkhoff average of the center log-expansion along mu-sampled orbits.

    Reports both the true pointwise average and the symbolic lower-bound
    average (using b_i per symbol), against the 8c threshold.
    """
    rng = np.random.default_rng(seed)
    sampler = WordSampler(mu)
    d = mu.depth
    rect, _, y = depth_samples(d - 1, mu.params)
    logexp = np.where(
        rect == 2,
        math.log(1.0 / mu.params.sigma),
        np.log(np.e / (y * (1.0 - np.e) + np.e) ** 2),
    )
    widx = {w: i for i, w in enumerate(enumerate_words(d - 1))}
    per_orbit = []
    per_orbit_sym = []
    for _ in range(count):
        word = sampler.sample_word(orbit_len + d, rng)
        vals = [logexp[widx[word[j : j + d - 1]]] for j in range(orbit_len)]
        per_orbit.append(sum(vals) / orbit_len)
        b = word_expansions(word[:orbit_len], k)
        per_orbit_sym.append(float(b.mean()))
    return {
        "pointwise": float(np.mean(per_orbit)),
        "pointwise_std": float(np.std(per_orbit)),
        "symbolic": float(np.mean(per_orbit_sym)),
        "threshold_8c": 8.0 * k.c,
    }


def uniqueness_crosscheck(
    mu: EquilibriumState,
    k: HyperbolicConstants,
    n_points: int = 1000,
    criterion: str = "none",
) -> dict:
    """Consistency diagnostics between independently constructed objects.

    (i) relative sup gap between the matrix eigenfunction and the Cesaro
        preimage-sum path at n = depth over all cylinder samples;
    (ii) Jensen diagnostics: sum of 1/J_mu over preimages equals 1, and the
        weighted log-vs-log-of-sum gap for q = g J_mu vanishes.
    """
    from .maps import cylinder_sample

    d = mu.depth
    words = mu.words
    targets = [cylinder_sample(w, mu.params) for w in words]
    hn = h_n_bulk(mu.phi, targets, d, mu.lam, k, mu.params, criterion=criterion)
    a = hn / hn.max()
    b = mu.h.values / mu.h.values.max()
    sup_gap = float(np.abs(a - b).max())

    step = max(1, len(words) // n_points)
    partition_dev = 0.0
    jensen_gap = 0.0
    for w in words[::step][:n_points]:
        s = preimage_jacobian_sum(mu, w)
        partition_dev = max(partition_dev, abs(s - 1.0))
        # q_i = g(y_i) J_mu(y_i) with g = 1/J_mu, so sum p log q must be 0.
        jensen_gap = max(jensen_gap, abs(math.log(s)))
    return {
        "h_cross_sup_gap": sup_gap,
        "criterion": criterion,
        "partition_max_dev": partition_dev,
        "jensen_gap": jensen_gap,
        "points": min(n_points, (len(words) + step - 1) // step),
    }
