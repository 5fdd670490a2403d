"""Transfer operator on cylinder functions: matrix discretization and spectra.

Functions and measures are piecewise constant on depth-d cylinders.  The
operator is Markov on words: the matrix row of a target word a has one entry
per admissible source symbol i, valued e^{phi(s)} at the canonical sample
point s of the depth-(d+1) cylinder (i, a).  This sampling convention makes
the discrete eigen-data exactly shift-consistent, so the equilibrium
identities downstream hold to eigen-residual precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    ConvergenceError,
    EscapeError,
    IntegrityError,
    MapDomainError,
)
from .hyperbolic import HyperbolicConstants, hyperbolic_word_mask
from .maps import (
    E,
    Parameters,
    PlanePoint,
    anchor,
    apply_G,
    cylinder_sample,
    g0_prime,
    inverse_branch,
    pullback_arrays,
)
from .symbolic import A_MATRIX, LOG_OMEGA, enumerate_words, max_depth, word_matrix

VARIATION_THRESHOLD = LOG_OMEGA / 2.0


@dataclass(frozen=True)
class Potential:
    """Holder potential family with certified sup/inf over the rectangles.

    Families:
      constant               params = (value,)
      affine_in_y            params = (offset, slope), phi = offset + slope * y
      center_log_derivative  params = (t, sigma), phi = t * log |J^c|
    """

    family: str
    params: tuple
    holder_C: float
    holder_delta: float
    sup_val: float
    inf_val: float

    @staticmethod
    def constant(value: float) -> "Potential":
        return Potential("constant", (float(value),), 0.0, 1.0, value, value)

    @staticmethod
    def affine_in_y(offset: float, slope: float) -> "Potential":
        lo = offset + min(slope, 0.0)
        hi = offset + max(slope, 0.0)
        return Potential("affine_in_y", (float(offset), float(slope)), abs(slope), 1.0, hi, lo)

    @staticmethod
    def center_log_derivative(t: float, sigma: float) -> "Potential":
        # log |J^c| ranges over [-1, 1] on R1/R3 and equals log(1/sigma) on R2.
        hi_base = max(1.0, math.log(1.0 / sigma))
        lo, hi = (-1.0, hi_base) if t >= 0.0 else (hi_base, -1.0)
        return Potential(
            "center_log_derivative",
            (float(t), float(sigma)),
            abs(t) * 2.0 * (E - 1.0),
            1.0,
            t * hi,
            t * lo,
        )

    @property
    def variation(self) -> float:
        return self.sup_val - self.inf_val

    def evaluate(self, p: PlanePoint) -> float:
        if self.family == "constant":
            return self.params[0]
        if self.family == "affine_in_y":
            return self.params[0] + self.params[1] * p.y
        t, sigma = self.params
        if p.rect == 2:
            return t * math.log(1.0 / sigma)
        return t * math.log(g0_prime(p.y))

    def evaluate_arrays(self, rect: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.family == "constant":
            return np.full(np.shape(y), self.params[0])
        if self.family == "affine_in_y":
            return self.params[0] + self.params[1] * y
        t, sigma = self.params
        d = y * (1.0 - E) + E
        vals = t * np.log(E / (d * d))
        return np.where(rect == 2, t * math.log(1.0 / sigma), vals)


def check_variation(phi: Potential) -> bool:
    """Admission gate: sup phi - inf phi strictly below (log omega)/2."""
    return phi.variation < VARIATION_THRESHOLD


# Cached per-depth word geometry: samples of every word at a given anchor
# fraction, as flat arrays aligned with the lexicographic word order.

_sample_cache: dict[tuple, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def depth_samples(depth: int, params: Parameters, frac: tuple[float, float] = (0.5, 0.5)):
    """(rect, x, y) arrays of cylinder sample points for all depth-d words."""
    key = (depth, params, frac)
    if key in _sample_cache:
        return _sample_cache[key]
    words = word_matrix(depth)
    if depth == 1:
        pts = [anchor(r, params, frac) for r in (1, 2, 3)]
        rect = np.array([1, 2, 3], dtype=np.int8)
        x = np.array([p.x for p in pts])
        y = np.array([p.y for p in pts])
    else:
        prev_rect, prev_x, prev_y = depth_samples(depth - 1, params, frac)
        prev_words = enumerate_words(depth - 1)
        prev_index = {w: i for i, w in enumerate(prev_words)}
        suffix = np.array(
            [prev_index[tuple(int(s) for s in row[1:])] for row in words], dtype=np.int64
        )
        first = words[:, 0].astype(np.int64)
        x = np.empty(len(words))
        y = np.empty(len(words))
        for sym in (1, 2, 3):
            m = first == sym
            if not m.any():
                continue
            xs, ys = pullback_arrays(sym, prev_x[suffix[m]], prev_y[suffix[m]], params)
            x[m] = xs
            y[m] = ys
        rect = words[:, 0].copy()
    x.setflags(write=False)
    y.setflags(write=False)
    _sample_cache[key] = (rect, x, y)
    return _sample_cache[key]


@dataclass
class CylinderFunction:
    """Piecewise-constant function on depth-d cylinders, in word order."""

    depth: int
    values: np.ndarray
    words: list = field(repr=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}

    def __getitem__(self, word) -> float:
        return float(self.values[self.index[tuple(word)]])

    def evaluate(self, p: PlanePoint, params: Parameters) -> float:
        from .maps import itinerary

        return self[itinerary(p, self.depth, params)]


@dataclass
class CylinderMeasure:
    """Nonnegative masses on depth-d cylinders, normalized to total 1."""

    depth: int
    masses: np.ndarray
    words: list = field(repr=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}
        total = float(self.masses.sum())
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-9):
            raise IntegrityError(f"measure total {total} deviates from 1")
        if np.any(self.masses < 0):
            raise IntegrityError("negative cylinder mass")

    def __getitem__(self, word) -> float:
        return float(self.masses[self.index[tuple(word)]])

    def marginal(self, n: int) -> "CylinderMeasure":
        """Prefix marginal at depth n <= depth."""
        if n > self.depth:
            raise CapacityError(f"marginal depth {n} exceeds depth {self.depth}")
        target_words = enumerate_words(n)
        tidx = {w: i for i, w in enumerate(target_words)}
        out = np.zeros(len(target_words))
        pref = np.array([tidx[w[:n]] for w in self.words], dtype=np.int64)
        np.add.at(out, pref, self.masses)
        return CylinderMeasure(n, out, target_words)


@dataclass
class TransferMatrix:
    """Row-structured sparse operator matrix over depth-d words.

    Row i (target word) holds up to two entries at columns src0/src1 with
    values val0/val1; val1 = 0 marks an absent second entry.
    """

    depth: int
    words: list
    src0: np.ndarray
    val0: np.ndarray
    src1: np.ndarray
    val1: np.ndarray
    phi: Potential
    params: Parameters

    @property
    def size(self) -> int:
        return len(self.words)

    def matvec(self, h: np.ndarray) -> np.ndarray:
        return self.val0 * h[self.src0] + self.val1 * h[self.src1]

    def rmatvec(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        np.add.at(out, self.src0, self.val0 * v)
        np.add.at(out, self.src1, self.val1 * v)
        return out

    def coo_lines(self):
        """Matrix export rows `row_word col_word value` (deterministic order)."""
        for i, w in enumerate(self.words):
            row = "".join(str(s) for s in w)
            col0 = "".join(str(s) for s in self.words[self.src0[i]])
            yield f"{row} {col0} {self.val0[i]!r}"
            if self.val1[i] != 0.0:
                col1 = "".join(str(s) for s in self.words[self.src1[i]])
                yield f"{row} {col1} {self.val1[i]!r}"


@dataclass
class SpectralResult:
    lam: float
    h: CylinderFunction
    nu: CylinderMeasure
    pressure: float
    iterations: int
    residual_right: float
    residual_left: float
    depth: int
    phi: Potential
    params: Parameters


def build_matrix(phi: Potential, depth: int, params: Parameters) -> TransferMatrix:
    """Operator matrix over depth-d words with depth-(d+1) sample weighting."""
    if depth < 2:
        raise CapacityError(f"matrix depth must be >= 2, got {depth}")
    if depth + 1 > max_depth():
        raise CapacityError(f"depth {depth} needs samples at depth {depth + 1} beyond the cap")
    words = enumerate_words(depth)
    index = {w: i for i, w in enumerate(words)}
    rect, x, y = depth_samples(depth, params)
    n = len(words)
    src = np.zeros((n, 2), dtype=np.int64)
    val = np.zeros((n, 2))
    wm = word_matrix(depth)
    first = wm[:, 0].astype(np.int64)
    # Column of source i for target word a is (i, a_0 .. a_{d-2}).
    col_of = {}
    for i in (1, 2, 3):
        col_of[i] = np.array(
            [index[(i,) + w[:-1]] if A_MATRIX[i - 1][w[0] - 1] else -1 for w in words],
            dtype=np.int64,
        )
    slot = np.zeros(n, dtype=np.int64)
    for i in (1, 2, 3):
        allowed = col_of[i] >= 0
        if not allowed.any():
            continue
        # Weight: phi at the sample of the extended word (i, a) = branch-i
        # pullback of the sample of a.
        xs, ys = pullback_arrays(i, x[allowed], y[allowed], params)
        w_ext = phi.evaluate_arrays(np.full(xs.shape, i), ys)
        rows = np.nonzero(allowed)[0]
        for r, cv, wv in zip(rows, col_of[i][allowed], np.exp(w_ext)):
            src[r, slot[r]] = cv
            val[r, slot[r]] = wv
            slot[r] += 1
    return TransferMatrix(
        depth, words, src[:, 0], val[:, 0], src[:, 1], val[:, 1], phi, params
    )


def power_iteration(M: TransferMatrix, tol: float = 1e-14, max_iter: int = 100000):
    """Dominant eigenpair by deterministic power iteration.

    Starts from the all-ones vector, normalizes by the maximum entry, and
    stops when the relative residual ||Mh - lam h||_inf / lam is below tol.

    Returns (lam, h, iterations, residual); h has maximum entry 1.
    """
    h = np.ones(M.size)
    lam = 1.0
    for it in range(1, max_iter + 1):
        y = M.matvec(h)
        lam = float(y.max())
        residual = float(np.abs(y - lam * h).max() / lam)
        h = y / lam
        if residual <= tol:
            return lam, h, it, residual
    raise ConvergenceError(residual, max_iter)


def left_eigenvector(M: TransferMatrix, tol: float = 1e-14, max_iter: int = 100000):
    """Dominant left eigenvector, normalized to total mass 1."""
    v = np.ones(M.size)
    lam = 1.0
    for it in range(1, max_iter + 1):
        y = M.rmatvec(v)
        lam = float(y.max())
        residual = float(np.abs(y - lam * v).max() / lam)
        v = y / lam
        if residual <= tol:
            return lam, v / v.sum(), it, residual
    raise ConvergenceError(residual, max_iter)


def spectral_solve(
    phi: Potential, depth: int, params: Parameters, tol: float = 1e-14
) -> SpectralResult:
    """Full spectral triple (lam, h, nu) at the given depth."""
    M = build_matrix(phi, depth, params)
    lam, h, it_r, res_r = power_iteration(M, tol=tol)
    lam_l, nu, it_l, res_l = left_eigenvector(M, tol=tol)
    if abs(lam - lam_l) > 1e-10 * max(1.0, lam):
        raise IntegrityError(f"left/right eigenvalues disagree: {lam} vs {lam_l}")
    if h.min() <= 0.0:
        raise IntegrityError("eigenfunction is not strictly positive")
    lower = math.exp(phi.inf_val + LOG_OMEGA)
    if lam < lower - 1e-9:
        raise IntegrityError(f"lam={lam} below the certified bound {lower}")
    return SpectralResult(
        lam,
        CylinderFunction(depth, h, M.words),
        CylinderMeasure(depth, nu, M.words),
        math.log(lam),
        it_r + it_l,
        res_r,
        res_l,
        depth,
        phi,
        params,
    )


def apply_L_pointwise(phi: Potential, psi, p: PlanePoint, params: Parameters) -> float:
    """(L_phi psi)(p) = sum over inverse branches of e^{phi(y)} psi(y)."""
    total = 0.0
    for source in (1, 2, 3):
        if A_MATRIX[source - 1][p.rect - 1] != 1:
            continue
        y = inverse_branch(p, source, params)
        total += math.exp(phi.evaluate(y)) * psi(y)
    return total


def birkhoff_sum(phi: Potential, p: PlanePoint, n: int, params: Parameters) -> float:
    """S_n phi along the forward orbit; raises EscapeError if it leaves."""
    total = 0.0
    cur = p
    for step in range(n):
        if cur.escaped:
            raise EscapeError(step)
        total += phi.evaluate(cur)
        if step < n - 1:
            cur = apply_G(cur, params)
    return total


# ---------------------------------------------------------------------------
# The constructive eigenfunction path: gated preimage sums T_n, their
# cylinder-level envelope Z_n, and the Cesaro averages h_n.
#
# criterion selects the hyperbolicity gate on length-n preimage branches:
#   "symbolic"  worst-case per-symbol bounds (very sparse at the default
#               parameters; every gated word ends in 2),
#   "pointwise" the defining suffix-product test evaluated with true
#               derivatives along the actual preimage orbit of the target,
#   "none"      no gate (plain n-th operator power applied to 1).
# ---------------------------------------------------------------------------


def _targets_to_arrays(targets):
    rect = np.array([p.rect for p in targets], dtype=np.int64)
    x = np.array([p.x for p in targets])
    y = np.array([p.y for p in targets])
    return rect, x, y


def T_n_bulk(
    phi: Potential,
    targets,
    n: int,
    k: HyperbolicConstants,
    params: Parameters,
    criterion: str = "symbolic",
) -> np.ndarray:
    """T_n at many target points at once.

    For each admissible length-n word compatible with the target rectangle,
    pull the target back through the word's inverse branches, accumulate the
    Birkhoff sum of phi along the preimage orbit, and add e^{S_n phi} for
    the branches passing the hyperbolicity gate.
    """
    if criterion not in ("symbolic", "pointwise", "none"):
        raise ValueError(f"unknown criterion {criterion!r}")
    rect_t, x_t, y_t = _targets_to_arrays(targets)
    m = len(targets)
    if n == 0:
        return np.ones(m)
    words = word_matrix(n)
    sym_mask = hyperbolic_word_mask(words, k) if criterion == "symbolic" else None
    out = np.zeros(m)
    c1 = 2.0 * k.c
    for wi, w in enumerate(words):
        if criterion == "symbolic" and not sym_mask[wi]:
            continue
        last = int(w[-1])
        compat = np.array([A_MATRIX[last - 1][r - 1] == 1 for r in rect_t])
        if not compat.any():
            continue
        xs = x_t[compat]
        ys = y_t[compat]
        s_phi = np.zeros(xs.shape)
        if criterion == "pointwise":
            # Track suffix sums of true log-expansions: after processing
            # symbols w_j .. w_{n-1}, `suffix_ok` says every suffix beats 2c.
            suffix_sum = np.zeros(xs.shape)
            suffix_ok = np.ones(xs.shape, dtype=bool)
        for j in range(n - 1, -1, -1):
            sym = int(w[j])
            xs, ys = pullback_arrays(sym, xs, ys, params)
            rect_here = np.full(xs.shape, sym)
            s_phi += phi.evaluate_arrays(rect_here, ys)
            if criterion == "pointwise":
                if sym == 2:
                    le = math.log(1.0 / params.sigma)
                    suffix_sum += le - c1
                else:
                    d = ys * (1.0 - E) + E
                    suffix_sum += np.log(E / (d * d)) - c1
                suffix_ok &= suffix_sum >= 0.0
        term = np.exp(s_phi)
        if criterion == "pointwise":
            term = np.where(suffix_ok, term, 0.0)
        out[compat] += term
    return out


def T_n(
    phi: Potential,
    x: PlanePoint,
    n: int,
    k: HyperbolicConstants,
    params: Parameters,
    criterion: str = "symbolic",
) -> float:
    """Gated preimage sum at a single target point (T_0 = 1 by convention)."""
    return float(T_n_bulk(phi, [x], n, k, params, criterion)[0])


def Z_n(
    phi: Potential,
    n: int,
    k: HyperbolicConstants,
    params: Parameters,
    pad: float = 0.0,
) -> dict:
    """Cylinder-level envelope over symbolically hyperbolic length-n words.

    The per-cylinder sup of S_n phi is approximated at the cylinder sample
    point; `pad` is an additive distortion allowance, giving the reported
    pessimistic value sum e^{S_n + pad}.
    """
    words = word_matrix(n)
    mask = hyperbolic_word_mask(words, k)
    if not mask.any():
        return {"optimistic": 0.0, "pessimistic": 0.0, "count": 0}
    total = 0.0
    for w in words[mask]:
        p = cylinder_sample(tuple(int(s) for s in w), params)
        total += math.exp(birkhoff_sum(phi, p, n, params))
    return {
        "optimistic": total,
        "pessimistic": total * math.exp(pad),
        "count": int(mask.sum()),
    }


def h_n_bulk(
    phi: Potential,
    targets,
    n: int,
    lam: float,
    k: HyperbolicConstants,
    params: Parameters,
    criterion: str = "none",
) -> np.ndarray:
    """Cesaro average (1/n) sum_{i<n} lam^-i T_i at many targets."""
    acc = np.zeros(len(targets))
    for i in range(n):
        acc += lam ** (-i) * T_n_bulk(phi, targets, i, k, params, criterion)
    return acc / n


def tn_recursion_residual(
    phi: Potential,
    kmax: int,
    k: HyperbolicConstants,
    params: Parameters,
    lam: float,
    criterion: str = "symbolic",
    sample_depth: int = 3,
) -> list[dict]:
    """Residuals r_j = max over sample points of |lam^-j (L T_j - T_{j+1})|.

    Also reports the crude envelope lam^-j #A_{j+1} e^{(j+1) sup phi}, where
    A_{j+1} counts length-(j+1) words that fail the gate while their last j
    symbols pass it.
    """
    targets = [
        cylinder_sample(w, params) for w in enumerate_words(sample_depth)
    ]
    rows = []
    for j in range(kmax + 1):
        t_next = T_n_bulk(phi, targets, j + 1, k, params, criterion)
        lt = np.zeros(len(targets))
        for ti, p in enumerate(targets):
            lt[ti] = apply_L_pointwise(
                phi,
                lambda q: T_n(phi, q, j, k, params, criterion),
                p,
                params,
            )
        r = float(np.abs(lt - t_next).max() * lam ** (-j))
        words = word_matrix(j + 1)
        full = hyperbolic_word_mask(words, k)
        if j >= 1:
            tail = hyperbolic_word_mask(words[:, 1:], k)
        else:
            tail = np.ones(len(words), dtype=bool)
        a_count = int((tail & ~full).sum())
        bound = lam ** (-j) * a_count * math.exp((j + 1) * phi.sup_val)
        rows.append({"k": j, "residual": r, "boundary_count": a_count, "bound": bound})
    return rows


def distortion_report(
    phi: Potential,
    n_max: int,
    k: HyperbolicConstants,
    params: Parameters,
    alt_frac: tuple[float, float] = (0.25, 0.75),
) -> list[dict]:
    """Max spread of S_n phi between two in-cylinder points, per length n.

    Restricted to symbolically hyperbolic cylinders; the spread should form
    a plateau in n, exhibiting the uniform distortion constant.
    """
    rows = []
    for n in range(1, n_max + 1):
        words = word_matrix(n)
        mask = hyperbolic_word_mask(words, k)
        spread = 0.0
        for w in words[mask]:
            wt = tuple(int(s) for s in w)
            a = birkhoff_sum(phi, cylinder_sample(wt, params), n, params)
            b = birkhoff_sum(phi, cylinder_sample(wt, params, alt_frac), n, params)
            spread = max(spread, abs(a - b))
        rows.append({"n": n, "count": int(mask.sum()), "max_spread": spread})
    return rows
