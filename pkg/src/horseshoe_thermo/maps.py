"""Branch maps of the projected horseshoe and its 3D parent.

The plane map G acts on three rectangles: R1 and R3 carry the slow center
map g0 = f^{-1} (f fixes 0 and 1, f(y) > y inside), R2 carries the affine
map g1(y) = 1 - y/sigma.  R3 lives in the plane P1; its vertical range is
stored in local coordinates y in [0, 1].  The 3D maps F, F^{-1} act on the
slabs z in [0, 1/6] and z in [5/6, 1] of the unit cube, and project to G
through pi (forgetting z), with pi o F^{-1} = G o pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EscapeError, MapDomainError, TransitionError
from .symbolic import A_MATRIX

E = math.e


@dataclass(frozen=True)
class Parameters:
    """Horseshoe constants; alpha = 1/rho is derived."""

    rho: float = 0.25
    sigma: float = 0.25
    beta: float = 6.5
    beta1: float = 3.5

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0 / 3.0:
            raise MapDomainError(f"rho must satisfy 0 < rho < 1/3, got {self.rho}")
        if not 0.0 < self.sigma < 1.0 / 3.0:
            raise MapDomainError(f"sigma must satisfy 0 < sigma < 1/3, got {self.sigma}")
        if not self.beta > 6.0:
            raise MapDomainError(f"beta must exceed 6, got {self.beta}")
        if not 3.0 < self.beta1 < 4.0:
            raise MapDomainError(f"beta1 must satisfy 3 < beta1 < 4, got {self.beta1}")

    @property
    def alpha(self) -> float:
        return 1.0 / self.rho


@dataclass(frozen=True)
class PlanePoint:
    """A point of the plane dynamics; rect is None for escaped image points.

    Coordinates are local: R3 points store y - 2, so y is always in [0, 1]
    (R2: [0, sigma]).  plane is "P0" for R1/R2 and "P1" for R3.
    """

    rect: int | None
    x: float
    y: float

    @property
    def plane(self) -> str:
        return "P1" if self.rect == 3 else "P0"

    @property
    def escaped(self) -> bool:
        return self.rect is None


@dataclass(frozen=True)
class SpacePoint:
    x: float
    y: float
    z: float


def f_map(y: float) -> float:
    """The slow interval map f(y) = 1 / (1 - (1 - 1/y) e^{-1}) on (0, 1]."""
    if y <= 0.0:
        raise MapDomainError(f"f is defined on (0, 1], got y={y}")
    if y > 1.0:
        raise MapDomainError(f"f is defined on (0, 1], got y={y}")
    return 1.0 / (1.0 - (1.0 - 1.0 / y) / E)


def g0(y: float) -> float:
    """Inverse of f in closed form: g0(y) = y / (y (1 - e) + e)."""
    if y <= 0.0 or y > 1.0:
        raise MapDomainError(f"g0 is defined on (0, 1], got y={y}")
    return y / (y * (1.0 - E) + E)


def g1(y: float, params: Parameters) -> float:
    """The affine branch g1(y) = 1 - y / sigma on [0, sigma]."""
    if y < 0.0 or y > params.sigma:
        raise MapDomainError(f"g1 is defined on [0, sigma], got y={y}")
    return 1.0 - y / params.sigma


def g0_prime(y: float) -> float:
    """Derivative of g0; increasing in y, range (1/e, e] on (0, 1]."""
    d = y * (1.0 - E) + E
    return E / (d * d)


def _f_closure(y: float) -> float:
    """f extended continuously with f(0) = 0 (interval geometry only)."""
    if y == 0.0:
        return 0.0
    return 1.0 / (1.0 - (1.0 - 1.0 / y) / E)


def rect_ranges(rect: int, params: Parameters) -> tuple[tuple[float, float], tuple[float, float]]:
    """(x-range, local y-range) of a rectangle."""
    if rect == 1 or rect == 3:
        return (0.0, params.rho), (0.0, 1.0)
    if rect == 2:
        return (0.75 - params.rho, 0.75), (0.0, params.sigma)
    raise MapDomainError(f"rect must be 1, 2 or 3, got {rect}")


def make_point(rect: int, x: float, y: float, params: Parameters) -> PlanePoint:
    """Validated PlanePoint constructor."""
    (xlo, xhi), (ylo, yhi) = rect_ranges(rect, params)
    if not (xlo <= x <= xhi and ylo <= y <= yhi):
        raise MapDomainError(
            f"({x}, {y}) outside rectangle {rect} ranges x:[{xlo},{xhi}] y:[{ylo},{yhi}]"
        )
    return PlanePoint(rect, x, y)


def anchor(rect: int, params: Parameters, frac: tuple[float, float] = (0.5, 0.5)) -> PlanePoint:
    """Reference point of a rectangle at the given fractional position."""
    (xlo, xhi), (ylo, yhi) = rect_ranges(rect, params)
    return PlanePoint(rect, xlo + frac[0] * (xhi - xlo), ylo + frac[1] * (yhi - ylo))


def classify(plane: str, x: float, y: float, params: Parameters) -> PlanePoint:
    """Tag a plane point with its rectangle; ties resolve to the lower index."""
    if plane == "P0":
        if 0.0 <= x <= params.rho and 0.0 <= y <= 1.0:
            return PlanePoint(1, x, y)
        if 0.75 - params.rho <= x <= 0.75 and 0.0 <= y <= params.sigma:
            return PlanePoint(2, x, y)
        return PlanePoint(None, x, y)
    if 0.0 <= x <= params.rho and 0.0 <= y <= 1.0:
        return PlanePoint(3, x, y)
    return PlanePoint(None, x, y)


def apply_G(p: PlanePoint, params: Parameters) -> PlanePoint:
    """One step of the plane map; returns an escaped-marker point if the image
    lies outside all three rectangles."""
    if p.escaped:
        raise MapDomainError("cannot iterate an escaped point")
    a = params.alpha
    if p.rect in (1, 3):
        return classify("P0", a * p.x, g0(p.y), params)
    if p.rect == 2:
        return classify("P1", a * (0.75 - p.x), g1(p.y, params), params)
    raise MapDomainError(f"invalid rect tag {p.rect}")


def inverse_branch(target: PlanePoint, source: int, params: Parameters) -> PlanePoint:
    """The unique G-preimage of target inside rectangle `source`.

    Requires the transition source -> target.rect to be admissible.
    """
    if target.escaped:
        raise MapDomainError("cannot pull back an escaped point")
    if source not in (1, 2, 3):
        raise TransitionError(f"source must be 1, 2 or 3, got {source}")
    if A_MATRIX[source - 1][target.rect - 1] != 1:
        raise TransitionError(f"transition {source} -> {target.rect} is forbidden")
    if source in (1, 3):
        return PlanePoint(source, params.rho * target.x, f_map(target.y))
    return PlanePoint(2, 0.75 - params.rho * target.x, params.sigma * (1.0 - target.y))


def itinerary(p: PlanePoint, n: int, params: Parameters) -> tuple[int, ...]:
    """First n rectangle tags along the forward orbit; raises on escape."""
    out = []
    cur = p
    for step in range(n):
        if cur.escaped:
            raise EscapeError(step)
        out.append(cur.rect)
        if step < n - 1:
            cur = apply_G(cur, params)
    return tuple(out)


def cylinder_sample(word, params: Parameters, frac: tuple[float, float] = (0.5, 0.5)) -> PlanePoint:
    """Canonical in-cylinder point: composed inverse branches applied to the
    anchor of the last rectangle.  Its itinerary starts with `word`."""
    word = tuple(word)
    p = anchor(word[-1], params, frac)
    for source in reversed(word[:-1]):
        p = inverse_branch(p, source, params)
    return p


def dG_inverse_center_norm(p: PlanePoint, params: Parameters) -> float:
    """Center-direction norm of DG^{-1}: sigma on R2, 1/g0'(y) <= e on R1/R3."""
    if p.rect == 2:
        return params.sigma
    if p.rect in (1, 3):
        return 1.0 / g0_prime(p.y)
    raise MapDomainError("point has no rectangle tag")


def center_log_expansion(p: PlanePoint, params: Parameters) -> float:
    """log of the center expansion |J^c| = 1 / ||DG^{-1}||_c at p."""
    if p.rect == 2:
        return math.log(1.0 / params.sigma)
    return math.log(g0_prime(p.y))


def apply_F(p: SpacePoint, params: Parameters) -> SpacePoint:
    """The 3D horseshoe map on the two slabs of the unit cube."""
    if not (0.0 <= p.x <= 1.0 and 0.0 <= p.y <= 1.0):
        raise MapDomainError(f"point outside the unit square footprint: {p}")
    if 0.0 <= p.z <= 1.0 / 6.0:
        return SpacePoint(params.rho * p.x, f_map(p.y), params.beta * p.z)
    if 5.0 / 6.0 <= p.z <= 1.0:
        return SpacePoint(
            0.75 - params.rho * p.x,
            params.sigma * (1.0 - p.y),
            params.beta1 * (p.z - 5.0 / 6.0),
        )
    raise MapDomainError(f"z={p.z} outside both slabs [0,1/6] and [5/6,1]")


def apply_F_inverse(p: SpacePoint, branch: int, params: Parameters) -> SpacePoint:
    """Inverse of the selected branch of F; domain-checked against its image."""
    if branch == 0:
        if not 0.0 <= p.x <= params.rho:
            raise MapDomainError(f"x={p.x} outside branch-0 image [0, rho]")
        if not 0.0 <= p.z <= params.beta / 6.0:
            raise MapDomainError(f"z={p.z} outside branch-0 image [0, beta/6]")
        return SpacePoint(p.x / params.rho, g0(p.y), p.z / params.beta)
    if branch == 1:
        if not 0.75 - params.rho <= p.x <= 0.75:
            raise MapDomainError(f"x={p.x} outside branch-1 image [3/4-rho, 3/4]")
        if not 0.0 <= p.y <= params.sigma:
            raise MapDomainError(f"y={p.y} outside branch-1 image [0, sigma]")
        if not 0.0 <= p.z <= params.beta1 / 6.0:
            raise MapDomainError(f"z={p.z} outside branch-1 image [0, beta1/6]")
        return SpacePoint(
            (0.75 - p.x) / params.rho,
            1.0 - p.y / params.sigma,
            p.z / params.beta1 + 5.0 / 6.0,
        )
    raise MapDomainError(f"branch must be 0 or 1, got {branch}")


def project_pi(p: SpacePoint, params: Parameters) -> PlanePoint:
    """Slab projection: forget z, tag the plane by the containing slab."""
    if 0.0 <= p.z <= 1.0 / 6.0:
        return classify("P0", p.x, p.y, params)
    if 5.0 / 6.0 <= p.z <= 1.0:
        return classify("P1", p.x, p.y, params)
    raise MapDomainError(f"z={p.z} lies in neither slab [0,1/6] nor [5/6,1]")


# Array helpers used by the transfer-operator machinery.  They mirror the
# scalar branch formulas without domain checks; callers guarantee validity.

def pullback_arrays(source: int, x, y, params: Parameters):
    """Inverse-branch coordinates for arrays of target coordinates."""
    if source in (1, 3):
        return params.rho * x, 1.0 / (1.0 - (1.0 - 1.0 / y) / E)
    return 0.75 - params.rho * x, params.sigma * (1.0 - y)


def center_log_expansion_arrays(rect, y, params: Parameters):
    """log |J^c| for arrays; rect is an integer array over {1, 2, 3}."""
    import numpy as np

    d = y * (1.0 - E) + E
    vals = np.log(E / (d * d))
    return np.where(rect == 2, math.log(1.0 / params.sigma), vals)
