import math

import numpy as np
import pytest

from horseshoe_thermo import maps as M
from horseshoe_thermo.errors import EscapeError, MapDomainError, TransitionError
from horseshoe_thermo.symbolic import A_MATRIX, enumerate_words


def test_parameter_constraints():
    with pytest.raises(MapDomainError):
        M.Parameters(rho=0.4)
    with pytest.raises(MapDomainError):
        M.Parameters(sigma=0.34)
    with pytest.raises(MapDomainError):
        M.Parameters(beta=5.0)
    with pytest.raises(MapDomainError):
        M.Parameters(beta1=4.5)
    assert M.Parameters().alpha == 4.0


def test_f_values():
    assert M.f_map(1.0) == 1.0
    assert abs(M.f_map(0.5) - 0.731058578630005) < 1e-12
    with pytest.raises(MapDomainError):
        M.f_map(0.0)
    with pytest.raises(MapDomainError):
        M.f_map(-0.2)


def test_g0_values():
    assert M.g0(1.0) == 1.0
    assert abs(M.g0(0.5) - 1.0 / (1.0 + math.e)) < 1e-15
    with pytest.raises(MapDomainError):
        M.g0(0.0)


def test_g1_values(params):
    assert M.g1(0.0, params) == 1.0
    assert M.g1(params.sigma, params) == 0.0
    assert abs(M.g1(0.1, params) - 0.6) < 1e-15
    with pytest.raises(MapDomainError):
        M.g1(params.sigma + 0.01, params)


def test_round_trips(rng):
    for t in rng.uniform(1e-9, 1.0, 300):
        assert abs(M.f_map(M.g0(t)) - t) <= 1e-13
        assert abs(M.g0(M.f_map(t)) - t) <= 1e-13


def test_monotonicity(rng):
    ys = np.sort(rng.uniform(1e-6, 1.0, 200))
    fs = [M.f_map(y) for y in ys]
    gs = [M.g0(y) for y in ys]
    assert all(b > a for a, b in zip(fs, fs[1:]))
    assert all(b > a for a, b in zip(gs, gs[1:]))


def test_apply_G_examples(params):
    p = M.make_point(1, params.rho / 4.0, 1.0, params)
    q = M.apply_G(p, params)
    assert (q.rect, q.x, q.y) == (1, 0.25, 1.0)
    q2 = M.apply_G(M.make_point(2, 0.75, 0.0, params), params)
    assert (q2.rect, q2.x, q2.y, q2.plane) == (3, 0.0, 1.0, "P1")


def test_apply_G_escape(params):
    # x lands between the rectangles
    p = M.make_point(1, 0.1, 0.9, params)
    q = M.apply_G(p, params)
    assert q.escaped
    with pytest.raises(MapDomainError):
        M.apply_G(q, params)


def test_inverse_branch_structure(params):
    t3 = M.anchor(3, params)
    sources = [s for s in (1, 2, 3) if A_MATRIX[s - 1][2] == 1]
    assert sources == [2]
    t1 = M.anchor(1, params)
    sources1 = [s for s in (1, 2, 3) if A_MATRIX[s - 1][0] == 1]
    assert sources1 == [1, 3]
    pre = M.inverse_branch(M.PlanePoint(3, 0.1, 0.6), 2, params)
    assert pre.rect == 2 and abs(pre.y - params.sigma * 0.4) < 1e-15
    with pytest.raises(TransitionError):
        M.inverse_branch(t3, 1, params)
    with pytest.raises(TransitionError):
        M.inverse_branch(t1, 2, params)


def test_inverse_branch_round_trip(params, rng):
    for _ in range(300):
        rect = int(rng.integers(1, 4))
        (xlo, xhi), (ylo, yhi) = M.rect_ranges(rect, params)
        t = M.PlanePoint(rect, rng.uniform(xlo, xhi), rng.uniform(ylo + 1e-9, yhi))
        for s in (1, 2, 3):
            if A_MATRIX[s - 1][rect - 1] != 1:
                continue
            y = M.inverse_branch(t, s, params)
            (sxlo, sxhi), (sylo, syhi) = M.rect_ranges(s, params)
            assert sxlo <= y.x <= sxhi and sylo <= y.y <= syhi
            back = M.apply_G(y, params)
            assert back.rect == t.rect
            assert abs(back.x - t.x) <= 1e-13 and abs(back.y - t.y) <= 1e-13


def test_itinerary_examples(params):
    fixed = M.make_point(1, 0.0, 1.0, params)
    assert M.itinerary(fixed, 5, params) == (1, 1, 1, 1, 1)
    # every orbit leaving R2 lands in the P1 plane: itinerary starts (2, 3)
    p2 = M.cylinder_sample((2, 3), params)
    assert M.itinerary(p2, 2, params) == (2, 3)
    with pytest.raises(EscapeError) as err:
        M.itinerary(M.make_point(1, 0.1, 0.9, params), 3, params)
    assert err.value.step == 1


def test_cylinder_sample_prefix_property(params):
    for n in range(1, 9):
        for w in enumerate_words(n):
            p = M.cylinder_sample(w, params)
            assert M.itinerary(p, n, params) == w


def test_cylinder_sample_examples(params):
    a1 = M.cylinder_sample((1,), params)
    assert (a1.x, a1.y) == (params.rho / 2.0, 0.5)
    s111 = M.cylinder_sample((1, 1, 1), params)
    assert abs(s111.y - M.f_map(M.f_map(0.5))) < 1e-15


def test_center_norms(params, rng):
    assert M.dG_inverse_center_norm(M.anchor(2, params), params) == params.sigma
    topmost = M.make_point(1, 0.05, 1.0, params)
    assert abs(M.dG_inverse_center_norm(topmost, params) - 1.0 / math.e) < 1e-15
    vals = [
        M.dG_inverse_center_norm(M.PlanePoint(1, 0.1, y), params)
        for y in rng.uniform(1e-9, 1.0, 100000)
    ]
    assert max(vals) <= math.e + 1e-9


def test_F_branch_formulas(params):
    assert M.apply_F(M.SpacePoint(0.0, 1.0, 0.0), params) == M.SpacePoint(0.0, 1.0, 0.0)
    img = M.apply_F(M.SpacePoint(0.5, 0.5, 0.1), params)
    assert abs(img.x - 0.5 * params.rho) < 1e-15
    assert abs(img.y - M.f_map(0.5)) < 1e-15
    assert abs(img.z - params.beta * 0.1) < 1e-15
    with pytest.raises(MapDomainError):
        M.apply_F(M.SpacePoint(0.5, 0.5, 0.5), params)


def test_F_round_trips(params, rng):
    for _ in range(500):
        p = M.SpacePoint(rng.uniform(0, 1), rng.uniform(1e-9, 1), rng.uniform(0, 1 / 6))
        back = M.apply_F_inverse(M.apply_F(p, params), 0, params)
        assert max(abs(back.x - p.x), abs(back.y - p.y), abs(back.z - p.z)) <= 1e-12
        p = M.SpacePoint(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(5 / 6, 1))
        back = M.apply_F_inverse(M.apply_F(p, params), 1, params)
        assert max(abs(back.x - p.x), abs(back.y - p.y), abs(back.z - p.z)) <= 1e-12


def test_projection_slabs(params):
    assert M.project_pi(M.SpacePoint(0.1, 0.5, 0.05), params).plane == "P0"
    assert M.project_pi(M.SpacePoint(0.1, 0.5, 0.9), params).plane == "P1"
    assert M.project_pi(M.SpacePoint(0.5, 0.5, 0.05), params).escaped
    with pytest.raises(MapDomainError):
        M.project_pi(M.SpacePoint(0.1, 0.5, 0.4), params)


def test_boundary_tie_resolves_low(params):
    # x exactly rho belongs to R1 even though R2 never overlaps at defaults
    q = M.classify("P0", params.rho, 0.1, params)
    assert q.rect == 1
