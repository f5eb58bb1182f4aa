import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphcesaro.errors import DomainError
from sphcesaro.spectral_core import basis_matrix
from sphcesaro.sphere_geom import (
    Cap,
    SpherePoint,
    antipode,
    build_quadrature_grid,
    cap_measure,
    cap_restrict,
    geodesic_distance,
    north_pole,
    random_points,
    sphere_area,
)

angles = st.tuples(st.floats(0.0, math.pi), st.floats(0.0, 2 * math.pi))


def pt(a):
    return SpherePoint.from_angles(*a)


def test_point_validation():
    with pytest.raises(DomainError):
        SpherePoint((1.0, 1.0, 0.0))
    with pytest.raises(DomainError):
        SpherePoint((1.0, 0.0))
    p = SpherePoint.from_angles(0.9, 0.4)
    assert p.theta == pytest.approx(0.9, abs=1e-15) and p.phi == pytest.approx(0.4, abs=1e-15)
    assert SpherePoint((0.0, 0.0, 1.0, 0.0)).N == 3


def test_distance_examples():
    x = SpherePoint.from_angles(1.1, 2.0)
    assert geodesic_distance(x, x) == 0.0
    assert geodesic_distance(x, antipode(x)) == pytest.approx(math.pi, abs=1e-15)
    assert geodesic_distance(north_pole(), SpherePoint((1.0, 0.0, 0.0))) == pytest.approx(math.pi / 2, abs=1e-15)
    assert antipode(north_pole()).coords == (-0.0, -0.0, -1.0)
    assert antipode(antipode(x)) == x


@settings(max_examples=200, deadline=None)
@given(angles, angles, angles)
def test_triangle_and_antipodal_flip(a, b, c):
    x, y, z = pt(a), pt(b), pt(c)
    assert geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-10
    assert geodesic_distance(antipode(x), y) == pytest.approx(math.pi - geodesic_distance(x, y), abs=1e-10)
    assert geodesic_distance(x, y) == geodesic_distance(y, x)


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(2 * math.pi ** 2, rel=1e-15)
    with pytest.raises(DomainError):
        sphere_area(1)
    # Monte Carlo oracle for |S^3|: volume of the unit 4-ball times 4
    rng = np.random.default_rng(3)
    u = rng.uniform(-1, 1, size=(400_000, 4))
    ball = 16.0 * np.mean(np.sum(u * u, axis=1) <= 1.0)
    assert 4 * ball == pytest.approx(sphere_area(3), rel=0.02)


def test_cap_measure():
    assert cap_measure(2, math.pi) == pytest.approx(4 * math.pi, rel=1e-12)
    assert cap_measure(2, math.pi / 2) == pytest.approx(2 * math.pi, rel=1e-12)
    assert cap_measure(5, 0.0) == 0.0
    for r in (0.1, 0.7, 2.0):
        assert cap_measure(2, r) == pytest.approx(2 * math.pi * (1 - math.cos(r)), rel=1e-12)
    for N in (2, 3, 4, 7):
        assert cap_measure(N, math.pi / 2) == pytest.approx(sphere_area(N) / 2, rel=1e-10)
        assert cap_measure(N, math.pi) == pytest.approx(sphere_area(N), rel=1e-10)
        rs = np.linspace(0, math.pi, 25)
        assert np.all(np.diff([cap_measure(N, r) for r in rs]) > 0)
    with pytest.raises(DomainError):
        cap_measure(2, 3.2)
    with pytest.raises(DomainError):
        Cap(north_pole(), 0.0)


@pytest.mark.parametrize("n_max", [0, 1, 7, 32])
def test_grid_integrates(n_max):
    g = build_quadrature_grid(n_max)
    assert g.weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)
    assert np.all(g.weights > 0)
    assert g.band_limit == n_max
    if n_max >= 1:
        assert g.integrate(np.cos(g.theta) ** 2) == pytest.approx(4 * math.pi / 3, rel=1e-12)


@pytest.mark.parametrize("n_max, breaks", [(12, ()), (20, ()), (10, (0.5,))])
def test_grid_exactness_gram(n_max, breaks):
    g = build_quadrature_grid(n_max, lat_breaks=breaks)
    B = basis_matrix(n_max, g.xyz)
    gram = (B * g.weights) @ B.T
    assert np.max(np.abs(gram - np.eye(B.shape[0]))) <= 1e-9
    assert np.max(np.abs(B[1:] @ g.weights)) <= 1e-12


def test_cap_restrict():
    g = build_quadrature_grid(40)
    full = cap_restrict(g, Cap(SpherePoint.from_angles(0.3, 1.0), math.pi))
    assert full.size == g.size
    i = 123
    x = SpherePoint(tuple(g.xyz[i]))
    d = np.array([geodesic_distance(x, SpherePoint(tuple(p))) for p in np.delete(g.xyz, i, axis=0)])
    tiny = cap_restrict(g, Cap(x, 0.9 * d.min()))
    assert tiny.size == 1 and np.allclose(tiny.xyz[0], g.xyz[i])
    cap = Cap(SpherePoint.from_angles(0.9, 0.4), math.pi / 3)
    for n in (40, 80, 160):
        sub = cap_restrict(build_quadrature_grid(n), cap)
        gap = abs(sub.weights.sum() - cap_measure(2, math.pi / 3)) / cap_measure(2, math.pi / 3)
        assert gap <= 3 / math.sqrt(sub.size)


def test_grid_csv_round_trip():
    g = build_quadrature_grid(3)
    lines = g.to_csv().splitlines()
    assert lines[0] == "theta,phi,weight"
    assert len(lines) == g.size + 1
    t, p, w = (float(v) for v in lines[5].split(","))
    assert (t, p, w) == (g.theta[4], g.phi[4], g.weights[4])


def test_random_points_seeded_and_in_cap():
    a = random_points(30, 4)
    assert np.array_equal(a, random_points(30, 4))
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    cap = Cap(SpherePoint.from_angles(2.0, 5.0), 0.4)
    b = random_points(50, 1, cap=cap)
    assert b.shape == (50, 3)
    assert all(geodesic_distance(cap.center, SpherePoint(tuple(v))) <= 0.4 for v in b)
