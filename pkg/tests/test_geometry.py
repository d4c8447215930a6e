import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ampsup import geometry as G
from ampsup.errors import InputError

xs = st.floats(-5, 5)
ys = st.floats(0.05, 20)
points = st.builds(complex, xs, ys)


@st.composite
def sl2(draw):
    a, b, c = draw(st.floats(-3, 3)), draw(st.floats(-3, 3)), draw(st.floats(-3, 3))
    if abs(a) < 0.2:
        a = 1.0
    return np.array([[a, b], [c, (1 + b * c) / a]])


@given(points, points)
def test_symmetry_and_identity(z, w):
    assert G.dist(z, w) == pytest.approx(G.dist(w, z), rel=1e-12, abs=1e-14)
    assert G.dist(z, z) == 0


@given(points, points, sl2())
def test_isometry(z, w, m):
    d0 = G.dist(z, w)
    d1 = G.dist(G.mobius(m, z), G.mobius(m, w))
    assert d1 == pytest.approx(d0, rel=1e-6, abs=1e-6)


@given(points, points, points)
def test_triangle_inequality(z, w, v):
    assert G.dist(z, v) <= G.dist(z, w) + G.dist(w, v) + 1e-9


@given(points, points)
def test_against_extended_precision(z, w):
    assert G.dist(z, w) == pytest.approx(float(G.dist_mp(z, w)), rel=1e-10, abs=1e-300)
    # the textbook arccosh formula at 60 digits (cancels below d ~ 1e-25)
    if abs(z - w) < 1e-20:
        return
    with mpmath.workdps(60):
        zz, ww = mpmath.mpc(z), mpmath.mpc(w)
        ref = mpmath.acosh(1 + abs(zz - ww) ** 2 / (2 * zz.imag * ww.imag))
    assert G.dist(z, w) == pytest.approx(float(ref), rel=1e-9, abs=1e-300)


def test_small_distances_keep_precision():
    z = 1j
    w = complex(1e-9, 1)
    assert G.dist(z, w) == pytest.approx(1e-9, rel=1e-12)


def test_cosh_relations():
    z, w = 0.3 + 1.7j, -1 + 0.5j
    d = G.dist(z, w)
    assert G.cosh_dist(z, w) == pytest.approx(math.cosh(d))
    assert G.cosh2_half_dist(z, w) == pytest.approx(math.cosh(d / 2) ** 2)


def test_frame_sends_i_to_z():
    z = 0.7 + 2.5j
    assert G.mobius(G.frame(z), 1j) == pytest.approx(z)
    assert np.allclose(G.frame(z) @ G.frame_inverse(z), np.eye(2))


def test_petersson_weight_is_invariant():
    # Im(gw)^(k/2) = v^(k/2) / |j(g, w)|^k for det g = 1
    m = np.array([[2.0, 1.0], [3.0, 2.0]])
    w, k = 0.1 + 0.9j, 6
    gw = G.mobius(m, w)
    lhs = G.petersson_magnitude(1.0, gw, k)
    assert lhs == pytest.approx(G.petersson_magnitude(G.j_factor(m, w) ** -k, w, k), rel=1e-12)


def test_grid_and_box_radius():
    pts = G.sample_grid((-1, 1, 1, 2), 3, 2)
    assert pts.tolist() == [-1 + 1j, 0 + 1j, 1 + 1j, -1 + 2j, 0 + 2j, 1 + 2j]
    r = G.hyperbolic_radius_of_box((-1, 1, 1, 2), 1.5j)
    assert r == pytest.approx(max(G.dist(1.5j, pts)))


def test_rejects_lower_half_plane():
    with pytest.raises(InputError):
        G.dist(1j, -1j)
    with pytest.raises(InputError):
        G.parse_point("0,-1")
    with pytest.raises(InputError):
        G.mobius(np.array([[0.0, 1.0], [1.0, 0.0]]), 1j)
