import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpc.disk_geometry import (
    LOG_3_2SQRT2,
    DiskAutomorphism,
    ball_euclidean_radius,
    ball_hyperbolic_radius,
    check_points,
    compose,
    density,
    derivative,
    distance_from_origin,
    hyperbolic_distance,
    inverse,
    translator,
)
from wpc.errors import InvalidPointError

from conftest import random_disk

radii = st.floats(0.0, 0.9)
angles = st.floats(0.0, 2 * math.pi)


@st.composite
def points(draw, rmax=0.9):
    return draw(st.floats(0.0, rmax)) * complex(np.exp(1j * draw(angles)))


@st.composite
def automorphisms(draw):
    return translator(draw(points())) @ DiskAutomorphism.rotation(draw(angles))


def test_translator_maps_origin():
    p = 0.3 - 0.4j
    sigma = translator(p)
    assert abs(sigma(0j) - p) < 1e-15
    assert abs(sigma.inverse()(p)) < 1e-15


def test_log_constant_is_ball_of_inner_radius():
    assert math.isclose(ball_euclidean_radius(LOG_3_2SQRT2), 1 / math.sqrt(2), rel_tol=1e-15)
    assert math.isclose(ball_hyperbolic_radius(1 / math.sqrt(2)), LOG_3_2SQRT2, rel_tol=1e-14)


def test_density_at_origin_and_distance():
    assert density(0j) == 4.0
    assert math.isclose(distance_from_origin(0.5), math.log(3.0), rel_tol=1e-14)


def test_axial_translation_length():
    T = DiskAutomorphism.axial_translation(2.0)
    assert math.isclose(hyperbolic_distance(0j, T(0j)), 2.0, rel_tol=1e-13)
    assert math.isclose(2 * math.acosh(abs(T.trace) / 2), 2.0, rel_tol=1e-12)


@pytest.mark.parametrize("z", [1.0, 1.5j, complex("nan"), complex("inf")])
def test_invalid_points(z):
    with pytest.raises(InvalidPointError):
        check_points(z)
    with pytest.raises(InvalidPointError):
        translator(z)


def test_from_matrix_rejects_non_su11():
    with pytest.raises(ValueError):
        DiskAutomorphism.from_matrix(np.array([[1, 0.5], [0.5, 1]], dtype=complex))


@settings(max_examples=200, deadline=None)
@given(automorphisms(), points())
def test_density_invariance(T, z):
    lhs = density(T(z)) * abs(T.derivative(z)) ** 2
    assert abs(lhs - density(z)) <= 1e-12 * density(z)


@settings(max_examples=200, deadline=None)
@given(automorphisms(), points(), points())
def test_isometry(T, z, w):
    d = hyperbolic_distance(z, w)
    assert abs(hyperbolic_distance(T(z), T(w)) - d) <= 1e-10 * max(1.0, d)


@settings(max_examples=200, deadline=None)
@given(automorphisms(), automorphisms(), points())
def test_compose_and_chain_rule(S, T, z):
    ST = compose(S, T)
    assert abs(ST(z) - S(T(z))) < 1e-12
    assert abs(derivative(ST, z) - S.derivative(T(z)) * T.derivative(z)) < 1e-10 * abs(derivative(ST, z))
    assert abs(ST.det - 1.0) < 1e-12


@settings(max_examples=200, deadline=None)
@given(automorphisms(), points())
def test_inverse(T, z):
    assert abs(inverse(T)(T(z)) - z) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 20.0))
def test_ball_radius_roundtrip(r):
    assert math.isclose(ball_hyperbolic_radius(ball_euclidean_radius(r)), r, rel_tol=1e-9)


def test_density_invariance_bulk():
    rng = np.random.default_rng(1)
    n = 10_000
    p = random_disk(rng, n)
    z = random_disk(rng, n)
    phi = 2 * np.pi * rng.random(n)
    worst = 0.0
    for k in range(n):
        T = translator(p[k]) @ DiskAutomorphism.rotation(phi[k])
        worst = max(worst, abs(density(T(z[k])) * abs(T.derivative(z[k])) ** 2 / density(z[k]) - 1))
    assert worst <= 1e-12
