import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypbc.errors import NotHyperbolic
from hypbc.hyperbolic import (
    Frequency,
    HyperbolicSystem,
    build_G,
    characteristic_roots,
    check_homogeneity,
    check_resolvent_bound,
    classify,
    sphere_points,
    symmetric_check,
)
from hypbc.config import DEFAULT
from hypbc.models import get_preset


def scalar(c=1.0):
    return HyperbolicSystem.linear([[[1.0]], [[c]]], name="scalar")


def test_frequency_validation_and_scaling():
    with pytest.raises(ValueError):
        Frequency(1.0, np.zeros(1), 0.0)
    f = Frequency(3.0, np.array([0.0]), 4.0)
    assert f.radius == pytest.approx(5.0)
    n = f.normalized()
    assert n.radius == pytest.approx(1.0)
    assert n.tau_c == pytest.approx((3 - 4j) / 5)
    assert f.scaled(2.0).gamma == pytest.approx(8.0)


def test_build_G_linear():
    A0, A1, A2 = np.eye(2), np.diag([1.0, -1.0]), np.array([[0, 1.0], [1.0, 0]])
    s = HyperbolicSystem.linear([A0, A1, A2])
    f = Frequency(0.5, np.array([2.0]), 0.25)
    expected = -1j * (A0 * (0.5 - 0.25j) + A1 * 2.0)
    assert np.allclose(build_G(s, f), expected)


def test_system_rejects_singular_a0_and_bad_shapes():
    with pytest.raises(ValueError):
        HyperbolicSystem.linear([np.zeros((2, 2)), np.eye(2)])
    with pytest.raises(ValueError):
        HyperbolicSystem(2, 2, [np.eye(2), np.eye(2)])


def test_symmetric_check():
    ok, _ = symmetric_check(get_preset("maxwell").system, DEFAULT)
    assert ok
    bad = HyperbolicSystem.linear([np.eye(2), np.array([[0, 1.0], [0, 0]])])
    assert not symmetric_check(bad, DEFAULT)[0]


def test_jordan_block_not_hyperbolic():
    s = HyperbolicSystem.linear([np.eye(2), np.array([[0, 1.0], [0, 0]])])
    with pytest.raises(NotHyperbolic) as exc:
        classify(s)
    assert exc.value.sample is not None


def test_complex_roots_not_hyperbolic():
    s = HyperbolicSystem.linear([np.eye(2), np.array([[0, 1.0], [-1.0, 0]])])
    with pytest.raises(NotHyperbolic):
        characteristic_roots(s, np.array([1.0]))


def test_maxwell_classification():
    c = classify(get_preset("maxwell").system)
    assert c.symmetric and c.constantly_hyperbolic and not c.strictly_hyperbolic
    assert c.characteristic_boundary
    assert c.mu == 2


def test_wave_custom_symbol_classification():
    c = classify(get_preset("wave_neumann").system)
    assert c.strictly_hyperbolic and not c.characteristic_boundary and c.mu == 1


def test_scalar_resolvent_bound_is_one():
    sup, _ = check_resolvent_bound(scalar(), 500, seed=1)
    assert sup == pytest.approx(1.0, abs=1e-9)


def test_homogeneity_of_custom_symbol():
    assert check_homogeneity(get_preset("wave_neumann").system) <= 1e-12


def test_sphere_points_unit_and_deterministic():
    a = sphere_points(3, 50, seed=3)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    assert np.array_equal(a, sphere_points(3, 50, seed=3))
    assert set(sphere_points(1, 4).ravel()) == {1.0, -1.0}


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4), st.integers(0, 1000))
def test_diagonal_systems_are_hyperbolic(speeds, seed):
    # symmetric hyperbolic: real roots tau = -c xi
    N = len(speeds)
    s = HyperbolicSystem.linear([np.eye(N), np.diag(speeds)])
    roots = characteristic_roots(s, np.array([1.0]))
    got = sorted(r for r, m in roots for _ in range(m))
    assert got == pytest.approx(sorted(-np.asarray(speeds)), abs=1e-9)
