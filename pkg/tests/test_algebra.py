import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypbc.algebra import (
    EigenClass,
    constant_term,
    contour_from_spectrum,
    pencil_eigen,
    pencil_moments,
    propagator,
    resolvent_norm,
    spectral_projector,
    stable_contours,
)
from hypbc.errors import GapCollapse, SingularMatrix


def known_pencil(lams, seed=0):
    """Invertible ``Ad`` and ``G = Ad V diag(lams) V^-1`` with the exact projector."""
    rng = np.random.default_rng(seed)
    n = len(lams)
    Ad = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 3 * np.eye(n)
    V = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 2 * np.eye(n)
    Vi = np.linalg.inv(V)
    lams = np.asarray(lams, dtype=complex)
    G = Ad @ V @ np.diag(lams) @ Vi
    mask = (lams.real < 0).astype(float)
    return Ad, G, V, Vi, lams, V @ np.diag(mask) @ Vi


def test_diagonal_pencil_classification():
    dec = pencil_eigen(np.eye(3), np.diag([-1.0, -2.0, 3.0]))
    assert dec.mu == 2
    assert sorted(dec.eigenvalues(EigenClass.STABLE).real) == pytest.approx([-2, -1])
    basis = dec.stable_basis
    assert basis.shape == (3, 2)
    assert np.allclose(basis[2], 0, atol=1e-14)
    assert dec.stable_abscissa == pytest.approx(-1.0)


def test_singular_ad_gives_central_pair():
    dec = pencil_eigen(np.diag([1.0, 0.0]), np.diag([-1.0, 1.0]))
    assert dec.mu == 1
    assert dec.n_central == 1


def test_projector_matches_eigendecomposition():
    Ad, G, V, Vi, lams, P_exact = known_pencil([-1, -0.5 + 2j, 0.7, 1.5 - 1j])
    dec = pencil_eigen(Ad, G)
    P = spectral_projector(Ad, G, stable_contours(dec))
    assert np.linalg.norm(P - P_exact) <= 1e-10 * np.linalg.norm(P_exact)


def test_propagator_is_exponential_on_stable_part():
    Ad, G, V, Vi, lams, _ = known_pencil([-1, -0.3, 0.4])
    dec = pencil_eigen(Ad, G)
    x = np.array([0.0, 0.5, 2.0])
    T = propagator(Ad, G, stable_contours(dec), x)
    for k, xk in enumerate(x):
        exact = V @ np.diag(np.where(lams.real < 0, np.exp(lams * xk), 0)) @ Vi
        assert np.allclose(T[k], exact, atol=1e-10)
    with pytest.raises(ValueError):
        propagator(Ad, G, stable_contours(dec), -1.0)


def test_moments_generate_propagator():
    from scipy.linalg import expm

    Ad, G, *_ = known_pencil([-1, -2 + 1j, 0.5])
    dec = pencil_eigen(Ad, G)
    cs = stable_contours(dec)
    P, K, M = pencil_moments(Ad, G, cs)
    assert np.allclose(expm(1.3 * M) @ P, propagator(Ad, G, cs, 1.3), atol=1e-10)


def test_constant_term_closed_form():
    Ad, G = np.diag([1.0, 0.0]), np.diag([-1.0, 1.0])
    # (z Ad - G)^-1 = diag(1/(z+1), -1): polynomial part diag(0, -1)
    C = constant_term(Ad, G, pencil_eigen(Ad, G))
    assert np.allclose(C, np.diag([0.0, -1.0]), atol=1e-12)
    Ad2, G2, *_ = known_pencil([-1, 2])
    assert np.allclose(constant_term(Ad2, G2, pencil_eigen(Ad2, G2)), 0, atol=1e-12)


def test_contour_encloses_only_stable():
    dec = pencil_eigen(np.eye(3), np.diag([-1.0, -1.2, 0.5]))
    c = contour_from_spectrum(dec)
    for lam in (-1.0, -1.2):
        assert abs(lam - c.center) < c.radius
    assert abs(0.5 - c.center) > c.radius


def test_gap_collapse_on_imaginary_axis():
    with pytest.raises(GapCollapse):
        pencil_eigen(np.eye(2), np.diag([-1.0, 1e-14j]))


def test_resolvent_norm_scalar_and_singular():
    assert resolvent_norm(np.eye(1), np.array([[-2.0]]), 0.0) == pytest.approx(0.5)
    with pytest.raises(SingularMatrix):
        resolvent_norm(np.eye(1), np.array([[1j]]), 1.0)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(0.05, 3.0), st.floats(-3.0, 3.0), st.booleans()),
        min_size=2,
        max_size=5,
    ),
    st.integers(0, 2**16),
)
def test_projector_properties(spec, seed):
    lams = [complex(-r if neg else r, i) for r, i, neg in spec]
    Ad, G, V, Vi, lams, P_exact = known_pencil(lams, seed)
    dec = pencil_eigen(Ad, G)
    mu = int(np.sum(np.real(lams) < 0))
    assert dec.mu == mu
    if mu == 0:
        return
    try:
        P = spectral_projector(Ad, G, stable_contours(dec))
    except GapCollapse:
        return
    scale = max(1.0, np.linalg.norm(P, 2))
    assert np.linalg.norm(P @ P - P, 2) <= 1e-8 * scale**2
    assert np.linalg.matrix_rank(P, tol=1e-6 * scale) == mu
