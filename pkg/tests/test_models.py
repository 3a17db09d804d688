import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypbc.errors import ZeroVector
from hypbc.hyperbolic import Frequency
from hypbc.lopatinskii import ratio_at
from hypbc.models import (
    PRESETS,
    closed_form_crosscheck,
    wave_modulus_terms,
    get_preset,
    maxwell_basis,
    maxwell_chain,
    oblique_sequence,
    re_sqrt_margin,
    wave_oblique,
    wave_q,
)

hemisphere = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, 1)).map(
    lambda v: np.asarray(v) / np.linalg.norm(v)
)
hemisphere3 = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, 1)).map(
    lambda v: np.asarray(v) / np.linalg.norm(v)
)


def test_registry_and_unknown_preset():
    assert set(PRESETS) == {"wave_neumann", "wave_oblique", "maxwell", "symmetric_control"}
    with pytest.raises(KeyError):
        get_preset("nope")


def test_oblique_rejects_zero_b():
    with pytest.raises(ZeroVector):
        wave_oblique(b=[0.0])


@pytest.mark.parametrize("name", ["wave_neumann", "wave_oblique", "maxwell"])
@settings(max_examples=20, deadline=None)
@given(v=st.one_of(hemisphere, hemisphere3))
def test_closed_forms_match_pencil(name, v):
    p = get_preset(name)
    d = p.system.d
    if len(v) != d + 1:
        v = np.resize(v, d + 1)
        v[-1] = abs(v[-1]) + 0.01
        v = v / np.linalg.norm(v)
    r = closed_form_crosscheck(p, Frequency(v[0], v[1:-1], v[-1]))
    assert r["eigenvalue_error"] <= 1e-10
    assert r["principal_angle"] <= 1e-8


def test_wave_neumann_glancing_ratio_scales_like_sqrt_gamma():
    p = get_preset("wave_neumann")
    # glancing point tau = |eta|: |sqrt(q)| = sqrt(2 gamma |tau|) to leading order
    for g in (1e-2, 1e-4):
        a = math.sqrt((1 - g * g) / 2)
        f = Frequency(a, np.array([a]), g)
        assert abs(np.sqrt(wave_q(f))) == pytest.approx(math.sqrt(2 * g * a), rel=1e-3)
        # stable vector z = (sqrt q, -Lambda), Ad = I
        q = wave_q(f)
        exact = abs(np.sqrt(q)) / math.sqrt(abs(q) + f.radius**2)
        assert ratio_at(p.system, p.B, f) == pytest.approx(exact, rel=1e-10)


def test_oblique_sequence_ratio_is_order_gamma():
    p = get_preset("wave_oblique")
    b = np.ones(1)
    for g in (1e-2, 1e-3, 1e-4):
        f = oblique_sequence(g, b)
        assert f.radius == pytest.approx(1.0)
        q = wave_q(f)
        bz = abs(np.sqrt(q) + 1j * float(b @ f.eta))
        assert bz / g == pytest.approx(math.sqrt(2), rel=1e-2)
        exact = bz / math.sqrt(abs(q) + 1.0)
        assert ratio_at(p.system, p.B, f) == pytest.approx(exact, rel=1e-8)


def test_wave_modulus_identity_and_bound():
    rng = np.random.default_rng(0)
    v = rng.normal(size=(1000, 3))
    v[:, 2] = np.abs(v[:, 2])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    lhs, expanded, lower = wave_modulus_terms(v[:, 0], v[:, 1] ** 2, v[:, 2])
    assert np.allclose(lhs, expanded, rtol=1e-12)
    assert np.all(lhs >= lower * (1 - 1e-12))
    assert np.all(lower >= v[:, 2] ** 2 * (1 - 1e-12))


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0, 1e3))
def test_re_sqrt_inequality(a, c, d):
    assert re_sqrt_margin(a, c, d) >= -1e-9 * max(1.0, abs(a), abs(c), d)


def test_maxwell_basis_orthogonal_and_stable():
    p = get_preset("maxwell")
    f = Frequency(0.3, np.array([0.5, -0.2]), 0.4).normalized()
    w1, w2, xi = maxwell_basis(f)
    assert abs(np.vdot(w1, w2)) <= 1e-12 * np.linalg.norm(w1) * np.linalg.norm(w2)
    assert xi.real < 0


def test_maxwell_chain_identity():
    rng = np.random.default_rng(1)
    n = 500
    v = rng.normal(size=(n, 4))
    v[:, 3] = np.abs(v[:, 3])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    ab = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    bv2, formula, bv, adv = maxwell_chain(v[:, 0], v[:, 1:3], v[:, 3], ab[:, 0], ab[:, 1])
    assert np.allclose(bv2, formula, rtol=1e-10)
    assert np.allclose(bv**2, bv2)
