import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypbc.errors import NotSymmetric
from hypbc.halfspace import (
    FrequencyProblem,
    SobolevParams,
    SpaceTimeGrid,
    manufactured,
    manufactured_frequency,
    sobolev_boundary,
    sobolev_interior,
    solve,
    solve_frequency,
    verify_weighted_estimate,
    verify_trace_estimate,
)
from hypbc.hyperbolic import Frequency, HyperbolicSystem
from hypbc.lopatinskii import BoundaryOperator
from hypbc.models import get_preset

SCALAR = HyperbolicSystem.linear([[[1.0]], [[1.0]]], name="scalar")
B1 = BoundaryOperator([[1.0]], mu=1)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_problem_validation():
    f = Frequency(0.0, np.zeros(0), 1.0)
    with pytest.raises(ValueError):
        FrequencyProblem(f, np.linspace(0, 1, 4), np.zeros((4, 1)), [0])
    with pytest.raises(ValueError):
        FrequencyProblem(f, np.linspace(1, 2, 16), np.zeros((16, 1)), [0])
    with pytest.raises(ValueError):
        FrequencyProblem(f, np.r_[0, np.geomspace(0.1, 1, 15)], np.zeros((16, 1)), [0])


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 5))
def test_scalar_homogeneous_closed_form(tau, gamma):
    # U' = -(gamma + i tau) U, U(0) = g
    f = Frequency(tau, np.zeros(0), gamma)
    xd = np.linspace(0, 30 / gamma, 256)
    prob = FrequencyProblem(f, xd, np.zeros((256, 1)), [2.0 - 1j])
    sol = solve_frequency(SCALAR, B1, prob)
    exact = (2.0 - 1j) * np.exp(-(gamma + 1j * tau) * xd)
    assert np.allclose(sol.U[:, 0], exact, atol=1e-10)


@pytest.mark.parametrize("name", ["symmetric_control", "wave_neumann", "wave_oblique", "maxwell"])
def test_manufactured_frequency_recovery(name):
    p = get_preset(name)
    d = p.system.d
    rng = np.random.default_rng(4)
    for _ in range(5):
        v = rng.normal(size=d + 1)
        freq = Frequency(v[0], v[1:-1], abs(v[-1]) + 0.1)
        prob, W = manufactured_frequency(p.system, p.B, freq, kappa=1.5, points=2048, seed=1)
        sol = solve_frequency(p.system, p.B, prob)
        assert rel(sol.U, W) <= 1e-6
        g = p.B.matrix(freq) @ sol.trace
        assert np.linalg.norm(g - prob.g_hat) <= 1e-10 * max(1.0, np.linalg.norm(prob.g_hat))


def test_fft_method_is_rough_but_close():
    p = get_preset("maxwell")
    freq = Frequency(0.4, np.array([0.3, -0.2]), 0.5)
    prob, W = manufactured_frequency(p.system, p.B, freq, kappa=1.0, points=2048)
    assert rel(solve_frequency(p.system, p.B, prob, method="fft").U, W) <= 1e-2


def test_trace_estimate_scalar_interior_bound():
    rng = np.random.default_rng(0)
    for _ in range(10):
        freq = Frequency(rng.normal(), np.zeros(0), rng.uniform(0.2, 3))
        xd = np.linspace(0, 40 / freq.gamma, 1024)
        f = (np.exp(-((xd - 2) ** 2)) * (rng.normal() + 1j * rng.normal()))[:, None]
        prob = FrequencyProblem(freq, xd, f, [0.0])
        sol = solve_frequency(SCALAR, B1, prob)
        interior, trace = verify_trace_estimate(SCALAR, sol, prob)
        assert interior <= 1 + 1e-6
        assert trace == pytest.approx(0.0, abs=1e-20)


def test_trace_estimate_rejects_custom_symbol():
    p = get_preset("wave_neumann")
    prob, _ = manufactured_frequency(p.system, p.B, Frequency(0.2, np.array([0.1]), 0.5))
    sol = solve_frequency(p.system, p.B, prob)
    with pytest.raises(NotSymmetric):
        verify_trace_estimate(p.system, sol, prob)


def test_grid_properties():
    g = SpaceTimeGrid(8, (4,), 16, 2.0, (1.0,), 3.0)
    assert g.d == 2 and g.tangential_shape == (8, 4)
    assert g.spacings == (0.25, 0.25)
    assert g.h == pytest.approx(0.2)
    assert g.xd_weights().sum() == pytest.approx(3.0)
    with pytest.raises(ValueError):
        SpaceTimeGrid(8, (4,), 3, 2.0, (1.0,), 3.0)


def test_sobolev_norm_of_plane_wave():
    grid = SpaceTimeGrid(64, (), 8, 4.0, (), 1.0)
    k = 3
    omega = 2 * np.pi * k / grid.T
    g = np.exp(1j * omega * grid.t)[None]
    for s in (0.0, 0.5, 1.0):
        got = sobolev_boundary(g, grid, SobolevParams(s, 2.0))
        assert got**2 == pytest.approx(grid.T * (4.0 + omega**2) ** s, rel=1e-12)
    f = np.multiply.outer(g, np.ones(grid.nxd))
    assert sobolev_interior(f, grid, SobolevParams(0, 1)) ** 2 == pytest.approx(grid.T * grid.L, rel=1e-12)


def test_space_time_manufactured_symmetric_control():
    p = get_preset("symmetric_control")
    grid = SpaceTimeGrid(128, (), 128, 8.0, (), 20.0)
    f, g, u = manufactured(p.system, p.B, grid, SobolevParams(0, 1.0), width=0.5)
    sol = solve(p.system, p.B, f, g, grid, SobolevParams(0, 1.0))
    ref = u * np.exp(-grid.t)[None, :, None]
    assert rel(sol.w, ref) <= 1e-3
    assert np.allclose(sol.u, u, atol=1e-3 * np.abs(u).max())


def test_zero_data_zero_solution_and_ratio():
    p = get_preset("symmetric_control")
    grid = SpaceTimeGrid(16, (), 16, 4.0, (), 10.0)
    g = np.zeros((1, 16))
    sol = solve(p.system, p.B, None, g, grid, SobolevParams())
    assert not sol.w.any()
    assert verify_weighted_estimate(p.system, p.B, None, g, grid, 1.0, 0.0)[2] == 0.0


def test_estimate_modes():
    p = get_preset("symmetric_control")
    grid = SpaceTimeGrid(64, (), 64, 8.0, (), 20.0)
    f, g, _ = manufactured(p.system, p.B, grid, SobolevParams(0, 1.0), width=0.5)
    lhs, rhs, r = verify_weighted_estimate(p.system, p.B, f, g, grid, 1.0, 0.0)
    assert 0 < r < 10 and lhs == pytest.approx(r * rhs)
    lhs2, rhs2, _ = verify_weighted_estimate(p.system, p.B, f, g, grid, 1.0, 0.0, mode="shifted")
    assert lhs2 == pytest.approx(lhs) and rhs2 == pytest.approx(rhs)
    with pytest.raises(ValueError):
        verify_weighted_estimate(p.system, p.B, f, g, grid, 1.0, 0.0, mode="bogus")
