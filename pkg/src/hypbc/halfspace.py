"""Half-space solver in the tangential Fourier domain and weighted norms.

For each tangential frequency the normal ODE ``Ad U' = G U + f`` on
``x_d > 0`` is solved as ``U = U1 + U2``: ``U1`` is the square-integrable
whole-line solution for ``f`` extended by zero to ``x_d < 0``, and ``U2`` is
a decaying homogeneous solution that corrects the boundary datum.

``U1`` is the convolution of ``f`` with the kernel of
``(i xi Ad - G)^{-1}``.  Its stable and unstable parts are propagated exactly
by matrix exponentials and ``f`` is interpolated by degree-5 polynomials
between grid points (``method="expint"``).  ``method="fft"`` evaluates the
same Fourier integral by a discrete transform of the zero-padded profile;
it converges slowly because the extension by zero is discontinuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .algebra import PencilDecomposition, constant_term, pencil_eigen, pencil_moments, stable_contours
from .config import DEFAULT, Tolerances
from .errors import HypbcError, NotSymmetric, RankDeficientJ, SolverFailure
from .hyperbolic import Frequency, HyperbolicSystem, SymbolMode, build_G, classify
from .lopatinskii import BoundaryOperator
from .parallel import pmap

__all__ = [
    "FrequencyProblem",
    "FrequencySolution",
    "SpaceTimeGrid",
    "SobolevParams",
    "HalfspaceSolution",
    "default_xd_grid",
    "solve_u1",
    "solve_u2",
    "solve_frequency",
    "manufactured_frequency",
    "solve",
    "manufactured",
    "sobolev_boundary",
    "sobolev_interior",
    "verify_weighted_estimate",
    "verify_trace_estimate",
]

STENCIL = 6


@dataclass
class FrequencyProblem:
    """Normal ODE data at one frequency.

    ``f_hat`` has shape ``(len(xd), N)``; ``xd`` is uniform and starts at 0.
    """

    freq: Frequency
    xd: np.ndarray
    f_hat: np.ndarray
    g_hat: np.ndarray

    def __post_init__(self):
        self.xd = np.asarray(self.xd, dtype=float)
        self.f_hat = np.atleast_2d(np.asarray(self.f_hat, dtype=complex))
        self.g_hat = np.atleast_1d(np.asarray(self.g_hat, dtype=complex))
        if self.f_hat.shape[0] != self.xd.size:
            raise ValueError(f"f_hat has {self.f_hat.shape[0]} rows for {self.xd.size} grid points")
        if self.xd.size < STENCIL or self.xd[0] != 0:
            raise ValueError(f"xd must start at 0 and have at least {STENCIL} points")
        dx = np.diff(self.xd)
        if not np.allclose(dx, dx[0], rtol=1e-10, atol=0):
            raise ValueError("xd must be uniform")

    @property
    def h(self) -> float:
        return float(self.xd[1] - self.xd[0])


@dataclass
class FrequencySolution:
    freq: Frequency
    xd: np.ndarray
    U: np.ndarray
    U1: np.ndarray
    U2: np.ndarray
    trace: np.ndarray
    weighted_trace: np.ndarray


@dataclass
class SobolevParams:
    s: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Periodic tangential grid ``[0, T) x [0, Y_1) x ...`` and ``x_d`` in ``[0, L]``."""

    nt: int
    ny: tuple[int, ...]
    nxd: int
    T: float
    Y: tuple[float, ...]
    L: float

    def __post_init__(self):
        object.__setattr__(self, "ny", tuple(int(n) for n in self.ny))
        object.__setattr__(self, "Y", tuple(float(y) for y in self.Y))
        if len(self.ny) != len(self.Y):
            raise ValueError("ny and Y must have the same length")
        if min((self.nt, self.nxd, *self.ny)) < 1 or min((self.T, self.L, *self.Y)) <= 0:
            raise ValueError("grid counts and extents must be positive")
        if self.nxd < STENCIL:
            raise ValueError(f"nxd must be at least {STENCIL}")

    @property
    def d(self) -> int:
        return len(self.ny) + 1

    @property
    def tangential_shape(self) -> tuple[int, ...]:
        return (self.nt, *self.ny)

    @property
    def spacings(self) -> tuple[float, ...]:
        return (self.T / self.nt, *(y / n for y, n in zip(self.Y, self.ny)))

    @property
    def h(self) -> float:
        return self.L / (self.nxd - 1)

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.nt) * (self.T / self.nt)

    @property
    def xd(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.nxd)

    def frequencies(self) -> list[np.ndarray]:
        """Angular frequencies along each tangential axis, in FFT order."""
        return [2 * np.pi * np.fft.fftfreq(n, dx) for n, dx in zip(self.tangential_shape, self.spacings)]

    @property
    def cell(self) -> float:
        return float(np.prod(self.spacings))

    def xd_weights(self) -> np.ndarray:
        w = np.full(self.nxd, self.h)
        w[[0, -1]] *= 0.5
        return w


@dataclass
class HalfspaceSolution:
    """Solution of the space-time problem.

    ``w = exp(-gamma t) u`` is stored because ``u`` itself overflows for
    large ``gamma T``; ``trace_field`` is ``Ad w(x_d = 0)``.
    """

    w: np.ndarray
    w_hat: np.ndarray
    trace_field: np.ndarray
    gamma: float
    grid: SpaceTimeGrid
    failures: list = field(default_factory=list)
    norms: dict = field(default_factory=dict)

    @property
    def u(self) -> np.ndarray:
        shape = (1, self.grid.nt) + (1,) * (self.w.ndim - 2)
        return self.w * np.exp(self.gamma * self.grid.t).reshape(shape)


# -- exponential integrator -------------------------------------------------


def _phi_functions(A: np.ndarray, kmax: int) -> list[np.ndarray]:
    """``[phi_0(A), ..., phi_kmax(A)]`` from one augmented exponential."""
    n = A.shape[0]
    big = np.zeros(((kmax + 1) * n, (kmax + 1) * n), dtype=complex)
    big[:n, :n] = A
    for k in range(kmax):
        big[k * n : (k + 1) * n, (k + 1) * n : (k + 2) * n] = np.eye(n)
    E = sla.expm(big)
    return [E[:n, k * n : (k + 1) * n] for k in range(kmax + 1)]


@lru_cache(maxsize=None)
def _taylor_weights(offset: int) -> np.ndarray:
    """``D[j, m]``: ``j``-th derivative at 0 of the Lagrange basis on nodes ``m - offset``."""
    nodes = np.arange(STENCIL) - offset
    V = np.array([[s**j / math.factorial(j) for j in range(STENCIL)] for s in nodes])
    return np.linalg.inv(V)


def _offsets(n: int) -> np.ndarray:
    k = np.arange(n - 1)
    c = np.minimum(k, 2)
    return np.maximum(c, k + STENCIL - n)


def _causal_convolution(M: np.ndarray, K: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    """``Y(x) = int_0^x exp((x - y) M) K f(y) dy`` on a uniform grid."""
    n, N = f.shape
    phis = _phi_functions(h * M, STENCIL)
    E = phis[0]
    PK = np.stack([phis[j + 1] @ K for j in range(STENCIL)])
    offsets = _offsets(n)
    Psi = {c: h * np.einsum("jab,jm->mab", PK, _taylor_weights(int(c))) for c in np.unique(offsets)}
    Y = np.zeros((n, N), dtype=complex)
    for k, c in enumerate(offsets):
        window = f[k - c : k - c + STENCIL]
        Y[k + 1] = E @ Y[k] + np.einsum("mab,mb->a", Psi[c], window)
    return Y


@dataclass
class _Pencil:
    decomp: PencilDecomposition
    Ps: np.ndarray
    Ks: np.ndarray
    Ms: np.ndarray
    Ku: np.ndarray
    Mu: np.ndarray
    C: np.ndarray


def _pencil(system: HyperbolicSystem, freq: Frequency, tol: Tolerances) -> _Pencil:
    Ad = system.Ad
    G = build_G(system, freq)
    decomp = pencil_eigen(Ad, G, tol)
    Ps, Ks, Ms = pencil_moments(Ad, G, stable_contours(decomp, "stable", tol=tol), tol)
    _, Ku, Mu = pencil_moments(Ad, G, stable_contours(decomp, "unstable", tol=tol), tol)
    if decomp.n_central:
        C = constant_term(Ad, G, decomp, tol)
    else:
        C = np.zeros_like(G)
    return _Pencil(decomp, Ps, Ks, Ms, Ku, Mu, C)


def default_xd_grid(system: HyperbolicSystem, freq: Frequency, points: int = 512, decay_lengths: float = 20.0, tol: Tolerances = DEFAULT) -> np.ndarray:
    """``[0, L]`` with ``L`` equal to ``decay_lengths`` over the stable abscissa."""
    sigma = pencil_eigen(system.Ad, build_G(system, freq), tol).stable_abscissa
    return np.linspace(0.0, decay_lengths / abs(sigma), points)


def _u1_expint(pen: _Pencil, f: np.ndarray, h: float) -> np.ndarray:
    Y = _causal_convolution(pen.Ms, pen.Ks, f, h)
    Z = _causal_convolution(-pen.Mu, pen.Ku, f[::-1], h)[::-1]
    return Y - Z + f @ pen.C.T


def _u1_fft(system: HyperbolicSystem, freq: Frequency, f: np.ndarray, h: float) -> np.ndarray:
    n, N = f.shape
    m = 2 * n
    F = np.fft.fft(np.vstack([f, np.zeros((m - n, N))]), axis=0)
    xi = 2 * np.pi * np.fft.fftfreq(m, h)
    mats = 1j * xi[:, None, None] * system.Ad[None] - build_G(system, freq)[None]
    U = np.linalg.solve(mats, F[..., None])[..., 0]
    return np.fft.ifft(U, axis=0)[:n]


def solve_u1(system: HyperbolicSystem, freq: Frequency, f_hat, xd, method: str = "expint", tol: Tolerances = DEFAULT, _pen: _Pencil | None = None) -> np.ndarray:
    """Whole-line square-integrable solution restricted to ``xd``."""
    f = np.atleast_2d(np.asarray(f_hat, dtype=complex))
    xd = np.asarray(xd, dtype=float)
    h = float(xd[1] - xd[0])
    if not np.any(f):
        return np.zeros_like(f)
    if method == "fft":
        return _u1_fft(system, freq, f, h)
    if method != "expint":
        raise ValueError(f"unknown method {method!r}")
    pen = _pen or _pencil(system, freq, tol)
    return _u1_expint(pen, f, h)


def _correction(pen: _Pencil, Bm: np.ndarray, tol: Tolerances) -> np.ndarray:
    """``J^H (J J^H)^{-1}`` with ``J = B Pi``."""
    J = Bm @ pen.Ps
    s = np.linalg.svd(J, compute_uv=False)
    mu = pen.decomp.mu
    if J.shape[0] != mu or s.size < mu or s[mu - 1] < tol.rank_deficient_j * max(s[0], 1e-300):
        smin = s[mu - 1] if s.size >= mu else 0.0
        raise RankDeficientJ(
            f"J = B Pi has sigma_min/sigma_max = {smin / max(s[0], 1e-300):.3e} "
            f"< {tol.rank_deficient_j:.1e} (Lopatinskii condition fails)"
        )
    return J.conj().T @ np.linalg.inv(J @ J.conj().T)


def solve_u2(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    freq: Frequency,
    g_hat,
    u1_trace,
    xd,
    tol: Tolerances = DEFAULT,
    _pen: _Pencil | None = None,
) -> np.ndarray:
    """Decaying solution ``T(x) J^H (J J^H)^{-1} (g - B U1(0))``."""
    pen = _pen or _pencil(system, freq, tol)
    xd = np.asarray(xd, dtype=float)
    Bm = B.matrix(freq)
    datum = np.atleast_1d(np.asarray(g_hat, dtype=complex)) - Bm @ np.asarray(u1_trace, dtype=complex)
    out = np.zeros((xd.size, system.Ad.shape[0]), dtype=complex)
    if not np.any(datum):
        return out
    v = pen.Ps @ (_correction(pen, Bm, tol) @ datum)
    E = sla.expm((xd[1] - xd[0]) * pen.Ms)
    out[0] = v
    # out[m:2m] = E^m out[0:m]
    m = 1
    while m < xd.size:
        stop = min(2 * m, xd.size)
        out[m:stop] = out[: stop - m] @ E.T
        E = E @ E
        m *= 2
    return out


def solve_frequency(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    problem: FrequencyProblem,
    method: str = "expint",
    tol: Tolerances = DEFAULT,
) -> FrequencySolution:
    pen = _pencil(system, problem.freq, tol)
    U1 = solve_u1(system, problem.freq, problem.f_hat, problem.xd, method, tol, pen)
    U2 = solve_u2(system, B, problem.freq, problem.g_hat, U1[0], problem.xd, tol, pen)
    U = U1 + U2
    return FrequencySolution(problem.freq, problem.xd, U, U1, U2, U[0].copy(), system.Ad @ U[0])


def manufactured_frequency(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    freq: Frequency,
    w=None,
    kappa: float = 1.0,
    points: int = 512,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> tuple[FrequencyProblem, np.ndarray]:
    """Problem with exact solution ``W(x) = w exp(-kappa x)`` and that solution."""
    N = system.Ad.shape[0]
    if w is None:
        rng = np.random.default_rng(seed)
        w = rng.normal(size=N) + 1j * rng.normal(size=N)
    w = np.asarray(w, dtype=complex)
    sigma = pencil_eigen(system.Ad, build_G(system, freq), tol).stable_abscissa
    L = 20.0 * max(1.0 / abs(sigma), 1.0 / kappa)
    xd = np.linspace(0.0, L, points)
    W = np.exp(-kappa * xd)[:, None] * w[None, :]
    f = W @ (-kappa * system.Ad - build_G(system, freq)).T
    g = B.matrix(freq) @ W[0]
    return FrequencyProblem(freq, xd, f, g), W


# -- space-time assembly ----------------------------------------------------


def _tangential_axes(ndim_lead: int, d: int) -> tuple[int, ...]:
    return tuple(range(ndim_lead, ndim_lead + d))


def _time_weight(grid: SpaceTimeGrid, gamma: float, ndim: int) -> np.ndarray:
    shape = (1, grid.nt) + (1,) * (ndim - 2)
    return np.exp(-gamma * grid.t).reshape(shape)


def _fft(a: np.ndarray, d: int) -> np.ndarray:
    return np.fft.fftn(a, axes=_tangential_axes(1, d), norm="ortho")


def _ifft(a: np.ndarray, d: int) -> np.ndarray:
    return np.fft.ifftn(a, axes=_tangential_axes(1, d), norm="ortho")


def _frequency_points(grid: SpaceTimeGrid, gamma: float, mask: np.ndarray | None = None):
    axes = grid.frequencies()
    indices = np.ndindex(*grid.tangential_shape) if mask is None else map(tuple, np.argwhere(mask))
    for idx in indices:
        tau = axes[0][idx[0]]
        eta = np.array([axes[j + 1][idx[j + 1]] for j in range(grid.d - 1)])
        yield idx, Frequency(tau, eta, gamma)


def solve(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    f: np.ndarray | None,
    g: np.ndarray,
    grid: SpaceTimeGrid,
    params: SobolevParams,
    method: str = "expint",
    cutoff: float = 0.0,
    tol: Tolerances = DEFAULT,
) -> HalfspaceSolution:
    """Solve on the space-time grid.

    ``f`` has shape ``(N, nt, *ny, nxd)`` (``None`` for zero forcing) and
    ``g`` shape ``(mu, nt, *ny)``; both are unweighted and should vanish near ``t = 0`` and ``t = T``.
    Frequencies whose transformed data are at most ``cutoff`` times the
    largest are treated as zero.  Frequencies that fail are zeroed and
    listed; more than the allowed fraction raises :class:`SolverFailure`.
    """
    N = system.Ad.shape[0]
    d = grid.d
    if d != system.d:
        raise ValueError(f"grid has d = {d}, system has d = {system.d}")
    if f is None:
        f = np.zeros((N, *grid.tangential_shape, grid.nxd), dtype=complex)
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != (N, *grid.tangential_shape, grid.nxd):
        raise ValueError(f"f has shape {f.shape}, expected {(N, *grid.tangential_shape, grid.nxd)}")
    if g.shape[1:] != grid.tangential_shape:
        raise ValueError(f"g has shape {g.shape}, expected (mu, {grid.tangential_shape})")
    gamma = params.gamma
    f_hat = _fft(f * _time_weight(grid, gamma, f.ndim), d)
    g_hat = _fft(g * _time_weight(grid, gamma, g.ndim), d)
    xd = grid.xd
    size = np.sqrt(np.sum(np.abs(f_hat) ** 2, axis=(0, -1)) + np.sum(np.abs(g_hat) ** 2, axis=0))
    active = size > cutoff * size.max() if size.max() > 0 else np.zeros(size.shape, bool)

    def one(item):
        idx, freq = item
        sl = (slice(None),) + idx
        fh = f_hat[sl].T
        gh = g_hat[sl]
        try:
            sol = solve_frequency(system, B, FrequencyProblem(freq, xd, fh, gh), method, tol)
        except HypbcError as exc:
            return idx, None, (freq, str(exc))
        return idx, sol.U.T, None

    w_hat = np.zeros(f.shape, dtype=complex)
    failures = []
    for idx, U, err in pmap(one, list(_frequency_points(grid, gamma, active))):
        if err is not None:
            failures.append(err)
        elif U is not None:
            w_hat[(slice(None),) + idx] = U
    total = int(np.prod(grid.tangential_shape))
    if len(failures) > tol.solver_failure_fraction * total:
        raise SolverFailure(
            f"{len(failures)} of {total} frequencies failed "
            f"(allowed {tol.solver_failure_fraction:.1%}); first: {failures[0][1]}",
            failures,
        )
    w = _ifft(w_hat, d)
    trace = np.tensordot(system.Ad, w[..., 0], axes=(1, 0))
    return HalfspaceSolution(w, w_hat, trace, gamma, grid, failures)


def manufactured(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    grid: SpaceTimeGrid,
    params: SobolevParams,
    kappa: float = 1.0,
    width: float | None = None,
    center: float | None = None,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Data ``(f, g)`` for an exact solution and that solution ``u``.

    ``u = v exp(-(t - t0)^2 / 2 w^2) prod_j exp(-(y_j - Y_j/2)^2 / 2 w_j^2) exp(-kappa x_d)``
    with a random complex ``v``, ``t0 = center`` (default ``T/2``) and
    ``w = width`` (default ``T/12``).  The forward operator is applied per
    tangential frequency, which covers custom symbols and frequency
    dependent boundary operators.
    """
    rng = np.random.default_rng(seed)
    N = system.Ad.shape[0]
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    v /= np.linalg.norm(v)
    width = grid.T / 12 if width is None else width
    center = grid.T / 2 if center is None else center
    prof = np.exp(-0.5 * ((grid.t - center) / width) ** 2)
    for Yj, nj in zip(grid.Y, grid.ny):
        y = np.arange(nj) * (Yj / nj)
        prof = np.multiply.outer(prof, np.exp(-0.5 * ((y - Yj / 2) / (Yj / 12)) ** 2))
    ex = np.exp(-kappa * grid.xd)
    u = np.multiply.outer(v, np.multiply.outer(prof, ex))
    gamma = params.gamma
    wt = _time_weight(grid, gamma, u.ndim)
    w_hat = _fft(u * wt, grid.d)
    f_hat = np.empty_like(w_hat)
    g_hat = np.empty((B.mu, *grid.tangential_shape), dtype=complex)
    for idx, freq in _frequency_points(grid, gamma):
        sl = (slice(None),) + idx
        W = w_hat[sl].T
        f_hat[sl] = (W @ (-kappa * system.Ad - build_G(system, freq)).T).T
        g_hat[sl] = B.matrix(freq) @ W[0]
    f = _ifft(f_hat, grid.d) / wt
    g = _ifft(g_hat, grid.d) / _time_weight(grid, gamma, g_hat.ndim)
    return f, g, u


# -- norms and estimates ----------------------------------------------------


def _sobolev_weight(grid: SpaceTimeGrid, params: SobolevParams) -> np.ndarray:
    axes = grid.frequencies()
    r2 = params.gamma**2 + sum(
        np.reshape(a**2, [-1 if i == j else 1 for i in range(len(axes))]) for j, a in enumerate(axes)
    )
    return r2**params.s


def sobolev_boundary(g: np.ndarray, grid: SpaceTimeGrid, params: SobolevParams, transformed: bool = False) -> float:
    """``|g|_{s,gamma}``; ``g`` has shape ``(k, nt, *ny)``."""
    gh = np.asarray(g) if transformed else _fft(np.asarray(g, dtype=complex), grid.d)
    wgt = _sobolev_weight(grid, params)
    return math.sqrt(grid.cell * float(np.sum(wgt[None] * np.abs(gh) ** 2)))


def sobolev_interior(f: np.ndarray, grid: SpaceTimeGrid, params: SobolevParams, transformed: bool = False) -> float:
    """``||f||_{s,gamma}`` with trapezoid quadrature in ``x_d``; ``f`` has shape ``(k, nt, *ny, nxd)``."""
    fh = np.asarray(f) if transformed else _fft(np.asarray(f, dtype=complex), grid.d)
    wgt = _sobolev_weight(grid, params)[None, ..., None]
    xw = grid.xd_weights()
    return math.sqrt(grid.cell * float(np.sum(wgt * xw * np.abs(fh) ** 2)))


def verify_weighted_estimate(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    f: np.ndarray | None,
    g: np.ndarray,
    grid: SpaceTimeGrid,
    gamma: float,
    s: float,
    mode: str = "standard",
    solution: HalfspaceSolution | None = None,
    method: str = "expint",
    tol: Tolerances = DEFAULT,
) -> tuple[float, float, float]:
    """``(lhs, rhs, lhs / rhs)`` of the weighted a-priori estimate with loss ``s``.

    ``mode="standard"`` measures the solution in L2 and the data in
    ``H^s``; ``mode="shifted"`` measures the solution in ``H^{-s}`` and the
    data in L2.  Zero data give ``(0, 0, 0)``.
    """
    if mode not in ("standard", "shifted"):
        raise ValueError(f"unknown mode {mode!r}")
    sol = solution or solve(system, B, f, g, grid, SobolevParams(0.0, gamma), method, tol=tol)
    r_sol, r_dat = (0.0, s) if mode == "standard" else (-s, 0.0)
    ps, pd = SobolevParams(r_sol, gamma), SobolevParams(r_dat, gamma)
    trace_hat = np.tensordot(system.Ad, sol.w_hat[..., 0], axes=(1, 0))
    lhs = gamma * sobolev_interior(sol.w_hat, grid, ps, True) ** 2 + sobolev_boundary(trace_hat, grid, ps, True) ** 2
    gw = np.asarray(g, dtype=complex) * _time_weight(grid, gamma, np.ndim(g))
    rhs = gamma ** (-2 * s) * sobolev_boundary(gw, grid, pd) ** 2
    if f is not None:
        fw = np.asarray(f, dtype=complex) * _time_weight(grid, gamma, np.ndim(f))
        rhs += gamma ** (-1 - 2 * s) * sobolev_interior(fw, grid, pd) ** 2
    sol.norms.update({f"lhs_{mode}_{s}": lhs, f"rhs_{mode}_{s}": rhs})
    if rhs == 0:
        return lhs, rhs, 0.0
    return lhs, rhs, lhs / rhs


def _trapezoid(y: np.ndarray, xd: np.ndarray) -> float:
    return float(np.trapezoid(y, xd)) if hasattr(np, "trapezoid") else float(np.trapz(y, xd))


def verify_trace_estimate(
    system: HyperbolicSystem,
    solution: FrequencySolution,
    problem: FrequencyProblem,
    tol: Tolerances = DEFAULT,
    check_symmetric: bool = True,
) -> tuple[float, float]:
    """Ratios of ``gamma int |U|^2`` and ``|Ad U(0)|^2`` to ``int |f|^2 / gamma + |A+ U+(0)|^2``.

    ``U+`` collects the components of ``U(0)`` along eigenvectors of the
    Hermitian ``Ad`` with positive eigenvalues and ``A+`` is the
    corresponding diagonal block.
    """
    if system.symbol_mode is SymbolMode.CUSTOM or (check_symmetric and not classify(system, 8, tol=tol).symmetric):
        raise NotSymmetric(f"system {system.name!r} is not symmetric hyperbolic")
    Ad = system.Ad
    dvals, V = np.linalg.eigh(0.5 * (Ad + Ad.conj().T))
    scale = max(1.0, float(np.abs(dvals).max()))
    pos = dvals > tol.infinite_beta * scale
    gamma = problem.freq.gamma
    xd = problem.xd
    c = V.conj().T @ solution.U[0]
    plus = float(np.sum((dvals[pos] * np.abs(c[pos])) ** 2))
    rhs = _trapezoid(np.sum(np.abs(problem.f_hat) ** 2, axis=1), xd) / gamma + plus
    interior = gamma * _trapezoid(np.sum(np.abs(solution.U) ** 2, axis=1), xd)
    trace = float(np.linalg.norm(Ad @ solution.U[0]) ** 2)
    if rhs == 0:
        return 0.0, 0.0
    return interior / rhs, trace / rhs
