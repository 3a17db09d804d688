"""First-order hyperbolic systems with constant coefficients.

The operator is ``A0 d_t + sum_j Aj d_j`` on the half-space ``x_d > 0``.
After the tangential Fourier-Laplace transform the normal ODE reads
``Ad U' = G U + f`` with ``G = -i [A0 (tau - i gamma) + sum_{j<d} Aj eta_j]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize_scalar
from scipy.special import ndtri
from scipy.stats import qmc

from .algebra import pencil_eigen, resolvent_norm
from .config import DEFAULT, Tolerances
from .errors import NotHyperbolic, SingularMatrix

__all__ = [
    "SymbolMode",
    "CustomSymbol",
    "HyperbolicSystem",
    "Frequency",
    "Classification",
    "build_G",
    "classify",
    "characteristic_roots",
    "check_resolvent_bound",
    "check_homogeneity",
    "sphere_points",
    "symmetrized",
    "symmetric_check",
]


class SymbolMode(enum.Enum):
    LINEAR = "linear"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Frequency:
    tau: float
    eta: np.ndarray
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "eta", np.atleast_1d(np.asarray(self.eta, dtype=float)).ravel())
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def radius(self) -> float:
        return math.sqrt(self.tau**2 + float(self.eta @ self.eta) + self.gamma**2)

    def normalized(self) -> "Frequency":
        r = self.radius
        if abs(r - 1.0) <= 1e-15:
            return self
        return Frequency(self.tau / r, self.eta / r, self.gamma / r)

    def scaled(self, s: float) -> "Frequency":
        return Frequency(s * self.tau, s * self.eta, s * self.gamma)

    @property
    def tau_c(self) -> complex:
        """The complex time frequency ``tau - i gamma``."""
        return complex(self.tau, -self.gamma)


@dataclass(frozen=True)
class CustomSymbol:
    """Symbol given by a function rather than coefficient matrices.

    ``G`` must be positively homogeneous of degree one in
    ``(tau, eta, gamma)``.
    """

    tag: str
    Ad: np.ndarray
    G: Callable[[Frequency], np.ndarray]
    roots: Callable[[np.ndarray], list] | None = None
    params: dict = field(default_factory=dict)


@dataclass
class HyperbolicSystem:
    d: int
    N: int
    A: list[np.ndarray]
    symbol_mode: SymbolMode = SymbolMode.LINEAR
    custom_symbol: CustomSymbol | None = None
    name: str = ""

    def __post_init__(self):
        if self.d < 1 or self.N < 1:
            raise ValueError(f"need d >= 1 and N >= 1, got d={self.d}, N={self.N}")
        self.A = [np.asarray(a, dtype=complex) for a in self.A]
        if self.symbol_mode is SymbolMode.LINEAR:
            if len(self.A) != self.d + 1:
                raise ValueError(f"expected {self.d + 1} coefficient matrices, got {len(self.A)}")
            for j, a in enumerate(self.A):
                if a.shape != (self.N, self.N):
                    raise ValueError(f"A[{j}] has shape {a.shape}, expected {(self.N, self.N)}")
            if np.linalg.matrix_rank(self.A[0]) < self.N:
                raise ValueError("A0 must be invertible")
        elif self.custom_symbol is None:
            raise ValueError("CUSTOM symbol mode requires custom_symbol")

    @classmethod
    def linear(cls, A: Sequence, name: str = "") -> "HyperbolicSystem":
        A = [np.atleast_2d(np.asarray(a, dtype=complex)) for a in A]
        return cls(len(A) - 1, A[0].shape[0], A, name=name)

    @property
    def Ad(self) -> np.ndarray:
        if self.symbol_mode is SymbolMode.CUSTOM:
            return np.asarray(self.custom_symbol.Ad, dtype=complex)
        return self.A[-1]

    def frequency(self, tau: float, eta=(), gamma: float = 1.0) -> Frequency:
        eta = np.zeros(self.d - 1) if len(np.atleast_1d(eta)) == 0 else eta
        return Frequency(tau, eta, gamma)


@dataclass
class Classification:
    symmetric: bool
    constantly_hyperbolic: bool
    strictly_hyperbolic: bool
    characteristic_boundary: bool
    mu: int
    diagnostics: list[tuple[str, float]] = field(default_factory=list)


def build_G(system: HyperbolicSystem, freq: Frequency) -> np.ndarray:
    if system.symbol_mode is SymbolMode.CUSTOM:
        return np.asarray(system.custom_symbol.G(freq), dtype=complex)
    G = system.A[0] * freq.tau_c
    for j in range(system.d - 1):
        G = G + system.A[j + 1] * freq.eta[j]
    return -1j * G


def sphere_points(dim: int, n: int, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points on the unit sphere in ``R^dim``.

    Scrambled Halton points pushed through the inverse normal CDF and
    normalised.  ``dim == 1`` alternates between +1 and -1.
    """
    if dim == 1:
        return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)[:, None]
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(n)
    z = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def symmetrized(system: HyperbolicSystem) -> list[np.ndarray]:
    """``A0^{-1/2} Aj A0^{-1/2}`` for a symmetric system (test helper)."""
    w, V = np.linalg.eigh(system.A[0])
    s = V @ np.diag(w**-0.5) @ V.conj().T
    return [s @ a @ s for a in system.A]


def symmetric_check(system: HyperbolicSystem, tol: Tolerances) -> tuple[bool, list]:
    if system.symbol_mode is SymbolMode.CUSTOM:
        return False, [("symmetric: custom symbol", math.nan)]
    diag = []
    ok = True
    for j, a in enumerate(system.A):
        dev = float(np.abs(a - a.conj().T).max()) / max(1.0, float(np.abs(a).max()))
        diag.append((f"hermitian A{j}", dev))
        ok &= dev <= tol.kernel
    if ok:
        lmin = float(np.linalg.eigvalsh(system.A[0]).min())
        diag.append(("A0 min eigenvalue", lmin))
        ok = lmin > 0
    return ok, diag


def characteristic_roots(
    system: HyperbolicSystem, xi, tol: Tolerances = DEFAULT
) -> list[tuple[float, int]]:
    """Real roots ``tau`` of ``det[A0 tau + sum_j Aj xi_j]`` with multiplicities.

    Raises :class:`NotHyperbolic` if a root is not real or if a root's
    eigenspace is smaller than its algebraic multiplicity.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise ValueError(f"xi must be a unit vector, |xi| = {np.linalg.norm(xi)}")
    if system.symbol_mode is SymbolMode.CUSTOM:
        if system.custom_symbol.roots is None:
            raise NotImplementedError(f"custom symbol {system.custom_symbol.tag!r} has no root oracle")
        return system.custom_symbol.roots(xi)
    P = sum(system.A[j + 1] * xi[j] for j in range(system.d))
    A0 = system.A[0]
    sym, _ = symmetric_check(system, tol)
    if sym:
        S = symmetrized(system)
        Ps = sum(S[j + 1] * xi[j] for j in range(system.d))
        roots = -np.linalg.eigvalsh(0.5 * (Ps + Ps.conj().T)).astype(complex)
    else:
        roots = -np.linalg.eigvals(np.linalg.solve(A0, P))
    scale = max(1.0, float(np.abs(roots).max()))
    bad = np.abs(roots.imag) > tol.root_imag * scale
    if np.any(bad):
        raise NotHyperbolic(
            f"non-real characteristic root {roots[bad][0]:.6g} at xi={xi.tolist()} "
            f"(|Im| > {tol.root_imag * scale:.1e})",
            sample=xi,
        )
    r = np.sort(roots.real)
    groups = []
    for v in r:
        if groups and abs(v - groups[-1][-1]) <= tol.root_cluster * scale:
            groups[-1].append(v)
        else:
            groups.append([v])
    out = []
    for g in groups:
        root = float(np.mean(g))
        m = len(g)
        if m > 1:
            s = np.linalg.svd(A0 * root + P, compute_uv=False)
            thresh = math.sqrt(tol.root_cluster) * max(1.0, s[0])
            geo = int((s <= thresh).sum())
            if geo < m:
                raise NotHyperbolic(
                    f"root {root:.6g} at xi={xi.tolist()} has algebraic multiplicity {m} "
                    f"but geometric multiplicity {geo}",
                    sample=xi,
                )
        out.append((root, m))
    return out


def classify(
    system: HyperbolicSystem, sphere_samples: int = 200, seed: int = 0, tol: Tolerances = DEFAULT
) -> Classification:
    """Symmetric / constantly / strictly hyperbolic flags and boundary type.

    Constant multiplicity is certified on ``sphere_samples`` low-discrepancy
    directions only.
    """
    if sphere_samples < 1:
        raise ValueError("sphere_samples must be >= 1")
    sym, diag = symmetric_check(system, tol)
    patterns = set()
    try:
        for xi in sphere_points(system.d, sphere_samples, seed):
            roots = characteristic_roots(system, xi, tol)
            patterns.add(tuple(m for _, m in roots))
    except NotHyperbolic:
        if not sym:
            raise
        patterns.add(("irregular",))
    constant = len(patterns) == 1 and "irregular" not in next(iter(patterns))
    strict = constant and all(m == 1 for m in next(iter(patterns)))
    diag.append(("multiplicity patterns", float(len(patterns))))
    if not (sym or constant):
        raise NotHyperbolic(f"multiplicity pattern changes over the sphere: {sorted(patterns)}")

    Ad = system.Ad
    s = np.linalg.svd(Ad, compute_uv=False)
    sig = float(s[-1] / max(s[0], 1e-300))
    diag.append(("Ad sigma_min/sigma_max", sig))
    characteristic = sig <= tol.kernel

    ref = system.frequency(0.3, np.full(system.d - 1, 0.2), 0.8).normalized()
    mu = pencil_eigen(Ad, build_G(system, ref), tol).mu
    return Classification(sym, constant, strict, characteristic, mu, diag)


def check_homogeneity(system: HyperbolicSystem, samples: int = 16, seed: int = 0) -> float:
    """Largest relative deviation of ``G(s w) - s G(w)`` over random samples."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        f = Frequency(rng.normal(), rng.normal(size=system.d - 1), abs(rng.normal()) + 0.1)
        s = float(np.exp(rng.uniform(-3, 3)))
        a = build_G(system, f.scaled(s))
        b = s * build_G(system, f)
        worst = max(worst, float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)))
    return worst


def check_resolvent_bound(
    system: HyperbolicSystem,
    samples: int = 10_000,
    gamma_set: Sequence[float] = (1e-3, 1e-1, 1.0, 10.0, 1e3),
    seed: int = 0,
    refine: int = 8,
    tol: Tolerances = DEFAULT,
) -> tuple[float, dict]:
    """Supremum of ``gamma * |(i xi_d Ad - G)^{-1}|`` over sampled frequencies.

    ``(tau, eta, xi_d)`` are drawn with random direction and log-uniform
    radius; each sample is paired with a ``gamma`` from ``gamma_set``.  The
    ``refine`` best samples are then maximised over ``xi_d`` alone.
    Ties break toward the lowest sample index.
    """
    if any(g <= 0 for g in gamma_set):
        raise ValueError("gamma_set must be positive")
    rng = np.random.default_rng(seed)
    d = system.d
    dirs = rng.normal(size=(samples, d + 1))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = 10.0 ** rng.uniform(-3, 3, size=samples)
    gammas = np.asarray(gamma_set, dtype=float)[np.arange(samples) % len(gamma_set)]
    pts = dirs * (radii * gammas)[:, None]
    Ad = system.Ad

    def value(tau, eta, xi_d, gamma):
        G = build_G(system, Frequency(tau, eta, gamma))
        try:
            return gamma * resolvent_norm(Ad, G, xi_d, tol)
        except SingularMatrix as exc:
            raise NotHyperbolic(
                f"resolvent singular at tau={tau}, eta={list(eta)}, xi_d={xi_d}, gamma={gamma}: {exc}",
                sample=(tau, eta, xi_d, gamma),
            ) from exc

    vals = np.array([value(p[0], p[1:d], p[d], g) for p, g in zip(pts, gammas)])
    order = np.argsort(-vals, kind="stable")
    best_val = float(vals[order[0]])
    best = order[0]
    best_point = dict(tau=pts[best, 0], eta=pts[best, 1:d], xi_d=pts[best, d], gamma=gammas[best])
    for i in order[: max(refine, 0)]:
        tau, eta, g = pts[i, 0], pts[i, 1:d], gammas[i]
        x0 = pts[i, d]
        outer = 2.0 * (abs(x0) + abs(tau) + float(np.abs(eta).sum()) + g)
        for width in (0.5 * g, 5.0 * g, 50.0 * g, outer):
            res = minimize_scalar(
                lambda x: -value(tau, eta, x, g),
                bounds=(x0 - width, x0 + width),
                method="bounded",
                options={"xatol": 1e-12 * max(1.0, width)},
            )
            v = -res.fun
            if v > best_val:
                best_val = float(v)
                best_point = dict(tau=tau, eta=eta, xi_d=float(res.x), gamma=g)
                x0 = float(res.x)
    return best_val, best_point
