"""Boundary operators: kernel inclusion, Kreiss-Sakamoto ratios and the
numerical loss-of-derivatives power.

On the unit hemisphere the weakened condition reads
``|B v| >= c * gamma**s * |Ad v|`` for ``v`` in the stable subspace.  The
power ``s`` is estimated as the log-log slope of the smallest observed
ratio as ``gamma -> 0``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize

from .algebra import pencil_eigen
from .config import DEFAULT, Tolerances
from .errors import DegenerateWeight, FitUnstable, GapCollapse
from .hyperbolic import Frequency, HyperbolicSystem, build_G, sphere_points
from .parallel import pmap

__all__ = [
    "Weight",
    "BoundaryOperator",
    "PowerEstimate",
    "check_kernel_inclusion",
    "kernel_witness",
    "ks_ratio",
    "ratio_at",
    "estimate_power",
    "check_uniform_ks",
    "default_gamma_grid",
]

WorstCase = Callable[[float], np.ndarray]


class Weight(enum.Enum):
    AD_WEIGHTED = "ad"
    IDENTITY_WEIGHTED = "identity"


@dataclass(frozen=True)
class BoundaryOperator:
    """``mu x N`` boundary matrix, optionally frequency dependent.

    ``symbol`` (if given) maps a :class:`Frequency` to the matrix and must
    be homogeneous of degree zero; ``B`` then holds its value at a
    reference point and is used only for shape checks.
    """

    B: np.ndarray
    mu: int
    symbol: Callable[[Frequency], np.ndarray] | None = None
    tag: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, dtype=complex))
        object.__setattr__(self, "B", B)
        if B.shape[0] != self.mu:
            raise ValueError(f"B has {B.shape[0]} rows but mu = {self.mu}")

    def matrix(self, freq: Frequency | None = None) -> np.ndarray:
        if self.symbol is None or freq is None:
            return self.B
        return np.atleast_2d(np.asarray(self.symbol(freq), dtype=complex))

    @property
    def N(self) -> int:
        return self.B.shape[1]


@dataclass
class PowerEstimate:
    s_hat: float
    fit_range: tuple[float, float]
    per_gamma_rho: list[tuple[float, float]]
    regression_r2: float
    worst_frequencies: list[Frequency]
    raw_slope: float = math.nan
    fit_unstable: bool = False


def _matrix(B) -> np.ndarray:
    return B.B if isinstance(B, BoundaryOperator) else np.atleast_2d(np.asarray(B, dtype=complex))


def kernel_witness(B, Ad, freq: Frequency | None = None, tol: Tolerances = DEFAULT):
    """Null-space vector of ``Ad`` maximising ``|B v|`` and that value."""
    Bm = B.matrix(freq) if isinstance(B, BoundaryOperator) else _matrix(B)
    Ad = np.asarray(Ad, dtype=complex)
    if Bm.shape[1] != Ad.shape[1]:
        raise ValueError(f"B has {Bm.shape[1]} columns, Ad has {Ad.shape[1]}")
    K = sla.null_space(Ad / (np.linalg.norm(Ad, 2) or 1.0), rcond=tol.kernel)
    if K.shape[1] == 0:
        return None, 0.0
    _, s, vh = np.linalg.svd(Bm @ K)
    return K @ vh[0].conj(), float(s[0])


def check_kernel_inclusion(B, Ad, tol: Tolerances = DEFAULT, freq: Frequency | None = None) -> bool:
    """True iff ``B`` annihilates the null space of ``Ad``."""
    _, val = kernel_witness(B, Ad, freq, tol)
    scale = max(1.0, float(np.linalg.norm(_matrix(B), 2)))
    return val <= tol.kernel * scale


def ks_ratio(B, Ad, stable_basis, weight: Weight = Weight.AD_WEIGHTED, tol: Tolerances = DEFAULT) -> float:
    """Smallest ``|B v| / |Ad v|`` (or ``|B v| / |v|``) over ``span(stable_basis)``.

    ``stable_basis`` must have orthonormal columns.
    """
    Bm = _matrix(B)
    V = np.asarray(stable_basis, dtype=complex)
    mu = V.shape[1]
    if mu == 0:
        return math.inf
    BV = Bm @ V
    if weight is Weight.AD_WEIGHTED:
        AV = np.asarray(Ad, dtype=complex) @ V
        s = np.linalg.svd(AV, compute_uv=False)
        cond = s[0] / s[-1] if s[-1] > 0 else math.inf
        if cond > tol.degenerate_weight:
            raise DegenerateWeight(f"cond(Ad V) = {cond:.3e} exceeds {tol.degenerate_weight:.1e}")
        _, R = np.linalg.qr(AV)
        BV = sla.solve_triangular(R.T, BV.T, lower=True).T
    if BV.shape[0] < mu:
        return 0.0
    return float(np.linalg.svd(BV, compute_uv=False)[mu - 1])


def ratio_at(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    freq: Frequency,
    weight: Weight = Weight.AD_WEIGHTED,
    tol: Tolerances = DEFAULT,
) -> float:
    decomp = pencil_eigen(system.Ad, build_G(system, freq), tol)
    return ks_ratio(B.matrix(freq), system.Ad, decomp.stable_basis, weight, tol)


def default_gamma_grid(gmin: float = 1e-4, gmax: float = 1e-1, count: int = 12) -> np.ndarray:
    return np.geomspace(gmin, gmax, count)


def _on_hemisphere(direction: np.ndarray, gamma: float) -> Frequency:
    v = np.asarray(direction, dtype=float)
    v = v / np.linalg.norm(v) * math.sqrt(1.0 - gamma**2)
    return Frequency(v[0], v[1:], gamma)


def _sweep_min(system, B, gamma, dirs, weight, tol, refine, starts=3):
    freqs = [_on_hemisphere(v, gamma) for v in dirs]
    vals = np.asarray(pmap(lambda f: ratio_at(system, B, f, weight, tol), freqs))
    order = np.argsort(vals, kind="stable")
    best_val = float(vals[order[0]])
    best_dir = np.asarray(dirs[order[0]], dtype=float)
    if refine and dirs.shape[1] > 1:

        def objective(v):
            if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
                return math.inf
            try:
                return ratio_at(system, B, _on_hemisphere(v, gamma), weight, tol)
            except (GapCollapse, DegenerateWeight):
                return math.inf

        for i in order[:starts]:
            v0 = np.asarray(dirs[i], dtype=float)
            v0 = v0 / np.linalg.norm(v0)
            res = minimize(
                objective,
                v0,
                method="Nelder-Mead",
                options=dict(xatol=1e-10, fatol=1e-14 * max(best_val, 1e-300), maxiter=400, initial_simplex=None),
            )
            if res.fun < best_val:
                best_val = float(res.fun)
                best_dir = res.x / np.linalg.norm(res.x)
    return best_val, _on_hemisphere(best_dir, gamma), best_dir


def estimate_power(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    gamma_grid: Sequence[float] | None = None,
    freq_samples: int = 256,
    seed: int = 0,
    worst_case: WorstCase | None = None,
    refine: bool = True,
    fit_decades: float = 1.0,
    tol: Tolerances = DEFAULT,
) -> PowerEstimate:
    """Estimate the smallest power ``s`` with ``|Bv| >~ gamma^s |Ad v|``.

    For every ``gamma`` the AD-weighted ratio is minimised over
    low-discrepancy hemisphere directions, the points returned by
    ``worst_case(gamma)`` (model-specific thin sets), the previous
    minimiser, and a Nelder-Mead polish of the best few.  The power is the
    least-squares slope of ``log rho_min`` against ``log gamma`` over the
    lowest ``fit_decades`` of the grid.
    """
    grid = np.sort(np.asarray(default_gamma_grid() if gamma_grid is None else gamma_grid, float))
    if grid.size < 6 or grid[0] <= 0 or grid[-1] >= 1:
        raise ValueError("gamma_grid needs >= 6 points inside (0, 1)")
    if not check_kernel_inclusion(B, system.Ad, tol):
        raise ValueError("kernel inclusion N(Ad) in N(B) fails; power is undefined")
    base = sphere_points(system.d, freq_samples, seed)
    rows = []
    worst = []
    prev = None
    for gamma in grid[::-1]:
        dirs = [base]
        if worst_case is not None:
            extra = np.atleast_2d(np.asarray(worst_case(float(gamma)), dtype=float))
            if extra.size:
                dirs.append(extra)
        if prev is not None:
            dirs.append(prev[None, :])
        rho, freq, prev = _sweep_min(system, B, float(gamma), np.vstack(dirs), Weight.AD_WEIGHTED, tol, refine)
        rows.append((float(gamma), rho))
        worst.append(freq)
    rows.reverse()
    worst.reverse()
    g = np.array([r[0] for r in rows])
    rho = np.array([r[1] for r in rows])
    if np.any(rho <= 0):
        raise ValueError("Lopatinskii condition fails: zero ratio encountered")
    sel = g <= g[0] * 10.0**fit_decades * (1 + 1e-12)
    x, y = np.log(g[sel]), np.log(rho[sel])
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss if ss > 0 else 1.0
    unstable = r2 < tol.fit_r2
    if unstable:
        warnings.warn(f"power fit r^2 = {r2:.4f} < {tol.fit_r2}", FitUnstable, stacklevel=2)
    return PowerEstimate(
        s_hat=float(min(max(slope, 0.0), 1.0)),
        fit_range=(float(g[sel][0]), float(g[sel][-1])),
        per_gamma_rho=rows,
        regression_r2=r2,
        worst_frequencies=worst,
        raw_slope=float(slope),
        fit_unstable=unstable,
    )


def check_uniform_ks(
    system: HyperbolicSystem,
    B: BoundaryOperator,
    freq_samples: int = 256,
    seed: int = 0,
    gammas: Sequence[float] = (0.9, 0.5, 1e-1, 1e-2, 1e-3, 1e-4),
    worst_case: WorstCase | None = None,
    tol: Tolerances = DEFAULT,
) -> tuple[bool, float]:
    """Sampled check of ``|Bv| >~ |v|`` on the stable subspace.

    Holds when the infimum of the identity-weighted ratio exceeds the
    threshold and the minima at the two smallest ``gamma`` differ by less
    than the allowed relative drift.
    """
    base = sphere_points(system.d, freq_samples, seed)
    mins = {}
    for gamma in sorted(gammas, reverse=True):
        dirs = [base]
        if worst_case is not None:
            extra = np.atleast_2d(np.asarray(worst_case(float(gamma)), dtype=float))
            if extra.size:
                dirs.append(extra)
        mins[gamma], _, _ = _sweep_min(
            system, B, float(gamma), np.vstack(dirs), Weight.IDENTITY_WEIGHTED, tol, refine=False
        )
    inf_ratio = min(mins.values())
    small = sorted(mins)[:2]
    a, b = mins[small[0]], mins[small[1]]
    drift = abs(a - b) / max(a, b, 1e-300)
    holds = inf_ratio > tol.uniform_ks_threshold and drift < tol.uniform_ks_drift
    return bool(holds), float(inf_ratio)
