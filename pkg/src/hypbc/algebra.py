"""Generalized eigenstructure of the boundary pencil (Ad, G).

Eigenvalues are the numbers ``lam`` with ``lam * Ad z = G z``; a mode
``exp(lam * x_d) z`` then solves ``Ad v' = G v``.  Stable eigenvalues have
negative real part, unstable ones positive real part, and the infinite
eigenvalues (``beta == 0``) span the null space of ``Ad``.

Spectral projectors and the decaying propagator are realised by the
trapezoidal rule on circles, which converges geometrically for the
rational integrands involved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT, Tolerances
from .errors import GapCollapse, QuadratureDivergence, SingularMatrix, SingularPencil

__all__ = [
    "EigenClass",
    "Eigenpair",
    "PencilDecomposition",
    "Contour",
    "pencil_eigen",
    "contour_from_spectrum",
    "stable_contours",
    "spectral_projector",
    "propagator",
    "pencil_moments",
    "constant_term",
    "resolvent_norm",
]

INFINITE = complex(math.inf, 0.0)


class EigenClass(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    CENTRAL = "central"


@dataclass(frozen=True)
class Eigenpair:
    alpha: complex
    beta: complex
    eigenvalue: complex
    cls: EigenClass
    multiplicity: int = 1

    @property
    def is_infinite(self) -> bool:
        return self.cls is EigenClass.CENTRAL


@dataclass
class PencilDecomposition:
    eigenpairs: list[Eigenpair]
    stable_basis: np.ndarray
    central_basis: np.ndarray
    mu: int
    spectral_gap: float
    scale: float = 1.0
    unstable_basis: np.ndarray | None = field(default=None, repr=False)

    def eigenvalues(self, cls: EigenClass) -> np.ndarray:
        """Finite eigenvalues of one class, repeated by multiplicity."""
        vals = [p.eigenvalue for p in self.eigenpairs if p.cls is cls for _ in range(p.multiplicity)]
        return np.asarray(vals, dtype=complex)

    @property
    def stable_abscissa(self) -> float:
        """Largest real part among stable eigenvalues (negative)."""
        vals = self.eigenvalues(EigenClass.STABLE)
        return float(vals.real.max()) if vals.size else -math.inf

    @property
    def n_central(self) -> int:
        return sum(p.multiplicity for p in self.eigenpairs if p.cls is EigenClass.CENTRAL)


@dataclass(frozen=True)
class Contour:
    center: complex
    radius: float
    nodes: int = 64


def _as_complex(m) -> np.ndarray:
    return np.atleast_2d(np.asarray(m, dtype=complex))


def _cluster(values: np.ndarray, rel: float) -> list[list[int]]:
    """Group indices whose values lie within ``rel`` relative distance."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) <= rel * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _homogeneous_pairs(Gs, As):
    w = sla.eig(Gs, As, right=False, homogeneous_eigvals=True)
    alpha, beta = w[0], w[1]
    nrm = np.sqrt(np.abs(alpha) ** 2 + np.abs(beta) ** 2)
    return alpha, beta, nrm


def _is_infinite(alpha, beta, tol):
    return np.abs(beta) <= tol * (np.abs(alpha) + np.abs(beta))


def pencil_eigen(Ad, G, tol: Tolerances = DEFAULT) -> PencilDecomposition:
    """Classify the generalized eigenvalues of ``lam * Ad z = G z``.

    Parameters
    ----------
    Ad, G : (N, N) array_like
        Boundary matrix and symbol.  ``G`` must be non-singular.
    tol : Tolerances
        Classification thresholds.

    Returns
    -------
    PencilDecomposition
        Eigenvalue clusters, an orthonormal basis of the stable subspace
        obtained from an ordered generalized Schur form, the null space of
        ``Ad`` and the gap between stable and remaining finite eigenvalues.

    Raises
    ------
    SingularPencil
        If ``det(alpha Ad - beta G)`` vanishes identically.
    GapCollapse
        If a finite eigenvalue lies on the imaginary axis within tolerance.
    """
    Ad = _as_complex(Ad)
    G = _as_complex(G)
    n = G.shape[0]
    a = np.linalg.norm(Ad, 2) or 1.0
    g = np.linalg.norm(G, 2)
    if g == 0.0:
        raise SingularPencil("G is the zero matrix; pencil (Ad, G) is not regular")
    As, Gs = Ad / a, G / g
    scale = g / a

    alpha, beta, nrm = _homogeneous_pairs(Gs, As)
    if np.any(nrm < tol.singular_pencil):
        raise SingularPencil(
            f"pencil is singular: |(alpha, beta)| = {nrm.min():.3e} < {tol.singular_pencil:.1e}"
        )
    alpha, beta = alpha / nrm, beta / nrm
    inf_mask = _is_infinite(alpha, beta, tol.infinite_beta)
    fin = ~inf_mask
    lam_s = np.full(n, np.nan + 0j)
    lam_s[fin] = alpha[fin] / beta[fin]
    if np.any(fin):
        re = np.abs(lam_s[fin].real)
        worst = float(re.min())
        bound = tol.imaginary_axis * max(1.0, float(np.abs(lam_s[fin]).max()))
        if worst <= bound:
            raise GapCollapse(
                f"finite eigenvalue with |Re lam| = {worst * scale:.3e} within "
                f"{bound * scale:.3e} of the imaginary axis"
            )

    pairs: list[Eigenpair] = []
    fin_idx = np.flatnonzero(fin)
    for group in _cluster(lam_s[fin_idx], tol.cluster):
        idx = fin_idx[group]
        lam = complex(lam_s[idx].mean()) * scale
        h = math.sqrt(1.0 + abs(lam) ** 2)
        cls = EigenClass.STABLE if lam.real < 0 else EigenClass.UNSTABLE
        pairs.append(Eigenpair(lam / h, 1.0 / h, lam, cls, len(idx)))
    n_inf = int(inf_mask.sum())
    if n_inf:
        pairs.append(Eigenpair(1.0 + 0j, 0j, INFINITE, EigenClass.CENTRAL, n_inf))
    pairs.sort(key=lambda p: (p.cls is EigenClass.CENTRAL, p.eigenvalue.real, p.eigenvalue.imag))

    mu = sum(p.multiplicity for p in pairs if p.cls is EigenClass.STABLE)
    stable_basis = _deflating_basis(Gs, As, mu, "stable", tol)
    n_unst = sum(p.multiplicity for p in pairs if p.cls is EigenClass.UNSTABLE)
    unstable_basis = _deflating_basis(Gs, As, n_unst, "unstable", tol)
    central_basis = sla.null_space(As, rcond=tol.kernel) if n_inf else np.zeros((n, 0), complex)

    stable = [p.eigenvalue for p in pairs if p.cls is EigenClass.STABLE]
    others = [p.eigenvalue for p in pairs if p.cls is EigenClass.UNSTABLE]
    if stable and others:
        gap = min(abs(s - o) for s in stable for o in others)
    else:
        gap = math.inf
    return PencilDecomposition(pairs, stable_basis, central_basis, mu, gap, scale, unstable_basis)


def _deflating_basis(Gs, As, k, which, tol):
    n = Gs.shape[0]
    if k == 0:
        return np.zeros((n, 0), complex)
    sign = -1.0 if which == "stable" else 1.0

    def select(alpha, beta):
        alpha = np.asarray(alpha)
        beta = np.asarray(beta)
        finite = ~_is_infinite(alpha, beta, tol.infinite_beta)
        with np.errstate(divide="ignore", invalid="ignore"):
            re = np.where(finite, (alpha / np.where(finite, beta, 1.0)).real, 0.0)
        return finite & (sign * re > 0)

    _, _, alpha, beta, _, Z = sla.ordqz(Gs, As, sort=select, output="complex")
    picked = int(select(alpha, beta).sum())
    if picked != k:
        raise GapCollapse(
            f"ordered Schur form found {picked} {which} eigenvalues, eigenvalue solver found {k}"
        )
    return Z[:, :k]


def _separating_circle(inside: Sequence[complex], outside: Sequence[complex]):
    center = complex(np.mean(inside))
    r_in = max(abs(z - center) for z in inside)
    d_out = min((abs(z - center) for z in outside), default=math.inf)
    if math.isinf(d_out):
        radius = r_in + 0.5 * max(r_in, abs(center.real))
        factor = r_in / radius
    else:
        radius = r_in + 0.5 * (d_out - r_in)
        factor = max(r_in / radius, radius / d_out)
    return center, radius, d_out - r_in, factor


def contour_from_spectrum(decomp: PencilDecomposition, nodes: int = 64, tol: Tolerances = DEFAULT) -> Contour:
    """Circle around the stable cluster, centred at its centroid.

    The radius is the largest stable-to-centre distance plus half of the
    remaining distance to the nearest excluded finite eigenvalue.
    """
    stable = decomp.eigenvalues(EigenClass.STABLE)
    if stable.size == 0:
        raise GapCollapse("no stable eigenvalue to enclose")
    if decomp.spectral_gap <= tol.imaginary_axis * decomp.scale:
        raise GapCollapse(
            f"spectral gap {decomp.spectral_gap:.3e} <= {tol.imaginary_axis * decomp.scale:.3e}"
        )
    others = decomp.eigenvalues(EigenClass.UNSTABLE)
    center, radius, remaining, _ = _separating_circle(list(stable), list(others))
    if remaining <= 0:
        raise GapCollapse(
            f"no circle about the stable centroid separates the spectrum (margin {remaining:.3e})"
        )
    return Contour(center, float(radius), nodes)


def stable_contours(
    decomp: PencilDecomposition, which: str = "stable", nodes: int = 64, tol: Tolerances = DEFAULT
) -> list[Contour]:
    """Contours enclosing exactly the ``which`` eigenvalues.

    A single centroid circle is used when it converges at least as fast as
    ``2**-n``; otherwise one circle per eigenvalue cluster, each of radius
    half the distance to the nearest other finite eigenvalue.
    """
    inside_cls = EigenClass.STABLE if which == "stable" else EigenClass.UNSTABLE
    outside_cls = EigenClass.UNSTABLE if which == "stable" else EigenClass.STABLE
    inside = [p.eigenvalue for p in decomp.eigenpairs if p.cls is inside_cls]
    outside = [p.eigenvalue for p in decomp.eigenpairs if p.cls is outside_cls]
    if not inside:
        return []
    if which == "stable" and decomp.spectral_gap <= tol.imaginary_axis * decomp.scale:
        raise GapCollapse(f"spectral gap {decomp.spectral_gap:.3e} too small")
    center, radius, remaining, factor = _separating_circle(inside, outside)
    if remaining > 0 and factor <= 0.5:
        return [Contour(center, float(radius), nodes)]
    circles = []
    for i, z in enumerate(inside):
        others = [w for j, w in enumerate(inside) if j != i] + outside
        d = min((abs(z - w) for w in others), default=math.inf)
        if math.isinf(d):
            d = 2.0 * abs(z.real)
        circles.append(Contour(z, float(0.5 * d), nodes))
    return circles


def _nodes(contours: Sequence[Contour], n: int, offset: float):
    zs, ws = [], []
    for c in contours:
        theta = 2.0 * np.pi * (np.arange(n) + offset) / n
        e = np.exp(1j * theta)
        zs.append(c.center + c.radius * e)
        ws.append(c.radius * e / n)
    return np.concatenate(zs), np.concatenate(ws)


def _adaptive(
    contours: Sequence[Contour],
    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: Tolerances,
    accept: Callable[[np.ndarray], bool] | None = None,
    what: str = "contour integral",
) -> np.ndarray:
    """Trapezoidal ``(1/2 pi i) sum of closed integrals``, doubling nodes.

    ``kernel(z, w)`` returns ``sum_k w_k F(z_k)``.
    """
    if isinstance(contours, Contour):
        contours = [contours]
    n = max(c.nodes for c in contours)
    total = kernel(*_nodes(contours, n, 0.0))
    last_delta = math.inf
    while True:
        if 2 * n > tol.quad_max_nodes:
            raise QuadratureDivergence(
                f"{what} not converged at {n} nodes (last change {last_delta:.3e}, "
                f"tolerance {tol.quad_tol:.1e})"
            )
        refined = 0.5 * (total + kernel(*_nodes(contours, n, 0.5)))
        n *= 2
        scale = max(1.0, float(np.abs(refined).max()))
        last_delta = float(np.abs(refined - total).max()) / scale
        total = refined
        if last_delta <= tol.quad_tol and (accept is None or accept(total)):
            return total


def _resolvents(Ad, G, z):
    M = z[:, None, None] * Ad[None] - G[None]
    return np.linalg.inv(M)


def _idempotent(tol):
    def check(P):
        P = P if P.ndim == 2 else P[0]
        nrm = max(1.0, np.linalg.norm(P, 2) ** 2)
        return np.linalg.norm(P @ P - P, 2) <= tol.idempotency * nrm

    return check


def spectral_projector(Ad, G, contour, tol: Tolerances = DEFAULT) -> np.ndarray:
    """``(1/2 pi i) * closed integral of (z Ad - G)^{-1} Ad dz``.

    ``contour`` is a :class:`Contour` or a sequence of disjoint contours.
    Nodes are doubled from ``contour.nodes`` until the result and its
    idempotency residual settle.
    """
    Ad, G = _as_complex(Ad), _as_complex(G)

    def kernel(z, w):
        R = _resolvents(Ad, G, z)
        return np.einsum("k,kij,jl->il", w, R, Ad)

    return _adaptive(contour, kernel, tol, _idempotent(tol), "spectral projector")


def propagator(Ad, G, contour, xd, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Decaying propagator ``T(xd) = (1/2 pi i) * closed integral of
    exp(xd z) (z Ad - G)^{-1} Ad dz``.

    ``xd`` may be a scalar (returns ``(N, N)``) or an array of
    non-negative positions (returns ``(len(xd), N, N)``).
    """
    Ad, G = _as_complex(Ad), _as_complex(G)
    x = np.asarray(xd, dtype=float)
    if np.any(x < 0):
        raise ValueError(f"propagator needs xd >= 0, got min {x.min()}")
    xs = np.atleast_1d(x)

    def kernel(z, w):
        R = _resolvents(Ad, G, z) @ Ad
        ew = np.exp(np.outer(xs, z)) * w
        return np.einsum("mk,kij->mij", ew, R)

    out = _adaptive(contour, kernel, tol, None, "propagator")
    return out[0] if x.ndim == 0 else out


def pencil_moments(Ad, G, contours, tol: Tolerances = DEFAULT):
    """Projector, resolvent residue and generator on one contour set.

    Returns ``(P, K, M)`` with ``P = int R Ad``, ``K = int R`` and
    ``M = int z R Ad`` (all divided by ``2 pi i``), where
    ``R = (z Ad - G)^{-1}``.  ``M`` restricted to the range of ``P`` is the
    generator of the propagator; ``exp(x M) P = T(x)``.
    """
    Ad, G = _as_complex(Ad), _as_complex(G)
    n = G.shape[0]
    if not contours:
        z = np.zeros((n, n), complex)
        return z, z.copy(), z.copy()

    def kernel(z, w):
        R = _resolvents(Ad, G, z)
        RA = R @ Ad
        return np.stack(
            [
                np.einsum("k,kij->ij", w, RA),
                np.einsum("k,kij->ij", w, R),
                np.einsum("k,kij->ij", w * z, RA),
            ]
        )

    out = _adaptive(contours, kernel, tol, _idempotent(tol), "pencil moments")
    return out[0], out[1], out[2]


def constant_term(Ad, G, decomp: PencilDecomposition, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Polynomial part of ``(z Ad - G)^{-1}`` (zero when ``Ad`` is invertible).

    Obtained as ``(1/2 pi i) * closed integral of R(z) / z dz`` over a circle
    about the origin enclosing every finite eigenvalue; the residues at the
    eigenvalues and at the origin cancel pairwise.
    """
    Ad, G = _as_complex(Ad), _as_complex(G)
    finite = [abs(p.eigenvalue) for p in decomp.eigenpairs if p.cls is not EigenClass.CENTRAL]
    radius = 2.0 * max(finite, default=0.0) + decomp.scale
    circle = Contour(0j, radius, 64)

    def kernel(z, w):
        return np.einsum("k,kij->ij", w / z, _resolvents(Ad, G, z))

    return _adaptive([circle], kernel, tol, None, "constant term")


def resolvent_norm(Ad, G, xi_d: float, tol: Tolerances = DEFAULT) -> float:
    """Spectral norm of ``(i xi_d Ad - G)^{-1}``."""
    Ad, G = _as_complex(Ad), _as_complex(G)
    s = np.linalg.svd(1j * xi_d * Ad - G, compute_uv=False)
    if s[-1] <= tol.singular_matrix * max(s[0], 1e-300):
        raise SingularMatrix(
            f"i xi_d Ad - G numerically singular: sigma_min/sigma_max = {s[-1] / max(s[0], 1e-300):.3e}"
        )
    return float(1.0 / s[-1])
