"""Worked examples with closed-form oracles.

``wave_neumann`` and ``wave_oblique`` are the first-order reduction of the
wave equation with ``v = (d_d w, Lambda w)`` and
``Lambda = sqrt(gamma^2 + tau^2 + |eta|^2)``; ``maxwell`` is the isotropic
6x6 system with the tangential electric trace as boundary operator;
``symmetric_control`` is a diagonal system satisfying the uniform condition.

Square roots of complex numbers are principal (non-negative real part).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .algebra import EigenClass, pencil_eigen
from .config import DEFAULT, Tolerances
from .errors import ZeroVector
from .hyperbolic import CustomSymbol, Frequency, HyperbolicSystem, SymbolMode, build_G
from .lopatinskii import BoundaryOperator

__all__ = [
    "ClosedForms",
    "Preset",
    "PRESETS",
    "get_preset",
    "wave_neumann",
    "wave_oblique",
    "maxwell",
    "symmetric_control",
    "closed_form_crosscheck",
    "custom_symbol",
    "boundary_symbol",
    "wave_q",
    "wave_modulus_terms",
    "re_sqrt_margin",
    "oblique_sequence",
    "maxwell_basis",
    "maxwell_basis_arrays",
    "maxwell_chain",
]

NU = np.array([0.0, 0.0, -1.0])


@dataclass
class ClosedForms:
    """Oracle bundle; every callable takes a :class:`Frequency`."""

    stable_eigenvalues: Callable[[Frequency], np.ndarray]
    stable_basis: Callable[[Frequency], np.ndarray]
    worst_case: Callable[[float], np.ndarray] | None = None
    sequence: Callable[[float], Frequency] | None = None


@dataclass
class Preset:
    name: str
    system: HyperbolicSystem
    B: BoundaryOperator
    expected_power: float
    closed_forms: ClosedForms | None = None
    params: dict = field(default_factory=dict)


# -- wave reduction ---------------------------------------------------------


def wave_q(freq: Frequency) -> complex:
    """``|eta|^2 - (tau - i gamma)^2``."""
    return complex(float(freq.eta @ freq.eta) - freq.tau_c**2)


def _wave_G(freq: Frequency) -> np.ndarray:
    lam = freq.radius
    return np.array([[0.0, wave_q(freq) / lam], [lam, 0.0]], dtype=complex)


def _wave_roots(xi) -> list[tuple[float, int]]:
    return [(-1.0, 1), (1.0, 1)]


def _wave_symbol(d: int) -> CustomSymbol:
    return CustomSymbol("wave", np.eye(2, dtype=complex), _wave_G, _wave_roots, {"d": d})


def _wave_system(d: int, name: str) -> HyperbolicSystem:
    if d < 2:
        raise ValueError(f"the wave reduction needs d >= 2, got {d}")
    return HyperbolicSystem(d, 2, [], SymbolMode.CUSTOM, _wave_symbol(d), name)


def _wave_forms(d: int, worst_case, sequence=None) -> ClosedForms:
    def eig(freq):
        r = np.sqrt(wave_q(freq))
        return np.array([-r])

    def basis(freq):
        z = np.array([np.sqrt(wave_q(freq)), -freq.radius], dtype=complex)
        return (z / np.linalg.norm(z))[:, None]

    return ClosedForms(eig, basis, worst_case, sequence)


def _glancing_dirs(d: int, angles: int = 8) -> np.ndarray:
    """Directions ``(tau, eta)`` with ``|eta| = |tau|``."""
    if d == 2:
        return np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float) / math.sqrt(2)
    rng = np.random.default_rng(0)
    e = rng.normal(size=(angles, d - 1))
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    pos = np.hstack([np.ones((angles, 1)), e]) / math.sqrt(2)
    neg = pos * np.r_[-1.0, np.ones(d - 1)]
    return np.vstack([pos, neg])


def wave_neumann(d: int = 2) -> Preset:
    system = _wave_system(d, f"wave_neumann_d{d}")
    B = BoundaryOperator(np.array([[1.0, 0.0]]), 1, tag="neumann")
    forms = _wave_forms(d, lambda gamma: _glancing_dirs(d))
    return Preset("wave_neumann", system, B, 0.5, forms, {"d": d})


def _oblique_B(b: np.ndarray) -> Callable[[Frequency], np.ndarray]:
    def symbol(freq: Frequency) -> np.ndarray:
        return np.array([[1.0, -1j * float(b @ freq.eta) / freq.radius]])

    return symbol


def oblique_sequence(gamma: float, b) -> Frequency:
    """Hemisphere point with ``(b.eta)^2 = tau^2 - |eta|^2``, ``b.eta < 0``, ``tau > 0``.

    ``eta`` is anti-parallel to ``b``.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    nb = float(np.linalg.norm(b))
    if nb == 0:
        raise ZeroVector("b must be non-zero")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    a = math.sqrt((1.0 - gamma**2) / (2.0 + nb**2))
    return Frequency(a * math.sqrt(1.0 + nb**2), -a * b / nb, gamma)


def wave_oblique(d: int = 2, b=None) -> Preset:
    b = np.ones(d - 1) if b is None else np.atleast_1d(np.asarray(b, dtype=float))
    if b.shape != (d - 1,):
        raise ValueError(f"b must have length d - 1 = {d - 1}")
    if not np.any(b):
        raise ZeroVector("oblique boundary needs b != 0")
    system = _wave_system(d, f"wave_oblique_d{d}")
    B = BoundaryOperator(np.array([[1.0, 0.0]]), 1, _oblique_B(b), "oblique", {"b": b.tolist()})

    def worst(gamma):
        f = oblique_sequence(gamma, b)
        v = np.r_[f.tau, f.eta]
        return np.vstack([v, v * np.r_[-1.0, -np.ones(d - 1)], _glancing_dirs(d)])

    forms = _wave_forms(d, worst, lambda gamma: oblique_sequence(gamma, b))
    return Preset("wave_oblique", system, B, 1.0, forms, {"d": d, "b": b.tolist()})


# -- Maxwell ----------------------------------------------------------------


def _cross_matrix(e: np.ndarray) -> np.ndarray:
    """Matrix of ``v -> e x v``."""
    return np.array([[0, -e[2], e[1]], [e[2], 0, -e[0]], [-e[1], e[0], 0]], dtype=float)


def maxwell_basis_arrays(tau, eta, gamma, eps: float = 1.0, mu_perm: float = 1.0):
    """Vectorised :func:`maxwell_basis`; ``eta`` has shape ``(n, 2)``.

    Returns ``w1``, ``w2`` of shape ``(n, 6)`` and ``xi`` of shape ``(n,)``.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    tc = tau - 1j * gamma
    xi = -np.sqrt((eta**2).sum(axis=1) - eps * mu_perm * tc**2 + 0j)
    zeta = np.column_stack([eta[:, 0], eta[:, 1], -1j * xi])
    ne = np.hypot(eta[:, 0], eta[:, 1])
    flat = ne <= 1e-14
    safe = np.where(flat, 1.0, ne)
    perp = np.column_stack([-eta[:, 1] / safe, eta[:, 0] / safe, np.zeros_like(ne)])
    perp[flat] = [1.0, 0.0, 0.0]
    zc = np.cross(zeta, perp)
    w1 = np.hstack([mu_perm * tc[:, None] * perp, -zc])
    w2 = np.hstack([zc, eps * tc[:, None] * perp])
    return w1, w2, xi


def maxwell_basis(freq: Frequency, eps: float = 1.0, mu_perm: float = 1.0) -> tuple[np.ndarray, np.ndarray, complex]:
    """Closed-form orthogonal stable pair ``(w1, w2)`` and the eigenvalue ``xi``.

    ``zeta_perp`` is the real unit vector orthogonal to ``Re zeta`` and the
    normal; it falls back to ``e1`` when ``eta = 0``.
    """
    w1, w2, xi = maxwell_basis_arrays(freq.tau, freq.eta[None, :], freq.gamma, eps, mu_perm)
    return w1[0], w2[0], complex(xi[0])


def maxwell(eps: float = 1.0, mu_perm: float = 1.0) -> Preset:
    if eps <= 0 or mu_perm <= 0:
        raise ValueError("eps and mu_perm must be positive")
    A = [np.diag([eps] * 3 + [mu_perm] * 3).astype(complex)]
    for j in range(3):
        C = _cross_matrix(np.eye(3)[j])
        A.append(np.block([[np.zeros((3, 3)), -C], [C, np.zeros((3, 3))]]).astype(complex))
    system = HyperbolicSystem(3, 6, A, name="maxwell")
    nuE = np.hstack([_cross_matrix(NU), np.zeros((3, 3))])
    B = BoundaryOperator(nuE[:2], 2, tag="nu_cross_E")

    def eig(freq):
        xi = maxwell_basis(freq, eps, mu_perm)[2]
        return np.array([xi, xi])

    def basis(freq):
        w1, w2 = maxwell_basis(freq, eps, mu_perm)[:2]
        return np.column_stack([w1 / np.linalg.norm(w1), w2 / np.linalg.norm(w2)])

    c = math.sqrt(eps * mu_perm)

    def worst(gamma):
        ang = np.linspace(0.0, 2 * math.pi, 8, endpoint=False)
        ring = np.column_stack([np.ones(8), c * np.cos(ang), c * np.sin(ang)])
        axis = np.column_stack([np.zeros(8), np.cos(ang), np.sin(ang)])
        return np.vstack([ring, ring * np.r_[-1.0, 1, 1], axis])

    forms = ClosedForms(eig, basis, worst)
    return Preset("maxwell", system, B, 1.0, forms, {"eps": eps, "mu_perm": mu_perm})


def symmetric_control(r: float = 0.0) -> Preset:
    if not abs(r) < 1:
        raise ValueError(f"need |r| < 1, got {r}")
    system = HyperbolicSystem.linear([np.eye(2), np.diag([1.0, -1.0])], name="symmetric_control")
    B = BoundaryOperator(np.array([[1.0, r]]), 1, tag="control")
    forms = ClosedForms(
        lambda f: np.array([-1j * f.tau_c]),
        lambda f: np.array([[1.0], [0.0]], dtype=complex),
    )
    return Preset("symmetric_control", system, B, 0.0, forms, {"r": r})


PRESETS: dict[str, Callable[..., Preset]] = {
    "wave_neumann": wave_neumann,
    "wave_oblique": wave_oblique,
    "maxwell": maxwell,
    "symmetric_control": symmetric_control,
}


def get_preset(name: str, **params) -> Preset:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory(**params)


# -- registries for spec files ---------------------------------------------


def custom_symbol(tag: str, d: int) -> CustomSymbol:
    if tag == "wave":
        return _wave_symbol(d)
    raise KeyError(f"unknown symbol tag {tag!r}")


def boundary_symbol(tag: str, **params) -> Callable[[Frequency], np.ndarray]:
    if tag == "oblique":
        b = np.atleast_1d(np.asarray(params["b"], dtype=float))
        if not np.any(b):
            raise ZeroVector("oblique boundary needs b != 0")
        return _oblique_B(b)
    raise KeyError(f"unknown boundary tag {tag!r}")


# -- scalar identities --------------------------------------------------------


def wave_modulus_terms(tau, eta2, gamma):
    """``(lhs, expanded, lower)`` for the modulus identity of the wave symbol.

    ``lhs = ||eta|^2 - (tau - i gamma)^2|^2``, ``expanded`` is its expansion
    in real terms and ``lower = gamma^2 (gamma^2 + 2 tau^2 + 2 |eta|^2)``.
    Arrays broadcast.
    """
    tau, eta2, gamma = (np.asarray(x, dtype=float) for x in (tau, eta2, gamma))
    lhs = np.abs(eta2 - (tau - 1j * gamma) ** 2) ** 2
    expanded = (tau**2 - eta2) ** 2 + gamma**4 + 2 * gamma**2 * eta2 + 2 * tau**2 * gamma**2
    lower = gamma**2 * (gamma**2 + 2 * tau**2 + 2 * eta2)
    return lhs, expanded, lower


def re_sqrt_margin(a, c, d):
    """``Re sqrt(c^2 - (a - d i)^2) - d`` (non-negative for ``d >= 0``)."""
    a, c, d = (np.asarray(x, dtype=float) for x in (a, c, d))
    return np.sqrt(c**2 - (a - 1j * d) ** 2 + 0j).real - d


def maxwell_chain(tau, eta, gamma, alpha, beta, eps: float = 1.0, mu_perm: float = 1.0):
    """Direct and closed-form ``|B v|^2`` plus ``|B v|`` and ``|Ad v|`` for ``v = alpha w1 + beta w2``.

    Arguments broadcast over a leading sample axis (``eta`` is ``(n, 2)``).
    Returns ``(bv2, bv2_formula, bv, adv)`` as arrays.
    """
    p = maxwell(eps, mu_perm)
    w1, w2, xi = maxwell_basis_arrays(tau, eta, gamma, eps, mu_perm)
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    v = alpha[:, None] * w1 + beta[:, None] * w2
    Bv = v @ p.B.B.T
    bv2 = np.sum(np.abs(Bv) ** 2, axis=1)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    formula = np.abs(alpha) ** 2 * mu_perm**2 * (tau**2 + gamma**2) + np.abs(beta) ** 2 * np.abs(xi) ** 2
    adv = np.linalg.norm(v @ p.system.Ad.T, axis=1)
    return bv2, formula, np.sqrt(bv2), adv


# -- oracle equivalence -------------------------------------------------------


def closed_form_crosscheck(preset: Preset, freq: Frequency, tol: Tolerances = DEFAULT) -> dict:
    """Compare the pencil decomposition with the preset's closed forms."""
    if preset.closed_forms is None:
        raise ValueError(f"preset {preset.name!r} has no closed forms")
    decomp = pencil_eigen(preset.system.Ad, build_G(preset.system, freq), tol)
    got = np.sort_complex(decomp.eigenvalues(EigenClass.STABLE))
    want = np.sort_complex(np.asarray(preset.closed_forms.stable_eigenvalues(freq), dtype=complex))
    if got.shape != want.shape:
        eig_err = math.inf
    else:
        eig_err = float(np.abs(got - want).max() / max(1.0, float(np.abs(want).max())))
    Q = sla.orth(preset.closed_forms.stable_basis(freq))
    angle = float(sla.subspace_angles(decomp.stable_basis, Q).max()) if Q.shape[1] == decomp.mu else math.inf
    return {"mu": decomp.mu, "eigenvalue_error": eig_err, "principal_angle": angle}
