"""Property suite run by ``hypbc verify``.

Each check returns a :class:`PropertyResult` with the observed margin.
Model-specific checks apply only when the system spec carries the matching
symbol, boundary tag or preset name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .algebra import EigenClass, contour_from_spectrum, pencil_eigen, spectral_projector, stable_contours
from .config import DEFAULT, Tolerances
from .errors import HypbcError, NotHyperbolic
from .halfspace import FrequencyProblem, solve_frequency, verify_trace_estimate
from .hyperbolic import (
    Frequency,
    HyperbolicSystem,
    SymbolMode,
    build_G,
    check_homogeneity,
    check_resolvent_bound,
    classify,
    sphere_points,
    symmetric_check,
)
from .io import SystemSpec
from .lopatinskii import check_kernel_inclusion
from .models import wave_modulus_terms, maxwell_chain, re_sqrt_margin

__all__ = ["PropertyResult", "PROPERTIES", "applicable", "run_suite", "hemisphere_samples"]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""


def hemisphere_samples(d: int, n: int, seed: int) -> np.ndarray:
    """Uniform points on ``S^d_+`` as rows ``(tau, eta..., gamma)``."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, d + 1))
    v[:, -1] = np.abs(v[:, -1])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v[:, -1] = np.maximum(v[:, -1], 1e-300)
    return v


def _symmetric(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    ok, diag = symmetric_check(spec.system, tol)
    worst = min((m for k, m in diag if k.startswith("A0")), default=math.nan)
    return PropertyResult("symmetric", ok, worst, "; ".join(f"{k}={m:.3g}" for k, m in diag))


def _hyperbolic(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    try:
        c = classify(spec.system, min(samples, 200), seed, tol)
    except NotHyperbolic as exc:
        return PropertyResult("hyperbolic", False, math.nan, str(exc))
    return PropertyResult("hyperbolic", True, 0.0, f"mu={c.mu}")


def _resolvent(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    try:
        sup, pt = check_resolvent_bound(spec.system, min(samples, 10_000), seed=seed, tol=tol)
    except HypbcError as exc:
        return PropertyResult("resolvent", False, math.inf, str(exc))
    return PropertyResult("resolvent", math.isfinite(sup), sup, f"sup gamma*|R| at gamma={pt['gamma']:.3g}")


def _homogeneity(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    dev = check_homogeneity(spec.system, 32, seed)
    return PropertyResult("homogeneity", dev <= 1e-12, dev, "max relative deviation of G(sw) - sG(w)")


def _projector(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    system = spec.system
    Ad = system.Ad
    K = sla.null_space(Ad / max(np.linalg.norm(Ad, 2), 1e-300), rcond=tol.kernel)
    worst = 0.0
    mus = set()
    for row in hemisphere_samples(system.d, min(samples, 200), seed):
        freq = Frequency(row[0], row[1:-1], max(row[-1], 1e-3))
        G = build_G(system, freq)
        dec = pencil_eigen(Ad, G, tol)
        mus.add(dec.mu)
        P = spectral_projector(Ad, G, stable_contours(dec, tol=tol), tol)
        idem = float(np.linalg.norm(P @ P - P, 2))
        ann = float(np.linalg.norm(P @ K, 2)) if K.size else 0.0
        rank = int(np.sum(np.linalg.svd(P, compute_uv=False) > 1e-8 * max(1.0, np.linalg.norm(P, 2))))
        angle = float(sla.subspace_angles(sla.orth(P, rcond=1e-8), dec.stable_basis).max()) if dec.mu else 0.0
        if rank != dec.mu:
            return PropertyResult("projector", False, rank, f"rank {rank} != mu {dec.mu} at {freq}")
        worst = max(worst, idem, ann, angle * 1e-2)
    ok = worst <= tol.idempotency and len(mus) == 1
    return PropertyResult("projector", ok, worst, f"idempotency/annihilation/angle; mu values {sorted(mus)}")


def _kernel(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    ok = check_kernel_inclusion(spec.B, spec.system.Ad, tol)
    return PropertyResult("kernel", ok, 0.0 if ok else 1.0, "N(Ad) in N(B)")


def _wave_modulus(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    v = hemisphere_samples(spec.system.d, samples, seed)
    tau, eta2, gamma = v[:, 0], (v[:, 1:-1] ** 2).sum(axis=1), v[:, -1]
    lhs, expanded, lower = wave_modulus_terms(tau, eta2, gamma)
    ident = float(np.max(np.abs(lhs - expanded) / np.maximum(lhs, 1e-300)))
    slack = float(np.min((lhs - lower) / lhs))
    slack2 = float(np.min((lower - gamma**2) / np.maximum(lower, 1e-300)))
    ok = ident <= 1e-12 and slack >= -1e-12 and slack2 >= -1e-12
    return PropertyResult("wave_modulus", ok, min(slack, slack2), f"identity error {ident:.2e}; min relative slack reported")


def _re_sqrt(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    rng = np.random.default_rng(seed)
    n = samples * 10
    a, c = rng.normal(size=(2, n)) * 10.0 ** rng.uniform(-3, 3, size=(2, n))
    d = np.abs(rng.normal(size=n)) * 10.0 ** rng.uniform(-3, 3, size=n)
    m = re_sqrt_margin(a, c, d)
    scale = np.maximum.reduce([np.abs(a), np.abs(c), d])
    worst = float(np.min(m / scale))
    return PropertyResult("re_sqrt", worst >= -1e-12, worst, f"{n} triples, min (Re sqrt - d)/scale")


def _oblique_re(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    b = np.asarray(spec.B.params["b"], dtype=float)
    v = hemisphere_samples(spec.system.d, samples, seed)
    tau, eta, gamma = v[:, 0], v[:, 1:-1], v[:, -1]
    Bz = np.sqrt((eta**2).sum(axis=1) - (tau - 1j * gamma) ** 2 + 0j) + 1j * (eta @ b)
    worst = float(np.min(np.abs(Bz.real) / gamma))
    return PropertyResult("oblique_re", worst >= 1 - 1e-8, worst, "min |Re Bz| / gamma")


def _maxwell_bound(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    params = (spec.preset or {}).get("params", {})
    eps, mu_perm = params.get("eps", 1.0), params.get("mu_perm", 1.0)
    v = hemisphere_samples(3, samples, seed)
    rng = np.random.default_rng(seed + 1)
    ab = rng.normal(size=(samples, 2)) + 1j * rng.normal(size=(samples, 2))
    ab /= np.linalg.norm(ab, axis=1, keepdims=True)
    bv2, formula, bv, adv = maxwell_chain(v[:, 0], v[:, 1:3], v[:, 3], ab[:, 0], ab[:, 1], eps, mu_perm)
    chain = float(np.max(np.abs(bv2 - formula) / formula))
    ratio = bv / (v[:, 3] * adv)
    bad = int(np.sum(ratio < 1 - 1e-8))
    ok = chain <= 1e-10 and bad == 0
    return PropertyResult(
        "maxwell_bound", ok, float(ratio.min()),
        f"chain error {chain:.2e}; {bad} of {samples} samples below |Bv| >= gamma |Ad v|; "
        f"|Ad v| in [{adv.min():.3g}, {adv.max():.3g}]",
    )


def _trace_estimate(spec: SystemSpec, samples: int, seed: int, tol: Tolerances) -> PropertyResult:
    system = spec.system
    rng = np.random.default_rng(seed)
    xd = np.linspace(0.0, 30.0, 384)
    worst = 0.0
    n = min(samples, 200)
    for row in hemisphere_samples(system.d, n, seed):
        scale = 10.0 ** rng.uniform(0, 3)
        freq = Frequency(row[0] * scale, row[1:-1] * scale, max(row[-1], 0.05) * scale)
        prof = np.exp(-((xd - 3.0) ** 2))[:, None] * (rng.normal(size=system.N) + 1j * rng.normal(size=system.N))
        g = rng.normal(size=spec.B.mu) + 1j * rng.normal(size=spec.B.mu)
        grid = xd * min(1.0, 10.0 / freq.radius)
        prob = FrequencyProblem(freq, grid, prof, g)
        sol = solve_frequency(system, spec.B, prob, tol=tol)
        worst = max(worst, *verify_trace_estimate(system, sol, prob, tol, check_symmetric=False))
    return PropertyResult("trace_estimate", math.isfinite(worst), worst, f"max ratio over {n} frequencies")


Check = Callable[[SystemSpec, int, int, Tolerances], PropertyResult]

PROPERTIES: dict[str, Check] = {
    "symmetric": _symmetric,
    "hyperbolic": _hyperbolic,
    "resolvent": _resolvent,
    "homogeneity": _homogeneity,
    "projector": _projector,
    "kernel": _kernel,
    "wave_modulus": _wave_modulus,
    "re_sqrt": _re_sqrt,
    "oblique_re": _oblique_re,
    "maxwell_bound": _maxwell_bound,
    "trace_estimate": _trace_estimate,
}


def applicable(spec: SystemSpec, tol: Tolerances = DEFAULT) -> list[str]:
    system: HyperbolicSystem = spec.system
    names = ["hyperbolic", "resolvent", "projector", "kernel"]
    if system.symbol_mode is SymbolMode.CUSTOM:
        names.append("homogeneity")
        if system.custom_symbol.tag == "wave":
            names.append("wave_modulus")
    else:
        names.insert(0, "symmetric")
        if symmetric_check(system, tol)[0]:
            names.append("trace_estimate")
    if spec.B.tag == "oblique":
        names += ["re_sqrt", "oblique_re"]
    if (spec.preset or {}).get("name") == "maxwell":
        names.append("maxwell_bound")
    return names


def run_suite(
    spec: SystemSpec,
    names: list[str] | None = None,
    samples: int = 100_000,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> list[PropertyResult]:
    out = []
    for name in names or applicable(spec, tol):
        if name not in PROPERTIES:
            raise KeyError(f"unknown property {name!r}; choose from {sorted(PROPERTIES)}")
        try:
            out.append(PROPERTIES[name](spec, samples, seed, tol))
        except HypbcError as exc:
            out.append(PropertyResult(name, False, math.nan, f"{type(exc).__name__}: {exc}"))
    return out
