"""Numerical tolerances shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # pencil classification
    infinite_beta: float = 1e-10
    imaginary_axis: float = 1e-10
    singular_pencil: float = 1e-13
    cluster: float = 1e-8
    # contour quadrature
    quad_nodes: int = 64
    quad_max_nodes: int = 4096
    quad_tol: float = 1e-12
    idempotency: float = 1e-10
    # dense linear algebra
    singular_matrix: float = 1e-14
    degenerate_weight: float = 1e12
    rank_deficient_j: float = 1e-12
    kernel: float = 1e-10
    # hyperbolicity checks
    root_imag: float = 1e-8
    root_cluster: float = 1e-6
    # boundary checks
    uniform_ks_threshold: float = 1e-3
    uniform_ks_drift: float = 0.5
    fit_r2: float = 0.9
    # solver
    solver_failure_fraction: float = 1e-3

    def with_overrides(self, **kwargs) -> "Tolerances":
        unknown = set(kwargs) - set(self.__dataclass_fields__)
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT = Tolerances()
