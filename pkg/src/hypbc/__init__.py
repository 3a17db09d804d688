"""Loss-of-derivatives analysis for constant-coefficient hyperbolic
boundary problems on a half-space."""

from .algebra import PencilDecomposition, pencil_eigen, spectral_projector
from .config import DEFAULT, Tolerances
from .errors import HypbcError
from .halfspace import SobolevParams, SpaceTimeGrid, solve, solve_frequency, verify_weighted_estimate
from .hyperbolic import Frequency, HyperbolicSystem, classify
from .lopatinskii import BoundaryOperator, check_uniform_ks, estimate_power
from .models import PRESETS, get_preset

__version__ = "0.1.0"

__all__ = [
    "BoundaryOperator",
    "DEFAULT",
    "Frequency",
    "HyperbolicSystem",
    "HypbcError",
    "PRESETS",
    "PencilDecomposition",
    "SobolevParams",
    "SpaceTimeGrid",
    "Tolerances",
    "check_uniform_ks",
    "classify",
    "estimate_power",
    "get_preset",
    "pencil_eigen",
    "solve",
    "solve_frequency",
    "spectral_projector",
    "verify_weighted_estimate",
]
