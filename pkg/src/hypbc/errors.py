"""Exception hierarchy. Every message states the violated margin."""

from __future__ import annotations


class HypbcError(Exception):
    pass


class SingularPencil(HypbcError):
    pass


class GapCollapse(HypbcError):
    pass


class QuadratureDivergence(HypbcError):
    pass


class SingularMatrix(HypbcError):
    pass


class NotHyperbolic(HypbcError):
    def __init__(self, message: str, sample=None):
        super().__init__(message)
        self.sample = sample


class NotSymmetric(HypbcError):
    pass


class DegenerateWeight(HypbcError):
    pass


class RankDeficientJ(HypbcError):
    pass


class KernelInclusionFailed(HypbcError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SolverFailure(HypbcError):
    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = failures or []


class ParseError(HypbcError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class FitUnstable(UserWarning):
    """Power-law regression with poor r^2; reported, not raised."""


class ZeroVector(HypbcError, ValueError):
    pass
