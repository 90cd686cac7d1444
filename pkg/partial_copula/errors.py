#!/usr/bin/env python3
"""Exceptions raised by partial_copula."""


class CopulaError(Exception):
    """Base class for every error raised by this package."""


class ParameterOutOfRange(CopulaError, ValueError):
    def __init__(self, family: str, constraint: str, detail: str = ""):
        self.family = family
        self.constraint = constraint
        msg = f"{family}: {constraint}"
        if detail:
            msg += f" (got {detail})"
        super().__init__(msg)


class EvaluationAtBoundary(CopulaError, ValueError):
    """A density or h-function was asked for a value on the boundary of the unit cube."""


class UnsupportedFamily(CopulaError, ValueError):
    pass


class RootNotBracketed(CopulaError, RuntimeError):
    """Bracketed inversion found no sign change. Never expected for valid inputs."""


class NonpositiveDensity(CopulaError, ArithmeticError):
    pass


class DensityUnavailable(CopulaError, NotImplementedError):
    """The copula is only available through its cdf (e.g. the comonotone copula)."""


class NonConvergent(CopulaError, RuntimeError):
    pass


class SingularDesign(CopulaError, ValueError):
    pass


class DegenerateResiduals(CopulaError, ValueError):
    pass


class EstimationError(CopulaError, RuntimeError):
    """Base for failures of the maximum-likelihood fits."""


class OptimizerDiverged(EstimationError):
    pass


class ParameterAtBound(EstimationError):
    pass
