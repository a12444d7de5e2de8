"""Exception hierarchy shared by every module of the package."""


class HarrisError(Exception):
    """Base class for all errors raised by :mod:`harris`."""

    #: short machine-readable name, echoed by the CLI on standard error
    name = "harris_error"


class InvalidParameter(HarrisError, ValueError):
    name = "invalid_parameter"


class DomainError(HarrisError, ValueError):
    name = "domain_error"


class DivergenceError(HarrisError, ValueError):
    """Generating function evaluated at or beyond its radius of convergence."""

    name = "divergence"


class StepTooLarge(HarrisError, ValueError):
    name = "step_too_large"


class ZeroConstantTerm(HarrisError, ValueError):
    name = "zero_constant_term"


class EstimationError(HarrisError):
    """Raised when a sample cannot produce a fit."""


class DegenerateSample(EstimationError):
    name = "degenerate_sample"


class MeanAtBoundary(EstimationError):
    name = "mean_at_boundary"


class AllAtOrigin(EstimationError):
    name = "all_at_origin"


class NoRootInBracket(EstimationError):
    name = "no_root_in_bracket"

    def __init__(self, message, lo=None, hi=None, score_lo=None, score_hi=None):
        super().__init__(message)
        self.lo, self.hi = lo, hi
        self.score_lo, self.score_hi = score_lo, score_hi


class MultipleRoots(EstimationError):
    name = "multiple_roots"

    def __init__(self, message, brackets=()):
        super().__init__(message)
        self.brackets = list(brackets)
