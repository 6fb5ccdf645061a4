"""Exceptions and warnings raised across the package."""


class C11CertError(Exception):
    """Base class for all package errors."""


class ProblemFormatError(C11CertError):
    """A problem file or function description is malformed."""


class NoCell(C11CertError):
    """A point lies outside every cell of a piecewise function."""

    def __init__(self, x):
        super().__init__(f"point {list(x)} lies in no cell")
        self.x = x


class DegreeTooHigh(C11CertError):
    pass


class DimensionMismatch(C11CertError):
    pass


class DimensionTooLarge(C11CertError):
    pass


class TrivialCone(C11CertError):
    """Sampling was requested from the cone {0}."""


class Infeasible(C11CertError):
    def __init__(self, violations):
        super().__init__(f"point is infeasible: {violations}")
        self.violations = violations


class NoMultipliers(C11CertError):
    """Second-order analysis needs a valid multiplier vector."""


class RefinementTooLarge(C11CertError):
    pass


class TooFewFeasible(C11CertError):
    def __init__(self, count, threshold):
        super().__init__(f"only {count} feasible samples (need {threshold})")
        self.count = count
        self.threshold = threshold


class ZeroGradientWarning(UserWarning):
    """An active constraint has a vanishing gradient; its row was dropped."""
