"""
Exception and Warning Types

Two families hang off QFTError: parameter problems (bad input, reported as a
configuration error) and numeric failures (the input was valid but the
computation could not deliver the requested accuracy).
"""

from typing import List, Tuple


class QFTError(Exception):
    """Root of every error raised by the q-Fourier toolkit."""


# Parameter / configuration problems

class ParameterError(QFTError, ValueError):
    """Invalid parameter or configuration value."""


class AdmissibilityError(ParameterError):
    """Deformation parameter outside the admissible range [1, 2)."""


class RegimeBoundaryError(ParameterError):
    """q' sits on the regime boundary q' = 1 + 1/beta of the closed form."""


class InvalidIntervalError(ParameterError):
    """Integration bounds are not an ordered pair of finite reals."""


# Numeric failures

class ConvergenceError(QFTError, ArithmeticError):
    """A quadrature or series did not reach its tolerance."""


class BranchCutError(QFTError, ArithmeticError):
    """A principal-branch power was requested on the negative real axis."""


class DegenerateParameterError(QFTError, ArithmeticError):
    """A hypergeometric connection formula hit an integer parameter gap."""

    def __init__(self, message: str, params: Tuple[complex, complex, complex] = None):
        super().__init__(message)
        self.params = params


class UnachievableTargetError(QFTError):
    """The requested lambda lies at or below the b -> infinity infimum."""

    def __init__(self, message: str, infimum: float = None):
        super().__init__(message)
        self.infimum = infimum


class ClassConstructionError(UnachievableTargetError):
    """One or more members of an equivalence class could not be built."""

    def __init__(self, failures: List[Tuple[float, str]]):
        lines = [f"a={a!r}: {reason}" for a, reason in failures]
        super().__init__("could not build class members:\n  " + "\n  ".join(lines))
        self.failures = failures


class TruncationWarning(UserWarning):
    """The truncated k-integral of an inverse transform is unreliable."""
