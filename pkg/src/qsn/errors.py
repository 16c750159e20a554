"""Exception taxonomy.

ConfigurationError covers malformed user input (bad qubit counts, parameter
vectors of the wrong length, unknown topology names) and maps to CLI exit
code 2.  OptimizationFailure maps to exit code 3.  The remaining classes
flag numerical trouble detected at runtime.
"""


class QsnError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(QsnError, ValueError):
    """Invalid user-supplied configuration or arguments."""


class NumericValidationError(QsnError, ValueError):
    """An array failed a numerical contract (norm, unitarity, Hermiticity...)."""


class DomainError(QsnError, ValueError):
    """A scalar argument is outside its mathematical domain."""


class DegenerateProbeError(QsnError, ArithmeticError):
    """The probe carries (numerically) zero information about the phase."""


class DegenerateLikelihoodError(QsnError, ArithmeticError):
    """Every grid point has zero likelihood; the posterior is undefined."""


class OptimizationFailure(QsnError, RuntimeError):
    """All restarts of an optimization run ended degenerate."""
