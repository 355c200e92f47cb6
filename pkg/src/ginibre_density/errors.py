"""Exception hierarchy shared across the package."""


class GinibreDensityError(Exception):
    """Base class for all package-specific errors."""


class NotHermitianError(GinibreDensityError):
    """Input matrix violates the Hermitian symmetry tolerance."""


class NotPositiveDefiniteError(GinibreDensityError):
    """Cholesky pivot failed; matrix is not (numerically) positive definite."""


class NoConvergenceError(GinibreDensityError):
    """Iterative eigensolver exceeded its iteration cap."""


class DimensionMismatchError(GinibreDensityError):
    """Operand shapes are incompatible."""


class InvalidSpecError(GinibreDensityError):
    """Ensemble specification is inconsistent (multiplicities, file contents...)."""


class BracketFailureError(GinibreDensityError):
    """Root bracketing found no sign change; inputs are likely NaN/Inf."""


class SingularPointError(GinibreDensityError):
    """Density requested exactly on a singular point where the root bracket collapses."""


class EmptyBoundaryError(GinibreDensityError):
    """Level-set tracer found no sign change on the requested window."""


class SupportEscapeError(GinibreDensityError):
    """Test-function support touches the quadrature window edge."""
