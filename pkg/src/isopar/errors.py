"""Exception types shared across the package."""


class IsoparError(Exception):
    """Base class for failures with a geometric or numerical meaning."""


class ConvergenceError(IsoparError):
    """Iterative solver ran out of budget; carries the remaining residual."""

    def __init__(self, message, off_diagonal=None):
        super().__init__(message)
        self.off_diagonal = off_diagonal


class ConditioningError(IsoparError):
    """Input too ill-conditioned to solve reliably; carries the bad gap."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class IllPosedMomentsError(IsoparError):
    """Power sums not realizable by a real spectrum within tolerance."""

    def __init__(self, message, imag_residual=None):
        super().__init__(message)
        self.imag_residual = imag_residual


class ConstructionError(IsoparError):
    """Requested object cannot be built from the given parameters."""


class FocalPointError(IsoparError):
    """Operation needs a regular level; the point sits in a focal band."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class ProjectionError(IsoparError):
    """Level projection failed to bracket or verify its root."""


class InvarianceError(IsoparError):
    """A claimed symmetry does not hold to tolerance."""


class SpectralGapError(IsoparError):
    """Eigenvalue clustering did not produce the expected group count."""


class UnsupportedPairError(IsoparError):
    """No closed form is known for this family / structure combination."""


class BlowUpError(IsoparError):
    """Requested time is inside a blow-up band of the flow."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class IntegrationError(IsoparError):
    """Numeric integration overflowed (stepped into a blow-up)."""
