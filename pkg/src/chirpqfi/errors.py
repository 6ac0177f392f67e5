"""Exception and warning types shared across the package."""


class ChirpQFIError(Exception):
    """Base class for all package-specific errors."""


class InvalidInterval(ChirpQFIError):
    """Quadrature interval is empty or reversed."""


class NonConvergence(ChirpQFIError):
    """Adaptive quadrature could not meet the requested tolerance."""


class GridMismatch(ChirpQFIError):
    """Sample array does not match the grid it is claimed to live on."""


class GridTooNarrow(ChirpQFIError):
    """Time grid does not cover the required pulse support."""


class NodeMismatch(ChirpQFIError):
    """Requested time does not coincide with a grid node."""


class DivergentMoment(ChirpQFIError):
    """Spectral moment does not exist (Lorentzian second moment)."""


class DegenerateModel(ChirpQFIError):
    """Outcome probability sits on the boundary with a nonzero derivative."""


class VacuumOnly(ChirpQFIError):
    """Single-photon component has (numerically) vanished."""


class Underflow(ChirpQFIError):
    """Closed-form expression not evaluable at this parameter."""


class DegenerateSeed(ChirpQFIError):
    """Gram-Schmidt pivot collapsed even after re-orthogonalization."""


class SingularOutcome(ChirpQFIError):
    """Outcome probability is numerically zero but its derivative is not."""


class AsymmetricPulse(ChirpQFIError):
    """State overlap condition required by the fixed measurement is violated."""


class ZeroInformation(ChirpQFIError):
    """State derivative carries no component orthogonal to the state."""


class TruncationNotConverged(ChirpQFIError):
    """Modal sum has not converged at the supplied truncation order."""


class UnknownPreset(ChirpQFIError):
    """Requested figure preset name does not exist."""


class EdgeLeakage(UserWarning):
    """Samples do not decay at the grid boundary; transforms may be biased."""
