"""Exception types shared by all solvers."""


class HybridBfError(Exception):
    """Base class for all library errors."""


class DimensionError(HybridBfError, ValueError):
    """Inputs violate a dimension or domain contract."""


class Infeasible(HybridBfError):
    """The SINR constraint set is empty (or certified empty within tolerance)."""


class NoConvergence(HybridBfError):
    """An iterative method exhausted its budget without meeting its tolerance."""


class MaxIters(NoConvergence):
    """The conic solver hit its iteration cap before closing the gap."""


class NumericalFailure(HybridBfError):
    """Linear algebra broke down (non-PD Newton systems after regularization)."""


class RankDeficient(HybridBfError):
    """A matrix required to have full rank is numerically rank deficient."""


class RankNotReached(HybridBfError):
    """The penalty outer loop hit its cap with the eigenvalue residual still large."""
