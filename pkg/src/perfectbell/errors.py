"""Exception hierarchy shared across the package."""


class PerfectBellError(Exception):
    """Base class for all errors raised by perfectbell."""


class NotHermitian(PerfectBellError, ValueError):
    pass


class NotSymmetric(PerfectBellError, ValueError):
    pass


class DimensionMismatch(PerfectBellError, ValueError):
    pass


class BadIndex(PerfectBellError, ValueError):
    pass


class NotUnit(PerfectBellError, ValueError):
    pass


class BadParameter(PerfectBellError, ValueError):
    pass


class OutcomeOutOfRange(PerfectBellError, ValueError):
    pass


class DegenerateMarginal(PerfectBellError, ValueError):
    """Pearson coefficient requested for a distribution with a deterministic marginal."""


class UnsupportedDimension(PerfectBellError, ValueError):
    pass


class NotSymmetricState(PerfectBellError, ValueError):
    """State is not invariant under exchange of the two tensor factors."""


class PreconditionViolated(PerfectBellError, ValueError):
    pass


class NoPerfectDirection(PerfectBellError):
    """No unit direction gives perfect (anti)correlation for the requested sign."""


class NoFeasibleR(PerfectBellError):
    """Grid search found no grid point inside the perfect-correlation band."""


class EmptyOutcomeSet(PerfectBellError, ValueError):
    pass
