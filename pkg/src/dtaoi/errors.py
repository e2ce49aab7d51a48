class DtaoiError(Exception):
    """Base class for errors raised by this package."""


class DistributionError(DtaoiError, ValueError):
    """Invalid matrix-geometric distribution (bad mass, negativity, radius)."""


class IterationCapError(DtaoiError, RuntimeError):
    pass


class ChainStructureError(DtaoiError, ValueError):
    """QBD blocks violate shape, nonnegativity or row-sum constraints."""


class SolverError(DtaoiError, RuntimeError):
    """Rate matrix or boundary vector could not be computed reliably."""


class ZeroMassError(DtaoiError, ValueError):
    """Conditioning on a phase subset that carries no stationary mass."""


class ScheduleConflictError(DtaoiError, ValueError):
    pass
