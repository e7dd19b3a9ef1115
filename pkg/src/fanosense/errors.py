"""Exception hierarchy."""


class FanosenseError(Exception):
    """Base class for all package errors."""


class ConfigError(FanosenseError):
    """Invalid configuration; carries a dotted field path when available."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class NoPlasmonResonanceError(FanosenseError):
    """Froehlich condition has no real solution (imaginary LSPR root)."""


class PolarizabilityPoleError(FanosenseError):
    """Quasi-static polarizability denominator vanished."""


class GeometryOverlapError(FanosenseError):
    """Nanoparticle and emitter volumes overlap (d <= r + a)."""


class DegenerateFluxError(FanosenseError):
    """Scattered flux vanished; correlation normalization undefined."""


class SteadyStateError(FanosenseError):
    """Steady-state solve failed or left an unacceptable residual."""


class GridError(FanosenseError):
    """Invalid sweep grid (empty window, non-increasing points, ...)."""
