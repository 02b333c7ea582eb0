"""Exception taxonomy shared by all shocklab modules."""


class ShocklabError(Exception):
    """Base class for all shocklab errors."""


class ParameterError(ShocklabError, ValueError):
    """A parameter is outside its admissible range (e.g. rate <= 0)."""


class InfeasibleGeometryError(ShocklabError):
    """No start point lies weakly south-west of the requested end point."""


class GuardError(ShocklabError):
    """A size/complexity guard tripped (e.g. oracle span too large)."""


class ContourError(ShocklabError):
    """A contour set violates the nesting rules of a kernel."""


class QuadratureError(ShocklabError):
    """Quadrature failed to converge or left an imaginary residual."""


class NumericalError(ShocklabError):
    """A numerically impossible result (e.g. determinant far outside [0,1])."""


class ScenarioMismatchError(ShocklabError):
    """The shock-locating condition of a scaling transform is violated."""


class UnsupportedICError(ShocklabError):
    """An initial condition cannot be expressed as an LPP start set."""


class WindowOverflowError(ShocklabError):
    """A simulation window overflowed even after the retry cap."""
