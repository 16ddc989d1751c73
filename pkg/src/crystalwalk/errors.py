"""Exception types shared across the package."""


class CrystalWalkError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedTypeError(CrystalWalkError, ValueError):
    """Requested Cartan type is not one of A, B, C, D."""


class ResourceLimitError(CrystalWalkError, RuntimeError):
    """An enumeration or extraction exceeded its configured budget.

    ``partial_count`` carries how far the computation got before bailing.
    """

    def __init__(self, message: str, partial_count: int = 0):
        super().__init__(message)
        self.partial_count = partial_count


class NotMinusculeError(CrystalWalkError, ValueError):
    """A minuscule highest weight was required but not supplied."""


class ChamberDomainError(CrystalWalkError, ValueError):
    """Parameters outside the regime where a formula is valid.

    Raised e.g. for nabla with some t^[alpha] >= 1, or for a drift
    direction on or outside the Weyl chamber walls.
    """


class ConfigError(CrystalWalkError, ValueError):
    """Invalid experiment configuration; message names the offending field."""
