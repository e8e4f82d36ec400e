"""Exception hierarchy for relhom."""


class RelhomError(Exception):
    """Base class for every error raised by the engine."""


class DimensionMismatch(RelhomError, ValueError):
    pass


class ModulusMismatch(RelhomError, ValueError):
    pass


class NotAChainMap(RelhomError, ValueError):
    pass


class WindowTooSmall(RelhomError):
    """A truncated window does not reach far enough for the requested degree."""


class NoPreimage(RelhomError):
    """Raised when a degreewise lift does not exist (Hom-exactness violated)."""


class NotXQuasiIso(RelhomError):
    pass


class PdExceedsBudget(RelhomError):
    pass


class UnsupportedSubcategory(RelhomError):
    pass


class NotXAcyclicInput(RelhomError):
    pass


class VerificationFailure(RelhomError):
    """A computed certificate (exactness, properness, ...) did not check out."""


class InputError(RelhomError, ValueError):
    """Malformed literal, config or JSON document."""


class Cancelled(RelhomError):
    pass


class IllDefinedMorphism(RelhomError, ValueError):
    """A matrix entry violates the congruence constraint between cyclic orders."""


class NotAComplex(RelhomError, ValueError):
    """Consecutive differentials do not compose to zero."""
