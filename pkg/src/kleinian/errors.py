"""Exception types shared across the package."""


class KleinianError(Exception):
    """Base class for all package errors."""


class ConfigError(KleinianError):
    pass


class NotATR(KleinianError):
    """The field does not have exactly one complex place."""


class ReduciblePoly(KleinianError):
    pass


class IndexPrimeUnspecified(KleinianError):
    def __init__(self, p):
        super().__init__(f"prime {p} divides the index [Z_F : Z[t]] and no splitting data was given")
        self.p = p


class NotMaximal(KleinianError):
    pass


class NotKleinian(KleinianError):
    pass


class NotPositiveDefinite(KleinianError):
    pass


class PrecisionExhausted(KleinianError):
    """A floating point guard failed; results can no longer be trusted."""


class OriginFixed(KleinianError):
    def __init__(self, g=None):
        super().__init__("element fixes the origin and has no isometric sphere")
        self.g = g


class DegenerateIncidence(KleinianError):
    def __init__(self, msg, duplicates=()):
        super().__init__(msg)
        self.duplicates = list(duplicates)


class NotPaired(KleinianError):
    pass


class UnboundedDomain(KleinianError):
    pass


class NonFiniteOrder(KleinianError):
    pass


class BudgetExceeded(KleinianError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class DegenerateBasePoint(KleinianError):
    """The base point has a nontrivial stabilizer (or sits on an elliptic axis)."""
