"""Exception types shared across the package."""


class BiasmaskError(Exception):
    """Base class for all errors raised by biasmask."""


class DimensionError(BiasmaskError, ValueError):
    """Operands have incompatible lengths or shapes."""


class CapacityError(BiasmaskError, ValueError):
    """A desk-scale exhaustive computation would exceed its configured size limit."""


class ConditioningError(BiasmaskError, ValueError):
    """A reference state is singular or not normalized."""


class FormatError(BiasmaskError, ValueError):
    """A serialized fixture could not be parsed."""
