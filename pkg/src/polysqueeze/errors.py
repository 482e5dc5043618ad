"""Exception hierarchy shared by every module."""


class SqueezeError(Exception):
    """Base class for all polysqueeze errors."""


class ContractViolation(SqueezeError, ValueError):
    """A precondition on the arguments does not hold (wrong dimension, point outside domain...)."""


class MalformedInputError(SqueezeError, ValueError):
    """Input data is structurally invalid (bad JSON, non-symmetric matrix...)."""


class RangeError(SqueezeError, ValueError):
    """A scalar argument lies outside its admissible range."""


class UnsupportedDomainError(SqueezeError):
    """The operation has no implementation for this kind of domain."""


class UnsupportedMapError(SqueezeError):
    """The map lacks a capability the operation needs (usually an inverse)."""


class InconsistencyError(SqueezeError):
    """Bound intervals produced by different rules do not intersect."""
