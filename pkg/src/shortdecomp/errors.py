"""Exception hierarchy.

Validation errors (bad input) and internal inconsistencies (two independent
computations disagreeing) are kept apart because the CLI maps them to
different exit statuses.
"""


class ShortDecompError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ShortDecompError, ValueError):
    """Input violates a documented invariant."""


class NotHermitian(ValidationError):
    pass


class NotPsd(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotOrthonormal(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class NotARing(ValidationError):
    pass


class NotACharge(ValidationError):
    pass


class RingMismatch(ValidationError):
    pass


class NotAStarAlgebra(ValidationError):
    pass


class AlgebraMismatch(ValidationError):
    pass


class NotRepresentable(ValidationError):
    pass


class SchemaError(ValidationError):
    """A JSON document does not follow the expected schema."""


class InternalInconsistency(ShortDecompError, ArithmeticError):
    """Two routes that must agree produced different answers."""


class NoConvergence(ShortDecompError, ArithmeticError):
    pass
