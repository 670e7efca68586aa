"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for I/O and parse
problems, 2 for domain rejections.
"""


class MurmurError(Exception):
    exit_code = 1


class ParseError(MurmurError):
    exit_code = 1


class SchemaError(ParseError):
    pass


class DomainError(MurmurError, ValueError):
    exit_code = 2


class SingularCurveError(DomainError):
    pass


class BadReductionError(DomainError):
    pass


class CMCurveError(DomainError):
    pass


class EmptyFamilyError(DomainError):
    pass


class PoleError(DomainError):
    pass


class NonPositiveBetaError(DomainError):
    pass


class AmbiguousOrderError(MurmurError, RuntimeError):
    """BSGS could not pin a unique group order."""
