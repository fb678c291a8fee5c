"""Exception types raised across the package."""


class NonlocalGatesError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateQubit(NonlocalGatesError):
    pass


class UnknownQubit(NonlocalGatesError):
    pass


class UnknownNode(NonlocalGatesError):
    pass


class DimensionMismatch(NonlocalGatesError):
    pass


class RegisterMismatch(NonlocalGatesError):
    pass


class NotNormalized(NonlocalGatesError):
    pass


class NotUnitary(NonlocalGatesError):
    pass


class NotHermitian(NonlocalGatesError):
    pass


class LocalityViolation(NonlocalGatesError):
    """A node touched a qubit it does not own."""


class KnowledgeViolation(NonlocalGatesError):
    """A node used a classical bit it has not measured or received."""


class SameNode(NonlocalGatesError):
    """A Bell pair was requested with both halves at one node."""


class NonUniformCommunication(NonlocalGatesError):
    """Branches of one run disagree on ebit or channel usage."""


class NotNonlocal(NonlocalGatesError):
    pass


class BadArity(NonlocalGatesError):
    pass


class RankMismatch(NonlocalGatesError):
    pass


class NotBellDiagonal(NonlocalGatesError):
    pass
