"""Exception hierarchy shared by the engine and the command line."""


class DihomError(Exception):
    """Base class for all errors raised by :mod:`dihom`."""


class DomainError(DihomError, ValueError):
    """An argument lies outside the domain of an operation."""


class ModelError(DihomError):
    """The input model violates a structural requirement (properness, loops, ...)."""


class IntegrityError(DihomError):
    """A computed structure failed a consistency check, e.g. a boundary squaring to non-zero."""


class OperandError(DihomError):
    """Operands of a product do not fit together (endpoints, degrees, intervals)."""


class UnsupportedDegreeError(OperandError):
    """The operation is only implemented in low degrees."""


class PVSyntaxError(DihomError):
    """Parse or static-check failure in PV source, with a position."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
