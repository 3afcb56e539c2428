"""Exception hierarchy shared by every module."""


class SurfaceError(Exception):
    """Base class for all errors raised by :mod:`wintgen`."""


class ParseError(SurfaceError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset into the UTF-8 encoded source.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(SurfaceError, ArithmeticError):
    """Evaluation left the domain of a function or of a patch."""

    def __init__(self, message, expr=None):
        super().__init__(message)
        self.expr = expr


class DegenerateError(DomainError):
    """The patch is not an immersion at the evaluated point."""


class SpecError(SurfaceError, ValueError):
    """Invalid patch specification or family constants."""


class NotWintgenIdealError(SurfaceError, ValueError):
    """A canonical form was requested at a point off the Wintgen equality."""


class UmbilicalDegenerateError(SurfaceError, ValueError):
    """The curvature ellipse is a point, so no canonical rotation exists."""
