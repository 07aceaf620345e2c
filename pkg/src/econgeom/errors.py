"""Exception hierarchy shared by all econgeom modules."""

from __future__ import annotations


class EconGeomError(Exception):
    """Base class for every error raised by econgeom."""

    exit_code = 3


class DomainError(EconGeomError, ValueError):
    """A point or parameter lies outside the admissible domain."""


class SingularMetricError(EconGeomError):
    pass


class NormalizationError(EconGeomError):
    pass


class QuadratureError(EconGeomError):
    pass


class MapError(EconGeomError):
    pass


class SingularJacobianError(EconGeomError):
    pass


class FitError(EconGeomError):
    pass


class SupportError(EconGeomError):
    pass


class InfeasibleError(EconGeomError):
    pass


class BlowupError(EconGeomError):
    """Integration left the admissible domain.

    The samples accepted before the failure are kept on ``partial`` as a
    ``(s, y)`` pair of arrays so callers can still inspect them.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ParseError(EconGeomError):
    exit_code = 1

    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{loc}")
        self.line = line
        self.column = column


class ValidationError(EconGeomError, ValueError):
    """One or more configuration keys failed validation.

    ``errors`` is a list of ``(key, message)`` pairs, all of them, not just
    the first one found.
    """

    exit_code = 1

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [("", errors)]
        self.errors = list(errors)
        super().__init__("; ".join(f"{k}: {m}" if k else m for k, m in self.errors))

    @property
    def keys(self):
        return [k for k, _ in self.errors]


class OutputError(EconGeomError):
    """The output directory cannot be created or written."""

    exit_code = 2
