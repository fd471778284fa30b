"""Exception hierarchy shared by every module of the package."""


class BiorthoError(Exception):
    """Base class for all errors raised by :mod:`biortho`."""


class ValidationError(BiorthoError, ValueError):
    """An argument is outside its admissible range or contains non-finite data."""


class GridMismatchError(BiorthoError, ValueError):
    """Two grid functions (or a function and a system) live on different grids."""


class IndexMismatchError(BiorthoError, ValueError):
    """A coefficient sequence is not aligned with the index set it is used with."""


class SingularityError(BiorthoError, ArithmeticError):
    """A spectral parameter hits (or comes too close to) a point of the spectrum."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
