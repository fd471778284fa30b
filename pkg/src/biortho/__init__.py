"""Fourier analysis and convolutions generated by biorthogonal Riesz bases on L^2(0, 1)."""

from .errors import (
    BiorthoError,
    GridMismatchError,
    IndexMismatchError,
    SingularityError,
    ValidationError,
)
from .hilbert import *  # noqa: F401,F403
from .systems import *  # noqa: F401,F403
from .fourier import *  # noqa: F401,F403
from .convolution import *  # noqa: F401,F403
from .spectral_ops import *  # noqa: F401,F403
from .lp import *  # noqa: F401,F403
from . import convolution, fourier, hilbert, lp, spectral_ops, systems

__version__ = "0.1.0"
