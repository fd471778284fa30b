"""U- and V-Fourier analysis and synthesis.

For a biorthogonal system ``(U, V)``:

* ``analyze_u(f)[k] = (f, v_k)``, inverted by ``synthesize_u(a) = sum a_k u_k``;
* ``analyze_v(f)[k] = (f, u_k)``, inverted by ``synthesize_v(a) = sum a_k v_k``.

The coefficient-side inner products :func:`l2u_inner` and :func:`l2v_inner`
are evaluated by literally composing synthesis with the opposite analysis,
so the Plancherel identity is something the tests check rather than
something the code assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatchError, IndexMismatchError, ValidationError
from .hilbert import GridFunction, _check_same_grid, inner_product, lp_norm, same_grid
from .systems import BiorthogonalSystem, IndexSet, random_coefficients

__all__ = [
    "CoefficientSequence",
    "analyze_u",
    "analyze_v",
    "synthesize_u",
    "synthesize_v",
    "l2u_inner",
    "l2v_inner",
    "plancherel_residual",
    "plancherel_norm_check",
    "transform_duality_residual",
    "truncation_residual",
    "band_limited",
    "random_band_limited",
]

SIDES = ("U", "V", "raw")


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    """Complex sequence on an :class:`IndexSet`.

    ``side_tag`` records where the sequence came from: ``"U"`` for
    U-analysis, ``"V"`` for V-analysis, ``"raw"`` for synthetic input.
    """

    index_set: IndexSet
    values: np.ndarray
    side_tag: str = "raw"

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (len(self.index_set),):
            raise ValidationError(
                f"{values.size} coefficients for an index set of size {len(self.index_set)}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("coefficients must be finite")
        if self.side_tag not in SIDES:
            raise ValidationError(f"side_tag must be one of {SIDES}")

    @classmethod
    def indicator(cls, index_set: IndexSet, index: int) -> "CoefficientSequence":
        values = np.zeros(len(index_set), complex)
        values[index_set.position(index)] = 1.0
        return cls(index_set, values)

    def __len__(self):
        return self.values.size

    def __getitem__(self, index: int) -> complex:
        return complex(self.values[self.index_set.position(index)])

    def items(self):
        return zip(self.index_set.indices, self.values)

    def _other(self, other):
        if isinstance(other, CoefficientSequence):
            _check_index(self.index_set, other.index_set)
            return other.values
        return complex(other)

    def __mul__(self, other):
        return CoefficientSequence(self.index_set, self.values * self._other(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return CoefficientSequence(self.index_set, self.values + self._other(other))

    def __sub__(self, other):
        return CoefficientSequence(self.index_set, self.values - self._other(other))


def _check_index(a: IndexSet, b: IndexSet):
    if a != b:
        raise IndexMismatchError("coefficient sequences live on different index sets")


def _check_on_grid(sys: BiorthogonalSystem, f: GridFunction):
    if not same_grid(sys.grid, f.grid):
        raise GridMismatchError("grid function is not sampled on the system's grid")


def analyze_u(sys: BiorthogonalSystem, f: GridFunction) -> CoefficientSequence:
    """``k -> (f, v_k)``."""
    _check_on_grid(sys, f)
    vals = (sys.v_values.conj() * sys.grid.weights) @ f.values
    return CoefficientSequence(sys.index_set, vals, "U")


def analyze_v(sys: BiorthogonalSystem, f: GridFunction) -> CoefficientSequence:
    """``k -> (f, u_k)``."""
    _check_on_grid(sys, f)
    vals = (sys.u_values.conj() * sys.grid.weights) @ f.values
    return CoefficientSequence(sys.index_set, vals, "V")


def _synthesize(sys, a, samples, expander):
    if isinstance(a, CoefficientSequence):
        _check_index(sys.index_set, a.index_set)
        coeffs = a.values
    else:
        coeffs = np.asarray(a, dtype=complex)
        if coeffs.shape != (len(sys),):
            raise IndexMismatchError("coefficient vector does not match the index set")
    coeffs = coeffs.copy()
    ev = None
    if expander is not None:
        ev = lambda x: expander(coeffs, x)  # noqa: E731
    return GridFunction(sys.grid, coeffs @ samples, ev)


def synthesize_u(sys: BiorthogonalSystem, a) -> GridFunction:
    """``sum_k a_k u_k``; the result evaluates exactly off the grid."""
    return _synthesize(sys, a, sys.u_values, sys.expand_u)


def synthesize_v(sys: BiorthogonalSystem, a) -> GridFunction:
    """``sum_k a_k v_k``."""
    return _synthesize(sys, a, sys.v_values, sys.expand_v)


def l2u_inner(sys: BiorthogonalSystem, a: CoefficientSequence, b: CoefficientSequence) -> complex:
    """``sum_k a_k conj((F_V F_U^{-1} b)_k)``, evaluated by synthesis then V-analysis."""
    _check_index(a.index_set, b.index_set)
    mixed = analyze_v(sys, synthesize_u(sys, b))
    return complex(np.sum(a.values * np.conj(mixed.values)))


def l2v_inner(sys: BiorthogonalSystem, a: CoefficientSequence, b: CoefficientSequence) -> complex:
    """``sum_k a_k conj((F_U F_V^{-1} b)_k)``."""
    _check_index(a.index_set, b.index_set)
    mixed = analyze_u(sys, synthesize_v(sys, b))
    return complex(np.sum(a.values * np.conj(mixed.values)))


def plancherel_residual(sys: BiorthogonalSystem, f: GridFunction, g: GridFunction) -> float:
    """``|(f, g) - sum_k fhat_k conj(ghat*_k)|``.

    Exact (up to quadrature) only for band-limited ``f``; for other inputs
    use :func:`truncation_residual` to see how much the truncation loses.
    """
    _check_same_grid(f, g)
    lhs = inner_product(f, g)
    rhs = np.sum(analyze_u(sys, f).values * np.conj(analyze_v(sys, g).values))
    return float(abs(lhs - rhs))


def transform_duality_residual(sys: BiorthogonalSystem, w: GridFunction, a: CoefficientSequence) -> float:
    """``|<F_U w, a> - (w, F_V^{-1} a)|`` with ``<b, a> = sum b_k conj(a_k)``.

    This is a finite rearrangement of sums and holds for every ``w`` on the
    grid, band-limited or not.
    """
    lhs = np.sum(analyze_u(sys, w).values * np.conj(a.values))
    rhs = inner_product(w, synthesize_v(sys, a))
    return float(abs(lhs - rhs))


def truncation_residual(sys: BiorthogonalSystem, f: GridFunction) -> float:
    """Relative H-norm of ``f - F_U^{-1} F_U f``; zero for band-limited input."""
    rest = f - synthesize_u(sys, analyze_u(sys, f))
    norm = lp_norm(f, 2.0)
    return lp_norm(rest, 2.0) / norm if norm > 0 else 0.0


def band_limited(sys: BiorthogonalSystem, coeffs, family: str = "u") -> GridFunction:
    """Finite combination of ``u_k`` (or ``v_k``) with the given coefficients."""
    if family == "u":
        return synthesize_u(sys, coeffs)
    if family == "v":
        return synthesize_v(sys, coeffs)
    raise ValidationError("family must be 'u' or 'v'")


def random_band_limited(
    sys: BiorthogonalSystem,
    rng: np.random.Generator,
    n_test: Optional[int] = None,
    family: str = "u",
    normalize: bool = False,
) -> GridFunction:
    """Random combination of the leading ``2 n_test + 1`` elements of the index set.

    With the built-in orderings these are ``|j| <= n_test`` for the
    h-exponential system and ``0..2 n_test`` for the Ionkin system.  The
    default ``n_test`` is half the truncation order, which keeps every test
    function strictly inside the band.
    """
    K = len(sys)
    if n_test is None:
        count = max(3, (K // 2) | 1)
    else:
        count = 2 * int(n_test) + 1
    count = min(count, K)
    coeffs = np.zeros(K, complex)
    coeffs[:count] = random_coefficients(rng, count)
    f = band_limited(sys, coeffs, family)
    if normalize:
        f = f * (1.0 / lp_norm(f, 2.0))
    return f


def plancherel_norm_check(sys: BiorthogonalSystem, f: GridFunction) -> dict:
    """Norm form of Plancherel: ``||f||`` against ``sqrt(sum fhat conj(fhat*))``."""
    s = complex(np.sum(analyze_u(sys, f).values * np.conj(analyze_v(sys, f).values)))
    norm = lp_norm(f, 2.0)
    return {
        "norm": norm,
        "coefficient_sum": s,
        "imag_residual": abs(s.imag),
        "norm_residual": abs(norm - math.sqrt(max(s.real, 0.0))),
    }
