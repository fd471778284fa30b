"""The operator associated to a pair (U, Lambda) and its functional calculus.

``apply_L`` acts diagonally in the basis, ``L f = sum_k lambda_k (f, v_k) u_k``;
the adjoint acts on the dual family with conjugated eigenvalues.  The
resolvent is realised as a U-convolution with
``g_lambda = sum_k u_k / (lambda_k - lambda)``.

Domains of powers of ``L`` are vacuous after truncation, so the test-function
classes are represented by coefficient-decay diagnostics instead
(:func:`decay_order`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .convolution import conv_ionkin, conv_u
from .errors import IndexMismatchError, SingularityError, ValidationError
from .fourier import analyze_u, analyze_v, synthesize_u, synthesize_v
from .hilbert import GridFunction, lp_norm
from .systems import BiorthogonalSystem, IndexSet

__all__ = [
    "Spectrum",
    "SpectralOperator",
    "EPS_SPEC",
    "make_h_spectrum",
    "make_ionkin_spectrum",
    "apply_L",
    "apply_L_star",
    "apply_ionkin",
    "resolvent_apply",
    "resolvent_kernel",
    "intertwining_residual",
    "ionkin_intertwining_residual",
    "DecayReport",
    "decay_order",
]

EPS_SPEC = 1e-8
_MAX_SUMMABILITY_ORDER = 8
# increments of a convergent p-series shrink by 2^(1-s) per doubling
_CAUCHY_RATIO = 0.75


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalue sequence aligned with an index set."""

    index_set: IndexSet
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.shape != (len(self.index_set),):
            raise ValidationError("spectrum is not aligned with its index set")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("spectrum values must be finite")

    def __len__(self):
        return self.values.size

    def __getitem__(self, index: int) -> complex:
        return complex(self.values[self.index_set.position(index)])

    def summability_order(self) -> Optional[int]:
        """Smallest integer ``s <= 8`` for which ``sum (1 + |lambda|)^-s`` looks convergent.

        Terms are summed in order of increasing ``|lambda|``; the partial
        sums at a quarter, half and all of the terms are compared and the
        series is taken as Cauchy when the second increment is less than
        three quarters of the first.
        """
        mags = np.sort(np.abs(self.values))
        n = mags.size
        if n < 4:
            return None
        marks = (n // 4, n // 2, n)
        for s in range(1, _MAX_SUMMABILITY_ORDER + 1):
            partial = np.cumsum((1.0 + mags) ** (-float(s)))
            s1, s2, s3 = (partial[m - 1] for m in marks)
            d1, d2 = s2 - s1, s3 - s2
            if d1 <= 0.0 or d2 / d1 < _CAUCHY_RATIO:
                return s
        return None


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    """A biorthogonal system paired with a spectrum on the same index set."""

    system: BiorthogonalSystem
    spectrum: Spectrum

    def __post_init__(self):
        if self.system.index_set != self.spectrum.index_set:
            raise IndexMismatchError("system and spectrum have different index sets")


def make_h_spectrum(h: float, N: int) -> Spectrum:
    """``lambda_j = 2 pi j - i ln h`` on the balanced set ``-N..N``."""
    h = float(h)
    if not (h > 0.0 and math.isfinite(h)):
        raise ValidationError(f"h must be positive (got {h})")
    index_set = IndexSet.balanced(int(N))
    j = index_set.as_array()
    return Spectrum(index_set, 2 * np.pi * j - 1j * math.log(h))


def make_ionkin_spectrum(N: int) -> Spectrum:
    """``(2 pi k)^2`` on both members ``2k - 1``, ``2k`` of each pair, ``0`` at index 0."""
    index_set = IndexSet.natural(0, 2 * int(N))
    k = (index_set.as_array() + 1) // 2
    return Spectrum(index_set, (2 * np.pi * k) ** 2 + 0j)


def apply_L(op: SpectralOperator, f: GridFunction) -> GridFunction:
    fh = analyze_u(op.system, f)
    return synthesize_u(op.system, fh.values * op.spectrum.values)


def apply_L_star(op: SpectralOperator, g: GridFunction) -> GridFunction:
    gh = analyze_v(op.system, g)
    return synthesize_v(op.system, gh.values * np.conj(op.spectrum.values))


def apply_ionkin(sys: BiorthogonalSystem, f: GridFunction) -> GridFunction:
    """``-f''`` for ``f`` in the span of the Ionkin system, computed on coefficients.

    The associated functions form Jordan chains:
    ``-(x cos 2 pi k x)'' = (2 pi k)^2 x cos 2 pi k x + 4 pi k sin 2 pi k x``,
    so the even coefficient feeds the odd one.
    """
    if sys.system_id != "ionkin":
        raise ValidationError("apply_ionkin needs the Ionkin system")
    c = analyze_u(sys, f).values
    k = (sys.index_set.as_array() + 1) // 2
    lam = (2 * np.pi * k) ** 2
    out = lam * c
    out[1::2] += 4 * np.pi * k[1::2] * c[2::2]
    return synthesize_u(sys, out)


def _check_resolvent_set(op: SpectralOperator, lam: complex, eps_spec: float):
    dist = np.abs(op.spectrum.values - lam)
    i = int(np.argmin(dist))
    if dist[i] <= eps_spec:
        index = op.spectrum.index_set.indices[i]
        raise SingularityError(
            f"lambda = {lam} lies within {eps_spec:g} of the eigenvalue with index {index}",
            index=index,
        )


def resolvent_kernel(op: SpectralOperator, lam: complex, eps_spec: float = EPS_SPEC) -> GridFunction:
    """``g_lambda = sum_k u_k / (lambda_k - lambda)``."""
    lam = complex(lam)
    _check_resolvent_set(op, lam, eps_spec)
    return synthesize_u(op.system, 1.0 / (op.spectrum.values - lam))


def resolvent_apply(
    op: SpectralOperator, lam: complex, f: GridFunction, eps_spec: float = EPS_SPEC
) -> GridFunction:
    """``(L - lambda)^{-1} f`` as the U-convolution ``g_lambda * f``."""
    return conv_u(op.system, resolvent_kernel(op, lam, eps_spec), f)


def intertwining_residual(op: SpectralOperator, f: GridFunction, g: GridFunction) -> float:
    """``max(||L(f*g) - (Lf)*g||, ||L(f*g) - f*(Lg)||)`` for the U-convolution."""
    sys = op.system
    lhs = apply_L(op, conv_u(sys, f, g))
    r1 = lp_norm(lhs - conv_u(sys, apply_L(op, f), g), 2.0)
    r2 = lp_norm(lhs - conv_u(sys, f, apply_L(op, g)), 2.0)
    return max(r1, r2)


def ionkin_intertwining_residual(sys: BiorthogonalSystem, f: GridFunction, g: GridFunction) -> float:
    """Same as :func:`intertwining_residual` for the Ionkin operator and its five-integral convolution."""
    lhs = apply_ionkin(sys, conv_ionkin(f, g))
    r1 = lp_norm(lhs - conv_ionkin(apply_ionkin(sys, f), g), 2.0)
    r2 = lp_norm(lhs - conv_ionkin(f, apply_ionkin(sys, g)), 2.0)
    return max(r1, r2)


@dataclass(frozen=True)
class DecayReport:
    """Coefficient decay of a function measured against ``1 + |lambda_k|``.

    ``seminorms[k]`` is ``sup |fhat| (1 + |lambda|)^k``; ``exponent`` the
    fitted decay rate (negative means growth), ``None`` when fewer than two
    coefficients rise above the noise floor; ``members[k]`` is the
    truncation-level verdict on membership in the class of order ``k``.
    """

    seminorms: List[float]
    exponent: Optional[float]
    members: List[bool]
    support: int
    noise_floor: float = field(default=0.0)


def decay_order(
    sys: BiorthogonalSystem,
    spectrum: Spectrum,
    f: GridFunction,
    k_max: int = 6,
    noise_floor: float = 1e-13,
) -> DecayReport:
    """Finite-truncation analogue of the test-function seminorms.

    Coefficients whose modulus is below ``noise_floor`` times the largest
    one are treated as zero.  The exponent is minus the slope of a
    least-squares line through ``(log(1 + |lambda_k|), log |fhat_k|)``.
    A class of order ``k`` counts as containing ``f`` when the weighted
    sequence ``|fhat| (1 + |lambda|)^k`` does not peak in the outer half of
    the spectrum (ordered by ``|lambda|``), i.e. shows no growth toward the
    truncation edge.
    """
    if k_max < 0:
        raise ValidationError("k_max must be non-negative")
    if sys.index_set != spectrum.index_set:
        raise IndexMismatchError("system and spectrum have different index sets")
    mod = np.abs(analyze_u(sys, f).values)
    top = mod.max()
    if top > 0:
        mod = np.where(mod < noise_floor * top, 0.0, mod)
    weight = 1.0 + np.abs(spectrum.values)
    order = np.argsort(weight, kind="stable")
    outer = order[order.size // 2 :]
    inner = order[: order.size // 2]
    seminorms, members = [], []
    for k in range(k_max + 1):
        seq = mod * weight**k
        seminorms.append(float(seq.max()))
        inner_max = seq[inner].max() if inner.size else 0.0
        members.append(bool(seq[outer].max() <= inner_max))
    mask = mod > 0
    support = int(mask.sum())
    exponent = None
    if support >= 2 and np.ptp(np.log(weight[mask])) > 0:
        slope = np.polyfit(np.log(weight[mask]), np.log(mod[mask]), 1)[0]
        exponent = float(-slope)
    return DecayReport(seminorms, exponent, members, support, noise_floor)
