"""Weighted sequence spaces l^p(U), l^p(V) and the inequalities built on them.

The weights are the H^inf norms of the basis elements.  For ``a`` on the
index set,

    ||a||_{l^p(U)} = (sum |a_k|^p ||u_k||^{2-p})^{1/p}   for 1 <= p <= 2,
    ||a||_{l^p(U)} = (sum |a_k|^p ||v_k||^{2-p})^{1/p}   for 2 <= p < inf,
    ||a||_{l^inf(U)} = sup |a_k| / ||v_k||,

and l^p(V) swaps the roles of ``u_k`` and ``v_k``.  Note the duality
pairing between l^p(U) and l^q(V) is *bilinear*, ``sum s1_k s2_k``, unlike
the sesquilinear inner product of H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .fourier import CoefficientSequence, analyze_u, synthesize_u
from .hilbert import GridFunction, hp_norm
from .systems import BiorthogonalSystem, FrameBounds

__all__ = [
    "WEIGHT_NORMS",
    "hinf_weights",
    "lp_norm_u",
    "lp_norm_v",
    "conjugate_exponent",
    "HausdorffYoungReport",
    "hausdorff_young_report",
    "DualityReport",
    "duality_pairing_report",
]

WEIGHT_NORMS = ("intersection", "sup")
HY_TOL = 1e-9
DUALITY_TOL = 1e-9


def conjugate_exponent(p: float) -> float:
    p = float(p)
    if p < 1.0 or math.isnan(p):
        raise ValidationError(f"p must satisfy p >= 1 (got {p})")
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def hinf_weights(sys: BiorthogonalSystem, weight_norm: str = "intersection"):
    """``(||u_k||_{H^inf}, ||v_k||_{H^inf})`` for every index.

    ``"intersection"`` takes ``max(||.||_2, ||.||_inf)``, the norm of
    L^2 ∩ L^inf; ``"sup"`` uses the discrete maximum alone.
    """
    if weight_norm not in WEIGHT_NORMS:
        raise ValidationError(f"weight_norm must be one of {WEIGHT_NORMS}")
    w = sys.grid.weights
    out = []
    for arr in (sys.u_values, sys.v_values):
        mod = np.abs(arr)
        sup = mod.max(axis=1)
        if weight_norm == "sup":
            out.append(sup)
        else:
            out.append(np.maximum(np.sqrt(mod**2 @ w), sup))
    u, v = out
    if np.any(u == 0.0) or np.any(v == 0.0):
        raise ValidationError("a basis element has zero H^inf norm")
    return u, v


def _values(a) -> np.ndarray:
    return a.values if isinstance(a, CoefficientSequence) else np.asarray(a, dtype=complex)


def _weighted_norm(a, p, low_weight, high_weight, inf_weight) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValidationError(f"p must satisfy p >= 1 (got {p})")
    mod = np.abs(a)
    if math.isinf(p):
        return float(np.max(mod / inf_weight))
    if p == 2.0:
        return float(np.sqrt(np.sum(mod**2)))
    weight = low_weight if p < 2.0 else high_weight
    return float(np.sum(mod**p * weight ** (2.0 - p)) ** (1.0 / p))


def lp_norm_u(sys: BiorthogonalSystem, a, p: float, weight_norm: str = "intersection") -> float:
    u, v = hinf_weights(sys, weight_norm)
    return _weighted_norm(_values(a), p, u, v, v)


def lp_norm_v(sys: BiorthogonalSystem, b, p: float, weight_norm: str = "intersection") -> float:
    u, v = hinf_weights(sys, weight_norm)
    return _weighted_norm(_values(b), p, v, u, u)


def _is_orthonormal(sys: BiorthogonalSystem) -> bool:
    return bool(np.array_equal(sys.u_values, sys.v_values))


@dataclass(frozen=True)
class HausdorffYoungReport:
    """Ratios of both Hausdorff-Young inequalities for one input.

    ``analysis_ratio = ||fhat||_{l^p'(U)} / ||f||_{H^p}`` and
    ``synthesis_ratio = ||F_U^{-1} a||_{H^p'} / ||a||_{l^p(U)}``.
    ``passed`` is ``None`` where no explicit constant is available.
    """

    p: float
    p_conj: float
    analysis_ratio: float
    synthesis_ratio: float
    bound: Optional[float]
    passed: Optional[bool]
    frame_ratio: Optional[float] = None


def hausdorff_young_report(
    sys: BiorthogonalSystem,
    f: GridFunction,
    p: float,
    a: Optional[CoefficientSequence] = None,
    weight_norm: str = "intersection",
    frame: Optional[FrameBounds] = None,
    tol: float = HY_TOL,
) -> HausdorffYoungReport:
    """Evaluate both Hausdorff-Young ratios for ``1 <= p <= 2``.

    The synthesis direction uses ``a`` when given and ``fhat`` otherwise.
    At ``p = 1`` both ratios must be at most one.  At ``p = 2`` they must
    equal one for an orthonormal system; otherwise the analysis ratio is
    reported relative to the frame constant ``A`` when ``frame`` is given.
    Between the endpoints the constant is not explicit and nothing is
    asserted.
    """
    p = float(p)
    if not (1.0 <= p <= 2.0):
        raise ValidationError(f"Hausdorff-Young needs 1 <= p <= 2 (got {p})")
    pc = conjugate_exponent(p)
    fh = analyze_u(sys, f)
    analysis = lp_norm_u(sys, fh, pc, weight_norm) / hp_norm(f, p)
    a = fh if a is None else a
    synthesis = hp_norm(synthesize_u(sys, a), pc) / lp_norm_u(sys, a, p, weight_norm)
    bound = passed = frame_ratio = None
    if p == 1.0:
        bound = 1.0
        passed = analysis <= 1.0 + tol and synthesis <= 1.0 + tol
    elif p == 2.0:
        if _is_orthonormal(sys):
            bound = 1.0
            passed = abs(analysis - 1.0) <= tol and abs(synthesis - 1.0) <= tol
        elif frame is not None:
            frame_ratio = analysis / frame.A
    return HausdorffYoungReport(p, pc, float(analysis), float(synthesis), bound, passed, frame_ratio)


@dataclass(frozen=True)
class DualityReport:
    p: float
    q: float
    pairing: float
    bound: float
    ratio: float
    passed: bool


def duality_pairing_report(
    sys: BiorthogonalSystem,
    s1,
    s2,
    p: float,
    weight_norm: str = "intersection",
    tol: float = DUALITY_TOL,
) -> DualityReport:
    """Check ``|sum s1_k s2_k| <= ||s1||_{l^p(U)} ||s2||_{l^q(V)}``, ``1/p + 1/q = 1``."""
    p = float(p)
    if math.isinf(p):
        raise ValidationError("p must be finite")
    q = conjugate_exponent(p)
    pairing = abs(np.sum(_values(s1) * _values(s2)))
    bound = lp_norm_u(sys, s1, p, weight_norm) * lp_norm_v(sys, s2, q, weight_norm)
    ratio = pairing / bound if bound > 0 else (0.0 if pairing == 0 else math.inf)
    return DualityReport(p, q, float(pairing), float(bound), float(ratio), bool(pairing <= bound * (1 + tol)))
