"""Biorthogonal Riesz-basis systems sampled on a quadrature grid.

Two systems are built in:

* the h-exponential system ``u_j = h^x e^{2 pi i j x}``,
  ``v_j = h^{-x} e^{2 pi i j x}`` on ``j = -N..N``, eigenfunctions of
  ``-i d/dx`` with ``h y(0) = y(1)`` and of its adjoint;
* the Ionkin system on ``0..2N``: ``u_0 = x``, ``u_{2k-1} = sin(2 pi k x)``,
  ``u_{2k} = x cos(2 pi k x)`` with dual ``v_0 = 2``,
  ``v_{2k-1} = 4 (1 - x) sin(2 pi k x)``, ``v_{2k} = 4 cos(2 pi k x)``.

Arbitrary systems can be assembled with :func:`make_system` from two
callables evaluating the families at arbitrary points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .errors import IndexMismatchError, ValidationError
from .hilbert import GridFunction, QuadratureGrid, lp_norm

__all__ = [
    "IndexSet",
    "BiorthogonalSystem",
    "BiorthogonalityReport",
    "FrameBounds",
    "TOL_BIORTHO",
    "make_system",
    "make_h_exponential",
    "make_ionkin",
    "verify_biorthogonality",
    "estimate_frame_bounds",
    "random_coefficients",
]

TOL_BIORTHO = 1e-9

# evaluate(indices, x) -> array of shape (len(indices),) + x.shape
FamilyFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]
# expand(coefficients, x) -> sum_k c_k phi_k(x), shape x.shape
Expander = Callable[[np.ndarray, np.ndarray], np.ndarray]

_CHUNK = 16384


@dataclass(frozen=True)
class IndexSet:
    """Finite ordered set of signed integer indices.

    ``"balanced"`` ordering interleaves ``0, 1, -1, 2, -2, ...``;
    ``"natural"`` is ascending.  The ordering fixes the layout of every
    coefficient vector built on the set.
    """

    indices: tuple
    ordering_id: str = "natural"

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(set(idx)) != len(idx):
            raise ValidationError("index set contains duplicates")
        if self.ordering_id == "natural" and list(idx) != sorted(idx):
            raise ValidationError("natural ordering must be ascending")
        if self.ordering_id == "balanced" and list(idx) != _balanced(idx):
            raise ValidationError("balanced ordering must interleave 0, 1, -1, 2, -2, ...")

    @classmethod
    def balanced(cls, n: int) -> "IndexSet":
        return cls(tuple(_balanced(range(-n, n + 1))), "balanced")

    @classmethod
    def natural(cls, lo: int, hi: int) -> "IndexSet":
        return cls(tuple(range(lo, hi + 1)), "natural")

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, item):
        return item in self._positions

    @property
    def _positions(self) -> Dict[int, int]:
        # cheap enough to rebuild; index sets are small
        return {k: i for i, k in enumerate(self.indices)}

    def position(self, index: int) -> int:
        try:
            return self._positions[int(index)]
        except KeyError:
            raise IndexMismatchError(f"index {index} not in the index set") from None

    def as_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=int)


def _balanced(indices) -> list:
    return sorted(indices, key=lambda k: (abs(k), k < 0))


def _chunked_expander(func: FamilyFunc, indices: np.ndarray) -> Expander:
    def expand(coeffs, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty(flat.shape, complex)
        for s in range(0, flat.size, _CHUNK):
            out[s : s + _CHUNK] = coeffs @ func(indices, flat[s : s + _CHUNK])
        return out.reshape(x.shape)

    return expand


@dataclass(frozen=True, eq=False)
class BiorthogonalSystem:
    """Paired families ``{u_k}``, ``{v_k}`` sampled on a grid.

    ``u_values[i]`` and ``v_values[i]`` hold the samples of the elements
    with index ``index_set.indices[i]``.  The expanders evaluate finite
    linear combinations of either family at arbitrary points, which is what
    makes band-limited functions exactly evaluable off the grid.
    """

    grid: QuadratureGrid
    index_set: IndexSet
    u_values: np.ndarray
    v_values: np.ndarray
    system_id: str
    params: dict = field(default_factory=dict)
    expand_u: Optional[Expander] = field(default=None, repr=False)
    expand_v: Optional[Expander] = field(default=None, repr=False)
    tol_biortho: float = TOL_BIORTHO

    def __post_init__(self):
        for name in ("u_values", "v_values"):
            arr = np.array(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if arr.shape != (len(self.index_set), len(self.grid)):
                raise ValidationError(f"{name} has shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} contains non-finite samples")
        if self.tol_biortho <= 0:
            raise ValidationError("tol_biortho must be positive")
        w = self.grid.weights
        for name, arr in (("u", self.u_values), ("v", self.v_values)):
            norms = np.sqrt(np.abs(arr) ** 2 @ w)
            if np.any(norms == 0.0):
                bad = self.index_set.indices[int(np.argmin(norms))]
                raise ValidationError(f"{name}_{bad} is the zero function")

    def __len__(self):
        return len(self.index_set)

    @property
    def indices(self) -> tuple:
        return self.index_set.indices

    def u(self, index: int) -> GridFunction:
        return self._element(index, self.u_values, self.expand_u)

    def v(self, index: int) -> GridFunction:
        return self._element(index, self.v_values, self.expand_v)

    def _element(self, index, values, expander):
        i = self.index_set.position(index)
        ev = None
        if expander is not None:
            coeffs = np.zeros(len(self), complex)
            coeffs[i] = 1.0
            ev = lambda x: expander(coeffs, x)  # noqa: E731
        return GridFunction(self.grid, values[i], ev)

    @property
    def u_family(self) -> Dict[int, GridFunction]:
        return {k: self.u(k) for k in self.indices}

    @property
    def v_family(self) -> Dict[int, GridFunction]:
        return {k: self.v(k) for k in self.indices}

    def gram(self) -> np.ndarray:
        """Matrix of ``(u_k, v_l)`` in index-set order."""
        return (self.u_values * self.grid.weights) @ self.v_values.conj().T

    def element_norms(self, p: float = 2.0):
        """``(||u_k||_p, ||v_k||_p)`` for every index, as two arrays."""
        u = np.array([lp_norm(GridFunction(self.grid, r), p) for r in self.u_values])
        v = np.array([lp_norm(GridFunction(self.grid, r), p) for r in self.v_values])
        return u, v


def make_system(
    grid: QuadratureGrid,
    index_set: IndexSet,
    u_func: FamilyFunc,
    v_func: FamilyFunc,
    system_id: str = "custom",
    params: Optional[dict] = None,
    tol_biortho: float = TOL_BIORTHO,
    check: bool = True,
) -> BiorthogonalSystem:
    """Sample user-supplied families on ``grid``.

    ``u_func(indices, x)`` must return an array of shape
    ``(len(indices), len(x))``.  With ``check`` the Gram matrix is verified
    against the identity at ``tol_biortho``.
    """
    idx = index_set.as_array()
    sys_ = BiorthogonalSystem(
        grid,
        index_set,
        u_func(idx, grid.nodes),
        v_func(idx, grid.nodes),
        system_id,
        dict(params or {}),
        _chunked_expander(u_func, idx),
        _chunked_expander(v_func, idx),
        tol_biortho,
    )
    if check:
        report = verify_biorthogonality(sys_)
        if not report.passed:
            raise ValidationError(
                f"families are not biorthogonal: max Gram residual {report.max_residual:.3e}"
                f" exceeds {tol_biortho:.1e}"
            )
    return sys_


def _laurent(coeffs: np.ndarray, n: int, x: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_{m=-n..n} c_m e^{2 pi i m x}`` by Horner's scheme.

    ``coeffs`` are given in ascending order of ``m``.
    """
    z = np.exp(2j * np.pi * x)
    acc = np.full(x.shape, coeffs[-1], complex)
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc * np.exp(-2j * np.pi * n * x)


def make_h_exponential(
    h: float, N: int, grid: QuadratureGrid, tol_biortho: float = TOL_BIORTHO
) -> BiorthogonalSystem:
    """The system ``u_j = h^x e^{2 pi i j x}``, ``v_j = h^{-x} e^{2 pi i j x}``, ``|j| <= N``."""
    h = float(h)
    if not (h > 0.0 and math.isfinite(h)):
        raise ValidationError(f"h must be positive (got {h})")
    N = int(N)
    if N < 0:
        raise ValidationError("N must be non-negative")
    index_set = IndexSet.balanced(N)
    idx = index_set.as_array()
    log_h = math.log(h)
    # ascending position of each balanced index
    order = idx + N

    def u_func(ind, x):
        return np.exp((log_h + 2j * np.pi * ind[:, None]) * np.asarray(x)[None, :])

    def v_func(ind, x):
        return np.exp((-log_h + 2j * np.pi * ind[:, None]) * np.asarray(x)[None, :])

    def expander(sign):
        def expand(coeffs, x):
            x = np.asarray(x, dtype=float)
            ascending = np.empty(2 * N + 1, complex)
            ascending[order] = coeffs
            return np.exp(sign * log_h * x) * _laurent(ascending, N, x)

        return expand

    x = grid.nodes
    return BiorthogonalSystem(
        grid,
        index_set,
        u_func(idx, x),
        v_func(idx, x),
        "h-exponential",
        {"h": h, "N": N},
        expander(1.0),
        expander(-1.0),
        tol_biortho,
    )


def _ionkin_parts(coeffs: np.ndarray, N: int):
    """Split Ionkin coefficients into the constant part and two Laurent polynomials.

    Returns ``c0, P_sin, P_cos`` with ``sum_k a_k sin(2 pi k x) = P_sin(x)``
    and ``sum_k b_k cos(2 pi k x) = P_cos(x)`` as ascending Laurent
    coefficient arrays on ``-N..N``.
    """
    a = coeffs[1::2]
    b = coeffs[2::2]
    p_sin = np.zeros(2 * N + 1, complex)
    p_cos = np.zeros(2 * N + 1, complex)
    p_sin[N + 1 :] = a / 2j
    p_sin[N - 1 :: -1] = -a / 2j
    p_cos[N + 1 :] = b / 2
    p_cos[N - 1 :: -1] = b / 2
    return coeffs[0], p_sin, p_cos


def make_ionkin(N: int, grid: QuadratureGrid, tol_biortho: float = TOL_BIORTHO) -> BiorthogonalSystem:
    """Eigen- and associated functions of the Ionkin problem and their biorthogonal dual."""
    N = int(N)
    if N < 1:
        raise ValidationError("the Ionkin system needs N >= 1")
    index_set = IndexSet.natural(0, 2 * N)
    idx = index_set.as_array()

    def u_func(ind, x):
        x = np.asarray(x, dtype=float)[None, :]
        k = ((ind + 1) // 2)[:, None]
        s = np.sin(2 * np.pi * k * x)
        c = x * np.cos(2 * np.pi * k * x)
        out = np.where((ind % 2 == 1)[:, None], s, c)
        return np.where((ind == 0)[:, None], x, out).astype(complex)

    def v_func(ind, x):
        x = np.asarray(x, dtype=float)[None, :]
        k = ((ind + 1) // 2)[:, None]
        s = 4 * (1 - x) * np.sin(2 * np.pi * k * x)
        c = 4 * np.cos(2 * np.pi * k * x)
        out = np.where((ind % 2 == 1)[:, None], s, c)
        return np.where((ind == 0)[:, None], 2.0 + 0 * x, out).astype(complex)

    def expand_u(coeffs, x):
        x = np.asarray(x, dtype=float)
        c0, ps, pc = _ionkin_parts(np.asarray(coeffs, complex), N)
        return c0 * x + _laurent(ps, N, x) + x * _laurent(pc, N, x)

    def expand_v(coeffs, x):
        x = np.asarray(x, dtype=float)
        c0, ps, pc = _ionkin_parts(np.asarray(coeffs, complex), N)
        return 2 * c0 + 4 * (1 - x) * _laurent(ps, N, x) + 4 * _laurent(pc, N, x)

    x = grid.nodes
    return BiorthogonalSystem(
        grid,
        index_set,
        u_func(idx, x),
        v_func(idx, x),
        "ionkin",
        {"N": N},
        expand_u,
        expand_v,
        tol_biortho,
    )


@dataclass(frozen=True)
class BiorthogonalityReport:
    residual: np.ndarray = field(repr=False)
    max_offdiag: float
    max_diag_dev: float
    tol: float
    sup_u_norm: float
    sup_v_norm: float

    @property
    def max_residual(self) -> float:
        return max(self.max_offdiag, self.max_diag_dev)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_biorthogonality(sys: BiorthogonalSystem, tol: Optional[float] = None) -> BiorthogonalityReport:
    """Compare the Gram matrix ``(u_k, v_l)`` against the identity."""
    tol = sys.tol_biortho if tol is None else tol
    residual = np.abs(sys.gram() - np.eye(len(sys)))
    diag = np.diag(residual).copy()
    off = residual.copy()
    np.fill_diagonal(off, 0.0)
    un, vn = sys.element_norms(2.0)
    return BiorthogonalityReport(
        residual=residual,
        max_offdiag=float(off.max()),
        max_diag_dev=float(diag.max()),
        tol=float(tol),
        sup_u_norm=float(un.max()),
        sup_v_norm=float(vn.max()),
    )


@dataclass(frozen=True)
class FrameBounds:
    """Observed frame constants.

    ``a``, ``A`` bound the V-side coefficients ``(g, v_k)`` and ``b``, ``B``
    the U-side ones ``(g, u_k)``; the squared values are the extreme ratios
    of coefficient energy to ``||g||^2`` seen over ``trials`` probes.
    """

    a: float
    A: float
    b: float
    B: float
    trials: int

    def __post_init__(self):
        if not (0 < self.a <= self.A and 0 < self.b <= self.B):
            raise ValidationError("frame bounds must satisfy 0 < a <= A and 0 < b <= B")

    @property
    def squared(self):
        return self.a**2, self.A**2, self.b**2, self.B**2


def random_coefficients(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard complex Gaussian vector (unit expected modulus squared per entry)."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


def estimate_frame_bounds(sys: BiorthogonalSystem, trials: int = 100, seed: int = 0) -> FrameBounds:
    """Estimate the frame constants by random band-limited probes.

    The V-side ratio ``sum |(g, v_k)|^2 / ||g||^2`` is sampled with ``g`` in
    the span of U and the U-side ratio with ``g`` in the span of V, so that
    the truncated coefficient sums are exact for every probe.
    """
    trials = int(trials)
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    w = sys.grid.weights
    v_side = np.empty(trials)
    u_side = np.empty(trials)
    for t in range(trials):
        c = random_coefficients(rng, len(sys))
        g = c @ sys.u_values
        g = g / math.sqrt(np.abs(g) ** 2 @ w)
        v_side[t] = np.sum(np.abs((sys.v_values.conj() * w) @ g) ** 2)
        c = random_coefficients(rng, len(sys))
        g = c @ sys.v_values
        g = g / math.sqrt(np.abs(g) ** 2 @ w)
        u_side[t] = np.sum(np.abs((sys.u_values.conj() * w) @ g) ** 2)
    return FrameBounds(
        a=math.sqrt(v_side.min()),
        A=math.sqrt(v_side.max()),
        b=math.sqrt(u_side.min()),
        B=math.sqrt(u_side.max()),
        trials=trials,
    )
