"""Discretised Hilbert space L^2(0, 1).

A :class:`QuadratureGrid` realises the Lebesgue measure on (0, 1) by a
positive quadrature rule; a :class:`GridFunction` is a complex function
sampled on such a grid.  All integrals in the package reduce to weighted
sums over the grid nodes.

The inner product is linear in the first slot and conjugate-linear in the
second, ``(f, g) = sum_i w_i f(x_i) conj(g(x_i))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import GridMismatchError, ValidationError

__all__ = [
    "QuadratureGrid",
    "GridFunction",
    "composite_gauss_legendre",
    "default_grid",
    "mapped_rule",
    "same_grid",
    "inner_product",
    "lp_norm",
    "hp_norm",
]

DEFAULT_PANELS = 64
DEFAULT_POINTS = 8


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and positive weights of a quadrature rule on (0, 1).

    Parameters
    ----------
    nodes : array_like
        Strictly increasing nodes inside the open interval (0, 1).
    weights : array_like
        Positive weights, summing to one.
    rule_id : str
        Label of the rule, e.g. ``"gauss-legendre:64x8"``.
    degree : int
        Polynomial exactness degree of the rule.  Monomials up to
        ``min(degree, 8)`` are integrated at construction as a self check.
    panels : int
        Number of equal-width panels the nodes are grouped in (1 for a
        global rule).  Used for off-node interpolation.
    """

    nodes: np.ndarray
    weights: np.ndarray
    rule_id: str = "custom"
    degree: int = 0
    panels: int = 1

    def __post_init__(self):
        nodes = _frozen(self.nodes, float)
        weights = _frozen(self.weights, float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ValidationError("nodes and weights must be 1-d arrays of equal, nonzero length")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise ValidationError("quadrature nodes and weights must be finite")
        if np.any(nodes <= 0.0) or np.any(nodes >= 1.0):
            raise ValidationError("quadrature nodes must lie in the open interval (0, 1)")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValidationError("quadrature nodes must be strictly increasing")
        if np.any(weights <= 0.0):
            raise ValidationError("quadrature weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValidationError(f"quadrature weights sum to {weights.sum()!r}, expected 1")
        if self.panels < 1 or nodes.size % self.panels:
            raise ValidationError("panel count must divide the number of nodes")
        for k in range(1, min(int(self.degree), 8) + 1):
            err = abs(weights @ nodes**k - 1.0 / (k + 1))
            if err > 1e-10:
                raise ValidationError(
                    f"rule {self.rule_id!r} fails to integrate x^{k} (error {err:.3e})"
                )

    def __len__(self):
        return self.nodes.size

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def points_per_panel(self) -> int:
        return self.nodes.size // self.panels

    def integrate(self, values) -> complex:
        """Weighted sum of ``values`` sampled at the nodes."""
        return np.dot(self.weights, values)

    def spec(self) -> dict:
        return {"rule_id": self.rule_id, "panels": self.panels, "points": self.points_per_panel}


@lru_cache(maxsize=None)
def _reference_gauss(points: int):
    x, w = np.polynomial.legendre.leggauss(points)
    return x, w


@lru_cache(maxsize=32)
def composite_gauss_legendre(panels: int = DEFAULT_PANELS, points: int = DEFAULT_POINTS) -> QuadratureGrid:
    """Composite Gauss-Legendre rule with ``panels`` equal panels of ``points`` nodes.

    The result is cached, so equal arguments return the very same grid
    object.
    """
    panels = int(panels)
    points = int(points)
    if panels < 1 or points < 1:
        raise ValidationError("panels and points must be positive integers")
    ref_x, ref_w = _reference_gauss(points)
    left = np.arange(panels)[:, None] / panels
    h = 1.0 / panels
    nodes = (left + 0.5 * h * (ref_x + 1.0)).ravel()
    weights = np.tile(0.5 * h * ref_w, panels)
    # renormalise away the O(eps) drift so constants integrate to 1 exactly
    weights = weights / weights.sum()
    return QuadratureGrid(
        nodes,
        weights,
        rule_id=f"gauss-legendre:{panels}x{points}",
        degree=2 * points - 1,
        panels=panels,
    )


def default_grid() -> QuadratureGrid:
    return composite_gauss_legendre(DEFAULT_PANELS, DEFAULT_POINTS)


def mapped_rule(a: float, b: float, panels: int, points: int = DEFAULT_POINTS):
    """Composite Gauss-Legendre nodes and weights on ``(a, b)``.

    Unlike :func:`composite_gauss_legendre` this is a bare pair of arrays
    and accepts arbitrary (even degenerate) intervals.
    """
    ref_x, ref_w = _reference_gauss(points)
    h = (b - a) / panels
    left = a + h * np.arange(panels)[:, None]
    nodes = (left + 0.5 * h * (ref_x + 1.0)).ravel()
    weights = np.tile(0.5 * h * ref_w, panels)
    return nodes, weights


def same_grid(a: QuadratureGrid, b: QuadratureGrid) -> bool:
    if a is b:
        return True
    return (
        a.nodes.shape == b.nodes.shape
        and np.array_equal(a.nodes, b.nodes)
        and np.array_equal(a.weights, b.weights)
    )


def _check_same_grid(f: "GridFunction", g: "GridFunction"):
    if not same_grid(f.grid, g.grid):
        raise GridMismatchError(
            f"grid functions live on different grids ({f.grid.rule_id} vs {g.grid.rule_id})"
        )


def _barycentric_weights(local: np.ndarray) -> np.ndarray:
    d = local[:, None] - local[None, :]
    np.fill_diagonal(d, 1.0)
    # scale by the node spacing so wide global rules do not underflow
    d = d / (local[-1] - local[0] if local.size > 1 else 1.0)
    w = 1.0 / d.prod(axis=1)
    return w / np.abs(w).max()


def _panel_interpolate(grid: QuadratureGrid, values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Barycentric interpolation through the nodes of the panel containing each ``x``.

    Panels are assumed congruent, so one set of barycentric weights (from the
    first panel) serves all of them.
    """
    pp = grid.points_per_panel
    panel = np.clip(np.floor(x * grid.panels).astype(int), 0, grid.panels - 1)
    idx = panel[..., None] * pp + np.arange(pp)
    diff = x[..., None] - grid.nodes[idx]
    bw = _barycentric_weights(grid.nodes[:pp])
    hit = diff == 0.0
    diff = np.where(hit, 1.0, diff)
    terms = bw / diff
    out = (terms * values[idx]).sum(axis=-1) / terms.sum(axis=-1)
    rows = hit.any(axis=-1)
    if np.any(rows):
        out[rows] = values[idx[rows][hit[rows]]]
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex function sampled at the nodes of a :class:`QuadratureGrid`.

    ``evaluator`` optionally evaluates the same function at arbitrary points
    of [0, 1]; band-limited functions built from a basis carry one.  Without
    it, :meth:`at` falls back to per-panel polynomial interpolation.
    """

    grid: QuadratureGrid
    values: np.ndarray
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        values = _frozen(self.values, complex)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            raise ValidationError(
                f"values have shape {values.shape}, grid has {self.grid.nodes.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("grid function values must be finite")

    @classmethod
    def from_callable(cls, grid: QuadratureGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample ``fn`` on ``grid`` and keep it for exact off-node evaluation."""
        values = np.broadcast_to(np.asarray(fn(grid.nodes), dtype=complex), grid.nodes.shape)
        return cls(grid, values, fn)

    @classmethod
    def zeros(cls, grid: QuadratureGrid) -> "GridFunction":
        return cls(grid, np.zeros(len(grid), complex), _zero)

    def __len__(self):
        return self.values.size

    def at(self, x) -> np.ndarray:
        """Evaluate at arbitrary points of [0, 1]."""
        x = np.asarray(x, dtype=float)
        if self.evaluator is not None:
            return np.broadcast_to(np.asarray(self.evaluator(x), dtype=complex), x.shape)
        return _panel_interpolate(self.grid, self.values, x)

    def _combine(self, other, op):
        if isinstance(other, GridFunction):
            _check_same_grid(self, other)
            ev = None
            if self.evaluator is not None and other.evaluator is not None:
                a, b = self.evaluator, other.evaluator
                ev = lambda x: op(a(x), b(x))  # noqa: E731
            return GridFunction(self.grid, op(self.values, other.values), ev)
        c = complex(other)
        ev = None
        if self.evaluator is not None:
            a = self.evaluator
            ev = lambda x: op(a(x), c)  # noqa: E731
        return GridFunction(self.grid, op(self.values, c), ev)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self * -1.0


def _zero(x):
    return np.zeros(np.shape(x), complex)


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """``(f, g) = sum_i w_i f(x_i) conj(g(x_i))``."""
    _check_same_grid(f, g)
    return complex(np.dot(f.grid.weights, f.values * np.conj(g.values)))


def _check_p(p):
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValidationError(f"p must satisfy p >= 1 (got {p})")
    return p


def lp_norm(f: GridFunction, p: float) -> float:
    """Discrete L^p norm; ``p = inf`` is the maximum modulus over the nodes."""
    p = _check_p(p)
    mod = np.abs(f.values)
    if math.isinf(p):
        return float(mod.max())
    if p == 2.0:
        return float(math.sqrt(f.grid.weights @ mod**2))
    if p == 1.0:
        return float(f.grid.weights @ mod)
    return float((f.grid.weights @ mod**p) ** (1.0 / p))


def hp_norm(f: GridFunction, p: float) -> float:
    """Norm of L^2 ∩ L^p: the larger of the two norms, so H^2 is H isometrically."""
    p = _check_p(p)
    if p == 2.0:
        return lp_norm(f, 2.0)
    return max(lp_norm(f, 2.0), lp_norm(f, p))
