"""CSV and JSON round-tripping for grid functions, coefficients, systems and reports.

Grid functions are written as ``x,re,im`` rows and coefficient sequences
as ``index,re,im`` rows, floats with 17 significant digits so that a
write/read cycle reproduces every bit.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ValidationError
from .fourier import CoefficientSequence
from .hilbert import GridFunction, QuadratureGrid, composite_gauss_legendre
from .spectral_ops import Spectrum
from .systems import BiorthogonalSystem, IndexSet, make_h_exponential, make_ionkin

__all__ = [
    "to_jsonable",
    "write_grid_function_csv",
    "read_grid_function_csv",
    "write_coefficients_csv",
    "read_coefficients_csv",
    "grid_from_spec",
    "system_to_json",
    "system_from_json",
    "spectrum_to_json",
    "spectrum_from_json",
    "ensure_dir",
]

_FMT = "{:.17g}"


def _num(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj: Any) -> Any:
    """Recursively turn reports into plain JSON data.

    Complex numbers become ``{"re": .., "im": ..}``, non-finite floats the
    strings ``"inf"``, ``"-inf"`` and ``"nan"``, arrays lists, dataclasses
    dicts of their fields.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _num(obj.real), "im": _num(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, IndexSet):
        return {"indices": list(obj.indices), "ordering_id": obj.ordering_id}
    if isinstance(obj, QuadratureGrid):
        return obj.spec()
    if isinstance(obj, CoefficientSequence):
        return {
            "side": obj.side_tag,
            "index": list(obj.index_set.indices),
            "re": [_num(v) for v in obj.values.real],
            "im": [_num(v) for v in obj.values.imag],
        }
    if isinstance(obj, Spectrum):
        return spectrum_to_json(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_grid_function_csv(path, f: GridFunction) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "re", "im"])
        for x, v in zip(f.grid.nodes, f.values):
            out.writerow([_FMT.format(x), _FMT.format(v.real), _FMT.format(v.imag)])


def _read_rows(path, header):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != header:
        raise ValidationError(f"{path}: expected header {','.join(header)}")
    body = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValidationError(f"{path}:{line}: expected 3 fields, got {len(row)}")
        try:
            body.append(tuple(float(c) for c in row))
        except ValueError as exc:
            raise ValidationError(f"{path}:{line}: {exc}") from None
    return np.array(body, dtype=float).reshape(-1, 3)


def read_grid_function_csv(path, grid: QuadratureGrid) -> GridFunction:
    """Read an ``x,re,im`` file; the abscissae must be the nodes of ``grid``."""
    data = _read_rows(path, ["x", "re", "im"])
    if data.shape[0] != grid.size or not np.array_equal(data[:, 0], grid.nodes):
        raise ValidationError(f"{path}: abscissae do not match the grid nodes")
    return GridFunction(grid, data[:, 1] + 1j * data[:, 2])


def write_coefficients_csv(path, a: CoefficientSequence) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["index", "re", "im"])
        for k, v in a.items():
            out.writerow([k, _FMT.format(v.real), _FMT.format(v.imag)])


def read_coefficients_csv(path, index_set: IndexSet, side_tag: str = "raw") -> CoefficientSequence:
    data = _read_rows(path, ["index", "re", "im"])
    if tuple(int(k) for k in data[:, 0]) != index_set.indices:
        raise ValidationError(f"{path}: indices do not match the index set")
    return CoefficientSequence(index_set, data[:, 1] + 1j * data[:, 2], side_tag)


def grid_from_spec(spec: dict) -> QuadratureGrid:
    if not str(spec.get("rule_id", "gauss-legendre")).startswith("gauss-legendre"):
        raise ValidationError(f"unknown quadrature rule {spec.get('rule_id')!r}")
    return composite_gauss_legendre(int(spec["panels"]), int(spec["points"]))


def system_to_json(sys: BiorthogonalSystem, include_values: bool = False) -> dict:
    """``{system_id, params, grid, index_set[, u, v]}``; sampled values are optional."""
    doc = {
        "system_id": sys.system_id,
        "params": to_jsonable(dict(sys.params)),
        "grid": sys.grid.spec(),
        "index_set": to_jsonable(sys.index_set),
        "tol_biortho": sys.tol_biortho,
    }
    if include_values:
        doc["u"] = {"re": sys.u_values.real.tolist(), "im": sys.u_values.imag.tolist()}
        doc["v"] = {"re": sys.v_values.real.tolist(), "im": sys.v_values.imag.tolist()}
    return doc


def system_from_json(doc: dict, grid: Optional[QuadratureGrid] = None) -> BiorthogonalSystem:
    """Rebuild a built-in system from :func:`system_to_json` output."""
    grid = grid_from_spec(doc["grid"]) if grid is None else grid
    params = doc.get("params", {})
    kind = doc.get("system_id")
    if kind == "h-exponential":
        return make_h_exponential(float(params["h"]), int(params["N"]), grid)
    if kind == "ionkin":
        return make_ionkin(int(params["N"]), grid)
    raise ValidationError(f"cannot rebuild system {kind!r} from parameters alone")


def spectrum_to_json(spec: Spectrum) -> dict:
    return {
        "index": list(spec.index_set.indices),
        "ordering_id": spec.index_set.ordering_id,
        "re": [_num(v) for v in spec.values.real],
        "im": [_num(v) for v in spec.values.imag],
    }


def spectrum_from_json(doc: dict) -> Spectrum:
    index_set = IndexSet(tuple(int(k) for k in doc["index"]), doc["ordering_id"])
    return Spectrum(index_set, np.asarray(doc["re"], float) + 1j * np.asarray(doc["im"], float))


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
