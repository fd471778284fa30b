"""Command-line verification campaigns.

Every subcommand builds the configured system, runs a seeded campaign and
writes ``<subcommand>.json`` to the output directory.  Exit status is 0
when every assertion passes, 1 when one fails and 2 for configuration or
I/O errors.

Example::

    biortho conv-agree --h 2 --n 16 --out results/
    biortho all --config run.json --seed 7
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import json
import logging
import math
import os
import sys as _sys
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from .convolution import (
    associativity_residual,
    circular_convolution,
    conv_ionkin,
    conv_u,
    conv_u_integral_h,
    conv_v,
    convolution_theorem_residual,
    ionkin_hat_report,
    ODD_VARIANTS,
    uniqueness_probe,
)
from .errors import BiorthoError, SingularityError, ValidationError
from .fourier import (
    CoefficientSequence,
    l2u_inner,
    plancherel_norm_check,
    plancherel_residual,
    random_band_limited,
    synthesize_u,
    transform_duality_residual,
)
from .hilbert import GridFunction, composite_gauss_legendre, lp_norm
from .lp import WEIGHT_NORMS, duality_pairing_report, hausdorff_young_report
from .serialize import ensure_dir, to_jsonable, write_coefficients_csv, write_grid_function_csv
from .spectral_ops import (
    SpectralOperator,
    apply_L,
    decay_order,
    intertwining_residual,
    ionkin_intertwining_residual,
    make_h_spectrum,
    make_ionkin_spectrum,
    resolvent_apply,
    resolvent_kernel,
)
from .systems import (
    BiorthogonalSystem,
    estimate_frame_bounds,
    make_h_exponential,
    make_ionkin,
    random_coefficients,
    verify_biorthogonality,
)

log = logging.getLogger("biortho")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SYSTEMS = ("h-exponential", "ionkin")

# campaign tolerances
TOL_PLANCHEREL = 1e-9
TOL_L2U_IMAG = 1e-12
TOL_TRANSFORM_DUALITY = 1e-10
TOL_CONV_THEOREM = 1e-9
TOL_CONV_AGREE = 1e-6
TOL_RESOLVENT = 1e-8
TOL_EIGENMODE = 1e-9
TOL_FIRST_RESOLVENT = 1e-7
TOL_INTERTWINE = 1e-8
TOL_IONKIN_INTERTWINE = 1e-6
TOL_HY = 1e-9
TOL_DUALITY = 1e-9
TOL_HATS = 1e-8
TOL_FRAME = 1e-6

RESOLVENT_POINTS = (1j, 1 + 1j, -3.0)
DUALITY_EXPONENTS = (1.0, 1.5, 2.0, 3.0)
HY_EXPONENTS = (1.0, 1.5, 2.0)
# the five-integral convolution costs a few hundred ms per call
IONKIN_INTERTWINE_TRIALS = 3
CIRCULAR_TRIALS = 5
DECAY_K_MAX = 6

DEFAULT_TRIALS = {
    "verify-biortho": 1,
    "frame-bounds": 100,
    "plancherel": 50,
    "conv-theorem": 100,
    "conv-agree": 50,
    "resolvent": 20,
    "intertwine": 50,
    "hausdorff-young": 100,
    "duality": 200,
    "ionkin-hats": 10,
    "decay": 1,
}


@dataclass(frozen=True)
class RunConfig:
    system: str = "h-exponential"
    h: float = 2.0
    n: int = 16
    panels: int = 64
    points: int = 8
    trials: Optional[int] = None
    seed: int = 0
    tol_biortho: float = 1e-9
    eps_spec: float = 1e-8
    weight_norm: str = "intersection"
    out: Optional[str] = None
    csv: bool = False

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValidationError(f"field 'system': expected one of {SYSTEMS}, got {self.system!r}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValidationError(f"field 'h': must be positive, got {self.h}")
        if self.n < 1:
            raise ValidationError(f"field 'n': must be >= 1, got {self.n}")
        if self.panels < 1:
            raise ValidationError(f"field 'panels': must be >= 1, got {self.panels}")
        if self.points < 2:
            raise ValidationError(f"field 'points': must be >= 2, got {self.points}")
        if self.trials is not None and self.trials < 1:
            raise ValidationError(f"field 'trials': must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ValidationError(f"field 'seed': must be >= 0, got {self.seed}")
        for name in ("tol_biortho", "eps_spec"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"field '{_kebab(name)}': tolerance must be positive, got {v}")
        if self.weight_norm not in WEIGHT_NORMS:
            raise ValidationError(f"field 'weight-norm': expected one of {WEIGHT_NORMS}")

    def echo(self) -> dict:
        """Config as written into reports; output location is left out so reruns compare equal."""
        return {_kebab(k): v for k, v in dataclasses.asdict(self).items() if k not in ("out", "csv")}

    def trials_for(self, sub: str) -> int:
        return DEFAULT_TRIALS[sub] if self.trials is None else int(self.trials)


def _kebab(name: str) -> str:
    return name.replace("_", "-")


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, value, where: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind in ("float",):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind in ("int", "Optional[int]"):
            if value is None and kind == "Optional[int]":
                return None
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind == "Optional[str]":
            return None if value is None else str(value)
        if not isinstance(value, str):
            raise TypeError
        return value
    except (TypeError, ValueError):
        raise ValidationError(f"{where}field '{_kebab(name)}': invalid value {value!r}") from None


def load_config_file(path) -> dict:
    """Read a JSON config with kebab-case keys; errors name the line or field."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be a JSON object")
    out = {}
    for key, value in doc.items():
        name = key.replace("-", "_")
        if name not in _FIELD_TYPES or "_" in key:
            raise ValidationError(f"{path}: unknown field {key!r}")
        out[name] = _coerce(name, value, f"{path}: ")
    return out


# ---------------------------------------------------------------- campaigns


@dataclass
class Outcome:
    metrics: dict
    passed: Optional[bool]
    witnesses: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)
    skipped: Optional[str] = None


class Context:
    """Lazily built objects shared by the campaigns of one run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.grid = composite_gauss_legendre(cfg.panels, cfg.points)
        self._sys = None
        self._ionkin = None

    @property
    def system(self) -> BiorthogonalSystem:
        if self._sys is None:
            if self.cfg.system == "ionkin":
                self._sys = self.ionkin
            else:
                self._sys = make_h_exponential(self.cfg.h, self.cfg.n, self.grid, self.cfg.tol_biortho)
        return self._sys

    @property
    def ionkin(self) -> BiorthogonalSystem:
        if self._ionkin is None:
            self._ionkin = make_ionkin(self.cfg.n, self.grid, self.cfg.tol_biortho)
        return self._ionkin

    @property
    def operator(self) -> SpectralOperator:
        sys = self.system
        if sys.system_id == "ionkin":
            return SpectralOperator(sys, make_ionkin_spectrum(self.cfg.n))
        return SpectralOperator(sys, make_h_spectrum(self.cfg.h, self.cfg.n))

    def rng(self, sub: str) -> np.random.Generator:
        # one stream per campaign so `all` and single runs draw identical inputs
        return np.random.default_rng([self.cfg.seed, zlib.crc32(sub.encode())])


def _argmax(values):
    i = int(np.argmax(values))
    return i, float(values[i])


def run_verify_biortho(ctx: Context) -> Outcome:
    sys = ctx.system
    rep = verify_biorthogonality(sys, ctx.cfg.tol_biortho)
    r, c = np.unravel_index(int(np.argmax(rep.residual)), rep.residual.shape)
    metrics = {
        "size": len(sys),
        "max_offdiag": rep.max_offdiag,
        "max_diag_dev": rep.max_diag_dev,
        "max_residual": rep.max_residual,
        "tol": rep.tol,
        "sup_u_norm": rep.sup_u_norm,
        "sup_v_norm": rep.sup_v_norm,
    }
    witness = {"worst_pair": [sys.indices[r], sys.indices[c]], "worst_value": float(rep.residual[r, c])}
    return Outcome(metrics, rep.passed, witness)


def analytic_frame_bounds(h: float):
    """Squared frame bounds of the h-exponential system: extremes of the multipliers h^{-2x} and h^{2x}."""
    v = sorted((1.0, h**-2.0))
    u = sorted((1.0, h**2.0))
    return v[0], v[1], u[0], u[1]


def run_frame_bounds(ctx: Context) -> Outcome:
    sys = ctx.system
    fb = estimate_frame_bounds(sys, ctx.cfg.trials_for("frame-bounds"), [ctx.cfg.seed, zlib.crc32(b"frame-bounds")])
    a2, A2, b2, B2 = fb.squared
    metrics = {"a2": a2, "A2": A2, "b2": b2, "B2": B2, "trials": fb.trials}
    if sys.system_id != "h-exponential":
        metrics["oracle"] = None
        return Outcome(metrics, True)
    lo_v, hi_v, lo_u, hi_u = analytic_frame_bounds(ctx.cfg.h)
    metrics["oracle"] = {"a2": lo_v, "A2": hi_v, "b2": lo_u, "B2": hi_u}
    ok = a2 >= lo_v - TOL_FRAME and A2 <= hi_v + TOL_FRAME and b2 >= lo_u - TOL_FRAME and B2 <= hi_u + TOL_FRAME
    return Outcome(metrics, bool(ok))


def run_plancherel(ctx: Context) -> Outcome:
    sys, rng = ctx.system, ctx.rng("plancherel")
    res, imag, dual, norm_res = [], [], [], []
    for _ in range(ctx.cfg.trials_for("plancherel")):
        f = random_band_limited(sys, rng)
        g = random_band_limited(sys, rng)
        res.append(plancherel_residual(sys, f, g))
        a = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
        imag.append(abs(l2u_inner(sys, a, a).imag))
        w = GridFunction(sys.grid, random_coefficients(rng, sys.grid.size))
        dual.append(transform_duality_residual(sys, w, a))
        norm_res.append(plancherel_norm_check(sys, f)["norm_residual"])
    i, worst = _argmax(res)
    metrics = {
        "max_plancherel_residual": worst,
        "max_l2u_imag": max(imag),
        "max_transform_duality_residual": max(dual),
        "max_norm_residual": max(norm_res),
    }
    ok = worst < TOL_PLANCHEREL and max(imag) < TOL_L2U_IMAG and max(dual) < TOL_TRANSFORM_DUALITY
    return Outcome(metrics, bool(ok), {"worst_trial": i})


def run_conv_theorem(ctx: Context) -> Outcome:
    sys, rng = ctx.system, ctx.rng("conv-theorem")
    cu, cv, assoc, comm = [], [], [], []
    for _ in range(ctx.cfg.trials_for("conv-theorem")):
        f, g, w = (random_band_limited(sys, rng) for _ in range(3))
        cu.append(convolution_theorem_residual(sys, f, g, "u"))
        cv.append(convolution_theorem_residual(sys, f, g, "v"))
        assoc.append(associativity_residual(sys, f, g, w))
        comm.append(max(lp_norm(conv_u(sys, f, g) - conv_u(sys, g, f), 2.0),
                        lp_norm(conv_v(sys, f, g) - conv_v(sys, g, f), 2.0)))
    product = uniqueness_probe(sys, lambda f, g: f * g, trials=3, seed=ctx.cfg.seed)
    metrics = {
        "max_residual_u": max(cu),
        "max_residual_v": max(cv),
        "max_associativity": max(assoc),
        "max_commutativity": max(comm),
        "pointwise_product_consistent": product.consistent,
    }
    ok = max(cu + cv + assoc + comm) < TOL_CONV_THEOREM
    witness = {"worst_trial_u": _argmax(cu)[0]}
    if product.witness is not None:
        witness["pointwise_product_witness"] = {"f": product.witness[0], "g": product.witness[1]}
    return Outcome(metrics, bool(ok), witness)


def run_conv_agree(ctx: Context) -> Outcome:
    sys = ctx.system
    if sys.system_id != "h-exponential":
        return Outcome({}, None, skipped="the two-integral form belongs to the h-exponential system")
    rng, h = ctx.rng("conv-agree"), ctx.cfg.h
    dev, circ = [], []
    artifacts = {}
    for t in range(ctx.cfg.trials_for("conv-agree")):
        f = random_band_limited(sys, rng)
        g = random_band_limited(sys, rng)
        spectral = conv_u(sys, f, g)
        integral = conv_u_integral_h(h, f, g)
        dev.append(lp_norm(spectral - integral, 2.0))
        if h == 1.0 and t < CIRCULAR_TRIALS:
            circ.append(lp_norm(integral - circular_convolution(f, g), 2.0))
        if t == 0:
            artifacts = {"conv_spectral": spectral, "conv_integral": integral}
    i, worst = _argmax(dev)
    metrics = {"max_deviation": worst, "mean_deviation": float(np.mean(dev))}
    ok = worst < TOL_CONV_AGREE
    if circ:
        metrics["max_circular_deviation"] = max(circ)
        ok = ok and max(circ) < TOL_CONV_AGREE
    return Outcome(metrics, bool(ok), {"worst_trial": i}, artifacts)


def run_resolvent(ctx: Context) -> Outcome:
    op, rng = ctx.operator, ctx.rng("resolvent")
    sys, lam = op.system, op.spectrum.values
    res, first = [], []
    artifacts = {}
    for t in range(ctx.cfg.trials_for("resolvent")):
        f = random_band_limited(sys, rng)
        rf = {}
        for z in RESOLVENT_POINTS:
            r = resolvent_apply(op, z, f, ctx.cfg.eps_spec)
            rf[z] = r
            res.append(lp_norm(apply_L(op, r) - r * z - f, 2.0))
        for i, z1 in enumerate(RESOLVENT_POINTS):
            for z2 in RESOLVENT_POINTS[i + 1 :]:
                both = resolvent_apply(op, z1, rf[z2], ctx.cfg.eps_spec)
                first.append(lp_norm(rf[z1] - rf[z2] - both * (z1 - z2), 2.0))
        if t == 0:
            artifacts = {"resolvent_i": rf[1j]}
    eig = []
    for k in sys.indices:
        uk = sys.u(k)
        for z in RESOLVENT_POINTS:
            lk = lam[sys.index_set.position(k)]
            eig.append(lp_norm(resolvent_apply(op, z, uk, ctx.cfg.eps_spec) - uk * (1.0 / (lk - z)), 2.0))
    pole_index = None
    try:
        resolvent_kernel(op, lam[0], ctx.cfg.eps_spec)
    except SingularityError as exc:
        pole_index = exc.index
    metrics = {
        "max_resolvent_residual": max(res),
        "max_eigenmode_residual": max(eig),
        "max_first_resolvent_residual": max(first),
        "pole_guard_index": pole_index,
        "points": [complex(z) for z in RESOLVENT_POINTS],
    }
    ok = (
        max(res) < TOL_RESOLVENT
        and max(eig) < TOL_EIGENMODE
        and max(first) < TOL_FIRST_RESOLVENT
        and pole_index == sys.indices[0]
    )
    return Outcome(metrics, bool(ok), {}, artifacts)


def run_intertwine(ctx: Context) -> Outcome:
    op, rng = ctx.operator, ctx.rng("intertwine")
    sys = op.system
    res = []
    for _ in range(ctx.cfg.trials_for("intertwine")):
        f = random_band_limited(sys, rng)
        g = random_band_limited(sys, rng)
        res.append(intertwining_residual(op, f, g))
    i, worst = _argmax(res)
    metrics = {"max_residual": worst}
    ok = worst < TOL_INTERTWINE
    if sys.system_id == "ionkin":
        yk = []
        for _ in range(min(IONKIN_INTERTWINE_TRIALS, ctx.cfg.trials_for("intertwine"))):
            f = random_band_limited(sys, rng)
            g = random_band_limited(sys, rng)
            yk.append(ionkin_intertwining_residual(sys, f, g))
        metrics["max_ionkin_convolution_residual"] = max(yk)
        ok = ok and max(yk) < TOL_IONKIN_INTERTWINE
    return Outcome(metrics, bool(ok), {"worst_trial": i})


def run_hausdorff_young(ctx: Context) -> Outcome:
    sys, rng = ctx.system, ctx.rng("hausdorff-young")
    frame = estimate_frame_bounds(sys, 20, [ctx.cfg.seed, zlib.crc32(b"hausdorff-young:frame")])
    ratios = {p: {"analysis": [], "synthesis": []} for p in HY_EXPONENTS}
    verdicts = {p: [] for p in HY_EXPONENTS}
    frame_ratios = []
    for _ in range(ctx.cfg.trials_for("hausdorff-young")):
        f = random_band_limited(sys, rng)
        a = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
        for p in HY_EXPONENTS:
            rep = hausdorff_young_report(sys, f, p, a, ctx.cfg.weight_norm, frame, TOL_HY)
            ratios[p]["analysis"].append(rep.analysis_ratio)
            ratios[p]["synthesis"].append(rep.synthesis_ratio)
            if rep.passed is not None:
                verdicts[p].append(rep.passed)
            if rep.frame_ratio is not None:
                frame_ratios.append(rep.frame_ratio)
    metrics = {}
    for p in HY_EXPONENTS:
        key = f"p={p:g}"
        an, sy = ratios[p]["analysis"], ratios[p]["synthesis"]
        metrics[key] = {
            "max_analysis_ratio": max(an),
            "min_analysis_ratio": min(an),
            "max_synthesis_ratio": max(sy),
            "min_synthesis_ratio": min(sy),
            "asserted": bool(verdicts[p]),
        }
    if frame_ratios:
        metrics["p=2"]["max_frame_ratio"] = max(frame_ratios)
    ok = all(all(v) for v in verdicts.values())
    return Outcome(metrics, bool(ok))


def run_duality(ctx: Context) -> Outcome:
    sys, rng = ctx.system, ctx.rng("duality")
    violations, ratios = {}, {}
    witness = {}
    for p in DUALITY_EXPONENTS:
        count, worst = 0, 0.0
        for _ in range(ctx.cfg.trials_for("duality")):
            s1 = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
            s2 = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
            rep = duality_pairing_report(sys, s1, s2, p, ctx.cfg.weight_norm, TOL_DUALITY)
            worst = max(worst, rep.ratio)
            if not rep.passed:
                count += 1
                witness.setdefault(f"p={p:g}", {"s1": s1, "s2": s2, "ratio": rep.ratio})
        violations[f"p={p:g}"] = count
        ratios[f"p={p:g}"] = worst
    metrics = {"violations": violations, "max_ratio": ratios}
    return Outcome(metrics, sum(violations.values()) == 0, witness)


def run_ionkin_hats(ctx: Context) -> Outcome:
    sys, rng = ctx.ionkin, ctx.rng("ionkin-hats")
    reports = []
    for _ in range(ctx.cfg.trials_for("ionkin-hats")):
        f = random_band_limited(sys, rng)
        g = random_band_limited(sys, rng)
        reports.append(ionkin_hat_report(sys, f, g, TOL_HATS))
    zero = max(r.zero_residual for r in reports)
    even = max(r.even_residual for r in reports)
    odd = {k: max(r.odd_residuals[k] for r in reports) for k in ODD_VARIANTS}
    scaled = {k: max(r.scaled_residuals[k] for r in reports) for k in reports[0].scaled_residuals}
    scales = {k: reports[0].scales[k] for k in reports[0].scales}
    spread = {k: max(abs(r.scales[k] - scales[k]) for r in reports) for k in scales}
    probe = uniqueness_probe(sys, conv_ionkin, trials=2, seed=ctx.cfg.seed)
    metrics = {
        "N": sys.params["N"],
        "max_zero_residual": zero,
        "max_even_residual": even,
        "max_odd_residuals": odd,
        "matching_variants": sorted((k for k in odd if odd[k] < TOL_HATS), key=odd.get),
        "fitted_scales": scales,
        "fitted_scale_spread": spread,
        "max_scaled_residuals": scaled,
        "matching_variants_up_to_scale": sorted(
            (k for k in ODD_VARIANTS if scaled[f"odd:{k}"] < TOL_HATS), key=lambda k: scaled[f"odd:{k}"]
        ),
        "equals_u_convolution": probe.consistent,
        "tol": TOL_HATS,
    }
    ok = zero < TOL_HATS and even < TOL_HATS
    witness = {}
    if probe.witness is not None:
        witness["u_convolution_witness"] = {"f": probe.witness[0], "g": probe.witness[1]}
    return Outcome(metrics, bool(ok), witness)


def run_decay(ctx: Context) -> Outcome:
    op = ctx.operator
    sys, spectrum = op.system, op.spectrum
    order = spectrum.summability_order()
    metrics = {"summability_order": order}
    x = sys.grid.nodes
    if sys.system_id == "h-exponential":
        h = ctx.cfg.h
        bump = GridFunction.from_callable(sys.grid, lambda t: h**t * np.exp(np.cos(2 * np.pi * t)))
        ramp = GridFunction(sys.grid, h**x * x)
        rb = decay_order(sys, spectrum, bump, DECAY_K_MAX)
        rr = decay_order(sys, spectrum, ramp, DECAY_K_MAX)
        metrics["smooth_bump"] = rb
        metrics["ramp"] = rr
        ok = (
            order is not None
            and rb.exponent is not None
            and rb.exponent > DECAY_K_MAX
            and rr.exponent is not None
            and abs(rr.exponent - 1.0) <= 0.2
        )
    else:
        single = decay_order(sys, spectrum, sys.u(sys.indices[-1]), DECAY_K_MAX)
        coeffs = np.zeros(len(sys), complex)
        k = (sys.index_set.as_array() + 1) // 2
        coeffs[:] = (1.0 + (2 * np.pi * k) ** 2) ** -2.0
        smooth = decay_order(sys, spectrum, synthesize_u(sys, coeffs), DECAY_K_MAX)
        metrics["single_element"] = single
        metrics["algebraic_decay_2"] = smooth
        ok = order is not None and single.exponent is None and smooth.exponent is not None
    return Outcome(metrics, bool(ok))


CAMPAIGNS: Dict[str, Callable[[Context], Outcome]] = {
    "verify-biortho": run_verify_biortho,
    "frame-bounds": run_frame_bounds,
    "plancherel": run_plancherel,
    "conv-theorem": run_conv_theorem,
    "conv-agree": run_conv_agree,
    "resolvent": run_resolvent,
    "intertwine": run_intertwine,
    "hausdorff-young": run_hausdorff_young,
    "duality": run_duality,
    "ionkin-hats": run_ionkin_hats,
    "decay": run_decay,
}
SUBCOMMANDS = tuple(CAMPAIGNS) + ("all",)


def _status(outcome: Outcome) -> str:
    if outcome.skipped is not None:
        return "skipped"
    return "pass" if outcome.passed in (True, None) else "fail"


def build_report(sub: str, cfg: RunConfig, outcome: Outcome) -> dict:
    report = {
        "subcommand": sub,
        "config": cfg.echo(),
        "status": _status(outcome),
        "passed": outcome.passed,
        "metrics": outcome.metrics,
        "witnesses": outcome.witnesses,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    if outcome.skipped is not None:
        report["reason"] = outcome.skipped
    return to_jsonable(report)


def _write_json(path: Path, doc: dict):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_artifacts(out: Path, sub: str, artifacts: dict):
    for name, obj in artifacts.items():
        target = out / f"{sub}.{name}.csv"
        if isinstance(obj, GridFunction):
            write_grid_function_csv(target, obj)
        elif isinstance(obj, CoefficientSequence):
            write_coefficients_csv(target, obj)


def run(sub: str, cfg: RunConfig, out: Optional[Path] = None) -> tuple:
    """Run one subcommand (or ``all``); returns ``(exit status, {name: report})``."""
    if sub not in SUBCOMMANDS:
        raise ValidationError(f"unknown subcommand {sub!r}")
    ctx = Context(cfg)
    names = list(CAMPAIGNS) if sub == "all" else [sub]
    reports, failed = {}, False
    for name in names:
        log.info("running %s", name)
        outcome = CAMPAIGNS[name](ctx)
        report = build_report(name, cfg, outcome)
        reports[name] = report
        failed |= report["status"] == "fail"
        if out is not None:
            _write_json(out / f"{name}.json", report)
            if cfg.csv:
                _write_artifacts(out, name, outcome.artifacts)
    if sub == "all":
        summary = {
            "subcommand": "all",
            "config": cfg.echo(),
            "status": "fail" if failed else "pass",
            "passed": not failed,
            "metrics": {name: {"status": r["status"], "metrics": r["metrics"]} for name, r in reports.items()},
            "witnesses": {},
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }
        reports["all"] = summary
        if out is not None:
            _write_json(out / "all.json", summary)
    return (EXIT_FAIL if failed else EXIT_PASS), reports


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with kebab-case keys")
    common.add_argument("--system", choices=SYSTEMS, default=None)
    common.add_argument("--h", type=float, default=None, help="h-exponential parameter (h > 0)")
    common.add_argument("--n", type=int, default=None, help="truncation order N")
    common.add_argument("--panels", type=int, default=None)
    common.add_argument("--points", type=int, default=None, help="Gauss-Legendre points per panel")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol-biortho", type=float, default=None)
    common.add_argument("--eps-spec", type=float, default=None)
    common.add_argument("--weight-norm", choices=WEIGHT_NORMS, default=None)
    common.add_argument("--out", default=None, help="output directory (default: $BIORTHO_OUT or .)")
    common.add_argument("--csv", action="store_true", default=None, help="also write CSV samples")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="biortho", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        subs.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for name in _FIELD_TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
        out = ensure_dir(cfg.out or os.environ.get("BIORTHO_OUT") or ".")
        status, reports = run(args.subcommand, cfg, out)
    except ValidationError as exc:
        print(f"biortho: config error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"biortho: I/O error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except BiorthoError as exc:
        print(f"biortho: error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    for name, report in reports.items():
        if name != "all":
            print(f"{name}: {report['status'].upper()}")
    if args.subcommand == "all":
        print(f"all: {reports['all']['status'].upper()}")
    return status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
