"""Acceptance suite: one test group per criterion, each logging a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdicts are repeated in
an "acceptance criteria" section of the terminal summary.
"""

import math

import numpy as np
import pytest

from biortho import (
    CoefficientSequence,
    GridFunction,
    SpectralOperator,
    analyze_u,
    apply_L,
    associativity_residual,
    circular_convolution,
    conv_ionkin,
    conv_u,
    conv_u_integral_h,
    conv_v,
    convolution_theorem_residual,
    duality_pairing_report,
    estimate_frame_bounds,
    hausdorff_young_report,
    intertwining_residual,
    ionkin_hat_report,
    l2u_inner,
    lp_norm,
    make_h_spectrum,
    plancherel_residual,
    random_band_limited,
    random_coefficients,
    resolvent_apply,
    transform_duality_residual,
    verify_biorthogonality,
)
from biortho.cli import RunConfig, run

from oracles import circular_trapezoid, ionkin_gram_symbolic

H_SET = (0.5, 1.0, 2.0, 5.0)
SYSTEMS = [f"h={h:g}" for h in H_SET] + ["ionkin"]


@pytest.fixture
def system_by_name(h_system, ionkin):
    def get(name):
        return ionkin if name == "ionkin" else h_system(float(name[2:]))

    return get


def seeded(*key):
    return np.random.default_rng([20240611, *key])


def fmt(x):
    return f"{x:.2e}"


# 1
@pytest.mark.parametrize("h", H_SET)
def test_c1_biorthogonality_h(h, h_system, acceptance):
    res = verify_biorthogonality(h_system(h)).max_residual
    assert acceptance.record(1, res < 1e-10, f"h={h:g} max residual {fmt(res)}")


def test_c1_biorthogonality_ionkin(ionkin, acceptance):
    oracle = ionkin_gram_symbolic(8)
    res = float(np.max(np.abs(ionkin.gram() - oracle)))
    assert acceptance.record(1, res < 1e-9, f"ionkin N=8 vs symbolic Gram {fmt(res)}")


# 2
@pytest.mark.parametrize("name", SYSTEMS)
def test_c2_convolution_theorem(name, system_by_name, acceptance):
    sys = system_by_name(name)
    rng = seeded(2, SYSTEMS.index(name))
    worst = dict(theorem=0.0, assoc=0.0, comm=0.0)
    for _ in range(100):
        f, g, w = (random_band_limited(sys, rng) for _ in range(3))
        worst["theorem"] = max(
            worst["theorem"],
            convolution_theorem_residual(sys, f, g, "u"),
            convolution_theorem_residual(sys, f, g, "v"),
        )
        worst["assoc"] = max(worst["assoc"], associativity_residual(sys, f, g, w))
        worst["comm"] = max(
            worst["comm"],
            lp_norm(conv_u(sys, f, g) - conv_u(sys, g, f), 2),
            lp_norm(conv_v(sys, f, g) - conv_v(sys, g, f), 2),
        )
    ok = max(worst.values()) < 1e-9
    assert acceptance.record(2, ok, f"{name} " + " ".join(f"{k} {fmt(v)}" for k, v in worst.items()))


# 3
@pytest.mark.parametrize("h", H_SET)
def test_c3_two_integral_form(h, h_system, acceptance):
    sys = h_system(h)
    rng = seeded(3, H_SET.index(h))
    dev, circ = 0.0, 0.0
    for t in range(50):
        f, g = random_band_limited(sys, rng), random_band_limited(sys, rng)
        integral = conv_u_integral_h(h, f, g)
        dev = max(dev, lp_norm(conv_u(sys, f, g) - integral, 2))
        if h == 1.0 and t < 5:
            dense = GridFunction(sys.grid, circular_trapezoid(f.at, g.at, sys.grid.nodes))
            circ = max(circ, lp_norm(integral - dense, 2), lp_norm(circular_convolution(f, g) - dense, 2))
    ok = dev < 1e-6 and circ < 1e-6
    extra = f" circular {fmt(circ)}" if h == 1.0 else ""
    assert acceptance.record(3, ok, f"h={h:g} deviation {fmt(dev)}{extra}")


# 4
@pytest.mark.parametrize("name", SYSTEMS)
def test_c4_plancherel(name, system_by_name, acceptance):
    sys = system_by_name(name)
    rng = seeded(4, SYSTEMS.index(name))
    pl = imag = dual = 0.0
    for _ in range(50):
        f, g = random_band_limited(sys, rng), random_band_limited(sys, rng)
        pl = max(pl, plancherel_residual(sys, f, g))
        a = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
        imag = max(imag, abs(l2u_inner(sys, a, a).imag))
        w = GridFunction(sys.grid, random_coefficients(rng, sys.grid.size))
        dual = max(dual, transform_duality_residual(sys, w, a))
    ok = pl < 1e-9 and imag < 1e-12 and dual < 1e-10
    assert acceptance.record(4, ok, f"{name} plancherel {fmt(pl)} imag {fmt(imag)} duality {fmt(dual)}")


# 5
def test_c5_frame_bounds_h2(h_system, acceptance):
    a2, A2, _, _ = estimate_frame_bounds(h_system(2.0), trials=100).squared
    # multipliers h^{-2x} on [0, 1] span [1/4, 1]
    ok = a2 >= 0.25 - 1e-6 and A2 <= 1.0 + 1e-6
    assert acceptance.record(5, ok, f"h=2 a^2 {a2:.6f} A^2 {A2:.6f}")


def test_c5_frame_bounds_h1(h_system, acceptance):
    fb = estimate_frame_bounds(h_system(1.0), trials=100)
    dev = max(abs(v - 1.0) for v in (fb.a, fb.A, fb.b, fb.B))
    assert acceptance.record(5, dev < 1e-10, f"h=1 max |bound - 1| {fmt(dev)}")


# 6
def test_c6_resolvent(h_system, acceptance):
    sys = h_system(2.0)
    op = SpectralOperator(sys, make_h_spectrum(2.0, 16))
    points = (1j, 1 + 1j, -3.0)
    rng = seeded(6)
    res = first = 0.0
    for _ in range(20):
        f = random_band_limited(sys, rng)
        r = {z: resolvent_apply(op, z, f) for z in points}
        for z in points:
            res = max(res, lp_norm(apply_L(op, r[z]) - r[z] * z - f, 2))
        for i, z1 in enumerate(points):
            for z2 in points[i + 1 :]:
                both = resolvent_apply(op, z1, r[z2])
                first = max(first, lp_norm(r[z1] - r[z2] - both * (z1 - z2), 2))
    eig = 0.0
    for k in sys.indices:
        for z in points:
            uk = sys.u(k)
            eig = max(eig, lp_norm(resolvent_apply(op, z, uk) - uk * (1.0 / (op.spectrum[k] - z)), 2))
    ok = res < 1e-8 and eig < 1e-9 and first < 1e-7
    assert acceptance.record(6, ok, f"resolvent {fmt(res)} eigenmode {fmt(eig)} first identity {fmt(first)}")


# 7
@pytest.mark.parametrize("h", (0.5, 2.0))
def test_c7_intertwining(h, h_system, acceptance):
    op = SpectralOperator(h_system(h), make_h_spectrum(h, 16))
    rng = seeded(7, int(h * 2))
    worst = max(
        intertwining_residual(op, random_band_limited(op.system, rng), random_band_limited(op.system, rng))
        for _ in range(50)
    )
    assert acceptance.record(7, worst < 1e-8, f"h={h:g} residual {fmt(worst)}")


# 8
@pytest.mark.parametrize("name", SYSTEMS)
def test_c8_hausdorff_young_p1(name, system_by_name, acceptance):
    sys = system_by_name(name)
    rng = seeded(8, SYSTEMS.index(name))
    an = sy = 0.0
    for _ in range(100):
        f = random_band_limited(sys, rng)
        a = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
        rep = hausdorff_young_report(sys, f, 1.0, a)
        an, sy = max(an, rep.analysis_ratio), max(sy, rep.synthesis_ratio)
    ok = an <= 1 + 1e-9 and sy <= 1 + 1e-9
    assert acceptance.record(8, ok, f"{name} p=1 analysis {an:.6f} synthesis {sy:.6f}")


def test_c8_hausdorff_young_p2_orthonormal(h_system, acceptance):
    sys = h_system(1.0)
    rng = seeded(8, 99)
    dev = 0.0
    for _ in range(100):
        f = random_band_limited(sys, rng)
        a = CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))
        rep = hausdorff_young_report(sys, f, 2.0, a)
        dev = max(dev, abs(rep.analysis_ratio - 1), abs(rep.synthesis_ratio - 1))
    assert acceptance.record(8, dev < 1e-9, f"h=1 p=2 max |ratio - 1| {fmt(dev)}")


# 9
@pytest.mark.parametrize("h", (0.5, 1.0, 2.0))
def test_c9_duality(h, h_system, acceptance):
    sys = h_system(h)
    rng = seeded(9, int(h * 2))
    violations, worst = 0, 0.0
    for p in (1.0, 1.5, 2.0, 3.0):
        for _ in range(200):
            s1, s2 = random_coefficients(rng, len(sys)), random_coefficients(rng, len(sys))
            rep = duality_pairing_report(sys, s1, s2, p)
            violations += not rep.passed
            worst = max(worst, rep.ratio)
    assert acceptance.record(9, violations == 0, f"h={h:g} violations {violations} max ratio {worst:.4f}")


# 10
def test_c10_ionkin_hat_relations(ionkin, acceptance):
    rng = seeded(10)
    reports = []
    for _ in range(10):
        f, g = random_band_limited(ionkin, rng), random_band_limited(ionkin, rng)
        reports.append(ionkin_hat_report(ionkin, f, g, tol=1e-8))
    zero = max(r.zero_residual for r in reports)
    even = max(r.even_residual for r in reports)
    odd = {k: max(r.odd_residuals[k] for r in reports) for k in reports[0].odd_residuals}
    as_printed = sorted(k for k in odd if odd[k] < 1e-8)
    up_to_scale = sorted(
        k for k in odd if max(r.scaled_residuals[f"odd:{k}"] for r in reports) < 1e-8
    )
    s = reports[0].scales
    finding = (
        f"index-0 {fmt(zero)} even {fmt(even)}; odd variants as printed {as_printed or 'none'}; "
        f"fitted scales zero {s['zero'].real:.4f} even {s['even'].real:.4f} "
        f"odd:no_middle {s['odd:no_middle'].real:.4f}; matching up to scale {up_to_scale}"
    )
    assert acceptance.record(10, zero < 1e-8 and even < 1e-8, finding)


# 11
@pytest.mark.parametrize("h", (0.5, 2.0))
def test_c11_convolution_bound(h, h_system, acceptance):
    sys = h_system(h)
    A2 = estimate_frame_bounds(sys, trials=100).squared[1]
    sup_u = verify_biorthogonality(sys).sup_u_norm
    rng = seeded(11, int(h * 2))
    worst = 0.0
    for _ in range(100):
        f, g = random_band_limited(sys, rng), random_band_limited(sys, rng)
        worst = max(worst, lp_norm(conv_u(sys, f, g), 2) / (A2 * sup_u * lp_norm(f, 2) * lp_norm(g, 2)))
    assert acceptance.record(11, worst <= 1.0, f"h={h:g} max ratio to bound {worst:.4f}")


# 12
def test_c12_determinism(acceptance):
    cfg = RunConfig(seed=7)
    first = run("all", cfg)[1]
    second = run("all", cfg)[1]
    keys = ("status", "passed", "metrics", "witnesses")
    diff = [name for name in first if any(first[name][k] != second[name][k] for k in keys if k in first[name])]
    assert acceptance.record(12, not diff, f"{len(first)} reports, differing: {diff or 'none'}")
