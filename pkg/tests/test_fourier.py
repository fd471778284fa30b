import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biortho import (
    CoefficientSequence,
    GridFunction,
    IndexMismatchError,
    IndexSet,
    ValidationError,
    analyze_u,
    analyze_v,
    default_grid,
    estimate_frame_bounds,
    inner_product,
    l2u_inner,
    l2v_inner,
    lp_norm,
    make_h_exponential,
    plancherel_norm_check,
    plancherel_residual,
    random_band_limited,
    random_coefficients,
    synthesize_u,
    synthesize_v,
    transform_duality_residual,
    truncation_residual,
)

from oracles import fourier_coeff_of_x, h_gram_uu, h_norm_sq

H_SET = (0.5, 1.0, 2.0, 5.0)
_GRID = default_grid()


def coeffs(sys, rng):
    return CoefficientSequence(sys.index_set, random_coefficients(rng, len(sys)))


class TestCoefficientSequence:
    def test_shape_checked(self):
        with pytest.raises(ValidationError):
            CoefficientSequence(IndexSet.natural(0, 2), np.ones(4))

    def test_side_tag_checked(self):
        with pytest.raises(ValidationError):
            CoefficientSequence(IndexSet.natural(0, 2), np.ones(3), "W")

    def test_indexing_and_algebra(self):
        s = IndexSet.balanced(1)
        a = CoefficientSequence(s, [1, 2, 3])
        assert a[-1] == 3 and a[1] == 2
        assert np.array_equal((a * a).values, [1, 4, 9])
        assert np.array_equal((a - a).values, [0, 0, 0])
        with pytest.raises(IndexMismatchError):
            a + CoefficientSequence(IndexSet.natural(0, 2), [1, 2, 3])


class TestAnalysis:
    @pytest.mark.parametrize("h", H_SET)
    def test_indicator(self, h, h_system):
        sys = h_system(h)
        for k in (0, 3, -7, 16):
            fh = analyze_u(sys, sys.u(k))
            assert fh.side_tag == "U"
            expected = np.zeros(len(sys))
            expected[sys.index_set.position(k)] = 1
            assert np.max(np.abs(fh.values - expected)) < sys.tol_biortho
            assert np.max(np.abs(analyze_v(sys, sys.v(k)).values - expected)) < sys.tol_biortho

    def test_classical_coefficient(self, h_system):
        sys = h_system(1.0)
        fh = analyze_u(sys, GridFunction(sys.grid, np.exp(2j * np.pi * sys.grid.nodes)))
        expected = np.zeros(len(sys))
        expected[sys.index_set.position(1)] = 1
        assert np.max(np.abs(fh.values - expected)) < 1e-12

    def test_ramp_coefficients(self, h_system):
        sys = h_system(2.0)
        x = sys.grid.nodes
        fh = analyze_u(sys, GridFunction(sys.grid, 2.0**x * x))
        for k in sys.indices:
            assert abs(fh[k] - fourier_coeff_of_x(k)) < 1e-6

    def test_h1_sides_agree(self, h_system, rng):
        sys = h_system(1.0)
        f = GridFunction(sys.grid, random_coefficients(rng, sys.grid.size))
        assert np.max(np.abs(analyze_u(sys, f).values - analyze_v(sys, f).values)) < 1e-15

    def test_v_analysis_of_u_is_gram(self, h_system):
        h = 2.0
        sys = h_system(h)
        a = 3
        fh = analyze_v(sys, sys.u(a))
        for k in sys.indices:
            assert abs(fh[k] - h_gram_uu(h, a, k)) < 1e-10

    def test_grid_mismatch(self, h_system):
        from biortho import GridMismatchError, composite_gauss_legendre

        g = composite_gauss_legendre(32, 8)
        with pytest.raises(GridMismatchError):
            analyze_u(h_system(2.0), GridFunction(g, np.ones(g.size)))


class TestSynthesis:
    def test_indicator(self, h_system):
        sys = h_system(2.0)
        e = CoefficientSequence.indicator(sys.index_set, -4)
        assert np.array_equal(synthesize_u(sys, e).values, sys.u(-4).values)
        assert np.array_equal(synthesize_v(sys, e).values, sys.v(-4).values)

    def test_three_exponentials(self, grid):
        sys = make_h_exponential(1.0, 1, grid)
        f = synthesize_u(sys, np.ones(3))
        assert np.max(np.abs(f.values - (1 + 2 * np.cos(2 * np.pi * grid.nodes)))) < 1e-14

    def test_h1_sides_agree(self, h_system, rng):
        sys = h_system(1.0)
        a = coeffs(sys, rng)
        assert np.max(np.abs(synthesize_u(sys, a).values - synthesize_v(sys, a).values)) < 1e-15

    def test_index_mismatch(self, h_system):
        with pytest.raises(IndexMismatchError):
            synthesize_u(h_system(2.0), np.ones(3))

    @pytest.mark.parametrize("h", H_SET)
    def test_inversion_on_span(self, h, h_system, rng):
        sys = h_system(h)
        f = random_band_limited(sys, rng)
        assert lp_norm(synthesize_u(sys, analyze_u(sys, f)) - f, 2) < 1e-10
        g = random_band_limited(sys, rng, family="v")
        assert lp_norm(synthesize_v(sys, analyze_v(sys, g)) - g, 2) < 1e-10

    def test_evaluator_is_exact_off_grid(self, h_system, rng):
        sys = h_system(2.0)
        c = random_coefficients(rng, len(sys))
        f = synthesize_u(sys, c)
        x = np.linspace(0, 1, 37)
        direct = sum(ck * 2.0**x * np.exp(2j * np.pi * k * x) for ck, k in zip(c, sys.indices))
        assert np.max(np.abs(f.at(x) - direct)) < 1e-12

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31), st.sampled_from(H_SET))
    def test_analysis_inverts_synthesis(self, seed, h):
        sys = make_h_exponential(h, 16, _GRID)
        a = random_coefficients(np.random.default_rng(seed), len(sys))
        scale = np.linalg.norm(a)
        assert np.max(np.abs(analyze_u(sys, synthesize_u(sys, a)).values - a)) < sys.tol_biortho * scale
        assert np.max(np.abs(analyze_v(sys, synthesize_v(sys, a)).values - a)) < sys.tol_biortho * scale


class TestInnerProducts:
    def test_indicator_norm(self, h_system):
        sys = h_system(2.0)
        for j in (0, 5, -11):
            e = CoefficientSequence.indicator(sys.index_set, j)
            assert abs(l2u_inner(sys, e, e) - h_norm_sq(2.0)) < 1e-10

    def test_h1_plain_dot(self, h_system, rng):
        sys = h_system(1.0)
        a, b = coeffs(sys, rng), coeffs(sys, rng)
        assert abs(l2u_inner(sys, a, b) - np.sum(a.values * np.conj(b.values))) < 1e-12

    @pytest.mark.parametrize("h", H_SET)
    def test_equals_function_inner_product(self, h, h_system, rng):
        sys = h_system(h)
        a, b = coeffs(sys, rng), coeffs(sys, rng)
        ref = inner_product(synthesize_u(sys, a), synthesize_u(sys, b))
        assert abs(l2u_inner(sys, a, b) - ref) < 1e-10
        ref_v = inner_product(synthesize_v(sys, a), synthesize_v(sys, b))
        assert abs(l2v_inner(sys, a, b) - ref_v) < 1e-10

    @pytest.mark.parametrize("h", H_SET)
    def test_self_inner_real(self, h, h_system, rng):
        sys = h_system(h)
        for _ in range(10):
            a = coeffs(sys, rng)
            val = l2u_inner(sys, a, a)
            assert abs(val.imag) < 1e-12 and val.real > 0

    @pytest.mark.parametrize("h", H_SET)
    def test_parseval_duality(self, h, h_system, rng):
        sys = h_system(h)
        # f in the span of V and g in the span of U make both transforms exact
        f = random_band_limited(sys, rng, family="v")
        g = random_band_limited(sys, rng)
        lhs = np.conj(l2u_inner(sys, analyze_u(sys, f), analyze_u(sys, g)))
        rhs = l2v_inner(sys, analyze_v(sys, g), analyze_v(sys, f))
        assert abs(lhs - rhs) < 1e-10


class TestPlancherel:
    @pytest.mark.parametrize("h", H_SET)
    def test_single_mode(self, h, h_system):
        sys = h_system(h)
        u = sys.u(2)
        assert plancherel_residual(sys, u, u) < 1e-10

    @pytest.mark.parametrize("h", H_SET)
    def test_random_pairs(self, h, h_system, rng):
        sys = h_system(h)
        worst = max(
            plancherel_residual(sys, random_band_limited(sys, rng), random_band_limited(sys, rng))
            for _ in range(50)
        )
        assert worst < 1e-9

    @pytest.mark.parametrize("h", H_SET)
    def test_norm_form(self, h, h_system, rng):
        sys = h_system(h)
        chk = plancherel_norm_check(sys, random_band_limited(sys, rng))
        assert chk["imag_residual"] < 1e-12
        assert chk["coefficient_sum"].real >= 0
        assert chk["norm_residual"] < 1e-9

    def test_ionkin(self, ionkin, rng):
        f, g = random_band_limited(ionkin, rng), random_band_limited(ionkin, rng)
        assert plancherel_residual(ionkin, f, g) < 1e-9

    @pytest.mark.parametrize("h", H_SET)
    def test_transform_duality_any_input(self, h, h_system, rng):
        sys = h_system(h)
        w = GridFunction(sys.grid, random_coefficients(rng, sys.grid.size))
        assert transform_duality_residual(sys, w, coeffs(sys, rng)) < 1e-10

    def test_truncation_diagnostic(self, h_system, rng):
        sys = h_system(2.0)
        assert truncation_residual(sys, random_band_limited(sys, rng)) < 1e-12
        x = sys.grid.nodes
        ramp = GridFunction(sys.grid, 2.0**x * x)
        assert 1e-3 < truncation_residual(sys, ramp) < 1

    def test_frame_sandwich(self, h_system, rng):
        sys = h_system(2.0)
        a2, A2, _, _ = estimate_frame_bounds(sys, 100).squared
        for _ in range(20):
            g = random_band_limited(sys, rng, n_test=16)
            q = np.sum(np.abs(analyze_u(sys, g).values) ** 2) / lp_norm(g, 2) ** 2
            assert 0.25 - 1e-6 <= q <= 1 + 1e-6
        assert 0.25 - 1e-6 <= a2 <= A2 <= 1 + 1e-6


class TestRandomBandLimited:
    def test_support(self, h_system, rng):
        sys = h_system(2.0)
        c = analyze_u(sys, random_band_limited(sys, rng, n_test=3)).values
        inside = [sys.index_set.position(k) for k in range(-3, 4)]
        mask = np.ones(len(sys), bool)
        mask[inside] = False
        assert np.max(np.abs(c[mask])) < 1e-12
        assert np.min(np.abs(c[inside])) > 0

    def test_normalize(self, h_system, rng):
        f = random_band_limited(h_system(2.0), rng, normalize=True)
        assert lp_norm(f, 2) == pytest.approx(1.0, abs=1e-14)

    def test_default_band_strictly_inside(self, h_system, ionkin, rng):
        sys = h_system(2.0)
        c = analyze_u(sys, random_band_limited(sys, rng)).values
        assert all(abs(c[sys.index_set.position(k)]) < 1e-12 for k in (9, -9, 16, -16))
        c = analyze_u(ionkin, random_band_limited(ionkin, rng)).values
        assert np.max(np.abs(c[9:])) < 1e-12 and math.isfinite(c[0].real)
