import math

import numpy as np
import pytest

from hjdecay.domain import Grid1D, GridFunction, UNIT, inner_product
from hjdecay.spectral import (
    Branch,
    SeriesTruncationError,
    SpectralError,
    compute_spectrum,
    decay_rate_r1,
    mode1_asymptote,
    mode1_residual_sup,
    r1_sweep,
    series_evolve,
    to_reduced_v,
    trig_bracket,
)

LAM1 = math.pi ** 2 / 4.0

# frozen via an independent brentq run on the raw transcendental equations
SQRT_ALPHA1_MINUS2 = 2.028757838110434
ALPHA1_A1 = 1.358532876461639
S_A4 = 1.9150080481545375
R1_TABLE = {
    -4.0: 9.239199300,
    -2.0: 5.115858366,
    -0.5: 3.005464791,
    0.5: 2.003642986,
    1.5: 1.276070198,
    3.0: 0.591469538,
    6.0: 0.091538538,
}
ALPHA_GAP_A1 = 19.84027925499363  # alpha_2 - alpha_1 at a = 1


class TestComputeSpectrum:
    def test_a2_linear_mode(self):
        spec = compute_spectrum(2.0, 3)
        m1 = spec.modes[0]
        assert m1.alpha == 0.0
        assert m1.branch is Branch.LINEAR
        assert m1.amplitude == pytest.approx(math.sqrt(3), rel=1e-15)
        grid = Grid1D(UNIT, 64)
        phi = spec.phi(1, grid)
        assert np.allclose(phi.values, math.sqrt(3) * (1 - grid.nodes()), atol=1e-14)

    def test_a_minus2_first_root(self):
        spec = compute_spectrum(-2.0, 1)
        assert spec.modes[0].sqrt_param == pytest.approx(SQRT_ALPHA1_MINUS2, abs=1e-11)
        assert spec.modes[0].alpha == pytest.approx(4.11586, abs=1e-5)

    def test_a1_first_root(self):
        spec = compute_spectrum(1.0, 1)
        assert spec.modes[0].sqrt_param == pytest.approx(1.16556, abs=1e-5)
        assert spec.modes[0].alpha == pytest.approx(ALPHA1_A1, abs=1e-11)

    def test_a4_hyperbolic_mode(self):
        spec = compute_spectrum(4.0, 2)
        m1 = spec.modes[0]
        assert m1.branch is Branch.HYPERBOLIC
        assert m1.sqrt_param == pytest.approx(S_A4, abs=1e-11)
        assert -16.0 / 4 < m1.alpha < -4.0 * 2.0 / 4.0
        assert spec.modes[1].branch is Branch.TRIG

    def test_zero_a_rejected(self):
        with pytest.raises(ValueError):
            compute_spectrum(0.0, 4)

    @pytest.mark.parametrize("a", [-10.0, -2.0, -0.5, 0.5, 1.5, 2.0, 3.0, 10.0])
    def test_bracket_containment_20_modes(self, a):
        spec = compute_spectrum(a, 20)
        for m in spec.modes:
            if m.branch is Branch.TRIG:
                lo, hi = trig_bracket(a, m.index)
                assert lo < m.sqrt_param < hi
            elif m.branch is Branch.HYPERBOLIC:
                assert -a * a / 4.0 < m.alpha < -a * (a - 2.0) / 4.0
            else:
                assert m.alpha == 0.0

    @pytest.mark.parametrize("a", [-10.0, -2.0, -0.5, 0.5, 1.5, 2.0, 3.0, 10.0])
    def test_residuals_below_tolerance(self, a):
        spec = compute_spectrum(a, 20)
        assert max(m.residual for m in spec.modes) <= 1e-12

    @pytest.mark.parametrize("a", [-10.0, -2.0, -0.5, 0.5, 1.5, 2.0, 3.0, 10.0])
    def test_alphas_strictly_increasing(self, a):
        alphas = compute_spectrum(a, 20).alphas()
        assert np.all(np.diff(alphas) > 0)

    @pytest.mark.parametrize("a", [-3.0, -1.0, 1.0, 1.9, 2.0, 2.5, 6.0])
    def test_orthonormality(self, a):
        grid = Grid1D(UNIT, 1024)
        spec = compute_spectrum(a, 10)
        for i in range(1, 11):
            for j in range(i, 11):
                ip = inner_product(spec.phi(i, grid), spec.phi(j, grid))
                assert abs(ip - (1.0 if i == j else 0.0)) < 1e-8, (a, i, j)

    def test_phi1_positive(self):
        grid = Grid1D(UNIT, 256)
        for a in (-5.0, -1.0, 0.5, 2.0, 3.0, 8.0):
            phi = compute_spectrum(a, 1).phi(1, grid)
            assert np.all(phi.values[:-1] > 0.0), a


class TestAmplitudes:
    def test_small_a_limit(self):
        for a in (1e-3, -1e-3):
            amp = compute_spectrum(a, 1).modes[0].amplitude
            assert abs(amp - math.sqrt(2)) < 1e-3

    def test_a_near_2_blowup(self):
        assert compute_spectrum(1.999, 1).modes[0].amplitude > 10.0

    def test_large_a_vanishes(self):
        assert compute_spectrum(50.0, 1).modes[0].amplitude < 0.1

    @pytest.mark.parametrize("a", [-10.0, -2.0, -0.5, 0.5, 1.5, 2.0, 3.0, 10.0])
    def test_sqrt_pi_bound_n_ge_2(self, a):
        spec = compute_spectrum(a, 20)
        for m in spec.modes[1:]:
            assert m.amplitude <= math.sqrt(math.pi) + 1e-12

    def test_sqrt_pi_bound_first_mode_negative_a(self):
        for a in (-10.0, -2.0, -0.5, -1e-3):
            assert compute_spectrum(a, 1).modes[0].amplitude <= math.sqrt(math.pi)


class TestDecayRate:
    def test_a2_exactly_one(self):
        assert decay_rate_r1(2.0).r1 == 1.0

    @pytest.mark.parametrize("a,expected", sorted(R1_TABLE.items()))
    def test_r1_table(self, a, expected):
        assert decay_rate_r1(a).r1 == pytest.approx(expected, abs=5e-9)

    def test_a_minus2_above_lambda1(self):
        r = decay_rate_r1(-2.0).r1
        assert r == pytest.approx(1.0 + 4.11586, abs=1e-4)
        assert r > LAM1

    def test_a4_below_one(self):
        r = decay_rate_r1(4.0)
        assert r.r1 == pytest.approx(0.33, abs=5e-3)
        assert r.r1 <= 1.0
        assert -4.0 < r.alpha1 < -2.0

    def test_regime_inequalities(self):
        for a in (-6.0, -1.0, -0.1):
            assert decay_rate_r1(a).r1 > LAM1
        for a in (0.1, 1.0, 1.9):
            assert 0.0 < decay_rate_r1(a).r1 < LAM1
        for a in (2.5, 4.0, 9.0):
            assert decay_rate_r1(a).r1 <= 1.0

    def test_cross_identities_tight(self):
        # decay_rate_r1 raises if the identities drift beyond 1e-10;
        # spot-check the values directly as well
        for a in (0.5, 1.0, 1.9):
            e = decay_rate_r1(a)
            z = math.sqrt(e.alpha1)
            assert abs(e.r1 - (z / math.sin(z)) ** 2) < 1e-10
        for a in (2.1, 3.0, 4.0, 10.0):
            e = decay_rate_r1(a)
            s = math.sqrt(-e.alpha1)
            assert abs(e.r1 - 0.25 * (a + 2 * s) ** 2 * math.exp(-2 * s)) < 1e-10
            e2s = math.exp(2 * s)
            assert abs(e.r1 - 4 * s * s * e2s / (e2s - 1) ** 2) < 1e-10

    def test_limits_toward_zero_and_monotone_wings(self):
        assert abs(decay_rate_r1(1e-3).r1 - LAM1) < 1e-2
        assert abs(decay_rate_r1(-1e-3).r1 - LAM1) < 1e-2
        assert decay_rate_r1(-10.0).r1 > decay_rate_r1(-1.0).r1
        assert decay_rate_r1(10.0).r1 < decay_rate_r1(3.0).r1

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            decay_rate_r1(0.0)

    def test_sweep_skips_zero(self):
        rows = r1_sweep(np.linspace(-1, 1, 5))
        assert all(r.a != 0.0 for r in rows)
        assert len(rows) == 4


class TestReducedTransform:
    def test_zero_datum(self):
        v = to_reduced_v(GridFunction.zeros(Grid1D(UNIT, 64)), a=1.7)
        assert np.all(v.values == 0.0)

    def test_a2_exponential_cancellation(self):
        grid = Grid1D(UNIT, 128)
        u0 = GridFunction.from_callable(grid, lambda x: np.exp(x) * (1 - x), dirichlet=False)
        v0 = to_reduced_v(u0, a=2.0)
        assert np.max(np.abs(v0.values - (1 - grid.nodes()))) < 1e-12

    def test_preserves_right_zero(self):
        grid = Grid1D(UNIT, 64)
        u0 = GridFunction.from_callable(grid, lambda x: np.sin(np.pi * x), dirichlet=True)
        assert to_reduced_v(u0, a=-3.0).values[-1] == 0.0

    def test_requires_zero_at_one(self):
        grid = Grid1D(UNIT, 64)
        bad = GridFunction(grid, np.ones(65))
        with pytest.raises(ValueError):
            to_reduced_v(bad, a=1.0)


def phi1_as_v0(a, n=256):
    grid = Grid1D(UNIT, n)
    return compute_spectrum(a, 1).phi(1, grid)


class TestSeriesEvolve:
    def test_single_mode_input(self):
        a = -1.0
        spec = compute_spectrum(a, 32)
        grid = Grid1D(UNIT, 256)
        v0 = spec.phi(1, grid)
        t = 0.7
        out, tail = series_evolve(v0, spec, t)
        x = grid.nodes()
        expected = math.exp(-(a * a / 4 + spec.modes[0].alpha) * t) * np.exp(a * x / 2) * v0.values
        assert np.max(np.abs(out.values - expected)) < 1e-10 + tail

    def test_zero_datum(self):
        spec = compute_spectrum(1.0, 16)
        out, _ = series_evolve(GridFunction.zeros(Grid1D(UNIT, 128)), spec, 0.5)
        assert np.max(np.abs(out.values)) == 0.0

    def test_truncation_error_carries_mode_count(self):
        spec = compute_spectrum(1.0, 2)
        v0 = GridFunction.from_callable(Grid1D(UNIT, 128), lambda x: x * (1 - x))
        with pytest.raises(SeriesTruncationError) as exc:
            series_evolve(v0, spec, 1e-4, tail_tol=1e-12)
        assert exc.value.needed_modes > 2

    def test_t_zero_rejected(self):
        spec = compute_spectrum(1.0, 4)
        with pytest.raises(ValueError):
            series_evolve(GridFunction.zeros(Grid1D(UNIT, 64)), spec, 0.0)

    def test_tail_bound_covers_truncation(self):
        a = -1.0
        grid = Grid1D(UNIT, 256)
        v0 = GridFunction.from_callable(grid, lambda x: np.cos(np.pi * x / 2) * np.exp(x / 2), dirichlet=False)
        v0 = v0.with_values(np.where(grid.nodes() < 1.0, v0.values, 0.0))
        coarse = compute_spectrum(a, 4)
        fine = compute_spectrum(a, 48)
        for t in (0.05, 0.3):
            lo, tail = series_evolve(v0, coarse, t)
            hi, _ = series_evolve(v0, fine, t)
            assert np.max(np.abs(lo.values - hi.values)) <= tail


class TestMode1Asymptote:
    def test_pure_mode_zero_residual(self):
        a = 1.0
        spec = compute_spectrum(a, 24)
        grid = Grid1D(UNIT, 256)
        v0 = spec.phi(1, grid)
        for t in (1.0, 2.0, 4.0):
            assert mode1_residual_sup(v0, spec, t) < 1e-8

    def test_prediction_matches_coefficient(self):
        a = 1.0
        spec = compute_spectrum(a, 8)
        grid = Grid1D(UNIT, 256)
        v0 = GridFunction.from_callable(grid, lambda x: x * (1 - x))
        c1 = inner_product(v0, spec.phi(1, grid))
        pred = mode1_asymptote(v0, spec, 1.0, 0.5)
        phi_half = float(spec.modes[0].eigenfunction_values(np.array([0.5]))[0])
        assert pred == pytest.approx(c1 * phi_half, rel=1e-12)

    def test_t_below_one_rejected(self):
        spec = compute_spectrum(1.0, 4)
        v0 = GridFunction.zeros(Grid1D(UNIT, 64))
        with pytest.raises(ValueError):
            mode1_asymptote(v0, spec, 0.5, 0.5)

    def test_residual_slope_matches_gap(self):
        a = 1.0
        spec = compute_spectrum(a, 32)
        grid = Grid1D(UNIT, 512)
        v0 = to_reduced_v(
            GridFunction.from_callable(grid, lambda x: np.cos(np.pi * x / 2), dirichlet=False).with_values(
                np.where(grid.nodes() < 1.0, np.cos(np.pi * grid.nodes() / 2), 0.0)
            ),
            a,
        )
        ts = np.linspace(1.0, 4.0, 13)
        res = np.array([mode1_residual_sup(v0, spec, t) for t in ts])
        slope = np.polyfit(ts, np.log(res), 1)[0]
        assert -1.05 * ALPHA_GAP_A1 <= slope <= -0.95 * ALPHA_GAP_A1

    def test_residual_monotone_envelope(self):
        a = 1.0
        spec = compute_spectrum(a, 32)
        grid = Grid1D(UNIT, 256)
        v0 = GridFunction.from_callable(grid, lambda x: x * (1 - x) ** 2)
        assert mode1_residual_sup(v0, spec, 4.0) <= mode1_residual_sup(v0, spec, 1.0)
