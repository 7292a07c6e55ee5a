import math

import mpmath
import numpy as np
import pytest

from cellrate import streams
from cellrate.asymptotic import (HEX_DENSITY_GAIN, AsymptoticParams, compare_hex_ppp,
                                 fixed_point_residual, g_alpha, mean_se_hex_density,
                                 mean_se_hex_insufficient, mean_se_hex_sufficient, mean_se_ppp,
                                 noise_to_sigma2, se_from_beta, sinr_approx, solve_fixed_point)
from cellrate.errors import BracketError
from cellrate.geometry import SQRT3, hex_density, hex_spacing
from cellrate.montecarlo import run_fixed_link_experiment
from cellrate.powerctl import PointMassPower, PowerControl, PowerDistribution

GT = 1e-5
IV_C = PowerControl.from_snr(30, 1e-15, GT, 0.2, 4.0)   # p_t = 1e-12 W


def pc(pm, alpha=4.0):
    return PowerControl(1e-12, GT, pm, alpha)


def params(alpha=4.0, rho_w=1e-3, c=1e3, sigma2=0.0, r1=30.0, p1=None, dist=None):
    dist = dist if dist is not None else PointMassPower(1.0, alpha)
    p1 = p1 if p1 is not None else 1.0
    return AsymptoticParams(alpha, rho_w, c, sigma2, GT, r1, p1, dist)


class TestGAlpha:
    def test_alpha4(self):
        assert g_alpha(4.0) == pytest.approx((2 / math.pi) ** 2, rel=1e-15)
        assert g_alpha(4.0) == pytest.approx(0.405285, abs=1e-6)

    def test_vanishes_at_two(self):
        assert g_alpha(2.0 + 1e-9) < 1e-8

    @pytest.mark.parametrize("alpha", [3.0, 2.5, 5.0, 7.3])
    def test_high_precision(self, alpha):
        mpmath.mp.dps = 40
        a = mpmath.mpf(alpha)
        ref = ((a / (2 * mpmath.pi)) * mpmath.sin(2 * mpmath.pi / a)) ** (a / 2)
        assert g_alpha(alpha) == pytest.approx(float(ref), rel=1e-14)

    def test_rejects_alpha_two(self):
        with pytest.raises(ValueError):
            g_alpha(2.0)


class TestParams:
    def test_b(self):
        p = params(rho_w=1e-3, c=10.0)
        assert p.b == pytest.approx((math.pi * 1e-4) ** 2)

    @pytest.mark.parametrize("field, value", [("alpha", 2.0), ("rho_w", 0.0), ("c", -1.0),
                                              ("sigma2", -1e-3), ("r1", 0.0), ("p1", 0.0)])
    def test_validation(self, field, value):
        kw = dict(alpha=4.0, rho_w=1e-3, c=10.0, sigma2=0.0, gain=GT, r1=1.0, p1=1.0,
                  dist=PointMassPower(1.0))
        kw[field] = value
        with pytest.raises(ValueError):
            AsymptoticParams(**kw)


GRID = [(alpha, rho_w, r1) for alpha in (3.0, 4.0, 6.0)
        for rho_w in (1e-4, 1e-3, 1e-2) for r1 in (5.0, 20.0, 60.0)]
REDUCTION_GRID = [g for g in GRID if g[0] != 3.0]   # alpha = 3 is covered by the acceptance suite


class TestFixedPoint:
    @pytest.mark.parametrize("alpha, rho_w, r1", REDUCTION_GRID)
    def test_large_c_reduces_to_closed_form(self, alpha, rho_w, r1):
        dist = PowerDistribution.hex(pc(0.2, alpha), hex_spacing(0.2 * rho_w))
        p1 = 0.05
        beta = solve_fixed_point(params(alpha, rho_w, 1e3, 0.0, r1, p1, dist))
        approx = sinr_approx(1, r1, p1, dist, rho_w, alpha)
        assert beta == pytest.approx(approx, rel=0.01)

    @pytest.mark.invariant
    @pytest.mark.parametrize("alpha, rho_w, r1", GRID)
    @pytest.mark.parametrize("sigma2, c", [(0.0, 1e3), (1e-9, 5.0)])
    def test_residual_small(self, alpha, rho_w, r1, sigma2, c):
        dist = PowerDistribution.ppp(pc(0.2, alpha), 0.1 * rho_w)
        p = params(alpha, rho_w, c, sigma2, r1, 0.01, dist)
        beta = solve_fixed_point(p)
        assert beta > 0
        assert abs(fixed_point_residual(beta, p)) < 1e-9

    @pytest.mark.parametrize("alpha", [3.0, 4.0])
    def test_finite_disk_gap_decays_as_power_of_c(self, alpha):
        # interference missing beyond a finite disk shrinks like c**(1 - alpha/2)
        def gap(c):
            p = params(alpha, 1e-3, c, 0.0, 20.0, 1.0, PointMassPower(1.0, alpha))
            return solve_fixed_point(p) / sinr_approx(1, 20.0, 1.0, p.dist, 1e-3, alpha) - 1

        assert gap(1e5) / gap(1e4) == pytest.approx(10 ** (1 - alpha / 2), rel=0.15)

    @pytest.mark.invariant
    def test_point_mass_consistency_chain(self):
        p = params(c=1e4, sigma2=0.0, r1=25.0, p1=1.0)
        assert solve_fixed_point(p) == pytest.approx(
            sinr_approx(1, 25.0, 1.0, p.dist, p.rho_w, p.alpha), rel=0.01)

    def test_literal_form_agrees_at_unit_power(self):
        p = params(c=1e4, r1=25.0, p1=1.0)
        assert solve_fixed_point(p, "literal") == pytest.approx(solve_fixed_point(p), rel=0.01)

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            fixed_point_residual(1.0, params(), "other")

    @pytest.mark.invariant
    def test_monotone_in_density_noise_and_power(self):
        dist = PowerDistribution.hex(pc(0.2), hex_spacing(1e-4))
        base = dict(rho_w=1e-3, c=5.0, sigma2=1e-8, r1=20.0, p1=0.02, dist=dist)
        beta = solve_fixed_point(params(**base))
        assert solve_fixed_point(params(**dict(base, rho_w=2e-3))) < beta
        assert solve_fixed_point(params(**dict(base, sigma2=1e-6))) <= beta
        assert solve_fixed_point(params(**dict(base, p1=0.04))) >= beta

    def test_unlimited_power_ppp(self):
        dist = PowerDistribution.ppp(pc(math.inf), 2e-4)
        p = params(rho_w=1e-3, c=4.0, r1=30.0, p1=1e-7 * 30.0 ** 4, dist=dist)
        beta = solve_fixed_point(p)
        assert abs(fixed_point_residual(beta, p)) < 1e-9

    def test_bracket_failure(self, monkeypatch):
        import cellrate.asymptotic as asy
        monkeypatch.setattr(asy, "fixed_point_residual", lambda beta, p, form: -1.0)
        with pytest.raises(BracketError):
            asy.solve_fixed_point(params())

    def test_matches_simulation_point_mass(self):
        # r1 puts the closed-form SINR at 10 for N = 16
        n, rho_w, c = 16, 1e-3, 10.0
        dist = PointMassPower(1.0)
        r1 = math.sqrt(n / (math.pi * rho_w) * math.sqrt(g_alpha(4.0) / 10.0))
        assert sinr_approx(n, r1, 1.0, dist, rho_w, 4.0) == pytest.approx(10.0)
        sim = run_fixed_link_experiment(n, c, rho_w, r1, 1.0, dist, GT, 4.0, 1e-15, 1000, seed=7)
        beta = solve_fixed_point(params(4.0, rho_w, c, noise_to_sigma2(1e-15, n, 4.0), r1, 1.0,
                                        dist))
        assert n ** 2 * beta == pytest.approx(sim.mean(), rel=0.05)

    def test_simulation_gap_closes_with_n(self):
        rho_w, c = 1e-3, 10.0
        dist = PointMassPower(1.0)
        r1 = math.sqrt(16 / (math.pi * rho_w) * math.sqrt(g_alpha(4.0) / 10.0))
        gaps = []
        for n, trials in ((16, 2000), (64, 500)):
            sim = run_fixed_link_experiment(n, c, rho_w, r1, 1.0, dist, GT, 4.0, 1e-15, trials,
                                            seed=11)
            beta = solve_fixed_point(params(4.0, rho_w, c, noise_to_sigma2(1e-15, n, 4.0), r1,
                                            1.0, dist))
            gaps.append(sim.mean() / (n ** 2 * beta) - 1)
        assert abs(gaps[1]) < abs(gaps[0])
        assert abs(gaps[1]) < 0.04


class TestClosedForms:
    def test_sinr_doubles_n(self):
        dist = PointMassPower(1.0)
        assert sinr_approx(8, 30.0, 1.0, dist, 1e-3, 4.0) == pytest.approx(
            4 * sinr_approx(4, 30.0, 1.0, dist, 1e-3, 4.0), rel=1e-14)

    def test_power_controlled_link_length_cancels(self):
        dist = PowerDistribution.hex(pc(math.inf), 50.0)
        vals = [sinr_approx(8, r, 1e-7 * r ** 4, dist, 1e-3, 4.0) for r in (3.0, 10.0, 25.0)]
        np.testing.assert_allclose(vals, vals[0], rtol=1e-13)

    def test_hex_sufficient_constructed_identity(self):
        d, rho_w = 100.0, 1e-3
        # choose N so that G_4 * (N / (5/36 d^2 pi rho_w))^2 = 1
        n = 5 / 36 * d * d * math.pi * rho_w / math.sqrt(g_alpha(4.0))
        assert mean_se_hex_sufficient(n, d, rho_w, 4.0) == pytest.approx(1.0, rel=1e-14)

    def test_density_form_matches_spacing_form(self):
        rho_w, rho_h = 1e-3, 1.7e-4
        n = np.arange(1, 65)
        np.testing.assert_allclose(mean_se_hex_density(n, rho_h, rho_w, 4.0),
                                   mean_se_hex_sufficient(n, hex_spacing(rho_h), rho_w, 4.0),
                                   rtol=1e-12)
        # log2(1 + x) changes by a smaller fraction than x does
        rounded = mean_se_hex_density(n, rho_h, rho_w, 4.0, coefficient=1.95)
        exact = mean_se_hex_sufficient(n, hex_spacing(rho_h), rho_w, 4.0)
        assert np.all(rounded < exact)
        assert np.all(1 - rounded / exact <= 1 - (1.95 / HEX_DENSITY_GAIN) ** 2)

    def test_density_constant(self):
        assert HEX_DENSITY_GAIN == pytest.approx(1 / (5 / 36 * 2 / SQRT3 * math.pi), rel=1e-15)

    def test_headline_value(self):
        assert mean_se_hex_density(7, 0.1, 1.0, 4.0) == pytest.approx(0.834, abs=1e-3)
        assert mean_se_hex_density(7, 0.1, 1.0, 4.0, coefficient=1.95) == pytest.approx(0.81,
                                                                                       abs=0.01)

    def test_insufficient_delegates_when_cap_never_hit(self):
        d, rho_w = 150.0, 1e-3
        r_max = SQRT3 * d / 3
        roomy = PowerControl(1e-12, GT, 1e-7 * (1.01 * r_max) ** 4)
        assert mean_se_hex_insufficient(8, d, rho_w, roomy) == pytest.approx(
            mean_se_hex_sufficient(8, d, rho_w, 4.0), rel=1e-6)
        tight = PowerControl(1e-12, GT, 1e-7 * (0.99999999 * r_max) ** 4)
        assert mean_se_hex_insufficient(8, d, rho_w, tight) == pytest.approx(
            mean_se_hex_sufficient(8, d, rho_w, 4.0), rel=1e-6)

    def test_insufficient_tolerance_stable(self):
        d = hex_spacing(1e-5)
        coarse = mean_se_hex_insufficient(4, d, 1e-4, IV_C, tol=1e-8)
        fine = mean_se_hex_insufficient(4, d, 1e-4, IV_C, tol=5e-9)
        assert abs(fine - coarse) / fine < 1e-6

    def test_ppp_unlimited_value(self):
        assert mean_se_ppp(2.5, 1e-4, 1e-4, pc(math.inf)) == pytest.approx(
            math.log2(1 + (2 / math.pi) ** 2 * 2.5 ** 2), rel=1e-14)
        assert mean_se_ppp(2.5, 1e-4, 1e-4, pc(math.inf)) == pytest.approx(1.821, abs=1e-3)

    def test_ppp_scale_invariance(self):
        assert mean_se_ppp(9, 2e-5, 1e-4, pc(math.inf)) == pytest.approx(
            mean_se_ppp(9, 2e-4, 1e-3, pc(math.inf)), rel=1e-14)

    def test_ppp_large_cap_approaches_unlimited(self):
        assert mean_se_ppp(9, 2e-4, 1e-3, pc(1e6)) == pytest.approx(
            mean_se_ppp(9, 2e-4, 1e-3, pc(math.inf)), rel=1e-6)

    def test_ppp_tolerance_stable(self):
        a = mean_se_ppp(8, 2e-4, 1e-3, IV_C, tol=1e-10)
        b = mean_se_ppp(8, 2e-4, 1e-3, IV_C, tol=5e-11)
        assert abs(a - b) / a < 1e-6

    def test_se_from_beta(self):
        assert se_from_beta(3 / 16, 4, 4.0) == pytest.approx(2.0)

    def test_noise_scaling(self):
        assert noise_to_sigma2(1e-15, 16, 4.0) == pytest.approx(1.6e-14)


N_SWEEP = np.array([1, 2, 4, 8, 16, 32, 64])


def all_means(n, rel, rho_w, pm):
    rho = rel * rho_w
    pcm = pc(pm)
    return {
        "hex_sufficient": mean_se_hex_sufficient(n, hex_spacing(rho), rho_w, 4.0),
        "hex_density": mean_se_hex_density(n, rho, rho_w, 4.0),
        "hex_insufficient": mean_se_hex_insufficient(n, hex_spacing(rho), rho_w, pcm),
        "ppp": mean_se_ppp(n, rho, rho_w, pcm),
    }


class TestMonotonicity:
    @pytest.mark.invariant
    @pytest.mark.parametrize("pm", [0.2, math.inf])
    def test_nondecreasing_in_n(self, pm):
        for name, vals in all_means(N_SWEEP, 0.1, 1e-3, pm).items():
            assert np.all(np.isfinite(vals)) and np.all(vals >= 0), name
            assert np.all(np.diff(vals) >= 0), name

    @pytest.mark.invariant
    @pytest.mark.parametrize("pm", [0.2, math.inf])
    def test_nondecreasing_in_relative_density(self, pm):
        rels = [0.025, 0.05, 0.1, 0.2, 0.4]
        table = [all_means(8, r, 1e-3, pm) for r in rels]
        for name in table[0]:
            vals = [row[name] for row in table]
            assert np.all(np.diff(vals) >= 0), name

    @pytest.mark.invariant
    @pytest.mark.parametrize("pm", [0.2, math.inf])
    def test_nonincreasing_in_node_density(self, pm):
        # base-station density held fixed while node density grows
        rho = 1e-4
        rows = [all_means(8, rho / w, w, pm) for w in (2e-4, 5e-4, 1e-3, 1e-2)]
        for name in rows[0]:
            vals = [row[name] for row in rows]
            assert np.all(np.diff(vals) <= 0), name

    @pytest.mark.invariant
    @pytest.mark.parametrize("pm", [0.2, math.inf])
    def test_large_n_slope(self, pm):
        n = 2.0 ** np.arange(4, 11)
        for name, vals in all_means(n, 0.2, 1e-3, pm).items():
            slope = np.polyfit(np.log2(n), vals, 1)[0]
            assert slope == pytest.approx(2.0, rel=0.05), name

    @pytest.mark.invariant
    @pytest.mark.parametrize("pm", [0.2, math.inf])
    def test_last_octave_slope_sparse_cells(self, pm):
        for name, vals in all_means(np.array([512.0, 1024.0]), 0.1, 1e-3, pm).items():
            assert vals[1] - vals[0] == pytest.approx(2.0, rel=0.01), name


class TestCompare:
    def test_hex_never_below_ppp(self):
        for rel in (0.025, 0.05, 0.1, 0.2, 0.5):
            for rho_w in (1e-4, 1e-3, 1e-2):
                for pm in (0.2, math.inf):
                    hex_se, ppp_se, _ = compare_hex_ppp(N_SWEEP, rel, rho_w, pc(pm))
                    assert np.all(hex_se >= ppp_se)

    def test_ratio_shrinks_with_n_unlimited_power(self):
        _, _, ratio = compare_hex_ppp(np.array([8, 16, 32, 64]), 0.2, 1e-3, pc(math.inf))
        assert np.all(np.diff(ratio) < 0)

    def test_matched_densities(self):
        hex_se, ppp_se, ratio = compare_hex_ppp(10, 0.2, 1e-3, IV_C)
        assert hex_se == pytest.approx(mean_se_hex(10, hex_spacing(2e-4), 1e-3, IV_C))
        assert ppp_se == pytest.approx(mean_se_ppp(10, 2e-4, 1e-3, IV_C))
        assert ratio == pytest.approx(hex_se / ppp_se)


from cellrate.asymptotic import mean_se_hex  # noqa: E402
