import math
from dataclasses import replace

import pytest

from scsqkd.model import (ChannelParams, EpsilonBudget, ProtocolParams,
                          SourceBounds)
from scsqkd.optimizer import (NoSecureDistanceError, Scenario, SweepSpec,
                              evaluate_point, largest_positive_distance,
                              max_distance, maximize_rate, optimize_point,
                              sweep)

import refcalc


def scenario(mu_o=1e-8, mu_e=0.0, xi=1, n_windows=10 ** 14):
    return Scenario(
        bounds=SourceBounds.from_intensities(mu=0.0, mu_o=mu_o, mu_e=mu_e, xi=xi),
        chan=ChannelParams(distance_km=0.0),
        proto=ProtocolParams(n_windows=n_windows, p_w=0.1),
        eps=EpsilonBudget.for_coherent_target(1e-10, n_windows),
    )


SMALL = SweepSpec(distances_km=(), mu_grid=(1e-4, 1.0, 16),
                  pw_grid=(0.01, 0.6, 8), refine_iters=2)


class TestMaximizeRate:
    def test_monotone_surface_returns_grid_corner(self):
        spec = SweepSpec(distances_km=(), mu_grid=(0.1, 1.0, 5),
                         pw_grid=(0.1, 0.5, 5), refine_iters=0)
        mu, pw, val = maximize_rate(lambda m, p: m + p, spec)
        assert mu == pytest.approx(1.0, rel=1e-12)
        assert pw == pytest.approx(0.5, rel=1e-12)
        assert val == pytest.approx(1.5, rel=1e-12)

    def test_unimodal_surface_recovered_within_one_cell(self):
        spec = SweepSpec(distances_km=(), mu_grid=(1e-3, 1.0, 20),
                         pw_grid=(0.05, 0.5, 20), refine_iters=3)
        mu_star, pw_star = 0.07, 0.23

        def surface(mu, pw):
            return math.exp(-(math.log(mu / mu_star)) ** 2 - 40.0 * (pw - pw_star) ** 2)

        mu, pw, val = maximize_rate(surface, spec)
        cell_mu = (math.log(1.0) - math.log(1e-3)) / 19
        cell_pw = (0.5 - 0.05) / 19
        assert abs(math.log(mu / mu_star)) < cell_mu
        assert abs(pw - pw_star) < cell_pw
        assert val == pytest.approx(1.0, abs=1e-3)

    def test_never_worse_than_sampled_grid(self):
        seen = []

        def surface(mu, pw):
            v = -(math.log(mu) + 2.0) ** 2 - (pw - 0.3) ** 2 + 1.0
            seen.append(v)
            return v

        spec = SweepSpec(distances_km=(), mu_grid=(1e-3, 1.0, 9),
                         pw_grid=(0.1, 0.5, 7), refine_iters=2)
        _, _, val = maximize_rate(surface, spec)
        assert val >= max(seen) - 1e-15  # best-ever tracking includes refinement

    def test_all_zero_grid(self):
        spec = SweepSpec(distances_km=(), mu_grid=(1e-3, 1.0, 4),
                         pw_grid=(0.1, 0.5, 4), refine_iters=2)
        mu, pw, val = maximize_rate(lambda m, p: 0.0, spec)
        assert val == 0.0

    def test_degenerate_grids_pin_coordinates(self):
        spec = SweepSpec(distances_km=(), mu_grid=(0.05, 0.05, 1),
                         pw_grid=(0.1, 0.5, 9), refine_iters=2)
        mu, pw, _ = maximize_rate(lambda m, p: 1.0 - (p - 0.31) ** 2, spec)
        assert mu == 0.05
        assert pw == pytest.approx(0.31, abs=1e-3)


class TestEvaluatePoint:
    def test_rates_positive_at_50km(self):
        sc = scenario()
        chan = replace(sc.chan, distance_km=50.0)
        pt = evaluate_point(sc.bounds, chan, replace(sc.proto, p_w=0.22),
                            sc.eps, 0.02)
        assert pt.r_coh > 0.0
        assert pt.r_phys == pt.r_coh / 2  # xi = 1

    def test_r_phys_scaling_is_exact(self):
        for xi in (0, 1, 3):
            sc = scenario(xi=xi)
            pt = evaluate_point(sc.bounds, replace(sc.chan, distance_km=10.0),
                                replace(sc.proto, p_w=0.2), sc.eps, 0.05)
            assert pt.r_phys * (xi + 1) == pt.r_coh

    def test_far_distance_clamps_to_zero(self):
        sc = scenario()
        pt = evaluate_point(sc.bounds, replace(sc.chan, distance_km=10000.0),
                            replace(sc.proto, p_w=0.2), sc.eps, 0.05)
        assert pt.r_coh == 0.0

    def test_trojan_continuity_at_zero(self):
        sc0 = scenario(mu_e=0.0)
        sc1 = scenario(mu_e=1e-30)
        chan = replace(sc0.chan, distance_km=50.0)
        proto = replace(sc0.proto, p_w=0.22)
        r0 = evaluate_point(sc0.bounds, chan, proto, sc0.eps, 0.02).r_coh
        r1 = evaluate_point(sc1.bounds, chan, proto, sc1.eps, 0.02).r_coh
        assert r1 == pytest.approx(r0, rel=1e-12)

    def test_vacuous_bound_is_flagged_zero(self):
        sc = scenario()
        b = SourceBounds(a0=0.5, av0=0.5, b0=0.5, bv0=0.5, mu_e=0.0, xi=1)
        pt = evaluate_point(b, replace(sc.chan, distance_km=10.0),
                            replace(sc.proto, p_w=0.2), sc.eps, 0.05)
        assert pt.r_coh == 0.0
        assert "no secure mapping" in pt.note

    def test_mu_beyond_ln2_is_flagged_zero(self):
        sc = scenario()
        pt = evaluate_point(sc.bounds, replace(sc.chan, distance_km=10.0),
                            replace(sc.proto, p_w=0.2), sc.eps, 0.8)
        assert pt.r_coh == 0.0
        assert "a0 below 0.5" in pt.note

    def test_matches_extended_precision_pipeline(self):
        sc = scenario()
        chan = replace(sc.chan, distance_km=50.0)
        pt = evaluate_point(sc.bounds, chan, replace(sc.proto, p_w=0.22),
                            sc.eps, 0.02)
        want = float(refcalc.pipeline_rate(50.0, 0.02, 0.22, mu_o="1e-8"))
        assert pt.r_coh == pytest.approx(want, rel=1e-9)

    def test_trojan_penalty_monotone_at_fixed_point(self):
        rates = []
        for mu_e in (0.0, 1e-4, 1e-2):
            sc = scenario(mu_e=mu_e)
            pt = evaluate_point(sc.bounds, replace(sc.chan, distance_km=50.0),
                                replace(sc.proto, p_w=0.22), sc.eps, 0.02)
            rates.append(pt.r_coh)
        assert rates[0] >= rates[1] >= rates[2]
        assert rates[0] > rates[2]


class TestOptimizePoint:
    def test_optimum_beats_hand_picked_samples(self):
        sc = scenario()
        spec = replace(SMALL, distances_km=(0.0,))
        best = optimize_point(spec, sc, 0.0)
        assert best.r_coh > 0.0
        for mu, pw in ((0.01, 0.1), (0.05, 0.2), (0.1, 0.3), (0.02, 0.5)):
            pt = evaluate_point(sc.bounds, replace(sc.chan, distance_km=0.0),
                                replace(sc.proto, p_w=pw), sc.eps, mu)
            assert best.r_coh >= pt.r_coh

    def test_insecure_distance_flagged(self):
        sc = scenario()
        pt = optimize_point(replace(SMALL, mu_grid=(1e-4, 0.5, 6),
                                    pw_grid=(0.05, 0.5, 4), refine_iters=1),
                            sc, 5000.0)
        assert pt.r_coh == 0.0
        assert pt.note == "insecure at this distance"


class TestSweep:
    def test_empty_distances(self):
        assert sweep(replace(SMALL, distances_km=()), scenario()) == []

    def test_deterministic(self):
        spec = replace(SMALL, distances_km=(0.0, 40.0, 80.0))
        sc = scenario()
        assert sweep(spec, sc) == sweep(spec, sc)

    def test_rates_non_increasing_with_distance(self):
        spec = replace(SMALL, distances_km=(0.0, 30.0, 60.0, 90.0, 120.0))
        pts = sweep(spec, scenario())
        rates = [p.r_coh for p in pts]
        for a, b in zip(rates, rates[1:]):
            assert b <= a * (1.0 + 1e-9)

    def test_worker_pool_matches_serial(self):
        spec = replace(SMALL, distances_km=(0.0, 50.0, 100.0))
        sc = scenario()
        assert sweep(spec, sc, workers=2) == sweep(spec, sc, workers=1)

    def test_trojan_penalty_monotone_after_optimization(self):
        spec = replace(SMALL, distances_km=(0.0, 60.0, 120.0))
        plain = sweep(spec, scenario(mu_e=0.0))
        attacked = sweep(spec, scenario(mu_e=1e-3))
        for a, b in zip(attacked, plain):
            assert a.r_coh <= b.r_coh * (1.0 + 1e-9)


class TestMaxDistance:
    def test_synthetic_linear_cutoff(self):
        got = largest_positive_distance(lambda d: max(0.0, 1.0 - d / 300.0),
                                        resolution_km=0.5)
        assert 299.5 <= got <= 300.0

    def test_no_secure_distance(self):
        with pytest.raises(NoSecureDistanceError):
            largest_positive_distance(lambda d: 0.0, resolution_km=1.0)

    def test_resolution_must_be_positive(self):
        with pytest.raises(ValueError):
            largest_positive_distance(lambda d: 1.0, resolution_km=0.0)

    def test_pipeline_reaches_beyond_100km(self):
        got = max_distance(SMALL, scenario(), resolution_km=4.0)
        assert got > 100.0


class TestSweepSpecValidation:
    def test_grid_sanity(self):
        with pytest.raises(Exception):
            SweepSpec(distances_km=(), mu_grid=(0.0, 1.0, 5))
        with pytest.raises(Exception):
            SweepSpec(distances_km=(), pw_grid=(0.1, 1.0, 5))
        with pytest.raises(Exception):
            SweepSpec(distances_km=(), mu_grid=(0.2, 0.1, 5))
        with pytest.raises(Exception):
            SweepSpec(distances_km=(-5.0,))
