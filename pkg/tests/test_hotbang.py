"""Alternating-series state: ray functionals, schedules, series assembly."""

import math

import numpy as np
import pytest

from fermihot.quad import QuadConfig
from fermihot.states import Ordering, StateSpec, anticommutator, two_point
from fermihot.hotbang import (SeriesSchedule, L_phi, F_z, ConvexProfile,
                              series_terms, two_point_series,
                              two_point_series_pair, normal_ordered_remainder,
                              hotbang_smeared, log_convexity_check,
                              BRACKET_LAMBDA_THRESHOLD)


class TestSchedule:

    def test_angle_sequence(self):
        s = SeriesSchedule(lam=0.7)
        ns = np.arange(0, 40)
        phis = s.phi(ns)
        assert phis[0] == 0.0
        assert np.all(np.diff(phis) > 0)
        assert np.all(phis < math.pi / 2)
        assert np.allclose(s.cos_phi(ns), 1.0 / np.sqrt(1.0 + (ns * 0.7) ** 2),
                           rtol=1e-15)

    def test_ray_endpoints(self):
        s = SeriesSchedule(lam=0.3)
        assert s.z(0) == 1.0 + 0.0j
        assert s.z(4) == 1.0 + 1.2j
        assert s.z_prime(4) == -1.0 + 1.2j

    def test_bracket_policy(self):
        assert SeriesSchedule(lam=0.04).use_brackets
        assert SeriesSchedule(lam=BRACKET_LAMBDA_THRESHOLD).use_brackets
        assert not SeriesSchedule(lam=0.051).use_brackets
        # explicit override wins either way
        assert SeriesSchedule(lam=5.0, bracketed=True).use_brackets
        assert not SeriesSchedule(lam=0.01, bracketed=False).use_brackets

    @pytest.mark.parametrize("kwargs", [
        dict(lam=0.0), dict(lam=-1.0), dict(lam=1.0, tol=0.0),
        dict(lam=1.0, max_terms=3), dict(lam=1.0, reference="middle"),
    ])
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            SeriesSchedule(**kwargs)


class TestRayFunctional:

    def test_positive_on_grid(self, wide_pair, quad_fast):
        for phi in np.linspace(0.05, math.pi - 0.05, 7):
            assert L_phi(wide_pair[0], float(phi), quad_fast) >= 0.0

    def test_rejects_angle_outside_range(self, wide_pair, quad_fast):
        with pytest.raises(ValueError):
            L_phi(wide_pair[0], -0.1, quad_fast)
        with pytest.raises(ValueError):
            L_phi(wide_pair[0], math.pi + 0.1, quad_fast)

    def test_unit_circle_matches_ray(self, wide_pair, quad_fast):
        # F at |z| = 1 pairs z with 1/zbar = z, so it IS the ray value
        f = wide_pair[0]
        for phi in (0.3, 1.2, 2.6):
            ray = L_phi(f, phi, quad_fast)
            cont = F_z(f, complex(math.cos(phi), math.sin(phi)), 0.0,
                       quad_fast)
            assert cont.real == pytest.approx(ray, rel=1e-12)
            assert abs(cont.imag) <= 1e-12 * ray

    def test_deformed_continuation_identity(self, wide_pair, quad_mid):
        # F(z) = z^{3 alpha} F_alpha(z) on the overlap sector
        f = wide_pair[0]
        z = complex(0.9, 0.7)
        base = F_z(f, z, 0.0, quad_mid)
        for alpha in (0.25, 1.0 / 3.0):
            deformed = F_z(f, z, alpha, quad_mid)
            assert z ** (3 * alpha) * deformed == pytest.approx(base,
                                                                rel=1e-7)

    def test_continuation_domain_errors(self, wide_pair, quad_fast):
        f = wide_pair[0]
        with pytest.raises(ValueError):
            F_z(f, 0.0, 0.0, quad_fast)
        with pytest.raises(ValueError):
            F_z(f, complex(1.0, -0.5), 0.0, quad_fast)
        with pytest.raises(ValueError):
            F_z(f, complex(0.0, 1.0), 1.0, quad_fast)
        # alpha = 0.5 shrinks the sector to arg z < 2 pi / 3
        with pytest.raises(ValueError):
            F_z(f, complex(math.cos(2.2), math.sin(2.2)), 0.5, quad_fast)


class TestSeriesAssembly:

    def test_ordering_sum_is_anticommutator(self, wide_pair, quad_fast):
        f, g = wide_pair[0].conjugate(), wide_pair[1]
        pair = two_point_series_pair(f, g, SeriesSchedule(lam=0.7, tol=1e-8),
                                     quad_fast)
        total = pair[Ordering.PSIBAR_PSI][0] + pair[Ordering.PSI_PSIBAR][0]
        assert total == pytest.approx(anticommutator(g, f, quad_fast),
                                      rel=1e-12)

    def test_state_dispatch_matches_series(self, wide_pair, quad_fast):
        f, g = wide_pair[0].conjugate(), wide_pair[1]
        sched = SeriesSchedule(lam=0.6, tol=quad_fast.tol)
        via_state = two_point(StateSpec.hotbang(0.6), f, g,
                              Ordering.PSIBAR_PSI, quad_fast)
        direct, _ = two_point_series(f, g, sched, Ordering.PSIBAR_PSI,
                                     quad_fast)
        assert via_state == direct

    def test_self_pairing_real_nonnegative(self, wide_pair, quad_fast):
        for lam in (0.25, 1.0, 4.0):
            value, bound = hotbang_smeared(wide_pair[0], lam, cfg=quad_fast)
            assert value >= -bound
            # bound carries a cfg.tol allowance keyed to the leading term
            assert bound <= 10 * quad_fast.tol * max(abs(value), 1e-300)

    def test_scaling_covariance(self, wide_pair, quad_fast):
        # bilinear in (fbar, f): amplitudes enter as |c|^2
        c = 1.3 - 0.7j
        base, _ = hotbang_smeared(wide_pair[0], 0.5, cfg=quad_fast)
        scaled, _ = hotbang_smeared(wide_pair[0].scaled(c), 0.5,
                                    cfg=quad_fast)
        assert scaled == pytest.approx(abs(c) ** 2 * base, rel=1e-12)

    def test_bracketed_matches_plain(self, wide_pair, quad_fast):
        f = wide_pair[0]
        kw = dict(lam=0.04, tol=1e-7)
        vb, eb = two_point_series(f.conjugate(), f,
                                  SeriesSchedule(bracketed=True, **kw),
                                  Ordering.PSIBAR_PSI, quad_fast)
        vp, ep = two_point_series(f.conjugate(), f,
                                  SeriesSchedule(bracketed=False, **kw),
                                  Ordering.PSIBAR_PSI, quad_fast)
        assert abs(vb - vp) <= max(eb + ep, 1e-10 * abs(vb))

    def test_remainder_drops_exactly_the_leading_term(self, wide_pair,
                                                      quad_fast):
        # n = 0 term is the limit state's value, so full - remainder = vacuum
        f = wide_pair[0]
        sched = SeriesSchedule(lam=0.5, tol=1e-9)
        full, fb = two_point_series(f.conjugate(), f, sched,
                                    Ordering.PSIBAR_PSI, quad_fast)
        rem, rb = normal_ordered_remainder(f.conjugate(), f, sched,
                                           Ordering.PSIBAR_PSI, quad_fast)
        vac = two_point(StateSpec.vacuum(), f.conjugate(), f,
                        Ordering.PSIBAR_PSI, quad_fast)
        assert abs((full - rem) - vac) <= max(fb + rb, 1e-10 * abs(vac))


class TestConvexProfile:

    def test_series_tables_reuse_engine_terms(self, wide_pair, quad_fast):
        f = wide_pair[0]
        sched = SeriesSchedule(lam=0.8, tol=1e-8)
        from_tables = ConvexProfile.from_series_tables(f, sched, quad_fast)
        direct = ConvexProfile.from_test_function(f, quad_fast)
        scale = direct(float(sched.phi(0)))
        # same quadrature up to summation order at n = 0; later angles differ
        # only by the two routes' grids, far below the leading scale
        assert from_tables(float(sched.phi(0))) == pytest.approx(scale,
                                                                 rel=1e-12)
        for n in (1, 3):
            phi = float(sched.phi(n))
            assert abs(from_tables(phi) - direct(phi)) <= 1e-7 * scale

    def test_spot_check_reports_positive_convex(self, wide_pair, quad_fast):
        prof = ConvexProfile.from_test_function(wide_pair[0], quad_fast)
        report = prof.spot_check(n=21)
        assert report["positive"]
        assert report["midpoint_convex"]
        assert report["scale"] > 0

    def test_synthetic_tag(self):
        prof = ConvexProfile.synthetic("cosh", lambda p: math.cosh(p - 1.5))
        assert prof.provenance == "Synthetic(cosh)"
        assert prof(1.5) == 1.0


class TestSeriesTerms:

    def test_constant_profile_telescopes(self):
        # brackets g(phi_n) + g(phi_{n+1}) telescope to g(0) = c
        c = 2.75
        prof = ConvexProfile.synthetic("const", lambda p: c)
        sched = SeriesSchedule(lam=0.8, tol=1e-9)
        res = series_terms(prof, sched, which="A")
        assert res.value == pytest.approx(c, abs=50 * sched.tol * c)
        assert res.error_bound <= sched.tol * c * (1 + c)
        assert res.n_terms == len(res.partial_sums)

    def test_partial_sums_bracket_the_value(self):
        prof = ConvexProfile.synthetic("decay", lambda p: math.exp(-p))
        res = series_terms(prof, SeriesSchedule(lam=0.6, tol=1e-8),
                           which="B")
        ps = np.array(res.partial_sums)
        evens, odds = ps[0::2], ps[1::2]
        assert np.all(evens >= res.value - res.error_bound)
        assert np.all(odds <= res.value + res.error_bound)

    def test_zero_profile_short_circuits(self):
        prof = ConvexProfile.synthetic("zero", lambda p: 0.0)
        res = series_terms(prof, SeriesSchedule(lam=1.0))
        assert res.value == 0.0
        assert res.n_terms == 2

    def test_rejects_unknown_branch(self):
        prof = ConvexProfile.synthetic("const", lambda p: 1.0)
        with pytest.raises(ValueError):
            series_terms(prof, SeriesSchedule(lam=1.0), which="C")


class TestLogConvexity:

    def test_bump_passes_on_grid(self, wide_pair, quad_fast):
        phis = np.linspace(0.2, math.pi - 0.2, 9)
        report = log_convexity_check(wide_pair[0], phis, 0.01, quad_fast)
        assert report.verdict in ("pass", "warn")
        assert report.worst_violation < report.warn_level
        assert len(report.l_values) == len(phis)
        assert all(v >= 0 for v in report.l_values)

    def test_zero_function_gets_zero_verdict(self, wide_pair, quad_fast):
        report = log_convexity_check(wide_pair[0].scaled(0.0),
                                     [1.0, 2.0], 0.01, quad_fast)
        assert report.verdict == "zero"

    def test_grid_validation(self, wide_pair, quad_fast):
        with pytest.raises(ValueError):
            log_convexity_check(wide_pair[0], [], 0.01, quad_fast)
        with pytest.raises(ValueError):
            log_convexity_check(wide_pair[0], [0.005], 0.01, quad_fast)
        with pytest.raises(ValueError):
            log_convexity_check(wide_pair[0], [math.pi - 0.001], 0.01,
                                quad_fast)
