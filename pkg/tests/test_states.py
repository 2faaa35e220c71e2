"""Two-point functionals of the four state variants."""

import json

import jsonschema
import numpy as np
import pytest

from fermihot.minkowski import FourVector
from fermihot.quad import QuadConfig
from fermihot.states import (Ordering, STATE_SCHEMA, StateSpec,
                             anticommutator, kernel_double_smear,
                             kernel_on_deltas, state_from_dict, state_to_dict,
                             two_point, two_point_direct_psi_psibar,
                             weyl_null_check)


BETA = FourVector(2.0, 0.3, 0.0, -0.4)


class TestOrderingIdentities:
    def test_sum_is_anticommutator_by_construction(self, bump, quad_fast):
        f, g = bump.conjugate(), bump
        kms = StateSpec.kms(BETA)
        total = (two_point(kms, f, g, Ordering.PSIBAR_PSI, quad_fast)
                 + two_point(kms, f, g, Ordering.PSI_PSIBAR, quad_fast))
        assert total == anticommutator(g, f, quad_fast)

    def test_direct_route_agrees(self, wide_pair, quad_fast):
        # independently quadrature'd psi-psibar vs the CAR-derived one
        f, g = wide_pair
        for omega in (StateSpec.vacuum(), StateSpec.kms(BETA)):
            car = two_point(omega, f, g, Ordering.PSI_PSIBAR, quad_fast)
            direct = two_point_direct_psi_psibar(omega, f, g, quad_fast)
            assert abs(car - direct) <= 1e-8 * abs(
                anticommutator(g, f, quad_fast))

    def test_anticommutator_state_independent(self, bump, quad_fast):
        f, g = bump.conjugate(), bump
        vals = []
        for omega in (StateSpec.vacuum(), StateSpec.kms(BETA),
                      StateSpec.mixture([(0.25, FourVector(1.0, 0, 0, 0)),
                                         (0.75, BETA)])):
            vals.append(two_point(omega, f, g, Ordering.PSIBAR_PSI, quad_fast)
                        + two_point(omega, f, g, Ordering.PSI_PSIBAR,
                                    quad_fast))
        assert vals[0] == vals[1] == vals[2]


class TestKmsLimits:
    def test_cold_limit_reaches_vacuum(self, wide_pair, quad_mid):
        # beta = 50 e_0 against the vacuum, off-diagonal pair
        f, g = wide_pair
        cold = two_point(StateSpec.kms(FourVector(50.0, 0, 0, 0)), f, g,
                         Ordering.PSIBAR_PSI, quad_mid)
        vac = two_point(StateSpec.vacuum(), f, g, Ordering.PSIBAR_PSI,
                        quad_mid)
        scale = abs(anticommutator(g, f, quad_mid))
        assert abs(cold - vac) <= 1e-6 * scale

    def test_hot_correction_monotone_in_temperature(self, wide_pair,
                                                    quad_mid):
        f, g = wide_pair
        vac = two_point(StateSpec.vacuum(), f, g, Ordering.PSIBAR_PSI,
                        quad_mid)
        gaps = []
        for b0 in (0.4, 0.8, 1.6):
            kms = StateSpec.kms(FourVector(b0, 0, 0, 0))
            gaps.append(abs(two_point(kms, f, g, Ordering.PSIBAR_PSI,
                                      quad_mid) - vac))
        assert gaps[0] > gaps[1] > gaps[2] > 0

    def test_single_term_diagonal_thermal_part_cancels(self, wide_pair,
                                                       quad_mid):
        """On (conj f, f) with one bump term the two shell branches carry
        equal weight pointwise (the axis profiles are real and even), so the
        Fermi factors sum out and every KMS state returns the vacuum value:
        the smeared bilinear is charge-like and the ensemble is neutral.
        Cross terms of multi-term bumps break the branch symmetry, which is
        what the hot-monotone test above relies on."""
        f = wide_pair[0]
        pair = (f.conjugate(), f)
        vac = two_point(StateSpec.vacuum(), *pair, Ordering.PSIBAR_PSI,
                        quad_mid)
        for b0 in (0.05, 0.5, 5.0):
            kms = StateSpec.kms(FourVector(b0, 0, 0, 0))
            val = two_point(kms, *pair, Ordering.PSIBAR_PSI, quad_mid)
            assert abs(val - vac) <= 1e-12 * abs(vac)


def test_mixture_is_convex_combination(wide_pair, quad_fast):
    f, g = wide_pair
    b1, b2 = FourVector(0.6, 0, 0, 0), FourVector(1.1, 0.2, 0, 0)
    mix = StateSpec.mixture([(0.3, b1), (0.7, b2)])
    lhs = two_point(mix, f, g, Ordering.PSIBAR_PSI, quad_fast)
    rhs = (0.3 * two_point(StateSpec.kms(b1), f, g, Ordering.PSIBAR_PSI,
                           quad_fast)
           + 0.7 * two_point(StateSpec.kms(b2), f, g, Ordering.PSIBAR_PSI,
                             quad_fast))
    assert lhs == pytest.approx(rhs, rel=1e-14)


def test_hotbang_branch_routes_through_series(bump, quad_fast):
    from fermihot.hotbang import SeriesSchedule, two_point_series
    hb = StateSpec.hotbang(1.0)
    via_state = two_point(hb, bump.conjugate(), bump, Ordering.PSIBAR_PSI,
                          quad_fast)
    via_series, _ = two_point_series(bump.conjugate(), bump,
                                     SeriesSchedule(lam=1.0, tol=quad_fast.tol),
                                     Ordering.PSIBAR_PSI, quad_fast)
    assert via_state == via_series


class TestKernel:
    def test_kernel_shape_and_hermiticity(self, quad_fast):
        deltas = np.array([[0.1, 0.0, 0.0, 0.0],
                           [0.3, 0.1, -0.2, 0.0]])
        atoms = [(1.0, BETA)]
        mat = kernel_on_deltas(atoms, deltas, quad_fast)
        assert mat.shape == (2, 2, 2)
        flipped = kernel_on_deltas(atoms, -deltas, quad_fast)
        # reflection delta -> -delta is the kernel adjoint, node for node
        assert np.array_equal(flipped, np.conj(np.swapaxes(mat, 1, 2)))

    def test_double_smear_matches_smeared_difference(self, wide_pair):
        f, g = wide_pair
        beta = FourVector(0.5, 0.0, 0.0, 0.0)
        kms = StateSpec.kms(beta)
        ref_cfg = QuadConfig(48, 16, 24, tol=1e-8)
        want = (two_point(kms, f, g, Ordering.PSIBAR_PSI, ref_cfg)
                - two_point(StateSpec.vacuum(), f, g, Ordering.PSIBAR_PSI,
                            ref_cfg))
        got = kernel_double_smear(kms, f, g, QuadConfig(24, 8, 12, tol=1e-6),
                                  points_per_width=5)
        assert abs(got - want) <= 5e-3 * abs(want)

    def test_double_smear_rejects_hotbang(self, wide_pair, quad_fast):
        with pytest.raises(ValueError):
            kernel_double_smear(StateSpec.hotbang(1.0), *wide_pair, quad_fast)


def test_weyl_null_all_states(bump, quad_fast):
    f, g = bump.conjugate(), bump
    mix = StateSpec.mixture([(0.5, BETA), (0.5, FourVector(1.0, 0, 0, 0))])
    for omega in (StateSpec.vacuum(), StateSpec.kms(BETA), mix,
                  StateSpec.hotbang(0.5)):
        rep = weyl_null_check(omega, f, g, quad_fast)
        assert rep["psi"] <= 1e-12 * rep["scale"]
        assert rep["psibar"] <= 1e-12 * rep["scale"]


class TestSerialization:
    @pytest.mark.parametrize("omega", [
        StateSpec.vacuum(),
        StateSpec.kms(BETA),
        StateSpec.mixture([(0.25, FourVector(1.0, 0, 0, 0)), (0.75, BETA)]),
        StateSpec.hotbang(2.0),
    ])
    def test_round_trip(self, omega):
        d = state_to_dict(omega)
        jsonschema.validate(d, STATE_SCHEMA)
        json.dumps(d)                       # plain JSON types only
        assert state_from_dict(d) == omega

    def test_schema_rejects_bad_specs(self):
        for bad in ({"kms": {}},
                    {"hotbang": {"lambda": 0.0}},
                    {"hotbang": {"lambda": -1.0}},
                    {"vacuum": {}, "kms": {"beta": [1, 0, 0, 0]}},
                    {"mixture": {"atoms": []}}):
            with pytest.raises(jsonschema.ValidationError):
                jsonschema.validate(bad, STATE_SCHEMA)

    def test_from_dict_validates_cone(self):
        with pytest.raises(ValueError):
            state_from_dict({"kms": {"beta": [0.5, 1.0, 0.0, 0.0]}})
