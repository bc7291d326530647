import math

import numpy as np
import pytest

from tangle_lab import (
    BracketError,
    Ensemble,
    MeasureEvaluationError,
    UnsupportedExponentError,
    appendix_envelope,
    appendix_family,
    appendix_phi0,
    appendix_target,
    appendix_tau3,
    appendix_zeros,
    characteristic_curves,
    ghz3w3_family,
    ghzw4_family,
    lower_convex_envelope,
    n1,
    n1_inf_anchor,
    n1_roof_ghzw4,
    n1_star_breakpoint,
    n2,
    n2_inf_anchors,
    n2_roof_ghzw4,
    n2_star_breakpoint,
    named_state,
    nu_star,
    partial_trace,
    reduced_tripartite_spectral,
    rho4_ghzw4,
    solve_roof_ghzw4,
    spectral_ensemble,
    stationary_mix_point,
    t1,
    t1_roof_ghzw4,
    tau_reduced_upper_bound,
    three_tangle_pure,
    verify_decomposition,
)
from tangle_lab.roof import (
    bisect_root,
    golden_minimize,
    n1_curve_ghzw4,
    n2_curve_ghzw4,
    t1_curve_ghzw4,
)
from tangle_lab.errors import SingularFamilyError

SQRT6 = math.sqrt(6.0)


class TestScalarSearch:
    def test_golden_on_quadratic(self):
        assert golden_minimize(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-10) == pytest.approx(
            0.3, abs=1e-8
        )

    def test_bisect_on_line(self):
        assert bisect_root(lambda x: x - 0.7, 0.0, 1.0, 1e-12) == pytest.approx(
            0.7, abs=1e-10
        )

    def test_bisect_requires_sign_change(self):
        with pytest.raises(BracketError):
            bisect_root(lambda x: 1.0 + x * x, 0.0, 1.0)

    def test_stationary_point_needs_interior_minimum(self):
        with pytest.raises(BracketError):
            stationary_mix_point(lambda p, a: a, (0.1, 0.9))


class TestEnvelope:
    def test_convex_input_is_fixed_point(self):
        xs = np.linspace(0.0, 1.0, 101)
        ys = (xs - 0.4) ** 2
        env, _ = lower_convex_envelope(xs, ys)
        assert np.abs(env - ys).max() < 1e-12

    def test_tent_collapses_to_chord(self):
        xs = np.linspace(0.0, 1.0, 101)
        ys = 1.0 - np.abs(xs - 0.5) * 2
        env, vertices = lower_convex_envelope(xs, ys)
        assert np.abs(env - 0.0).max() < 1e-12
        assert [v[0] for v in vertices] == [0.0, 1.0]

    def test_exact_at_vertices(self):
        xs = np.linspace(0.0, 1.0, 51)
        rng = np.random.default_rng(7)
        ys = rng.random(51)
        env, vertices = lower_convex_envelope(xs, ys)
        for x, y in vertices:
            assert env[np.searchsorted(xs, x)] == pytest.approx(y, abs=1e-14)
        assert np.all(env <= ys + 1e-14)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            lower_convex_envelope([0.0, 0.5], [1.0, 2.0])
        with pytest.raises(ValueError):
            lower_convex_envelope([0.0, 0.5, 1.0], [1.0, np.nan, 2.0])


class TestCharacteristicCurves:
    def test_t1_phase_independent_on_ghzw4(self):
        curves = characteristic_curves(
            ghzw4_family(), t1, np.linspace(0.0, 1.0, 21),
            np.array([0.0, np.pi / 3, np.pi]),
        )
        spread = (curves.values.max(axis=1) - curves.values.min(axis=1)).max()
        assert spread < 1e-9
        assert np.allclose(curves.min_curve, curves.values.min(axis=1))

    def test_z3_tangle_touches_zero_near_known_point(self):
        def tangle(state):
            value, _ = three_tangle_pure(state)
            return value

        location = golden_minimize(
            lambda p: tangle(ghz3w3_family().generate(p, 0.0)), 0.5, 0.75, 1e-9
        )
        assert abs(location - 0.627) < 5e-3
        assert tangle(ghz3w3_family().generate(location, 0.0)) < 1e-9

    def test_measure_failure_carries_grid_context(self):
        def broken(state):
            raise RuntimeError("boom")

        with pytest.raises(MeasureEvaluationError, match="p=0.0"):
            characteristic_curves(ghzw4_family(), broken, [0.0, 1.0], [0.0])

    def test_appendix_zero_on_curve(self):
        value, _ = appendix_tau3(0.5, 0.0)
        assert value < 1e-12


class TestNonConvexityWitnesses:
    def test_t1_curve_fails_midpoint_test_in_both_regions(self):
        ps = np.linspace(0.0, 1.0, 2001)
        values = np.array([t1_curve_ghzw4(p) for p in ps])
        second = values[:-2] + values[2:] - 2 * values[1:-1]
        bad = ps[1:-1][second < -1e-9]
        assert bad.size and bad.min() < 0.279 + 0.05
        assert bad.max() > 0.936 - 0.05

    def test_n2_inf_curve_fails_midpoint_test_in_both_regions(self):
        ps = np.linspace(0.0, 1.0, 2001)
        values = np.array([n2_curve_ghzw4(p, math.inf) for p in ps])
        second = values[:-2] + values[2:] - 2 * values[1:-1]
        bad = ps[1:-1][second < -1e-9]
        assert bad.size and bad.min() < 0.25 + 0.05
        assert bad.max() > 0.95 - 0.05


class TestBreakpointsAndAnchors:
    def test_n1_star_breakpoint(self):
        assert abs(n1_star_breakpoint() - 0.749596) < 1e-4

    def test_n2_star_breakpoint(self):
        assert abs(n2_star_breakpoint() - 0.57731) < 1e-4

    def test_n1_inf_anchor(self):
        assert abs(n1_inf_anchor() - 0.84) < 0.01

    def test_n2_inf_anchors(self):
        lower, upper = n2_inf_anchors()
        assert abs(lower - 0.72) < 0.01
        assert abs(upper - 0.92) < 0.01

    def test_curves_hit_zero_at_breakpoints(self):
        star1, star2 = nu_star()
        assert abs(n1_curve_ghzw4(n1_star_breakpoint(), star1)) < 1e-9
        assert abs(n2_curve_ghzw4(n2_star_breakpoint(), star2)) < 1e-9


class TestRoofPoints:
    def test_t1_roof_is_line_with_spectral_ensemble(self):
        for p in (0.0, 0.5, 1.0):
            point = t1_roof_ghzw4(p)
            assert point.value == p
            ok, _ = verify_decomposition(point.ensemble, rho4_ghzw4(p))
            assert ok
        assert len(t1_roof_ghzw4(0.0).ensemble.members) == 1

    def test_n1_star_segments(self):
        star1, _ = nu_star()
        zero_region = n1_roof_ghzw4(0.5, star1)
        assert zero_region.value == 0.0
        assert zero_region.segment == "w4-mix"
        curved = n1_roof_ghzw4(0.9, star1)
        assert curved.segment == "curve"
        assert curved.value == pytest.approx(n1_curve_ghzw4(0.9, star1), abs=1e-12)

    def test_n1_inf_value_at_endpoint(self):
        assert n1_roof_ghzw4(1.0, math.inf).value == pytest.approx(1.0, abs=1e-10)

    def test_n2_inf_three_segments(self):
        lower, upper = n2_inf_anchors()
        assert n2_roof_ghzw4(lower / 2, math.inf).segment == "w4-mix"
        assert n2_roof_ghzw4((lower + upper) / 2, math.inf).segment == "curve"
        assert n2_roof_ghzw4((upper + 1) / 2, math.inf).segment == "ghz4-mix"
        assert n2_roof_ghzw4(1.0, math.inf).value == pytest.approx(1.0, abs=1e-10)

    def test_star_roofs_vanish_on_zero_segment(self):
        star1, star2 = nu_star()
        for p in np.linspace(0.0, n1_star_breakpoint(), 7):
            assert n1_roof_ghzw4(p, star1).value == 0.0
        for p in np.linspace(0.0, n2_star_breakpoint(), 7):
            assert n2_roof_ghzw4(p, star2).value == 0.0

    def test_decompositions_reproduce_target(self):
        star1, star2 = nu_star()
        scenarios = [
            (lambda p: t1_roof_ghzw4(p)),
            (lambda p: n1_roof_ghzw4(p, star1)),
            (lambda p: n1_roof_ghzw4(p, math.inf)),
            (lambda p: n2_roof_ghzw4(p, star2)),
            (lambda p: n2_roof_ghzw4(p, math.inf)),
        ]
        for point_fn in scenarios:
            for p in np.linspace(0.0, 1.0, 11):
                ok, deviation = verify_decomposition(point_fn(p).ensemble, rho4_ghzw4(p))
                assert ok, deviation

    def test_ensemble_average_achieves_roof_value(self):
        star1, star2 = nu_star()
        for p in (0.2, 0.6, 0.85, 0.97):
            point = n1_roof_ghzw4(p, star1)
            assert n1(point.ensemble, star1) == pytest.approx(point.value, abs=1e-9)
            point = n2_roof_ghzw4(p, math.inf)
            assert n2(point.ensemble, math.inf) == pytest.approx(point.value, abs=1e-9)
            point = t1_roof_ghzw4(p)
            average = sum(w * t1(member) for w, member in point.ensemble.members)
            assert average == pytest.approx(point.value, abs=1e-9)

    def test_unsupported_exponent(self):
        with pytest.raises(UnsupportedExponentError):
            n1_roof_ghzw4(0.5, 1.7)
        with pytest.raises(UnsupportedExponentError):
            n2_roof_ghzw4(0.5, 3.0)

    def test_out_of_range_p(self):
        with pytest.raises(ValueError):
            t1_roof_ghzw4(1.2)


class TestSolvedRoofs:
    @pytest.mark.parametrize("scenario,nu_kind", [
        ("t1", None), ("n1", "star"), ("n1", "inf"), ("n2", "star"), ("n2", "inf"),
    ])
    def test_solutions_are_certified(self, scenario, nu_kind):
        nu = None
        if nu_kind == "star":
            nu = nu_star()[0 if scenario == "n1" else 1]
        elif nu_kind == "inf":
            nu = math.inf
        result = solve_roof_ghzw4(scenario, nu, np.linspace(0.0, 1.0, 401))
        assert result.max_decomposition_deviation < 1e-9
        assert np.all(result.certificate >= -1e-12)
        assert not result.conjectured
        for bp in result.breakpoints:
            assert np.isclose(result.p_grid, bp, atol=1e-15).any()
        # the roof follows the characteristic curve exactly on curve segments
        for label, lo, hi in result.segments:
            if label in ("curve", "spectral"):
                continue
            edge = result.p_grid[np.isclose(result.p_grid, hi if label == "w4-mix" else lo)]
            assert edge.size
        for label, lo, hi in result.segments:
            if label == "curve":
                mask = (result.p_grid >= lo) & (result.p_grid <= hi)
                assert np.abs(result.values[mask] - result.min_curve[mask]).max() < 1e-9

    def test_missing_nu_rejected(self):
        with pytest.raises(UnsupportedExponentError):
            solve_roof_ghzw4("n1", None)


class TestReducedTripartite:
    def test_reconstruction_over_parameter_grid(self, rng):
        worst = 0.0
        for _ in range(50):
            p = rng.uniform(0.02, 1.0)
            phi = rng.uniform(0.0, 2 * np.pi)
            spectral = reduced_tripartite_spectral(p, phi)
            target = partial_trace(named_state("Z4", p, phi), (0, 1, 2))
            worst = max(worst, np.abs(
                spectral.reconstruction().matrix - target.matrix).max())
        assert worst < 1e-9

    def test_all_single_qubit_traces_agree(self):
        p, phi = 0.45, 0.9
        spectral = reduced_tripartite_spectral(p, phi)
        psi = named_state("Z4", p, phi)
        for keep in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
            target = partial_trace(psi, keep)
            assert np.abs(spectral.reconstruction().matrix - target.matrix).max() < 1e-9

    def test_ghz_endpoint(self):
        spectral = reduced_tripartite_spectral(1.0, 0.0)
        assert spectral.lam == pytest.approx(0.5, abs=1e-12)
        target = partial_trace(named_state("GHZ4"), (0, 1, 2))
        assert np.abs(spectral.reconstruction().matrix - target.matrix).max() < 1e-12

    def test_member_tangles_match_closed_form(self):
        from tangle_lab import residual_reduced_pure

        for p, phi in ((0.3, 0.0), (0.7, 1.2), (1.0, 2.0)):
            spectral = reduced_tripartite_spectral(p, phi)
            for branch, member in ((+1, spectral.psi_plus), (-1, spectral.psi_minus)):
                direct, _ = three_tangle_pure(member)
                assert residual_reduced_pure(p, phi, branch) == pytest.approx(
                    direct, abs=1e-9
                )

    def test_upper_bound_is_member_average(self):
        from tangle_lab import residual_reduced_pure

        p, phi = 0.55, 0.4
        spectral = reduced_tripartite_spectral(p, phi)
        expected = spectral.lam * residual_reduced_pure(p, phi, +1) \
            + (1 - spectral.lam) * residual_reduced_pure(p, phi, -1)
        assert tau_reduced_upper_bound(p, phi) == pytest.approx(expected, abs=1e-12)

    def test_singular_parameter(self):
        with pytest.raises(SingularFamilyError):
            reduced_tripartite_spectral(1e-9, 0.0)


class TestAppendix:
    def test_zeros_match_known_table(self):
        zeros = appendix_zeros()
        phi0 = appendix_phi0()
        assert abs(phi0 - 1.27672) < 1e-4
        expected = [
            (0.0163588, math.pi),
            (0.5, 0.0),
            (0.74182, math.pi - phi0),
            (0.74182, math.pi + phi0),
        ]
        for (p_got, phi_got), (p_exp, phi_exp) in zip(zeros, sorted(expected)):
            assert abs(p_got - p_exp) < 1e-4
            assert abs(phi_got - phi_exp) < 1e-4

    def test_zero_values_vanish(self):
        for p, phi in appendix_zeros():
            value, _ = appendix_tau3(p, phi)
            assert value < 1e-7

    def test_both_forms_match_direct_tangle(self):
        family = appendix_family()
        for p in np.linspace(0.01, 1.0, 23):
            for phi in np.linspace(0.0, 2 * np.pi, 17):
                value, params = appendix_tau3(p, phi)
                direct, _ = three_tangle_pure(family.generate(p, phi))
                assert abs(value - direct) < 1e-9
                assert params.z is not None

    def test_finite_at_origin(self):
        value, params = appendix_tau3(0.0, 1.3)
        expected, _ = three_tangle_pure(named_state("psi2_app"))
        assert value == pytest.approx(expected, abs=1e-12)
        assert params.z is None

    def test_phase_reflection_symmetry(self, rng):
        phi0 = appendix_phi0()
        for _ in range(25):
            p = rng.uniform(0.0, 1.0)
            for n in (0, 1, 2):
                left, _ = appendix_tau3(p, n * math.pi + phi0)
                right, _ = appendix_tau3(p, n * math.pi - phi0)
                assert abs(left - right) < 1e-10

    def test_envelope_vanishes_between_outer_zeros(self):
        result = appendix_envelope(np.linspace(0.0, 1.0, 801),
                                   np.linspace(0.0, 2 * math.pi, 361))
        assert result.conjectured
        zeros = appendix_zeros()
        inner = (result.p_grid >= zeros[0][0]) & (result.p_grid <= zeros[-1][0])
        assert result.values[inner].max() < 1e-9

    def test_envelope_respects_mixing_bound(self):
        result = appendix_envelope(np.linspace(0.0, 1.0, 401),
                                   np.linspace(0.0, 2 * math.pi, 181))
        bound = result.p_grid / 2 + (8 * SQRT6 - 9) / 36
        assert np.all(result.values <= bound + 1e-9)
        # the bound is tight at the pure endpoint p = 1
        assert result.values[-1] == pytest.approx(bound[-1], abs=1e-9)

    def test_conjectured_result_has_no_decompositions(self):
        result = appendix_envelope(np.linspace(0.0, 1.0, 11), np.linspace(0.0, 6.28, 5))
        with pytest.raises(Exception):
            result.point(0.5)


class TestVerifyDecomposition:
    def test_phase_pair_reproduces_mixture(self):
        fam = ghzw4_family()
        ensemble = Ensemble.of([
            (0.5, fam.generate(0.9, 0.0)), (0.5, fam.generate(0.9, math.pi)),
        ])
        ok, deviation = verify_decomposition(ensemble, rho4_ghzw4(0.9))
        assert ok and deviation < 1e-12

    def test_appendix_cross_terms_break_the_candidate(self):
        p3 = appendix_zeros()[-1][0]
        phi0 = appendix_phi0()
        fam = appendix_family()
        candidate = Ensemble.of([
            (0.5, fam.generate(p3, math.pi - phi0)),
            (0.5, fam.generate(p3, math.pi + phi0)),
        ])
        ok, deviation = verify_decomposition(candidate, appendix_target(p3))
        assert not ok
        assert deviation > 1e-3

    def test_spectral_ensemble_verifies(self):
        target = rho4_ghzw4(0.37)
        ok, deviation = verify_decomposition(spectral_ensemble(target), target)
        assert ok and deviation < 1e-10
