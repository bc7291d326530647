import math
from itertools import permutations

import numpy as np
import pytest

from tangle_lab import (
    Ensemble,
    InvalidStateError,
    PowerFactors,
    UNSUPPORTED,
    check_monogamy_tofv,
    closed_form_concurrence_Z4,
    n1,
    n1_reports,
    n2,
    n2_reports,
    named_state,
    nu_star,
    random_pure_state,
    t1,
    t1_reports,
    t2,
    t2_reports,
)
from tangle_lab.monogamy import regulated_power

SQRT2, SQRT3 = math.sqrt(2.0), math.sqrt(3.0)


def w4_n1_closed(nu):
    tail = 0.0 if math.isinf(nu) else ((3 - 2 * SQRT2) / 2) ** nu
    return (3 + SQRT3 - 3 * SQRT2) / 2 - 3 * tail


def w4_n2_closed(nu):
    tail = 0.0 if math.isinf(nu) else ((4 * SQRT2 - 5) / 4) ** nu
    return 1.5 * (SQRT2 - 1) - 3 * tail


class TestThresholdExponents:
    def test_printed_values(self):
        star1, star2 = nu_star()
        assert abs(star1 - 1.02053) < 5e-6
        assert abs(star2 - 0.871544) < 5e-7

    def test_w4_vanishes_at_thresholds(self):
        star1, star2 = nu_star()
        w4 = named_state("W4")
        assert abs(n1(w4, star1)) < 1e-9
        assert abs(n2(w4, star2)) < 1e-9


class TestT1:
    def test_named_values(self):
        assert t1(named_state("GHZ4")) == pytest.approx(1.0, abs=1e-12)
        assert t1(named_state("W4")) == pytest.approx(0.0, abs=1e-12)
        assert t1(named_state("g3")) == pytest.approx(0.75, abs=1e-12)

    def test_matches_reports(self, rng):
        psi = random_pure_state(4, rng)
        reports = t1_reports(psi)
        assert len(reports) == 4
        assert t1(psi) == pytest.approx(
            sum(r.leftover for r in reports) / 4, abs=1e-12
        )

    def test_report_structure(self):
        reports = t1_reports(named_state("GHZ4"))
        for report in reports:
            assert set(report.pairwise) == {
                tuple(sorted((report.focus, q))) for q in range(4) if q != report.focus
            }
            recomputed = report.one_vs_rest - sum(report.pairwise.values()) \
                - sum(report.triple_terms.values())
            assert recomputed == report.leftover

    def test_z4_identity_with_closed_form(self):
        for p in np.linspace(0.0, 1.0, 100):
            c, _ = closed_form_concurrence_Z4(p)
            expected = (3 + p * p) / 4 - 3 * c * c
            for phi in (0.0, 1.3, np.pi):
                assert t1(named_state("Z4", p, phi)) == pytest.approx(expected, abs=1e-9)

    def test_wrong_size(self, rng):
        with pytest.raises(InvalidStateError):
            t1(random_pure_state(3, rng))


class TestT2:
    def test_named_values(self):
        assert t2(named_state("GHZ4")) == pytest.approx(1.0, abs=1e-9)
        assert t2(named_state("W4")) == pytest.approx(0.0, abs=1e-9)
        assert t2(named_state("Phi2")) == pytest.approx(1.0, abs=1e-9)
        assert t2(named_state("Phi3")) == pytest.approx(1.0, abs=1e-9)
        assert t2(named_state("g3")) == pytest.approx(0.0, abs=1e-9)

    def test_generic_superposition_unsupported(self):
        assert t2(named_state("Z4", 0.5, 0.3)) is UNSUPPORTED
        assert t2_reports(named_state("Z4", 0.5, 0.3)) is UNSUPPORTED

    def test_mu_exponent_change_keeps_special_values(self):
        factors = PowerFactors(mu3=2.5)
        assert t2(named_state("Phi3"), factors) == pytest.approx(1.0, abs=1e-9)
        assert t2(named_state("g3"), factors) == pytest.approx(0.0, abs=1e-9)


class TestTableTwo:
    CASES = {
        "GHZ4": (1.0, 1.0, lambda nu: 1.0, lambda nu: 1.0),
        "Phi2": (1.0, 1.0,
                 lambda nu: 1 - 3 * (0.0 if math.isinf(nu) else (2 / 3) ** nu),
                 lambda nu: 1 - 3 * (0.0 if math.isinf(nu) else (4 / 9) ** nu)),
        "Phi3": (1.0, 1.0, lambda nu: -1.0, lambda nu: -1.0),
        "W4": (0.0, 0.0, w4_n1_closed, w4_n2_closed),
    }

    @pytest.mark.parametrize("name", sorted(CASES))
    def test_all_cells(self, name):
        t1_exp, t2_exp, n1_exp, n2_exp = self.CASES[name]
        state = named_state(name)
        assert t1(state) == pytest.approx(t1_exp, abs=1e-9)
        assert t2(state) == pytest.approx(t2_exp, abs=1e-9)
        star1, star2 = nu_star()
        for nu1_value, nu2_value in ((star1, star2), (2.0, 2.0), (math.inf, math.inf)):
            assert n1(state, nu1_value) == pytest.approx(n1_exp(nu1_value), abs=1e-9)
            assert n2(state, nu2_value) == pytest.approx(n2_exp(nu2_value), abs=1e-9)


class TestNegativityMeasures:
    def test_relabeling_invariance_on_symmetric_states(self):
        star1, _ = nu_star()
        for name in ("GHZ4", "W4"):
            state = named_state(name)
            reference = n1(state, star1)
            reference2 = n2(state, 2.0)
            for order in permutations(range(4)):
                permuted = state.permuted(order)
                assert abs(n1(permuted, star1) - reference) < 1e-10
                assert abs(n2(permuted, 2.0) - reference2) < 1e-10

    def test_ensemble_input_averages(self, rng):
        members = [random_pure_state(4, rng) for _ in range(3)]
        weights = (0.5, 0.3, 0.2)
        ensemble = Ensemble.of(zip(weights, members))
        expected = sum(w * n1(m, 2.0) for w, m in zip(weights, members))
        assert n1(ensemble, 2.0) == pytest.approx(expected, abs=1e-12)
        expected2 = sum(w * n2(m, 2.0) for w, m in zip(weights, members))
        assert n2(ensemble, 2.0) == pytest.approx(expected2, abs=1e-12)

    def test_reports_keep_raw_triples(self):
        reports = n1_reports(named_state("W4"), math.inf)
        base = (3 - 2 * SQRT2) / 2
        for report in reports:
            for key, raw in report.raw_triples.items():
                assert raw == pytest.approx(base, abs=1e-10)
                assert report.triple_terms[key] == 0.0

    def test_squared_reports_consistent(self):
        reports = n2_reports(named_state("Phi2"), 2.0)
        for report in reports:
            assert report.one_vs_rest == pytest.approx(1.0, abs=1e-10)
            for value in report.pairwise.values():
                assert value < 1e-10
            for raw in report.raw_triples.values():
                assert raw == pytest.approx(4 / 9, abs=1e-10)


class TestPowerHandling:
    def test_infinite_exponent_limits(self):
        assert regulated_power(0.999999, math.inf) == 0.0
        assert regulated_power(1.0 - 1e-12, math.inf) == 1.0
        assert regulated_power(1.0 + 1e-12, math.inf) == 1.0
        assert regulated_power(0.0, math.inf) == 0.0

    def test_finite_exponent(self):
        assert regulated_power(0.25, 0.5) == pytest.approx(0.5)
        assert regulated_power(-1e-12, 1.5) == 0.0

    def test_factor_validation(self):
        with pytest.raises(ValueError):
            PowerFactors(mu3=0.0)
        with pytest.raises(ValueError):
            PowerFactors(nu1=-1.0)


class TestMonogamySlack:
    def test_w3_saturates(self):
        for focus in range(3):
            assert abs(check_monogamy_tofv(named_state("W3"), focus)) < 1e-10

    def test_ghz4_slack_is_one(self):
        assert check_monogamy_tofv(named_state("GHZ4"), 0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [3, 4])
    def test_random_states_nonnegative(self, n, rng):
        for _ in range(300):
            psi = random_pure_state(n, rng)
            assert check_monogamy_tofv(psi, 0) >= -1e-10

    def test_size_limits(self, rng):
        with pytest.raises(InvalidStateError):
            check_monogamy_tofv(random_pure_state(7, rng), 0)
