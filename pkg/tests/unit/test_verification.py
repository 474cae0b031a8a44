"""
Tests for the verification battery and its closed-form references
"""
from fractions import Fraction

import pytest

from stirlingblocks.core.references import bessel_coeff
from stirlingblocks.core.series import MultiPoly
from stirlingblocks.services.enumeration import GPoly, g_poly_bruteforce
from stirlingblocks.services.verification import (
    CheckResult,
    VerificationBattery,
    VerificationReport,
    closed_form_bessel,
    closed_form_k3_height2,
    closed_form_k3_parity,
    closed_form_parity_height2,
    closed_form_parity_height3,
    even_level1_blocks,
    filtered_gpoly,
    run_battery,
)


@pytest.mark.unit
class TestClosedForms:
    """Series references built without division"""

    def test_parity_height2_matches_brute_force(self, spec):
        closed = closed_form_parity_height2(5)
        for n in range(6):
            assert g_poly_bruteforce(n, spec("parity_height2")) == GPoly(n, closed.coefficient(n))

    def test_parity_height2_low_terms(self):
        closed = closed_form_parity_height2(3)
        y1 = MultiPoly.variable(("y1", "y2"), "y1")
        assert closed.coefficient(1) == y1
        assert closed.coefficient(2) == 2 * y1**2

    def test_parity_height3_is_integral(self):
        for series in (closed_form_parity_height3(5), closed_form_parity_height3(5, even_part=True)):
            assert all(c.is_integral() for c in series.coeffs)

    def test_bessel(self):
        closed = closed_form_bessel(5)
        row = {dict(key)["y1"]: c for key, c in closed.coefficient(4).canonical().items()}
        assert row == {k: bessel_coeff(4, k) for k in range(1, 5)}

    def test_k3_height2_matches_brute_force(self, spec):
        closed = closed_form_k3_height2(4)
        for n in range(5):
            assert g_poly_bruteforce(n, spec("k3_height2")) == GPoly(n, closed.coefficient(n))

    def test_k3_parity_first_terms(self):
        closed = closed_form_k3_parity(3)
        assert closed.coefficient(1).is_zero()
        variables = ("y1", "y2_1", "y2_2")
        assert closed.coefficient(2) == MultiPoly.variable(variables, "y1") * MultiPoly.variable(variables, "y2_2")

    def test_even_part_filter(self, spec):
        sequence = spec("parity_height3")
        even = filtered_gpoly(4, sequence, even_level1_blocks)
        closed = closed_form_parity_height3(4, even_part=True)
        assert even == GPoly(4, closed.coefficient(4))
        assert filtered_gpoly(3, sequence, even_level1_blocks).total() == 0


@pytest.mark.unit
class TestReport:

    def test_describe(self):
        result = CheckResult("theorem1", "mixed", 4, False, ("brute", "series"), "y1: 2 != 3")
        assert result.describe() == "[FAIL] theorem1/mixed n=4 brute vs series y1: 2 != 3"
        assert CheckResult("trees", "phi example", None, True).describe() == "[ok] trees/phi example -"

    def test_report(self):
        report = VerificationReport(
            [
                CheckResult("counts", "Q_n,2", 1, True),
                CheckResult("counts", "Q_n,2", 2, False, ("a", "b"), "1 != 2"),
                CheckResult("trees", "phi", 1, True),
            ]
        )
        assert not report.passed
        assert report.first_failure.order == 2
        assert report.summary() == {"counts": {"passed": 1, "failed": 1}, "trees": {"passed": 1, "failed": 0}}
        assert report.rows()[1]["routes"] == "a vs b"


@pytest.mark.unit
class TestBattery:

    @pytest.mark.parametrize("suite", ["counts", "bessel", "stirling", "descents", "wilf", "trees"])
    def test_small_suites_pass(self, suite):
        report = run_battery([suite], max_order=4)
        assert report.results, suite
        assert report.passed, report.first_failure and report.first_failure.describe()

    def test_theorem_suites_pass(self):
        report = VerificationBattery(max_order=4).run(["theorem1", "theorem2"])
        assert report.passed, report.first_failure and report.first_failure.describe()

    def test_theorem1_checks_increasing_level2(self):
        report = VerificationBattery(max_order=4).run(["theorem1"])
        checked = [r for r in report.results if r.name == "increasing_level2"]
        assert {r.routes for r in checked} == {("brute", "recursive"), ("brute", "series")}
        assert all(r.passed for r in checked)

    def test_parity_suite_passes(self):
        report = VerificationBattery(max_order=5).run(["parity"])
        assert report.passed, report.first_failure and report.first_failure.describe()

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            VerificationBattery().run(["nonsense"])

    def test_trees_reports_sizes(self):
        report = run_battery(["trees"], max_order=5)
        sizes = [r for r in report.results if r.name == "|LT_n| = |Q_n|" and r.order == 5]
        assert sizes[0].detail == "945 trees, 945 words"

    def test_mutated_multinomial_fails_theorem1(self, mocker):
        from stirlingblocks.services import generating_functions

        original = generating_functions.multinomial
        mocker.patch(
            "stirlingblocks.services.generating_functions.multinomial",
            side_effect=lambda n, parts: original(n, parts) + 1,
        )
        report = VerificationBattery(max_order=3).run(["theorem1"])
        assert not report.passed
        assert report.first_failure.routes in (("brute", "recursive"), ("recursive",))

    def test_mutated_weight_fails(self, mocker):
        mocker.patch(
            "stirlingblocks.core.series.egf_weight",
            side_effect=lambda m: Fraction(1, max(1, m)),
        )
        report = VerificationBattery(max_order=4).run(["theorem1", "bessel"])
        assert not report.passed

    def test_overridden_spec(self, spec):
        battery = VerificationBattery(max_order=3, specs={"no_descents": spec("bessel")})
        report = battery.run(["descents"])
        # increasing level-1 blocks alone do not force n! words
        assert not report.passed
