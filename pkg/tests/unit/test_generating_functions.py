"""
Tests for the partition recursion and the composition route
"""
from fractions import Fraction
from math import factorial

import pytest

from stirlingblocks.core.errors import DomainError, VerificationError
from stirlingblocks.core.references import double_factorial
from stirlingblocks.core.series import MultiPoly, TruncatedEGF, compose
from stirlingblocks.services.enumeration import PatternSequence, g_poly_bruteforce, generate_avoiding
from stirlingblocks.services.generating_functions import (
    g_poly_by_route,
    g_poly_recursive,
    g_poly_series,
    g_series_theorem,
    level_series,
    multinomial,
    partitions,
    series_to_gpoly,
)


@pytest.mark.unit
class TestHelpers:

    def test_partitions(self):
        assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
        assert list(partitions(0)) == [()]
        assert len(list(partitions(7))) == 15

    def test_multinomial(self):
        assert multinomial(4, (2, 1, 1)) == 12
        assert multinomial(0, ()) == 1

    def test_level_series(self, spec):
        head = spec("descents").head
        series = level_series(head, 3)
        assert series.variables == ("z",)
        z = MultiPoly.variable(("z",), "z")
        assert series.coefficient(3) == 1 + 4 * z + z**2
        assert level_series(spec("bessel").head, 3).coefficient(3) == 1


@pytest.mark.unit
class TestPartitionRecursion:

    def test_single_block(self, spec):
        assert g_poly_recursive(1, spec("stirling_second")).canonical() == {(("y1", 1),): 1}

    def test_stirling_first(self, spec):
        assert g_poly_recursive(3, spec("stirling_first")).canonical() == {
            (("y1", 1), ("y2", 2)): 2,
            (("y1", 2), ("y2", 1)): 3,
            (("y1", 3),): 1,
        }

    def test_order_zero(self, spec):
        assert g_poly_recursive(0, spec("example3")).canonical() == {(): 1}

    def test_descents_total(self, spec):
        poly = g_poly_recursive(4, spec("descents"))
        assert poly.total() == 105
        assert poly.degree_profile("x1") == g_poly_bruteforce(4, spec("descents")).degree_profile("x1")

    @pytest.mark.parametrize(
        "name",
        ["stirling_first", "stirling_second", "example3", "example4", "example5", "mixed", "zigzag", "parity_height2"],
    )
    def test_agrees_with_brute_force(self, spec, name):
        sequence = spec(name)
        for n in range(5):
            assert g_poly_recursive(n, sequence) == g_poly_bruteforce(n, sequence), f"{name} n={n}"

    def test_rejects_k3(self, spec):
        with pytest.raises(DomainError):
            g_poly_recursive(2, spec("k3_height2"))

    def test_bad_multinomial_is_caught(self, spec, mocker):
        mocker.patch(
            "stirlingblocks.services.generating_functions.multinomial",
            side_effect=lambda n, parts: Fraction(factorial(n), 3),
        )
        with pytest.raises(VerificationError):
            g_poly_recursive(1, spec("stirling_second"))


@pytest.mark.unit
class TestCompositionRoute:

    def test_stirling_second_closed_form(self, spec):
        order = 5
        series = g_series_theorem(spec("stirling_second"), order)
        variables = series.variables
        y1, y2 = MultiPoly.variable(variables, "y1"), MultiPoly.variable(variables, "y2")
        # exp((y1/y2)(exp(y2 t) - 1)) with the inner part written as y1 times the integral of exp(y2 u)
        inner = TruncatedEGF.exponential(order, variables, y2).integrate().scale(y1)
        assert series == compose(TruncatedEGF.exponential(order, ()), inner)

    def test_double_factorials(self):
        series = g_series_theorem(PatternSequence(), 6)
        ones = {v: 1 for v in series.variables}
        values = [c.constant_term() for c in series.evaluate(ones).coeffs]
        assert values == [double_factorial(2 * n - 1) for n in range(7)]

    def test_no_descents_gives_factorials(self, spec):
        series = g_series_theorem(spec("no_descents"), 6)
        ones = {v: 1 for v in series.variables}
        assert [c.constant_term() for c in series.evaluate(ones).coeffs] == [factorial(n) for n in range(7)]

    @pytest.mark.parametrize("name", ["stirling_first", "example4", "example6", "mixed", "bessel", "parity_height3"])
    def test_agrees_with_brute_force(self, spec, name):
        sequence = spec(name)
        series = g_series_theorem(sequence, 5)
        for n in range(6):
            assert series_to_gpoly(series, n, sequence) == g_poly_bruteforce(n, sequence), f"{name} n={n}"

    @pytest.mark.parametrize("name", ["k3_height2", "k3_descents", "k3_parity"])
    def test_k3_agrees_with_brute_force(self, spec, name):
        sequence = spec(name)
        series = g_series_theorem(sequence, 4)
        for n in range(5):
            assert series_to_gpoly(series, n, sequence) == g_poly_bruteforce(n, sequence), f"{name} n={n}"

    def test_truncation_does_not_change_low_orders(self, spec):
        sequence = spec("example5")
        assert g_poly_series(3, sequence, order=6) == g_poly_series(3, sequence)

    def test_order_beyond_truncation(self, spec):
        series = g_series_theorem(spec("height2"), 3)
        with pytest.raises(DomainError):
            series_to_gpoly(series, 4)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            g_series_theorem(PatternSequence(), -1)

    def test_non_integral_series_is_rejected(self, spec, mocker):
        mocker.patch("stirlingblocks.core.series.egf_weight", side_effect=lambda m: Fraction(1, factorial(m) + 1))
        with pytest.raises(VerificationError):
            g_poly_series(2, spec("height2"))


@pytest.mark.unit
class TestIncreasingLevel2:
    """Descents at level 1, increasing level-2 blocks, deeper levels free"""

    ORDER = 5

    @staticmethod
    def at_one(series, keep):
        return series.evaluate({v: 1 for v in series.variables if v not in keep})

    @staticmethod
    def bessel_exponential(order, variables, rate):
        # exp(rate * (1 - sqrt(1 - 2t)))
        inner = TruncatedEGF.inverse_sqrt_one_minus_2t(order, variables).integrate().scale(rate)
        return compose(TruncatedEGF.exponential(order, ()), inner)

    def test_shifted_series(self, spec):
        shifted = spec("increasing_level2").shift()
        series = self.at_one(g_series_theorem(shifted, self.ORDER), {"y1"})
        y = MultiPoly.variable(("y1",), "y1")
        assert series == self.bessel_exponential(self.ORDER, ("y1",), y)

    def test_integral_of_shifted_series(self):
        variables = ("y2",)
        y = MultiPoly.variable(variables, "y2")
        g = self.bessel_exponential(self.ORDER, variables, y)
        root = TruncatedEGF.one(self.ORDER, variables) - TruncatedEGF.inverse_sqrt_one_minus_2t(
            self.ORDER, variables
        ).integrate()
        # y^2 * integral(G) = -1 - y + G * (1 + y * sqrt(1 - 2t))
        rhs = TruncatedEGF(self.ORDER, variables, [-y - 1]) + g.multiply(
            TruncatedEGF.one(self.ORDER, variables) + root.scale(y)
        )
        assert g.integrate().scale(y * y) == rhs

    def test_composed_series(self, spec):
        sequence = spec("increasing_level2")
        series = self.at_one(g_series_theorem(sequence, self.ORDER), {"y1", "x1", "y2"})
        variables = series.variables
        assert set(variables) == {"y1", "x1", "y2"}
        y1, x1, y2 = (MultiPoly.variable(variables, v) for v in ("y1", "x1", "y2"))
        level2 = self.bessel_exponential(self.ORDER, variables, y2).integrate()
        e = compose(TruncatedEGF.exponential(self.ORDER, ()), level2.scale(y1 * (x1 - 1)))
        # G = (x1 - 1) / (x1 - e), cleared of the denominator
        lhs = series.multiply(TruncatedEGF(self.ORDER, variables, [x1]) - e)
        assert lhs == TruncatedEGF(self.ORDER, variables, [x1 - 1])

    def test_routes_agree(self, spec):
        sequence = spec("increasing_level2")
        for n in range(self.ORDER + 1):
            brute = g_poly_bruteforce(n, sequence)
            assert g_poly_recursive(n, sequence) == brute, n
            assert g_poly_series(n, sequence) == brute, n

    def test_level2_blocks_increase(self, spec):
        # under 1 the only decreasing pair of siblings is 3 then 2
        words = {str(w) for w in generate_avoiding(3, 2, spec("increasing_level2"))}
        assert "122331" in words
        assert "133221" not in words
        assert len(words) == 14


@pytest.mark.unit
class TestRouteDispatch:

    @pytest.mark.parametrize("route", ["brute", "recursive", "series"])
    def test_routes(self, spec, route):
        expected = g_poly_bruteforce(3, spec("example3"))
        assert g_poly_by_route(route, 3, spec("example3")) == expected

    def test_unknown_route(self, spec):
        with pytest.raises(DomainError):
            g_poly_by_route("guess", 2, spec("height2"))
