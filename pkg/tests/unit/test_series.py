"""
Tests for exact polynomials and truncated EGF arithmetic
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirlingblocks.core.errors import CompositionError, VariableMismatchError
from stirlingblocks.core.references import bessel_coeff, ordered_stirling_first
from stirlingblocks.core.series import (
    MultiPoly,
    TruncatedEGF,
    compose,
    egf_weight,
    rational_from_json,
    rational_to_json,
)

XY = ("x", "y")


def constants(series):
    return [c.constant_term() for c in series.coeffs]


@pytest.mark.unit
class TestMultiPoly:
    """Sparse polynomial arithmetic"""

    def test_zero_terms_not_stored(self):
        x = MultiPoly.variable(XY, "x")
        assert (x - x).terms == {}
        assert (x - x).is_zero()

    def test_binomial_square(self):
        x, y = MultiPoly.variable(XY, "x"), MultiPoly.variable(XY, "y")
        square = (x + y) ** 2
        assert square.coefficient({"x": 1, "y": 1}) == 2
        assert square.coefficient({"x": 2}) == 1

    def test_scalars(self):
        x = MultiPoly.variable(XY, "x")
        poly = 3 * x + 1
        assert poly.constant_term() == 1
        assert poly * 0 == 0
        assert MultiPoly.constant(XY, 5) == 5

    def test_fractions_normalize(self):
        half = MultiPoly.constant(XY, Fraction(1, 2))
        assert not half.is_integral()
        whole = half * 2
        assert whole.is_integral()
        assert isinstance(whole.constant_term(), int)

    def test_mismatched_variables(self):
        with pytest.raises(VariableMismatchError):
            MultiPoly.variable(("x",), "x") + MultiPoly.variable(("y",), "y")
        with pytest.raises(VariableMismatchError):
            MultiPoly.variable(("x",), "z")

    def test_canonical_ignores_variable_order(self):
        a = MultiPoly.variable(("x", "y"), "y", 2)
        b = MultiPoly.variable(("y", "x"), "y", 2)
        assert a.canonical() == b.canonical() == {(("y", 2),): 1}

    def test_substitute(self):
        x = MultiPoly.variable(("z",), "z")
        image = MultiPoly.variable(XY, "x") * 2
        assert (x**2 + 1).substitute({"z": image}, XY) == MultiPoly.variable(XY, "x", 2) * 4 + 1

    def test_evaluate_partial(self):
        poly = MultiPoly.variable(XY, "x") * MultiPoly.variable(XY, "y", 2)
        assert poly.evaluate({"y": 3}) == MultiPoly.variable(("x",), "x") * 9

    def test_embed(self):
        poly = MultiPoly.variable(("y",), "y")
        assert poly.embed(XY) == MultiPoly.variable(XY, "y")
        with pytest.raises(VariableMismatchError):
            MultiPoly.variable(XY, "x").embed(("y",))

    def test_json(self):
        poly = MultiPoly.variable(XY, "x") * Fraction(3, 4) + 2
        assert MultiPoly.from_json(XY, poly.to_json()) == poly
        assert rational_from_json(rational_to_json(Fraction(-5, 3))) == Fraction(-5, 3)
        assert rational_from_json({"num": "4", "den": "2"}) == 2

    def test_str(self):
        poly = MultiPoly.variable(XY, "x", 2) * 3 + MultiPoly.variable(XY, "y")
        assert str(poly) == "3*x^2 + y"
        assert str(MultiPoly.zero(XY)) == "0"


@pytest.mark.unit
class TestTruncatedEGF:
    """Truncated exponential generating functions"""

    def test_padding_and_truncation(self):
        series = TruncatedEGF(3, (), [1, 2])
        assert constants(series) == [1, 2, 0, 0]
        assert constants(TruncatedEGF(1, (), [1, 2, 3])) == [1, 2]

    def test_negative_order(self):
        with pytest.raises(ValueError):
            TruncatedEGF(-1, (), [])

    def test_integrate_exp(self):
        assert constants(TruncatedEGF.exponential(5, ()).integrate()) == [0, 1, 1, 1, 1, 1]

    def test_integrate_inverse_sqrt(self):
        series = TruncatedEGF.inverse_sqrt_one_minus_2t(6)
        assert constants(series) == [1, 1, 3, 15, 105, 945, 10395]
        assert constants(series.integrate()) == [0, 1, 1, 3, 15, 105, 945]

    def test_integrate_zero(self):
        assert TruncatedEGF.zero(4, ()).integrate() == TruncatedEGF.zero(4, ())

    def test_derivative_undoes_integrate(self):
        series = TruncatedEGF.from_sequence(5, (), [0, 2, 7, 1, 8, 2])
        assert series.integrate().derivative() == series.truncate(4)

    def test_exp_squared(self):
        exp = TruncatedEGF.exponential(6, ())
        assert constants(exp * exp) == [2**n for n in range(7)]

    def test_multiply_by_one(self):
        geometric = TruncatedEGF.geometric(5, ())
        assert geometric.multiply(TruncatedEGF.one(5, ())) == geometric

    def test_cosh_sinh_product(self):
        variables = ("y1", "y2")
        y1, y2 = MultiPoly.variable(variables, "y1"), MultiPoly.variable(variables, "y2")
        product = TruncatedEGF.hyperbolic_cosine(4, variables, y1).multiply(
            TruncatedEGF.hyperbolic_sine(4, variables, y2)
        )
        assert product.coefficient(0).is_zero()
        assert product.coefficient(1) == y2
        assert product.coefficient(2).is_zero()
        assert product.coefficient(3) == y2**3 + 3 * y1**2 * y2

    def test_even_part_and_reflect(self):
        series = TruncatedEGF.from_sequence(4, (), [1, 2, 3, 4, 5])
        assert constants(series.even_part()) == [1, 0, 3, 0, 5]
        assert constants(series.reflect()) == [1, -2, 3, -4, 5]

    def test_mismatch(self):
        with pytest.raises(VariableMismatchError):
            TruncatedEGF.one(2, ("x",)) + TruncatedEGF.one(2, ("y",))

    def test_json_round_trip(self):
        variables = ("y1",)
        series = TruncatedEGF.geometric(3, variables, MultiPoly.variable(variables, "y1")).scale(Fraction(1, 3))
        assert TruncatedEGF.from_json(series.to_json()) == series

    def test_evaluate(self):
        variables = ("y1",)
        series = TruncatedEGF.exponential(3, variables, MultiPoly.variable(variables, "y1"))
        assert constants(series.evaluate({"y1": 2})) == [1, 2, 4, 8]


@pytest.mark.unit
class TestCompose:
    """Composition F(u) with u(0) = 0"""

    def test_exp_of_t(self):
        exp = TruncatedEGF.exponential(5, ())
        assert compose(exp, TruncatedEGF.t(5, ())) == exp

    def test_identity_on_any_outer(self):
        outer = TruncatedEGF.from_sequence(5, (), [1, 4, 0, 2, 9, 3])
        assert compose(outer, TruncatedEGF.t(5, ())) == outer

    def test_bessel_polynomials(self):
        variables = ("y1",)
        inner = TruncatedEGF.inverse_sqrt_one_minus_2t(6, variables).integrate()
        series = compose(TruncatedEGF.exponential(6, ()), inner.scale(MultiPoly.variable(variables, "y1")))
        for n in range(1, 7):
            expected = {k: bessel_coeff(n, k) for k in range(1, n + 1)}
            got = {dict(key)["y1"]: c for key, c in series.coefficient(n).canonical().items()}
            assert got == expected, f"B_{n}"

    def test_ordered_stirling_first(self):
        variables = ("y1", "y2")
        y1, y2 = (MultiPoly.variable(variables, v) for v in variables)
        inner = TruncatedEGF.geometric(5, variables, y2).integrate().scale(y1)
        series = compose(TruncatedEGF.geometric(5, ()), inner)
        for n in range(1, 6):
            row = series.coefficient(n).evaluate({"y2": 1})
            got = {dict(key)["y1"]: c for key, c in row.canonical().items()}
            assert got == {k: ordered_stirling_first(n, k) for k in range(1, n + 1)}

    def test_substitutes_parameter(self):
        outer = TruncatedEGF(3, ("z",), [1, MultiPoly.variable(("z",), "z"), 0, 0])
        variables = ("x1",)
        series = compose(outer, TruncatedEGF.t(3, variables), MultiPoly.variable(variables, "x1"))
        assert series.coefficient(1) == MultiPoly.variable(variables, "x1")

    def test_nonzero_constant_rejected(self):
        with pytest.raises(CompositionError):
            compose(TruncatedEGF.exponential(3, ()), TruncatedEGF.one(3, ()))

    def test_outer_with_two_variables_rejected(self):
        with pytest.raises(VariableMismatchError):
            compose(TruncatedEGF.one(3, XY), TruncatedEGF.t(3, ()))

    def test_order_is_the_smaller_one(self):
        assert compose(TruncatedEGF.exponential(6, ()), TruncatedEGF.t(4, ())).order == 4

    def test_egf_weight(self):
        assert egf_weight(0) == 1
        assert egf_weight(4) == Fraction(1, 24)

    @pytest.mark.property
    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=5, max_size=5))
    def test_integrate_derivative_identity(self, tail):
        series = TruncatedEGF.from_sequence(5, (), [0, *tail])
        assert series.derivative().integrate() == series.truncate(4)
