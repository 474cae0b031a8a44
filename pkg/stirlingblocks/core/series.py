"""
Exact truncated exponential generating functions.

``MultiPoly`` is a sparse polynomial over a fixed, ordered variable list with
exact rational coefficients (dense exponent vectors, zero terms never
stored). ``TruncatedEGF`` holds c_0..c_N of sum c_n t^n / n!, each c_n a
``MultiPoly``; every operation is exact through degree N.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import comb, factorial
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import CompositionError, VariableMismatchError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Exponents = Tuple[int, ...]
Monomial = Tuple[Tuple[str, int], ...]


def _normalize(value: Rational) -> Rational:
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def rational_to_json(value: Rational) -> Dict[str, str]:
    value = Fraction(value)
    return {"num": str(value.numerator), "den": str(value.denominator)}


def rational_from_json(data: Mapping[str, Any]) -> Rational:
    return _normalize(Fraction(int(data["num"]), int(data["den"])))


class MultiPoly:
    """Sparse multivariate polynomial with exact rational coefficients"""

    __slots__ = ("variables", "terms")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Optional[Mapping[Exponents, Rational]] = None,
    ):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.terms: Dict[Exponents, Rational] = {}
        width = len(self.variables)
        for exps, coeff in (terms or {}).items():
            if len(exps) != width:
                raise VariableMismatchError(
                    f"exponent vector {exps} does not match variables {self.variables}"
                )
            if coeff:
                self.terms[tuple(exps)] = _normalize(coeff)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[str], value: Rational) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def one(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls.constant(variables, 1)

    @classmethod
    def variable(cls, variables: Sequence[str], name: str, power: int = 1) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError(f"{name!r} is not one of {variables}")
        exps = [0] * len(variables)
        exps[variables.index(name)] = power
        return cls(variables, {tuple(exps): 1})

    def _check(self, other: "MultiPoly") -> None:
        if self.variables != other.variables:
            raise VariableMismatchError(f"{self.variables} != {other.variables}")

    def __add__(self, other: Union["MultiPoly", Rational]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.variables, other)
        self._check(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, 0) + coeff
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Union["MultiPoly", Rational]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.variables, other)
        return self + (-other)

    def __mul__(self, other: Union["MultiPoly", Rational]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if not other:
                return MultiPoly(self.variables)
            return MultiPoly(self.variables, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: Dict[Exponents, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                out[exps] = out.get(exps, 0) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "MultiPoly":
        result = MultiPoly.one(self.variables)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction)):
                return self == MultiPoly.constant(self.variables, other)
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Rational:
        return self.terms.get((0,) * len(self.variables), 0)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    def coefficient(self, exps: Mapping[str, int]) -> Rational:
        key = tuple(exps.get(v, 0) for v in self.variables)
        return self.terms.get(key, 0)

    def canonical(self) -> Dict[Monomial, Rational]:
        """Terms keyed by their nonzero (variable, exponent) pairs; independent of the variable list"""
        out: Dict[Monomial, Rational] = {}
        for exps, coeff in self.terms.items():
            key = tuple(sorted((v, e) for v, e in zip(self.variables, exps) if e))
            out[key] = coeff
        return out

    def embed(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over a variable list that contains every variable in use"""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = {v: i for i, v in enumerate(variables)}
        out: Dict[Exponents, Rational] = {}
        for exps, coeff in self.terms.items():
            target = [0] * len(variables)
            for v, e in zip(self.variables, exps):
                if not e:
                    continue
                if v not in index:
                    raise VariableMismatchError(f"{v!r} is in use but missing from {variables}")
                target[index[v]] = e
            out[tuple(target)] = coeff
        return MultiPoly(variables, out)

    def substitute(
        self, mapping: Mapping[str, Union["MultiPoly", Rational]], variables: Sequence[str]
    ) -> "MultiPoly":
        """
        Replace variables by polynomials (or numbers) over ``variables``.

        Variables missing from ``mapping`` keep their name and must exist in
        the target list.
        """
        variables = tuple(variables)
        images: List[MultiPoly] = []
        for v in self.variables:
            image = mapping.get(v)
            if image is None:
                images.append(MultiPoly.variable(variables, v) if v in variables else MultiPoly(variables))
            elif isinstance(image, MultiPoly):
                images.append(image.embed(variables) if image.variables != variables else image)
            else:
                images.append(MultiPoly.constant(variables, image))
        out = MultiPoly(variables)
        for exps, coeff in self.terms.items():
            term = MultiPoly.constant(variables, coeff)
            for v, image, e in zip(self.variables, images, exps):
                if e and v not in mapping and v not in variables:
                    raise VariableMismatchError(f"{v!r} has no image in {variables}")
                if e:
                    term = term * (image**e)
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, Rational]) -> "MultiPoly":
        """Substitute numbers for some variables; the rest stay symbolic"""
        remaining = tuple(v for v in self.variables if v not in values)
        return self.substitute(dict(values), remaining)

    def to_json(self) -> List[Dict[str, Any]]:
        rows = []
        for key, coeff in sorted(self.canonical().items()):
            rows.append({"exps": dict(key), "coeff": rational_to_json(coeff)})
        return rows

    @classmethod
    def from_json(cls, variables: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> "MultiPoly":
        variables = tuple(variables)
        terms: Dict[Exponents, Rational] = {}
        for row in rows:
            unknown = set(row["exps"]) - set(variables)
            if unknown:
                raise VariableMismatchError(f"unknown variables {sorted(unknown)}")
            exps = tuple(int(row["exps"].get(v, 0)) for v in variables)
            terms[exps] = terms.get(exps, 0) + rational_from_json(row["coeff"])
        return cls(variables, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in sorted(self.canonical().items()):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in key)
            if not mono:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(mono)
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables}, {self})"


def egf_weight(m: int) -> Fraction:
    """1/m!, the weight of the m-th power of the inner series in a composition"""
    return Fraction(1, factorial(m))


class TruncatedEGF:
    """
    sum_{n <= N} c_n t^n / n! with polynomial coefficients.

    Coefficients are stored as the EGF numbers c_n, so ``coeffs[n]`` already
    equals n! times the coefficient of t^n.
    """

    __slots__ = ("order", "variables", "coeffs")

    def __init__(self, order: int, variables: Sequence[str], coeffs: Iterable[Union[MultiPoly, Rational]]):
        if order < 0:
            raise ValueError(f"truncation order must be nonnegative, got {order}")
        self.order = order
        self.variables: Tuple[str, ...] = tuple(variables)
        padded: List[MultiPoly] = []
        for c in coeffs:
            if len(padded) > order:
                break
            if isinstance(c, MultiPoly):
                if c.variables != self.variables:
                    raise VariableMismatchError(f"{c.variables} != {self.variables}")
                padded.append(c)
            else:
                padded.append(MultiPoly.constant(self.variables, c))
        while len(padded) <= order:
            padded.append(MultiPoly(self.variables))
        self.coeffs: Tuple[MultiPoly, ...] = tuple(padded)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, order: int, variables: Sequence[str]) -> "TruncatedEGF":
        return cls(order, variables, [])

    @classmethod
    def one(cls, order: int, variables: Sequence[str]) -> "TruncatedEGF":
        return cls(order, variables, [1])

    @classmethod
    def t(cls, order: int, variables: Sequence[str]) -> "TruncatedEGF":
        return cls(order, variables, [0, 1])

    @classmethod
    def from_sequence(cls, order: int, variables: Sequence[str], values: Iterable[Rational]) -> "TruncatedEGF":
        return cls(order, variables, list(values))

    @classmethod
    def exponential(cls, order: int, variables: Sequence[str], rate: Optional[MultiPoly] = None) -> "TruncatedEGF":
        """exp(rate * t): coefficients rate^n"""
        rate = rate if rate is not None else MultiPoly.one(variables)
        return cls(order, variables, [rate**n for n in range(order + 1)])

    @classmethod
    def geometric(cls, order: int, variables: Sequence[str], rate: Optional[MultiPoly] = None) -> "TruncatedEGF":
        """1 / (1 - rate * t): coefficients n! rate^n"""
        rate = rate if rate is not None else MultiPoly.one(variables)
        return cls(order, variables, [(rate**n) * factorial(n) for n in range(order + 1)])

    @classmethod
    def hyperbolic_cosine(cls, order: int, variables: Sequence[str], rate: Optional[MultiPoly] = None) -> "TruncatedEGF":
        return cls.exponential(order, variables, rate).even_part()

    @classmethod
    def hyperbolic_sine(cls, order: int, variables: Sequence[str], rate: Optional[MultiPoly] = None) -> "TruncatedEGF":
        full = cls.exponential(order, variables, rate)
        return full - full.even_part()

    @classmethod
    def inverse_sqrt_one_minus_2t(cls, order: int, variables: Sequence[str] = ()) -> "TruncatedEGF":
        """1 / sqrt(1 - 2t): coefficients (2n-1)!!"""
        values = [1]
        for n in range(1, order + 1):
            values.append(values[-1] * (2 * n - 1))
        return cls(order, variables, values)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "TruncatedEGF") -> None:
        if self.variables != other.variables:
            raise VariableMismatchError(f"{self.variables} != {other.variables}")

    def coefficient(self, n: int) -> MultiPoly:
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncatedEGF":
        return TruncatedEGF(min(order, self.order), self.variables, self.coeffs)

    def __add__(self, other: "TruncatedEGF") -> "TruncatedEGF":
        self._check(other)
        order = min(self.order, other.order)
        return TruncatedEGF(order, self.variables, [a + b for a, b in zip(self.coeffs, other.coeffs)][: order + 1])

    def __neg__(self) -> "TruncatedEGF":
        return TruncatedEGF(self.order, self.variables, [-c for c in self.coeffs])

    def __sub__(self, other: "TruncatedEGF") -> "TruncatedEGF":
        return self + (-other)

    def scale(self, factor: Union[MultiPoly, Rational]) -> "TruncatedEGF":
        return TruncatedEGF(self.order, self.variables, [c * factor for c in self.coeffs])

    def multiply(self, other: "TruncatedEGF") -> "TruncatedEGF":
        """EGF product: c_n = sum_i binom(n, i) a_i b_{n-i}"""
        self._check(other)
        order = min(self.order, other.order)
        out = []
        for n in range(order + 1):
            acc = MultiPoly(self.variables)
            for i in range(n + 1):
                a, b = self.coeffs[i], other.coeffs[n - i]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + (a * b) * comb(n, i)
            out.append(acc)
        return TruncatedEGF(order, self.variables, out)

    def __mul__(self, other: Union["TruncatedEGF", MultiPoly, Rational]) -> "TruncatedEGF":
        if isinstance(other, TruncatedEGF):
            return self.multiply(other)
        return self.scale(other)

    __rmul__ = __mul__

    def power(self, m: int) -> "TruncatedEGF":
        result = TruncatedEGF.one(self.order, self.variables)
        for _ in range(m):
            result = result.multiply(self)
        return result

    def integrate(self) -> "TruncatedEGF":
        """Antiderivative vanishing at 0: output c_{n+1} = input c_n"""
        return TruncatedEGF(self.order, self.variables, [MultiPoly(self.variables), *self.coeffs[: self.order]])

    def derivative(self) -> "TruncatedEGF":
        """Formal derivative; exact only through degree N-1, so the order drops by one"""
        if self.order == 0:
            return TruncatedEGF.zero(0, self.variables)
        return TruncatedEGF(self.order - 1, self.variables, self.coeffs[1:])

    def even_part(self) -> "TruncatedEGF":
        """(S(t) + S(-t)) / 2"""
        zero = MultiPoly(self.variables)
        return TruncatedEGF(self.order, self.variables, [c if n % 2 == 0 else zero for n, c in enumerate(self.coeffs)])

    def reflect(self) -> "TruncatedEGF":
        """S(-t)"""
        return TruncatedEGF(self.order, self.variables, [c if n % 2 == 0 else -c for n, c in enumerate(self.coeffs)])

    def compose(self, inner: "TruncatedEGF", z_subst: Optional[Union[MultiPoly, Rational]] = None) -> "TruncatedEGF":
        return compose(self, inner, z_subst)

    def evaluate(self, values: Mapping[str, Rational]) -> "TruncatedEGF":
        remaining = tuple(v for v in self.variables if v not in values)
        return TruncatedEGF(self.order, remaining, [c.evaluate(values) for c in self.coeffs])

    def embed(self, variables: Sequence[str]) -> "TruncatedEGF":
        return TruncatedEGF(self.order, variables, [c.embed(variables) for c in self.coeffs])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedEGF):
            return NotImplemented
        return (
            self.order == other.order
            and self.variables == other.variables
            and self.coeffs == other.coeffs
        )

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": self.order,
            "vars": list(self.variables),
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TruncatedEGF":
        variables = tuple(data["vars"])
        coeffs = [MultiPoly.from_json(variables, rows) for rows in data["coeffs"]]
        return cls(int(data["N"]), variables, coeffs)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coeffs)
        return f"TruncatedEGF(N={self.order}, [{body}])"


def compose(
    outer: TruncatedEGF,
    inner: TruncatedEGF,
    z_subst: Optional[Union[MultiPoly, Rational]] = None,
) -> TruncatedEGF:
    """
    sum_m f_m(z_subst) / m! * inner^m, truncated at the smaller order.

    Args:
        outer: F as a truncated EGF over at most one variable (its parameter z)
        inner: u with zero constant term
        z_subst: image of F's variable, a polynomial over ``inner``'s variables
            (or a number); ignored when F has no variable

    Raises:
        CompositionError: if ``inner`` has a nonzero constant term
        VariableMismatchError: if F has more than one variable
    """
    if not inner.coeffs[0].is_zero():
        raise CompositionError(f"inner series has constant term {inner.coeffs[0]}")
    if len(outer.variables) > 1:
        raise VariableMismatchError(f"outer series must have at most one variable, got {outer.variables}")
    order = min(outer.order, inner.order)
    variables = inner.variables
    mapping: Dict[str, Union[MultiPoly, Rational]] = {}
    if outer.variables:
        mapping[outer.variables[0]] = z_subst if z_subst is not None else 1

    result = TruncatedEGF.zero(order, variables)
    power = TruncatedEGF.one(order, variables)
    for m in range(order + 1):
        f_m = outer.coeffs[m]
        if not f_m.is_zero():
            weight = f_m.substitute(mapping, variables) * egf_weight(m)
            result = result + power.scale(weight)
        if m < order:
            power = power.multiply(inner.truncate(order))
    logger.debug("composed series to order %d over %s", order, variables)
    return result
