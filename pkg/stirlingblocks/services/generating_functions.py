"""
Generating-function routes to g_n^{A,p}.

Two routes complement the brute force in ``enumeration``:

* the partition recursion (k = 2): a word splits into its level-1 blocks,
  and the interior of each block is a word for the shifted sequence;
* the composition route (any k): G = F(y * integral of the product of the
  shifted G's, x), evaluated as exact truncated EGFs.

Both take F from the brute-force f_m, never from closed forms.
"""

from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Iterator, List, Optional, Tuple

from ..core.errors import DomainError, VerificationError
from ..core.patterns import PatternCountPoly
from ..core.series import MultiPoly, TruncatedEGF, compose
from .enumeration import (
    GPoly,
    LevelSpec,
    PatternSequence,
    g_poly_bruteforce,
    variables_for,
    x_name,
    y_name,
)

logger = logging.getLogger(__name__)

ROUTES = ("brute", "recursive", "series")

SeriesKey = Tuple[int, Optional[int]]


def multinomial(n: int, parts: Tuple[int, ...]) -> int:
    """n! / (parts_1! parts_2! ...)"""
    return factorial(n) // prod(factorial(p) for p in parts)


def partitions(n: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Integer partitions of n as nonincreasing tuples; n = 0 has the empty partition"""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def _f_in(
    f: PatternCountPoly,
    variables: Tuple[str, ...],
    x: Optional[str],
) -> MultiPoly:
    """f_m(z) with z replaced by the named x variable"""
    out = MultiPoly(variables)
    for e, c in enumerate(f.coefficients):
        if not c:
            continue
        if e == 0:
            out = out + c
        else:
            if x is None:
                raise DomainError("counted pattern without an x variable")
            out = out + MultiPoly.variable(variables, x, e) * c
    return out


def _x_for(level_spec: LevelSpec, level: int, type_: Optional[int]) -> Optional[str]:
    return x_name(level, type_) if level_spec.count is not None else None


# -- partition recursion ----------------------------------------------------


def g_poly_recursive(n: int, spec: PatternSequence) -> GPoly:
    """
    g_n by the partition recursion over level-1 block sizes.

    A word of order n with level-1 blocks of sizes lambda_1, ..., lambda_l
    (each block's value plus its interior) is built by choosing which values
    go to which block (the multinomial, divided by the block-size
    multiplicities since blocks of equal size are unordered at this stage),
    an f_l-weighted arrangement of the l block values, and an arbitrary
    shifted word of order lambda_i - 1 inside each block.

    Raises:
        DomainError: for k != 2
    """
    if spec.k != 2:
        raise DomainError("the partition recursion is defined for k = 2 only")
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    variables = variables_for(spec, n)
    memo: Dict[Tuple[int, int], MultiPoly] = {}
    shifted: List[PatternSequence] = [spec]

    def spec_at(depth: int) -> PatternSequence:
        while len(shifted) <= depth:
            shifted.append(shifted[-1].shift())
        return shifted[depth]

    def g(depth: int, m: int) -> MultiPoly:
        key = (depth, m)
        if key in memo:
            return memo[key]
        level = depth + 1
        head = spec_at(depth).head
        total = MultiPoly(variables)
        for lam in partitions(m):
            length = len(lam)
            f = head.f(length)
            if not any(f.coefficients):
                continue
            weight = MultiPoly.one(variables)
            if length:
                weight = MultiPoly.variable(variables, y_name(level), length)
            term = weight * _f_in(f, variables, _x_for(head, level, None))
            for part in lam:
                if term.is_zero():
                    break
                term = term * g(depth + 1, part - 1)
            if term.is_zero():
                continue
            multiplicities = prod(factorial(c) for c in Counter(lam).values())
            total = total + term * Fraction(multinomial(m, lam), multiplicities)
        memo[key] = total
        return total

    result = g(0, n)
    logger.debug("partition recursion for n=%d filled %d memo entries", n, len(memo))
    return GPoly(n, _require_integral(result, spec, n, "recursive"))


def _require_integral(poly: MultiPoly, spec: PatternSequence, n: int, route: str) -> MultiPoly:
    if not poly.is_integral():
        raise VerificationError(
            f"{route} route produced non-integral coefficients: {poly}",
            spec_name=spec.name or None,
            order=n,
            routes=(route,),
        )
    return poly


# -- composition route -------------------------------------------------------


def level_series(level_spec: LevelSpec, order: int) -> TruncatedEGF:
    """F for one level: sum f_m(z) t^m / m!, over the variable z when a pattern is counted"""
    variables: Tuple[str, ...] = ("z",) if level_spec.count is not None else ()
    coeffs = [_f_in(level_spec.f(m), variables, "z" if variables else None) for m in range(order + 1)]
    return TruncatedEGF(order, variables, coeffs)


def g_series_theorem(spec: PatternSequence, order: int) -> TruncatedEGF:
    """
    G^{A,p}(t; x, y) through degree ``order`` by repeated composition.

    The series for level L and type s is
    F_{L,s}(y_{L,s} * integral of prod_j G_{L+1,j}, x_{L,s}).
    Levels deeper than ``order`` only feed the constant f_0 into their
    parent's integrand: a block at level L needs L distinct values, so no
    term of degree at most ``order`` sees anything else from them.
    """
    if order < 0:
        raise DomainError(f"truncation order must be nonnegative, got {order}")
    variables = variables_for(spec, order)
    memo: Dict[SeriesKey, TruncatedEGF] = {}

    def constant(level_spec: LevelSpec) -> TruncatedEGF:
        return TruncatedEGF(order, variables, [level_spec.f(0).evaluate(1)])

    def series(level: int, type_: Optional[int]) -> TruncatedEGF:
        key = (level, type_)
        if key in memo:
            return memo[key]
        level_spec = spec.at(level, type_)
        if level > order or level_spec.kills:
            result = constant(level_spec)
        else:
            integrand = TruncatedEGF.one(order, variables)
            for child_type in spec.types_at(level + 1):
                integrand = integrand.multiply(series(level + 1, child_type))
            inner = integrand.integrate().scale(MultiPoly.variable(variables, y_name(level, type_)))
            x = _x_for(level_spec, level, type_)
            z_subst = MultiPoly.variable(variables, x) if x is not None else None
            result = compose(level_series(level_spec, order), inner, z_subst)
        memo[key] = result
        return result

    top = series(1, None)
    logger.info("composition route to order %d over %s (%d level series)", order, list(variables), len(memo))
    return top


def series_to_gpoly(series: TruncatedEGF, n: int, spec: Optional[PatternSequence] = None) -> GPoly:
    """
    g_n read off the series: its EGF coefficient c_n.

    Raises:
        VerificationError: if the coefficient is not an integer polynomial
    """
    if n > series.order:
        raise DomainError(f"order {n} exceeds the truncation {series.order}")
    spec = spec if spec is not None else PatternSequence()
    return GPoly(n, _require_integral(series.coefficient(n), spec, n, "series"))


def g_poly_series(n: int, spec: PatternSequence, order: Optional[int] = None) -> GPoly:
    return series_to_gpoly(g_series_theorem(spec, order if order is not None else n), n, spec)


def g_poly_by_route(route: str, n: int, spec: PatternSequence, jobs: int = 1, order: Optional[int] = None) -> GPoly:
    """Dispatch to one of ``ROUTES``"""
    if route == "brute":
        return g_poly_bruteforce(n, spec, jobs)
    if route == "recursive":
        return g_poly_recursive(n, spec)
    if route == "series":
        return g_poly_series(n, spec, order)
    raise DomainError(f"unknown route {route!r}; choose from {ROUTES}")
