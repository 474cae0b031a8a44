"""
Verification battery: exact identities checked across the enumeration,
recursion and composition routes, the reference families and the tree
bijection. Every check produces a ``CheckResult``; nothing raises out of a
suite, so a single run reports every failure.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from itertools import permutations
from math import factorial
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..core.errors import StirlingBlocksError
from ..core.patterns import VincularPattern, f_poly
from ..core.references import (
    alternating_count,
    bessel_coeff,
    k_stirling_count,
    stirling_first,
    stirling_second,
)
from ..core.series import MultiPoly, TruncatedEGF, compose
from ..core.stirling import BlockForest, block_decompose, block_pattern_count
from ..core.trees import (
    enumerate_trees,
    parse_tree,
    phi,
    phi_inverse,
    reduce_tree,
    tree_block_pattern_count,
)
from .enumeration import (
    GPoly,
    PatternSequence,
    bundled_spec,
    count_avoiding,
    exponents,
    g_poly_bruteforce,
    generate,
    generate_avoiding,
    level_keys,
    variables_for,
)
from .generating_functions import g_poly_recursive, g_series_theorem, series_to_gpoly

logger = logging.getLogger(__name__)

THEOREM1_SPECS = (
    "stirling_first",
    "stirling_second",
    "example3",
    "example4",
    "example5",
    "descents",
    "mixed",
    "zigzag",
    "example6",
    "increasing_level2",
    "no_descents",
    "bessel",
)
THEOREM2_SPECS = ("k3_height2", "k3_descents", "k3_parity")
WILF_SPECS = ("wilf_123", "wilf_132", "wilf_321")
TREE_PATTERNS = ("1", "2,1", "2~1", "1,2", "2,3~1")
ZIGZAG_COUNTS = (1, 1, 2, 4, 10, 32, 122, 544)


@dataclass
class CheckResult:
    """Outcome of one identity"""

    suite: str
    name: str
    order: Optional[int]
    passed: bool
    routes: Tuple[str, ...] = ()
    detail: str = ""

    def describe(self) -> str:
        where = f"n={self.order}" if self.order is not None else "-"
        pair = " vs ".join(self.routes)
        status = "ok" if self.passed else "FAIL"
        return f"[{status}] {self.suite}/{self.name} {where} {pair} {self.detail}".rstrip()


@dataclass
class VerificationReport:
    results: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((r for r in self.results if not r.passed), None)

    def rows(self) -> List[Dict[str, Any]]:
        out = []
        for r in self.results:
            row = asdict(r)
            row["routes"] = " vs ".join(r.routes)
            out.append(row)
        return out

    def summary(self) -> Dict[str, Dict[str, int]]:
        out: Dict[str, Dict[str, int]] = {}
        for r in self.results:
            bucket = out.setdefault(r.suite, {"passed": 0, "failed": 0})
            bucket["passed" if r.passed else "failed"] += 1
        return out


def closed_form_parity_height2(order: int) -> TruncatedEGF:
    """1 / (1 - (y1/y2) sinh(y2 t)), written as 1/(1 - y1 * integral of cosh(y2 u))"""
    variables = ("y1", "y2")
    cosh = TruncatedEGF.hyperbolic_cosine(order, variables, MultiPoly.variable(variables, "y2"))
    inner = cosh.integrate().scale(MultiPoly.variable(variables, "y1"))
    return compose(TruncatedEGF.geometric(order, ()), inner)


def closed_form_parity_height3(order: int, even_part: bool = False) -> TruncatedEGF:
    """
    1 / (1 - y1 H) with H the integral of 1 / (1 - (y2/y3) sinh(y3 u)).

    With ``even_part`` H is replaced by (H(t) + H(-t)) / 2.
    """
    variables = ("y1", "y2", "y3")
    y1, y2, y3 = (MultiPoly.variable(variables, v) for v in variables)
    geometric = TruncatedEGF.geometric(order, ())
    cosh = TruncatedEGF.hyperbolic_cosine(order, variables, y3)
    level2 = compose(geometric, cosh.integrate().scale(y2))
    h = level2.integrate()
    if even_part:
        h = h.even_part()
    return compose(geometric, h.scale(y1))


def closed_form_k3_height2(order: int) -> TruncatedEGF:
    """1 / (1 - y1 * integral of 1 / ((1 - u y2_1)(1 - u y2_2)))"""
    variables = ("y1", "y2_1", "y2_2")
    y1, a, b = (MultiPoly.variable(variables, v) for v in variables)
    product = TruncatedEGF.geometric(order, variables, a).multiply(TruncatedEGF.geometric(order, variables, b))
    return compose(TruncatedEGF.geometric(order, ()), product.integrate().scale(y1))


def closed_form_k3_parity(order: int) -> TruncatedEGF:
    """1 / (1 - y1 * integral of cosh(y2_1 u) sinh(y2_2 u))"""
    variables = ("y1", "y2_1", "y2_2")
    y1, a, b = (MultiPoly.variable(variables, v) for v in variables)
    product = TruncatedEGF.hyperbolic_cosine(order, variables, a).multiply(
        TruncatedEGF.hyperbolic_sine(order, variables, b)
    )
    return compose(TruncatedEGF.geometric(order, ()), product.integrate().scale(y1))


def closed_form_bessel(order: int) -> TruncatedEGF:
    """exp(y1 (1 - sqrt(1 - 2t)))"""
    variables = ("y1",)
    inner = TruncatedEGF.inverse_sqrt_one_minus_2t(order, variables).integrate()
    return compose(TruncatedEGF.exponential(order, ()), inner.scale(MultiPoly.variable(variables, "y1")))


def filtered_gpoly(n: int, spec: PatternSequence, keep: Callable[[BlockForest], bool]) -> GPoly:
    """Brute-force g_n restricted to words whose forest also satisfies ``keep``"""
    keys = level_keys(spec, n)
    variables = variables_for(spec, n)
    terms: Dict[Tuple[int, ...], int] = {}
    for sigma in generate_avoiding(n, spec.k, spec):
        forest = block_decompose(sigma)
        if not keep(forest):
            continue
        exps = exponents(forest, spec, keys)
        key = tuple(exps.get(v, 0) for v in variables)
        terms[key] = terms.get(key, 0) + 1
    return GPoly(n, MultiPoly(variables, terms))


def even_level1_blocks(forest: BlockForest) -> bool:
    """Every level-1 block holds an even number of values"""
    k = forest.source.k
    return all(((root.end - root.start + 1) // k) % 2 == 0 for root in forest.roots)


def _diff(left: Mapping, right: Mapping) -> str:
    keys = sorted(set(left) | set(right), key=str)
    rows = [f"{key}: {left.get(key, 0)} != {right.get(key, 0)}" for key in keys if left.get(key, 0) != right.get(key, 0)]
    return "; ".join(rows[:5])


class VerificationBattery:
    """
    Runs named suites of exact checks.

    Args:
        max_order: Largest n any suite may use; each suite also applies its own cap
        jobs: Worker threads for brute-force enumeration
        specs: Override for the bundled pattern sequences, by name
    """

    SUITES = ("counts", "bessel", "stirling", "descents", "theorem1", "theorem2", "wilf", "trees", "parity")

    def __init__(self, max_order: int = 6, jobs: int = 1, specs: Optional[Mapping[str, PatternSequence]] = None):
        self.max_order = max_order
        self.jobs = jobs
        self._specs: Dict[str, PatternSequence] = dict(specs or {})
        self.results: List[CheckResult] = []

    def spec(self, name: str) -> PatternSequence:
        if name not in self._specs:
            self._specs[name] = bundled_spec(name)
        return self._specs[name]

    def orders(self, cap: int, start: int = 1) -> range:
        return range(start, min(self.max_order, cap) + 1)

    # -- recording --------------------------------------------------------

    def _record(self, suite: str, name: str, order: Optional[int], routes: Sequence[str], check: Callable[[], Tuple[bool, str]]) -> None:
        try:
            passed, detail = check()
        except StirlingBlocksError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        result = CheckResult(suite, name, order, passed, tuple(routes), detail)
        if not passed:
            logger.error("verification failed: %s", result.describe())
        self.results.append(result)

    def _equal(self, suite: str, name: str, order: Optional[int], routes: Sequence[str], left: Any, right: Any) -> None:
        def check() -> Tuple[bool, str]:
            if isinstance(left, GPoly) and isinstance(right, GPoly):
                a, b = left.canonical(), right.canonical()
                return a == b, "" if a == b else _diff(a, b)
            return left == right, "" if left == right else f"{left} != {right}"

        self._record(suite, name, order, routes, check)

    def _gpoly(self, suite: str, name: str, n: int, route: str, compute: Callable[[], GPoly]) -> Optional[GPoly]:
        try:
            return compute()
        except StirlingBlocksError as exc:
            self.results.append(CheckResult(suite, name, n, False, (route,), f"{type(exc).__name__}: {exc}"))
            logger.error("%s route failed for %s at n=%d: %s", route, name, n, exc)
            return None

    # -- suites -----------------------------------------------------------

    def suite_counts(self) -> None:
        """|Q_{n,k}| by enumeration against the product formula and the 1/sqrt(1-2t) series"""
        reference = TruncatedEGF.inverse_sqrt_one_minus_2t(max(self.max_order, 7))
        for n in self.orders(7, start=0):
            counted = sum(1 for _ in generate(n, 2))
            self._equal("counts", "Q_n,2", n, ("enumeration", "product"), counted, k_stirling_count(n, 2))
            self._equal("counts", "Q_n,2", n, ("enumeration", "series"), counted, reference.coefficient(n).constant_term())
        for n in self.orders(5, start=0):
            self._equal("counts", "Q_n,3", n, ("enumeration", "product"), sum(1 for _ in generate(n, 3)), k_stirling_count(n, 3))
        zigzag = [VincularPattern.parse("1~2~3"), VincularPattern.parse("3~2~1")]
        for n in self.orders(7, start=0):
            self._equal("counts", "zigzag f_n", n, ("f_poly", "reference"), f_poly(n, zigzag).total(), ZIGZAG_COUNTS[n])
            self._equal("counts", "zigzag f_n", n, ("f_poly", "alternating"), f_poly(n, zigzag).total(), alternating_count(n))

    def suite_bessel(self) -> None:
        spec = self.spec("bessel")
        series = closed_form_bessel(self.max_order)
        for n in self.orders(7):
            brute = g_poly_bruteforce(n, spec, self.jobs)
            expected = {k: bessel_coeff(n, k) for k in range(1, n + 1)}
            self._equal("bessel", "B_n", n, ("brute", "formula"), brute.degree_profile("y1"), expected)
            closed = {dict(key).get("y1", 0): c for key, c in series.coefficient(n).canonical().items()}
            self._equal("bessel", "B_n", n, ("closed form", "formula"), closed, expected)

    def suite_stirling(self) -> None:
        for name, family in (("stirling_first", stirling_first), ("stirling_second", stirling_second)):
            spec = self.spec(name)
            for n in self.orders(7):
                profile = g_poly_bruteforce(n, spec, self.jobs).project({"y2": 1}).degree_profile("y1")
                expected = {k: family(n, k) for k in range(1, n + 1) if family(n, k)}
                self._equal("stirling", name, n, ("brute", "recurrence"), profile, expected)

    def suite_descents(self) -> None:
        spec = self.spec("no_descents")
        for n in self.orders(7):
            self._equal("descents", "no_descents", n, ("brute", "n!"), count_avoiding(n, spec, self.jobs), factorial(n))

    def _three_way(self, suite: str, name: str, spec: PatternSequence, cap: int, recursive: bool) -> None:
        top = min(self.max_order, cap)
        series: Optional[TruncatedEGF] = None
        try:
            series = g_series_theorem(spec, top)
        except StirlingBlocksError as exc:
            self.results.append(CheckResult(suite, name, top, False, ("series",), f"{type(exc).__name__}: {exc}"))
        for n in self.orders(cap, start=0):
            brute = self._gpoly(suite, name, n, "brute", lambda: g_poly_bruteforce(n, spec, self.jobs))
            if recursive:
                rec = self._gpoly(suite, name, n, "recursive", lambda: g_poly_recursive(n, spec))
                if brute is not None and rec is not None:
                    self._equal(suite, name, n, ("brute", "recursive"), brute, rec)
            if series is not None:
                ser = self._gpoly(suite, name, n, "series", lambda: series_to_gpoly(series, n, spec))  # type: ignore[arg-type]
                if brute is not None and ser is not None:
                    self._equal(suite, name, n, ("brute", "series"), brute, ser)

    def suite_theorem1(self) -> None:
        for name in THEOREM1_SPECS:
            self._three_way("theorem1", name, self.spec(name), 6, recursive=True)

    def suite_theorem2(self) -> None:
        for name in THEOREM2_SPECS:
            self._three_way("theorem2", name, self.spec(name), 5, recursive=False)
        for name, closed in (("k3_height2", closed_form_k3_height2), ("k3_parity", closed_form_k3_parity)):
            spec = self.spec(name)
            top = min(self.max_order, 5)
            reference = closed(top)
            for n in self.orders(5):
                ser = self._gpoly("theorem2", name, n, "series", lambda: series_to_gpoly(g_series_theorem(spec, n), n, spec))
                if ser is not None:
                    self._equal("theorem2", name, n, ("series", "closed form"), ser, GPoly(n, reference.coefficient(n)))

    def suite_wilf(self) -> None:
        classical = [VincularPattern.classical(p) for p in permutations((1, 2, 3))]
        for n in self.orders(7):
            totals = {str(p): f_poly(n, [p]).total() for p in classical}
            first = totals[str(classical[0])]
            self._equal("wilf", "length-3 classes", n, ("f_poly", "f_poly"), set(totals.values()), {first})
        specs = [self.spec(name) for name in WILF_SPECS]
        for n in self.orders(6):
            polys = [g_poly_bruteforce(n, spec, self.jobs) for spec in specs]
            for name, poly in zip(WILF_SPECS[1:], polys[1:]):
                self._equal("wilf", f"{WILF_SPECS[0]}~{name}", n, ("brute", "brute"), polys[0], poly)

    def suite_trees(self) -> None:
        for n in self.orders(6):
            trees = list(enumerate_trees(n))
            images = {phi(tree).letters for tree in trees}
            expected = k_stirling_count(n, 2)
            self._record(
                "trees",
                "|LT_n| = |Q_n|",
                n,
                ("trees", "words"),
                lambda: (len(trees) == expected, f"{len(trees)} trees, {expected} words"),
            )
            self._equal("trees", "phi injective", n, ("images", "trees"), len(images), len(trees))

        def round_trip(n: int) -> Tuple[bool, str]:
            bad = [str(sigma) for sigma in generate(n, 2) if phi(phi_inverse(sigma)) != sigma]
            return not bad, ", ".join(bad[:3])

        for n in self.orders(5):
            self._record("trees", "phi round trip", n, ("phi", "phi_inverse"), lambda: round_trip(n))
            patterns = [VincularPattern.parse(text) for text in TREE_PATTERNS]

            def transport(n: int = n) -> Tuple[bool, str]:
                for tree in enumerate_trees(n):
                    sigma = phi(tree)
                    for p in patterns:
                        for level in range(1, n + 1):
                            if tree_block_pattern_count(tree, p, level) != block_pattern_count(sigma, p, level):
                                return False, f"{sigma} {p} level {level}"
                return True, ""

            self._record("trees", "pattern transport", n, ("tree", "word"), transport)

        example = parse_tree("(((1,4),2),3)")
        self._equal("trees", "worked example 21", None, ("tree", "expected"), tree_block_pattern_count(example, VincularPattern.parse("2,1"), 1), 2)
        self._equal("trees", "worked example 2~1", None, ("tree", "expected"), tree_block_pattern_count(example, VincularPattern.parse("2~1"), 1), 1)
        self._equal("trees", "phi example", None, ("phi", "expected"), str(phi(parse_tree("(0,((1,3),2))"))), "133221")
        self._equal("trees", "reduced example", None, ("phi", "expected"), str(phi(reduce_tree(example))), "331122")

    def suite_parity(self) -> None:
        spec2 = self.spec("parity_height2")
        closed2 = closed_form_parity_height2(min(self.max_order, 6))
        for n in self.orders(6, start=0):
            brute = g_poly_bruteforce(n, spec2, self.jobs)
            self._equal("parity", "height2", n, ("brute", "closed form"), brute, GPoly(n, closed2.coefficient(n)))
        self._three_way("parity", "parity_height2", spec2, 6, recursive=True)

        spec3 = self.spec("parity_height3")
        top = min(self.max_order, 6)
        closed3 = closed_form_parity_height3(top)
        closed3_even = closed_form_parity_height3(top, even_part=True)
        for n in self.orders(6, start=0):
            brute = g_poly_bruteforce(n, spec3, self.jobs)
            self._equal("parity", "height3", n, ("brute", "closed form"), brute, GPoly(n, closed3.coefficient(n)))
            even = filtered_gpoly(n, spec3, even_level1_blocks)
            self._equal("parity", "height3 even part", n, ("brute", "closed form"), even, GPoly(n, closed3_even.coefficient(n)))

    # -- driver -----------------------------------------------------------

    def run(self, suites: Iterable[str] = ("all",)) -> VerificationReport:
        names: List[str] = []
        for suite in suites:
            names.extend(self.SUITES if suite == "all" else [suite])
        unknown = [name for name in names if name not in self.SUITES]
        if unknown:
            raise ValueError(f"unknown suites {unknown}; choose from {self.SUITES + ('all',)}")
        start = time.perf_counter()
        self.results = []
        for name in names:
            before = len(self.results)
            suite_start = time.perf_counter()
            try:
                getattr(self, f"suite_{name}")()
            except StirlingBlocksError as exc:
                self.results.append(CheckResult(name, "suite aborted", None, False, (), f"{type(exc).__name__}: {exc}"))
                logger.error("suite %s aborted: %s", name, exc)
            logger.info(
                "suite %s: %d checks in %.2fs",
                name,
                len(self.results) - before,
                time.perf_counter() - suite_start,
            )
        return VerificationReport(list(self.results), time.perf_counter() - start)


def run_battery(suites: Iterable[str] = ("all",), max_order: int = 6, jobs: int = 1) -> VerificationReport:
    return VerificationBattery(max_order=max_order, jobs=jobs).run(suites)
