"""
Enumeration service: pattern sequences, generators for Q_{n,k} and the
brute-force polynomials g_n^{A,p}(x; y).

Words are grown by insertion: a member of Q_{j,k} is obtained from a member
of Q_{j-1,k} by placing the k consecutive copies of j into one of its
k(j-1)+1 gaps. The gaps are tried right to left, so the first word produced
is always 11..kk..nn..n.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, TypeVar, Union

from ..core.errors import DomainError, PatternSyntaxError, SpecError
from ..core.parallel import PartitionedExecutor
from ..core.patterns import PatternCountPoly, VincularPattern, Word, f_poly
from ..core.series import MultiPoly, Rational, rational_to_json
from ..core.stirling import BlockForest, KStirlingWord, block_decompose, group_pattern_count

logger = logging.getLogger(__name__)

PARITIES = ("even", "odd")
T = TypeVar("T")


@dataclass(frozen=True)
class LevelSpec:
    """
    Restrictions on one level (and type) of a word.

    Attributes:
        avoid: Block patterns that may not occur in any sibling group
        count: Block pattern whose occurrences are tracked by x, if any
        parity: Required parity of every sibling group's size, if any
    """

    avoid: FrozenSet[VincularPattern] = frozenset()
    count: Optional[VincularPattern] = None
    parity: Optional[str] = None

    def __post_init__(self) -> None:
        if self.parity is not None and self.parity not in PARITIES:
            raise SpecError(f"parity must be one of {PARITIES} or null, got {self.parity!r}")
        if not isinstance(self.avoid, frozenset):
            object.__setattr__(self, "avoid", frozenset(self.avoid))

    @property
    def kills(self) -> bool:
        """True when the singleton pattern is avoided, so no block can live here"""
        return any(a.length == 1 for a in self.avoid)

    def admits_size(self, m: int) -> bool:
        if self.parity is None:
            return True
        return (m % 2 == 0) == (self.parity == "even")

    def f(self, m: int) -> PatternCountPoly:
        """f_m^{A,p}(z) for this level, zeroed when m has the wrong parity"""
        if not self.admits_size(m):
            return PatternCountPoly((0,))
        return f_poly(m, self.avoid, self.count)

    @classmethod
    def from_json(cls, data: Optional[Mapping[str, Any]]) -> "LevelSpec":
        if data is None:
            return cls()
        if not isinstance(data, Mapping):
            raise SpecError(f"a level must be an object, got {data!r}")
        unknown = set(data) - {"avoid", "count", "parity"}
        if unknown:
            raise SpecError(f"unknown level keys: {sorted(unknown)}")
        try:
            avoid = frozenset(VincularPattern.parse(text) for text in data.get("avoid") or [])
            count_text = data.get("count")
            count = VincularPattern.parse(count_text) if count_text is not None else None
        except PatternSyntaxError as exc:
            raise SpecError(str(exc)) from exc
        return cls(avoid=avoid, count=count, parity=data.get("parity"))

    def to_json(self) -> Dict[str, Any]:
        return {
            "avoid": sorted(str(a) for a in self.avoid),
            "count": str(self.count) if self.count is not None else None,
            "parity": self.parity,
        }


LevelEntry = Union[LevelSpec, Tuple[LevelSpec, ...]]


@dataclass(frozen=True)
class PatternSequence:
    """
    Eventually constant sequence of level restrictions.

    For k = 2 every entry of ``levels`` and ``tail`` is a ``LevelSpec``; for
    k >= 3 each is a tuple of k-1 of them, one per block type. ``levels[0]``
    describes level 2 and ``tail`` every level past the listed ones.
    """

    k: int = 2
    head: LevelSpec = field(default_factory=LevelSpec)
    levels: Tuple[LevelEntry, ...] = ()
    tail: Optional[LevelEntry] = None
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.k < 2:
            raise SpecError(f"k must be at least 2, got {self.k}")
        if self.tail is None:
            empty: LevelEntry = LevelSpec() if self.k == 2 else (LevelSpec(),) * (self.k - 1)
            object.__setattr__(self, "tail", empty)
        object.__setattr__(self, "levels", tuple(self.levels))
        for entry in (*self.levels, self.tail):
            if self.k == 2 and not isinstance(entry, LevelSpec):
                raise SpecError("k = 2 levels must be single level objects")
            if self.k >= 3 and (not isinstance(entry, tuple) or len(entry) != self.k - 1):
                raise SpecError(f"k = {self.k} levels must list {self.k - 1} per-type objects")

    def types_at(self, level: int) -> List[Optional[int]]:
        if level == 1 or self.k == 2:
            return [None]
        return list(range(1, self.k))

    def entry(self, level: int) -> LevelEntry:
        """The raw entry for a level >= 2"""
        index = level - 2
        return self.levels[index] if index < len(self.levels) else self.tail  # type: ignore[return-value]

    def at(self, level: int, type_: Optional[int] = None) -> LevelSpec:
        if level < 1:
            raise DomainError(f"levels start at 1, got {level}")
        if level == 1:
            return self.head
        entry = self.entry(level)
        if self.k == 2:
            return entry  # type: ignore[return-value]
        if type_ is None or not 1 <= type_ < self.k:
            raise DomainError(f"level {level} of a k = {self.k} sequence needs a type in 1..{self.k - 1}")
        return entry[type_ - 1]  # type: ignore[index]

    def shift(self, type_: Optional[int] = None) -> "PatternSequence":
        """
        Drop the head. For k >= 3 the new head is the ``type_`` component of
        level 2, and deeper levels keep their per-type tuples.
        """
        nxt = self.entry(2)
        if self.k == 2:
            head = nxt
        else:
            if type_ is None:
                raise DomainError("shifting a k >= 3 sequence needs a type")
            head = nxt[type_ - 1]  # type: ignore[index]
        return PatternSequence(self.k, head, self.levels[1:], self.tail, self.name)  # type: ignore[arg-type]

    def height_bound(self) -> Optional[int]:
        """Largest possible height, or None when every height is reachable"""
        for level in range(1, len(self.levels) + 3):
            if all(self.at(level, t).kills for t in self.types_at(level)):
                return level - 1
        return None

    def all_levels(self) -> Iterator[LevelSpec]:
        yield self.head
        for entry in (*self.levels, self.tail):
            if isinstance(entry, LevelSpec):
                yield entry
            else:
                yield from entry  # type: ignore[misc]

    def is_prunable(self) -> bool:
        """
        Whether a partial word with a forbidden occurrence can be discarded.

        Inserting a new block only adds members to sibling groups, which keeps
        classical occurrences alive but may split an adjacency, and it changes
        group sizes, so pruning is limited to classical avoid sets without
        parity.
        """
        return all(
            spec.parity is None and all(a.is_classical for a in spec.avoid) for spec in self.all_levels()
        ) and any(spec.avoid for spec in self.all_levels())

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "PatternSequence":
        if not isinstance(data, Mapping):
            raise SpecError("a pattern sequence must be a JSON object")
        try:
            k = int(data.get("k", 2))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad k: {data.get('k')!r}") from exc

        def entry(raw: Any) -> LevelEntry:
            if k == 2:
                return LevelSpec.from_json(raw)
            if raw is None:
                return (LevelSpec(),) * (k - 1)
            if not isinstance(raw, list) or len(raw) != k - 1:
                raise SpecError(f"k = {k} levels must list {k - 1} per-type objects, got {raw!r}")
            return tuple(LevelSpec.from_json(item) for item in raw)

        return cls(
            k=k,
            head=LevelSpec.from_json(data.get("head")),
            levels=tuple(entry(raw) for raw in data.get("levels") or []),
            tail=entry(data.get("tail")),
            name=str(data.get("name", "")),
        )

    def to_json(self) -> Dict[str, Any]:
        def entry(value: LevelEntry) -> Any:
            if isinstance(value, LevelSpec):
                return value.to_json()
            return [item.to_json() for item in value]

        out: Dict[str, Any] = {
            "k": self.k,
            "head": self.head.to_json(),
            "levels": [entry(e) for e in self.levels],
            "tail": entry(self.tail),  # type: ignore[arg-type]
        }
        if self.name:
            out["name"] = self.name
        return out


def load_spec(path: Union[str, Path]) -> PatternSequence:
    """Read a pattern sequence document from disk"""
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from exc
    spec = PatternSequence.from_json(data)
    if not spec.name:
        spec = PatternSequence(spec.k, spec.head, spec.levels, spec.tail, Path(path).stem)
    return spec


def bundled_spec_names() -> List[str]:
    root = resources.files("stirlingblocks.data.specs")
    return sorted(item.name[: -len(".json")] for item in root.iterdir() if item.name.endswith(".json"))


def bundled_spec(name: str) -> PatternSequence:
    """One of the pattern sequences shipped with the package"""
    item = resources.files("stirlingblocks.data.specs") / f"{name}.json"
    if not item.is_file():
        raise SpecError(f"no bundled spec named {name!r}; choose from {bundled_spec_names()}")
    spec = PatternSequence.from_json(json.loads(item.read_text(encoding="utf-8")))
    return PatternSequence(spec.k, spec.head, spec.levels, spec.tail, spec.name or name)


# -- variables ------------------------------------------------------------

StatKey = Tuple[int, Optional[int]]


def _suffix(level: int, type_: Optional[int]) -> str:
    return f"{level}" if type_ is None else f"{level}_{type_}"


def y_name(level: int, type_: Optional[int] = None) -> str:
    return f"y{_suffix(level, type_)}"


def x_name(level: int, type_: Optional[int] = None) -> str:
    return f"x{_suffix(level, type_)}"


def level_keys(spec: PatternSequence, n: int) -> List[StatKey]:
    """(level, type) pairs that can hold a block in a word of order n"""
    top = n
    bound = spec.height_bound()
    if bound is not None:
        top = min(top, bound)
    return [
        (level, type_)
        for level in range(1, top + 1)
        for type_ in spec.types_at(level)
        if not spec.at(level, type_).kills
    ]


def variables_for(spec: PatternSequence, n: int) -> Tuple[str, ...]:
    names: List[str] = []
    for level, type_ in level_keys(spec, n):
        names.append(y_name(level, type_))
        if spec.at(level, type_).count is not None:
            names.append(x_name(level, type_))
    return tuple(names)


# -- GPoly ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GPoly:
    """g_n^{A,p}(x; y) as an exact polynomial"""

    n: int
    poly: MultiPoly

    def canonical(self) -> Dict[Tuple[Tuple[str, int], ...], Rational]:
        return self.poly.canonical()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GPoly):
            return NotImplemented
        return self.n == other.n and self.canonical() == other.canonical()

    __hash__ = None  # type: ignore[assignment]

    def total(self) -> Rational:
        return sum(self.poly.terms.values())

    def project(self, values: Mapping[str, Rational]) -> "GPoly":
        """Substitute numbers for some variables"""
        known = {name: value for name, value in values.items() if name in self.poly.variables}
        return GPoly(self.n, self.poly.evaluate(known))

    def degree_profile(self, variable: str) -> Dict[int, Rational]:
        """Coefficients grouped by the exponent of ``variable``, every other variable set to 1"""
        out: Dict[int, Rational] = {}
        for key, coeff in self.canonical().items():
            degree = dict(key).get(variable, 0)
            out[degree] = out.get(degree, 0) + coeff
        return dict(sorted(out.items()))

    def to_json(self) -> Dict[str, Any]:
        terms = []
        for key, coeff in sorted(self.canonical().items()):
            value: Any = coeff if isinstance(coeff, int) else rational_to_json(coeff)
            terms.append({"exps": dict(key), "coeff": value})
        return {"n": self.n, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GPoly":
        variables = sorted({name for term in data["terms"] for name in term["exps"]})
        rows = []
        for term in data["terms"]:
            coeff = term["coeff"]
            rows.append({"exps": term["exps"], "coeff": coeff if isinstance(coeff, Mapping) else {"num": str(coeff), "den": "1"}})
        return cls(int(data["n"]), MultiPoly.from_json(variables, rows))

    def __str__(self) -> str:
        return str(self.poly)


# -- words ----------------------------------------------------------------


def admits(forest: BlockForest, spec: PatternSequence, with_parity: bool = True) -> bool:
    """
    Whether the decomposed word avoids every pattern of ``spec`` at every
    level (and type) and, if asked, meets every group-size parity.

    Parity also binds empty groups: a parent with no children of some type
    still owns an empty group of that type, and the root group always exists.
    """
    for level in range(1, forest.height + 2):
        for type_ in spec.types_at(level):
            level_spec = spec.at(level, type_)
            check_parity = with_parity and level_spec.parity is not None
            if not level_spec.avoid and not check_parity:
                continue
            for group in forest.groups(level, type_, include_empty=check_parity):
                if check_parity and not level_spec.admits_size(len(group)):
                    return False
                if any(group_pattern_count(group, a) for a in level_spec.avoid):
                    return False
    return True


def exponents(forest: BlockForest, spec: PatternSequence, keys: Sequence[StatKey]) -> Dict[str, int]:
    """Block and counted-pattern tallies of one word, by variable name"""
    out: Dict[str, int] = {}
    for level, type_ in keys:
        blocks = forest.block_count(level, type_)
        if blocks:
            out[y_name(level, type_)] = blocks
        count = spec.at(level, type_).count
        if count is not None:
            hits = sum(group_pattern_count(group, count) for group in forest.groups(level, type_))
            if hits:
                out[x_name(level, type_)] = hits
    return out


def _children(word: Word, j: int, k: int) -> Iterator[Word]:
    block = (j,) * k
    for gap in range(len(word), -1, -1):
        yield word[:gap] + block + word[gap:]


KeepFn = Callable[[Word, int], bool]


def _completions(prefix: Word, j: int, n: int, k: int, keep: Optional[KeepFn]) -> Iterator[Word]:
    if j == n:
        yield prefix
        return
    for child in _children(prefix, j + 1, k):
        if keep is None or keep(child, j + 1):
            yield from _completions(child, j + 1, n, k, keep)


def _frontier(n: int, k: int, keep: Optional[KeepFn], jobs: int) -> List[Tuple[Word, int]]:
    """Prefixes at the shallowest depth of the insertion tree with at least ``jobs`` nodes"""
    nodes: List[Tuple[Word, int]] = [((), 0)]
    while len(nodes) < jobs and nodes and nodes[0][1] < n:
        nodes = [
            (child, j + 1)
            for word, j in nodes
            for child in _children(word, j + 1, k)
            if keep is None or keep(child, j + 1)
        ]
    return nodes


def _check_order(n: int, k: int) -> None:
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")


def _run_partitioned(
    n: int,
    k: int,
    keep: Optional[KeepFn],
    jobs: int,
    fold: Callable[[Iterator[Word]], T],
) -> List[T]:
    """Fold the completions of each frontier prefix, one partition per prefix"""
    if jobs <= 1:
        return [fold(_completions((), 0, n, k, keep))]
    frontier = _frontier(n, k, keep, jobs)
    logger.debug("insertion tree split into %d partitions for n=%d, k=%d", len(frontier), n, k)
    executor = PartitionedExecutor(jobs)
    return executor.map_ordered(lambda node: fold(_completions(node[0], node[1], n, k, keep)), frontier)


def generate(n: int, k: int = 2) -> Iterator[KStirlingWord]:
    """Every member of Q_{n,k}, in insertion order"""
    _check_order(n, k)
    for letters in _completions((), 0, n, k, None):
        yield KStirlingWord.trusted(letters, n, k)


def _pruner(spec: PatternSequence) -> Optional[KeepFn]:
    if not spec.is_prunable():
        return None
    k = spec.k

    def keep(word: Word, j: int) -> bool:
        return admits(block_decompose(KStirlingWord.trusted(word, j, k)), spec, with_parity=False)

    return keep


def generate_avoiding(n: int, k: int, spec: PatternSequence, jobs: int = 1) -> Iterator[KStirlingWord]:
    """
    Members of Q_{n,k} admitted by ``spec``, in insertion order.

    With ``jobs > 1`` the insertion tree is split across worker threads; the
    output order does not change.
    """
    _check_order(n, k)
    if spec.k != k:
        raise SpecError(f"spec is for k = {spec.k}, asked for k = {k}")

    def fold(words: Iterator[Word]) -> List[KStirlingWord]:
        out = []
        for letters in words:
            sigma = KStirlingWord.trusted(letters, n, k)
            if admits(block_decompose(sigma), spec):
                out.append(sigma)
        return out

    if jobs <= 1:
        for sigma_letters in _completions((), 0, n, k, _pruner(spec)):
            sigma = KStirlingWord.trusted(sigma_letters, n, k)
            if admits(block_decompose(sigma), spec):
                yield sigma
        return
    for chunk in _run_partitioned(n, k, _pruner(spec), jobs, fold):
        yield from chunk


def count_avoiding(n: int, spec: PatternSequence, jobs: int = 1) -> int:
    return sum(1 for _ in generate_avoiding(n, spec.k, spec, jobs))


def g_poly_bruteforce(n: int, spec: PatternSequence, jobs: int = 1) -> GPoly:
    """
    g_n by direct enumeration: the sum over admitted words of the product of
    y^{blocks} and x^{counted occurrences} per level (and type).
    """
    _check_order(n, spec.k)
    keys = level_keys(spec, n)
    variables = variables_for(spec, n)
    k = spec.k

    def fold(words: Iterator[Word]) -> Counter:
        counts: Counter = Counter()
        for letters in words:
            forest = block_decompose(KStirlingWord.trusted(letters, n, k))
            if not admits(forest, spec):
                continue
            exps = exponents(forest, spec, keys)
            counts[tuple(exps.get(v, 0) for v in variables)] += 1
        return counts

    total: Counter = Counter()
    for partial in _run_partitioned(n, k, _pruner(spec), jobs, fold):
        total.update(partial)
    logger.info("brute force g_%d over %s: %d words admitted", n, spec.name or "spec", sum(total.values()))
    return GPoly(n, MultiPoly(variables, dict(total)))

