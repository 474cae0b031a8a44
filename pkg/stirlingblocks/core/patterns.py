"""
Pattern core: words, reduced forms, vincular patterns and the
permutation-side polynomials f_n^{A,p}(z).

Pattern text syntax: entries separated by ``,``; a ``~`` in place of the
comma demands that the two neighbouring entries occupy adjacent positions.
``"2,1"`` is the classical inversion, ``"2~1"`` a descent, ``"2,3~1"`` the
pattern 2 followed by an underlined 31.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import DomainError, PatternSyntaxError

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

_PATTERN_RE = re.compile(r"^\d+(?:[,~]\d+)*$")


def reduce_word(w: Sequence[int]) -> Word:
    """
    Reduced form of a word: the i-th smallest distinct value becomes i.

    Args:
        w: Nonempty word over the positive integers

    Returns:
        Order-isomorphic word whose distinct values are exactly 1..d

    Raises:
        DomainError: if ``w`` is empty
    """
    if len(w) == 0:
        raise DomainError("cannot reduce the empty word")
    rank = {value: i + 1 for i, value in enumerate(sorted(set(w)))}
    return tuple(rank[value] for value in w)


def is_permutation(w: Sequence[int]) -> bool:
    return sorted(w) == list(range(1, len(w) + 1))


@dataclass(frozen=True)
class VincularPattern:
    """A permutation of {1..m} with an adjacency mask of length m-1"""

    perm: Tuple[int, ...]
    adjacent: Tuple[bool, ...]

    def __post_init__(self) -> None:
        if not self.perm:
            raise PatternSyntaxError("a pattern needs at least one entry")
        if not is_permutation(self.perm):
            raise PatternSyntaxError(f"{self.perm} is not a permutation of 1..{len(self.perm)}")
        if len(self.adjacent) != len(self.perm) - 1:
            raise PatternSyntaxError(
                f"adjacency mask of length {len(self.adjacent)} does not fit a pattern "
                f"of length {len(self.perm)}"
            )

    @classmethod
    def parse(cls, text: str) -> "VincularPattern":
        """
        Parse pattern text such as ``"2,3~1"``.

        A separator-free string of digits (``"132"``) is read as a classical
        pattern with one entry per digit.
        """
        compact = re.sub(r"\s+", "", text)
        if not compact or not _PATTERN_RE.match(compact):
            raise PatternSyntaxError(f"unparsable pattern: {text!r}")
        if compact.isdigit() and len(compact) > 1:
            entries = [int(ch) for ch in compact]
            mask = [False] * (len(entries) - 1)
        else:
            entries = [int(tok) for tok in re.split(r"[,~]", compact)]
            mask = [sep == "~" for sep in re.findall(r"[,~]", compact)]
        return cls(tuple(entries), tuple(mask))

    @classmethod
    def classical(cls, perm: Sequence[int]) -> "VincularPattern":
        return cls(tuple(perm), (False,) * (len(perm) - 1))

    @classmethod
    def consecutive(cls, perm: Sequence[int]) -> "VincularPattern":
        return cls(tuple(perm), (True,) * (len(perm) - 1))

    @property
    def length(self) -> int:
        return len(self.perm)

    @property
    def is_classical(self) -> bool:
        return not any(self.adjacent)

    def relaxed(self, j: int) -> "VincularPattern":
        """Same pattern with the adjacency constraint between entries j, j+1 removed"""
        mask = list(self.adjacent)
        mask[j] = False
        return VincularPattern(self.perm, tuple(mask))

    def __str__(self) -> str:
        out = [str(self.perm[0])]
        for flag, entry in zip(self.adjacent, self.perm[1:]):
            out.append("~" if flag else ",")
            out.append(str(entry))
        return "".join(out)


def parse_pattern(text: str) -> VincularPattern:
    return VincularPattern.parse(text)


def _count(
    p: VincularPattern,
    w: Sequence[int],
    touching: Optional[Sequence[bool]],
    must_end_at: Optional[int],
) -> int:
    m = p.length
    size = len(w)
    chosen: List[int] = []

    def extend(j: int, start: int) -> int:
        if j == m:
            if must_end_at is not None and chosen[-1] != must_end_at:
                return 0
            return 1
        if j > 0 and p.adjacent[j - 1]:
            prev = chosen[-1]
            if touching is not None and not touching[prev]:
                return 0
            candidates: Iterable[int] = (prev + 1,) if prev + 1 < size else ()
        else:
            candidates = range(start, size)
        total = 0
        for i in candidates:
            value = w[i]
            if any(
                w[c] == value or (w[c] < value) != (p.perm[r] < p.perm[j])
                for r, c in enumerate(chosen)
            ):
                continue
            chosen.append(i)
            total += extend(j + 1, i + 1)
            chosen.pop()
        return total

    return extend(0, 0)


def count_occurrences(
    p: VincularPattern,
    w: Sequence[int],
    touching: Optional[Sequence[bool]] = None,
) -> int:
    """
    Number of index tuples of ``w`` forming an occurrence of ``p``.

    Args:
        p: The pattern
        w: Word to scan; equal letters never take part in one occurrence
        touching: Optional mask over consecutive positions of ``w``; when given,
            an underlined pair may only use positions i, i+1 with ``touching[i]``
            true. Block patterns use it to express that one block ends right
            where the next begins.

    Returns:
        Occurrence count
    """
    if p.length == 1:
        return len(w)
    return _count(p, w, touching, None)


def count_occurrences_ending_at_last(p: VincularPattern, w: Sequence[int]) -> int:
    """Occurrences whose final index is the last position of ``w``"""
    if not w:
        return 0
    return _count(p, w, None, len(w) - 1)


def avoids(avoid: Iterable[VincularPattern], w: Sequence[int]) -> bool:
    return all(count_occurrences(a, w) == 0 for a in avoid)


@dataclass(frozen=True)
class PatternCountPoly:
    """
    Polynomial in z with nonnegative integer coefficients.

    ``coefficients[e]`` is the number of avoiders with exactly ``e``
    occurrences of the counted pattern.
    """

    coefficients: Tuple[int, ...]

    def total(self) -> int:
        return sum(self.coefficients)

    def evaluate(self, z: int) -> int:
        return sum(c * z**e for e, c in enumerate(self.coefficients))

    def as_dict(self) -> Dict[int, int]:
        return {e: c for e, c in enumerate(self.coefficients) if c}

    def __str__(self) -> str:
        terms = []
        for e, c in enumerate(self.coefficients):
            if not c:
                continue
            if e == 0:
                terms.append(str(c))
            else:
                power = "z" if e == 1 else f"z^{e}"
                terms.append(power if c == 1 else f"{c}{power}")
        return " + ".join(terms) if terms else "0"


def _avoiders(n: int, avoid: FrozenSet[VincularPattern]) -> Iterator[Word]:
    """Permutations of 1..n avoiding ``avoid``, built left to right with prefix pruning.

    An occurrence inside a prefix survives every extension, so only
    occurrences that use the newest position have to be checked.
    """
    if not avoid:
        yield from permutations(range(1, n + 1))
        return
    prefix: List[int] = []
    unused = set(range(1, n + 1))

    def grow() -> Iterator[Word]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for value in sorted(unused):
            prefix.append(value)
            if all(count_occurrences_ending_at_last(a, prefix) == 0 for a in avoid):
                unused.discard(value)
                yield from grow()
                unused.add(value)
            prefix.pop()

    yield from grow()


@lru_cache(maxsize=None)
def _f_poly_cached(
    n: int, avoid: FrozenSet[VincularPattern], p: Optional[VincularPattern]
) -> PatternCountPoly:
    counts: Dict[int, int] = {}
    for pi in _avoiders(n, avoid):
        e = count_occurrences(p, pi) if p is not None else 0
        counts[e] = counts.get(e, 0) + 1
    if not counts:
        return PatternCountPoly((0,))
    coefficients = [0] * (max(counts) + 1)
    for e, c in counts.items():
        coefficients[e] = c
    logger.debug("f_%d for avoid=%s count=%s: %s", n, sorted(map(str, avoid)), p, counts)
    return PatternCountPoly(tuple(coefficients))


def f_poly(
    n: int,
    avoid: Iterable[VincularPattern] = (),
    p: Optional[VincularPattern] = None,
) -> PatternCountPoly:
    """
    f_n^{A,p}(z): sum of z^{p(pi)} over permutations of length n avoiding A.

    ``n = 0`` gives the constant 1 (the empty permutation avoids everything).
    """
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    return _f_poly_cached(n, frozenset(avoid), p)
