"""
k-Stirling words and their block decomposition.

A block [i,i] is the segment from the first to the last copy of i. Levels
are computed from nesting: a block directly inside [j,j] (no block in
between) sits one level below it. For k >= 3 a child's type is the gap of
the parent it lies in, counted from 1.

Positions are 0-based throughout the API.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InvalidWordError
from .patterns import VincularPattern, Word, count_occurrences, reduce_word

logger = logging.getLogger(__name__)


def is_valid(letters: Sequence[int], n: int, k: int) -> bool:
    """True iff ``letters`` is a member of Q_{n,k}"""
    if n < 0 or k < 1 or len(letters) != n * k:
        return False
    counts = Counter(letters)
    if set(counts) != set(range(1, n + 1)) or any(c != k for c in counts.values()):
        return False
    last_seen: Dict[int, int] = {}
    for pos, value in enumerate(letters):
        if value in last_seen:
            if any(between <= value for between in letters[last_seen[value] + 1 : pos]):
                return False
        last_seen[value] = pos
    return True


@dataclass(frozen=True)
class KStirlingWord:
    """A validated member of Q_{n,k}"""

    letters: Word
    n: int
    k: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise InvalidWordError(f"multiplicity must be at least 2, got {self.k}")
        if not is_valid(self.letters, self.n, self.k):
            raise InvalidWordError(f"{self.letters} is not a {self.k}-Stirling permutation of order {self.n}")

    @classmethod
    def trusted(cls, letters: Word, n: int, k: int) -> "KStirlingWord":
        """Skip validation; for generators whose output is valid by construction"""
        word = object.__new__(cls)
        object.__setattr__(word, "letters", letters)
        object.__setattr__(word, "n", n)
        object.__setattr__(word, "k", k)
        return word

    @classmethod
    def from_letters(cls, letters: Sequence[int], k: Optional[int] = None) -> "KStirlingWord":
        """Build a word, inferring n from the largest letter and k from the copies of 1"""
        letters = tuple(letters)
        if not letters:
            return cls((), 0, k if k is not None else 2)
        if k is None:
            k = letters.count(1) if 1 in letters else 0
        return cls(letters, max(letters), k)

    @classmethod
    def parse(cls, text: str, k: Optional[int] = None) -> "KStirlingWord":
        """
        Parse ``"4415778852213663"`` or ``"10,10,1,1"``.

        Digit strings are one letter per digit; anything containing a comma
        is a comma-separated list.
        """
        compact = "".join(text.split())
        try:
            if "," in compact:
                letters = tuple(int(tok) for tok in compact.split(","))
            else:
                letters = tuple(int(ch) for ch in compact)
        except ValueError as exc:
            raise InvalidWordError(f"unparsable word: {text!r}") from exc
        if any(v <= 0 for v in letters):
            raise InvalidWordError(f"letters must be positive: {text!r}")
        return cls.from_letters(letters, k)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if self.n <= 9:
            return "".join(str(v) for v in self.letters)
        return ",".join(str(v) for v in self.letters)


@dataclass(eq=False)
class Block:
    """The block [value, value] of a word"""

    value: int
    start: int
    end: int = -1
    level: int = 1
    type: Optional[int] = None
    parent: Optional["Block"] = field(default=None, repr=False)
    children: List["Block"] = field(default_factory=list, repr=False)

    @property
    def span(self) -> Tuple[int, int]:
        return (self.start, self.end)

    def children_of_type(self, type_: Optional[int]) -> List["Block"]:
        if type_ is None:
            return list(self.children)
        return [child for child in self.children if child.type == type_]


@dataclass
class BlockForest:
    """Nested block decomposition of a word"""

    source: KStirlingWord
    roots: List[Block]
    blocks: Dict[int, Block]

    @property
    def height(self) -> int:
        return max((b.level for b in self.blocks.values()), default=0)

    def levels(self) -> Dict[int, List[int]]:
        """Block values per level, each list in left-to-right order"""
        out: Dict[int, List[int]] = {}
        for block in sorted(self.blocks.values(), key=lambda b: b.start):
            out.setdefault(block.level, []).append(block.value)
        return out

    def at_level(self, level: int) -> List[Block]:
        return sorted(
            (b for b in self.blocks.values() if b.level == level), key=lambda b: b.start
        )

    def block_count(self, level: int, type_: Optional[int] = None) -> int:
        return sum(
            1
            for b in self.blocks.values()
            if b.level == level and (type_ is None or b.type == type_)
        )

    def groups(self, level: int, type_: Optional[int] = None, include_empty: bool = False) -> List[List[Block]]:
        """
        Sibling groups at a level as lists of blocks.

        Level 1 is a single group of all roots. Deeper levels give one group
        per (parent, type); ``type_=None`` returns the groups of every type.
        Empty groups are dropped unless ``include_empty`` is set.
        """
        if level == 1:
            return [list(self.roots)] if (self.roots or include_empty) else []
        k = self.source.k
        types: List[Optional[int]] = [None] if k == 2 else (
            [type_] if type_ is not None else list(range(1, k))
        )
        out: List[List[Block]] = []
        for parent in self.at_level(level - 1):
            for t in types:
                group = parent.children_of_type(t)
                if group or include_empty:
                    out.append(group)
        return out


def block_decompose(sigma: KStirlingWord) -> BlockForest:
    """
    Decompose a word into its block forest.

    A stack holds the open blocks; a letter either opens a block (first copy)
    or must belong to the block on top of the stack.
    """
    k = sigma.k
    blocks: Dict[int, Block] = {}
    seen: Dict[int, int] = {}
    roots: List[Block] = []
    stack: List[Block] = []
    for pos, value in enumerate(sigma.letters):
        copies = seen.get(value, 0)
        if copies == 0:
            parent = stack[-1] if stack else None
            block = Block(value=value, start=pos)
            if parent is None:
                roots.append(block)
            else:
                block.parent = parent
                block.level = parent.level + 1
                block.type = seen[parent.value] if k >= 3 else None
                parent.children.append(block)
            blocks[value] = block
            stack.append(block)
        elif not stack or stack[-1].value != value:
            raise InvalidWordError(f"letter {value} at position {pos} breaks block nesting")
        seen[value] = copies + 1
        if seen[value] == k:
            stack.pop().end = pos
    if stack:
        raise InvalidWordError(f"unterminated blocks: {[b.value for b in stack]}")
    return BlockForest(source=sigma, roots=roots, blocks=blocks)


def sibling_groups(forest: BlockForest, level: int, type_: Optional[int] = None) -> List[List[int]]:
    """Nonempty sibling groups at ``level`` (and ``type_``) as value sequences"""
    return [[b.value for b in group] for group in forest.groups(level, type_)]


def group_pattern_count(group: Sequence[Block], p: VincularPattern) -> int:
    if len(group) < p.length:
        return 0
    values = [b.value for b in group]
    touching = [left.end + 1 == right.start for left, right in zip(group, group[1:])]
    touching.append(False)
    return count_occurrences(p, values, touching)


def block_pattern_count(
    sigma: KStirlingWord,
    p: VincularPattern,
    level: int,
    type_: Optional[int] = None,
    forest: Optional[BlockForest] = None,
) -> int:
    """
    Occurrences of ``p`` as a block pattern among siblings at ``level``.

    An underlined pair needs the final copy of the earlier block to be
    immediately followed by the first copy of the later block.
    """
    forest = forest if forest is not None else block_decompose(sigma)
    return sum(group_pattern_count(group, p) for group in forest.groups(level, type_))


def height(sigma: KStirlingWord) -> int:
    if sigma.n == 0:
        return 0
    return block_decompose(sigma).height


StatKey = Tuple[int, Optional[int]]


@dataclass
class LevelStat:
    """Per-(level, type) block counts and counted-pattern occurrences"""

    blocks: Dict[StatKey, int]
    patterns: Dict[StatKey, int]

    def blocks_at(self, level: int) -> int:
        return sum(c for (lvl, _), c in self.blocks.items() if lvl == level)

    def total_blocks(self) -> int:
        return sum(self.blocks.values())


def level_statistics(
    forest: BlockForest, count_patterns: Optional[Dict[StatKey, VincularPattern]] = None
) -> LevelStat:
    """
    bl^{(i)} / bl^{(i,j)} for every populated level, plus p^{(i)} / p^{(i,j)}
    for each requested (level, type) key. Level 1 and every level of a k=2
    word use the type ``None``.
    """
    blocks: Dict[StatKey, int] = {}
    for b in forest.blocks.values():
        key = (b.level, b.type)
        blocks[key] = blocks.get(key, 0) + 1
    patterns: Dict[StatKey, int] = {}
    for (level, type_), p in (count_patterns or {}).items():
        patterns[(level, type_)] = sum(
            group_pattern_count(group, p) for group in forest.groups(level, type_)
        )
    return LevelStat(blocks=blocks, patterns=patterns)


def strip_above(sigma: KStirlingWord, level: int) -> KStirlingWord:
    """Delete every block deeper than ``level`` and reduce what is left"""
    forest = block_decompose(sigma)
    kept = [v for v in sigma.letters if forest.blocks[v].level <= level]
    if not kept:
        return KStirlingWord((), 0, sigma.k)
    return KStirlingWord.from_letters(reduce_word(kept), sigma.k)
