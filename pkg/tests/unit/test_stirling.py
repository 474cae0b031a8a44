"""
Tests for k-Stirling words and the block decomposition
"""
import pytest

from stirlingblocks.core.errors import InvalidWordError
from stirlingblocks.core.patterns import parse_pattern
from stirlingblocks.core.stirling import (
    KStirlingWord,
    block_decompose,
    block_pattern_count,
    height,
    is_valid,
    level_statistics,
    sibling_groups,
    strip_above,
)


@pytest.mark.unit
class TestWords:
    """Membership in Q_{n,k}, parsing and serialization"""

    def test_worked_word_is_valid(self):
        assert is_valid((4, 4, 1, 5, 7, 7, 8, 8, 5, 2, 2, 1, 3, 6, 6, 3), 8, 2)

    @pytest.mark.parametrize(
        "letters,n,k",
        [
            ((1, 2, 1, 2), 2, 2),  # 2 between the copies of 1 is fine, 1 between the 2s is not
            ((2, 1, 1, 2), 2, 2),
            ((1, 1, 2), 2, 2),
            ((1, 1, 1), 1, 2),
            ((1, 1, 3, 3), 2, 2),
        ],
    )
    def test_invalid_words(self, letters, n, k):
        assert not is_valid(letters, n, k)

    def test_empty_word(self):
        assert is_valid((), 0, 2)

    def test_parse_infers_k(self):
        sigma = KStirlingWord.parse("112332")
        assert sigma.k == 2
        assert KStirlingWord.parse("111").k == 3

    def test_parse_rejects_non_stirling(self):
        with pytest.raises(InvalidWordError):
            KStirlingWord.parse("1212")

    def test_parse_rejects_garbage(self):
        with pytest.raises(InvalidWordError):
            KStirlingWord.parse("1a1")
        with pytest.raises(InvalidWordError):
            KStirlingWord.parse("0,0")

    def test_k_must_be_at_least_two(self):
        with pytest.raises(InvalidWordError):
            KStirlingWord((1,), 1, 1)

    def test_comma_form_above_nine(self):
        letters = [10, 10] + [v for v in range(1, 10) for _ in range(2)]
        sigma = KStirlingWord.from_letters(letters)
        text = str(sigma)
        assert text.startswith("10,10,1,1")
        assert KStirlingWord.parse(text) == sigma

    def test_digit_form(self, worked_word):
        assert str(worked_word) == "4415778852213663"
        assert len(worked_word) == 16


@pytest.mark.unit
class TestBlockDecomposition:
    """Levels, parents, types and sibling groups"""

    def test_worked_word_levels(self, worked_word):
        forest = block_decompose(worked_word)
        assert forest.levels() == {1: [4, 1, 3], 2: [5, 2, 6], 3: [7, 8]}
        assert forest.height == 3
        assert height(worked_word) == 3

    def test_parents(self, worked_word):
        forest = block_decompose(worked_word)
        assert forest.blocks[5].parent is forest.blocks[1]
        assert forest.blocks[7].parent is forest.blocks[5]
        assert forest.blocks[4].parent is None
        assert forest.blocks[1].span == (2, 11)

    def test_sibling_groups(self, worked_word):
        forest = block_decompose(worked_word)
        assert sibling_groups(forest, 2) == [[5, 2], [6]]
        assert sibling_groups(forest, 1) == [[4, 1, 3]]
        assert sibling_groups(forest, 4) == []

    def test_empty_groups_on_request(self):
        forest = block_decompose(KStirlingWord.parse("1122"))
        assert forest.groups(2) == []
        assert forest.groups(2, include_empty=True) == [[], []]

    def test_nested_word(self):
        forest = block_decompose(KStirlingWord.parse("133221"))
        assert forest.levels() == {1: [1], 2: [3, 2]}
        assert all(forest.blocks[v].parent is forest.blocks[1] for v in (2, 3))

    def test_types_for_k3(self):
        # 2 sits in the first gap of 1 and 3 in the second
        forest = block_decompose(KStirlingWord.parse("122213331"))
        assert forest.blocks[2].type == 1
        assert forest.blocks[3].type == 2
        assert forest.blocks[1].type is None
        assert forest.block_count(2, 1) == 1
        assert forest.groups(2, 2) == [[forest.blocks[3]]]

    def test_k2_has_no_types(self, worked_word):
        assert all(b.type is None for b in block_decompose(worked_word).blocks.values())

    def test_empty_word(self):
        assert height(KStirlingWord((), 0, 2)) == 0


@pytest.mark.unit
class TestBlockPatterns:
    """Pattern counts among siblings"""

    @pytest.mark.parametrize("pattern,level,expected", [
        ("2,1", 1, 2),
        ("2,1", 2, 1),
        ("2,1", 3, 0),
        ("2~1", 1, 1),
        ("2~1", 2, 1),
        ("1,2", 3, 1),
        ("1", 2, 3),
    ])
    def test_worked_counts(self, worked_word, pattern, level, expected):
        assert block_pattern_count(worked_word, parse_pattern(pattern), level) == expected

    def test_adjacent_siblings(self):
        sigma = KStirlingWord.parse("133221")
        assert block_pattern_count(sigma, parse_pattern("2~1"), 2) == 1

    def test_underline_needs_consecutive_siblings(self):
        # level-1 blocks 1, 3, 2 in that order; 4 nests inside 2
        sigma = KStirlingWord.parse("11332442")
        assert block_pattern_count(sigma, parse_pattern("1,2"), 1) == 2
        assert block_pattern_count(sigma, parse_pattern("1~2"), 1) == 1

    def test_occurrences_do_not_span_groups(self, worked_word):
        # 5 and 6 are both at level 2 but under different parents
        assert block_pattern_count(worked_word, parse_pattern("1,2"), 2) == 0


@pytest.mark.unit
class TestStatistics:
    """level_statistics and strip_above"""

    def test_block_counts(self, worked_word):
        stats = level_statistics(block_decompose(worked_word))
        assert stats.blocks == {(1, None): 3, (2, None): 3, (3, None): 2}
        assert stats.blocks_at(2) == 3
        assert stats.total_blocks() == 8

    def test_pattern_counts(self, worked_word):
        stats = level_statistics(
            block_decompose(worked_word),
            {(1, None): parse_pattern("2~1"), (2, None): parse_pattern("2,1")},
        )
        assert stats.patterns == {(1, None): 1, (2, None): 1}

    def test_strip_above(self, worked_word):
        stripped = strip_above(worked_word, 1)
        assert str(stripped) == "331122"
        assert height(stripped) == 1

    def test_strip_everything(self, worked_word):
        assert strip_above(worked_word, 0).n == 0
