"""
Labeled planar binary trees and their bijection with Stirling permutations.

LT_n is the set of planar rooted binary trees whose n+1 leaves carry the
labels 0..n, with the smallest label of every left subtree below the
smallest label of the matching right subtree. ``phi`` walks such a tree
depth first and writes the minimum of each right subtree when descending
into it and again when climbing back out, giving a member of Q_n.

Internal nodes are addressed by paths of ``"L"``/``"R"`` steps from the root.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterator, List, Sequence, Tuple, Union

from .errors import InvalidTreeError, InvalidWordError
from .patterns import VincularPattern
from .stirling import KStirlingWord, block_pattern_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Internal:
    left: "Node"
    right: "Node"


Node = Union[Leaf, Internal]


def leaves(node: Node) -> List[int]:
    """Leaf labels in left-to-right order"""
    if isinstance(node, Leaf):
        return [node.label]
    return leaves(node.left) + leaves(node.right)


def min_label(node: Node) -> int:
    while isinstance(node, Internal):
        node = node.left
    return node.label


def order(node: Node) -> int:
    """n for a tree with n+1 leaves"""
    return len(leaves(node)) - 1


def _min_condition_holds(node: Node) -> bool:
    if isinstance(node, Leaf):
        return True
    return (
        min(leaves(node.left)) < min(leaves(node.right))
        and _min_condition_holds(node.left)
        and _min_condition_holds(node.right)
    )


def validate_tree(node: Node) -> None:
    """
    Raise ``InvalidTreeError`` unless ``node`` is a member of LT_n.

    Labels must be exactly 0..n and every internal node must satisfy the
    left-minimum condition.
    """
    labels = leaves(node)
    if sorted(labels) != list(range(len(labels))):
        raise InvalidTreeError(f"leaf labels {labels} are not 0..{len(labels) - 1}")
    if not _min_condition_holds(node):
        raise InvalidTreeError(f"{format_tree(node)} violates the left-minimum condition")


def is_labeled_tree(node: Node) -> bool:
    try:
        validate_tree(node)
    except InvalidTreeError:
        return False
    return True


def reduce_tree(node: Node) -> Node:
    """Relabel leaves so the i-th smallest label becomes i - 1"""
    rank = {label: i for i, label in enumerate(sorted(set(leaves(node))))}

    def relabel(current: Node) -> Node:
        if isinstance(current, Leaf):
            return Leaf(rank[current.label])
        return Internal(relabel(current.left), relabel(current.right))

    return relabel(node)


def _trees_on(labels: Tuple[int, ...]) -> Iterator[Node]:
    if len(labels) == 1:
        yield Leaf(labels[0])
        return
    smallest, rest = labels[0], labels[1:]
    # the left subtree always holds the smallest label; any nonempty subset of the rest may go right
    for size in range(1, len(rest) + 1):
        for right_labels in combinations(rest, size):
            left_labels = (smallest,) + tuple(v for v in rest if v not in right_labels)
            for left in _trees_on(left_labels):
                for right in _trees_on(right_labels):
                    yield Internal(left, right)


def enumerate_trees(n: int) -> Iterator[Node]:
    """Every member of LT_n exactly once"""
    if n < 0:
        raise InvalidTreeError(f"tree order must be nonnegative, got {n}")
    yield from _trees_on(tuple(range(n + 1)))


def _walk(node: Node, out: List[int]) -> None:
    if isinstance(node, Leaf):
        return
    _walk(node.left, out)
    m = min_label(node.right)
    out.append(m)
    _walk(node.right, out)
    out.append(m)


def phi(tree: Node) -> KStirlingWord:
    """
    Depth-first image of a labeled tree in Q_n.

    Raises:
        InvalidTreeError: if the tree is not in LT_n
    """
    validate_tree(tree)
    letters: List[int] = []
    _walk(tree, letters)
    return KStirlingWord.trusted(tuple(letters), order(tree), 2)


def _top_blocks(letters: Sequence[int]) -> List[Tuple[int, Sequence[int]]]:
    """Split a 2-Stirling word into its level-1 blocks as (value, interior)"""
    out = []
    pos = 0
    while pos < len(letters):
        value = letters[pos]
        close = letters.index(value, pos + 1)
        out.append((value, letters[pos + 1 : close]))
        pos = close + 1
    return out


def _build(spine_label: int, letters: Sequence[int]) -> Node:
    node: Node = Leaf(spine_label)
    for value, interior in _top_blocks(letters):
        node = Internal(node, _build(value, interior))
    return node


def phi_inverse(sigma: KStirlingWord) -> Node:
    """
    The tree whose depth-first image is ``sigma``.

    The tree is a left comb ending in leaf 0; the right subtree hung off the
    spine for each level-1 block [b,b] is built the same way from the
    interior of that block, with b as its spine leaf.
    """
    if sigma.k != 2:
        raise InvalidWordError(f"the tree bijection needs k = 2, got k = {sigma.k}")
    return _build(0, sigma.letters)


def node_at(tree: Node, path: str) -> Node:
    node = tree
    for step in path:
        if not isinstance(node, Internal) or step not in "LR":
            raise InvalidTreeError(f"path {path!r} does not address a node")
        node = node.left if step == "L" else node.right
    return node


def vertices(tree: Node) -> List[str]:
    """Paths of all internal nodes in preorder"""
    out: List[str] = []

    def visit(node: Node, path: str) -> None:
        if isinstance(node, Internal):
            out.append(path)
            visit(node.left, path + "L")
            visit(node.right, path + "R")

    visit(tree, "")
    return out


def tree_vertex_level(tree: Node, path: str) -> int:
    """One more than the number of right branches between the root and the node"""
    node_at(tree, path)
    return 1 + path.count("R")


def block_levels(tree: Node) -> Dict[int, int]:
    """
    Level of every block of phi(tree), read off the tree.

    The block [m,m] starts at the internal node whose right subtree has
    minimum m, and sits at that node's vertex level.
    """
    return {
        min_label(node_at(tree, path).right): tree_vertex_level(tree, path)  # type: ignore[union-attr]
        for path in vertices(tree)
    }


def tree_height(tree: Node) -> int:
    return max((tree_vertex_level(tree, path) for path in vertices(tree)), default=0)


def left_comb(labels: Sequence[int]) -> Node:
    """Every right child is a leaf"""
    node: Node = Leaf(labels[0])
    for label in labels[1:]:
        node = Internal(node, Leaf(label))
    return node


def right_comb(labels: Sequence[int]) -> Node:
    """Every left child is a leaf"""
    node: Node = Leaf(labels[-1])
    for label in reversed(labels[:-1]):
        node = Internal(Leaf(label), node)
    return node


def tree_block_pattern_count(tree: Node, p: VincularPattern, level: int) -> int:
    """
    Occurrences of ``p`` among sibling blocks at ``level`` of the tree's image.

    Trees labeled by any distinct integers are reduced first.
    """
    return block_pattern_count(phi(reduce_tree(tree)), p, level)


def format_tree(tree: Node) -> str:
    if isinstance(tree, Leaf):
        return str(tree.label)
    return f"({format_tree(tree.left)},{format_tree(tree.right)})"


_TOKEN_RE = re.compile(r"\(|\)|,|\d+")


def parse_tree(text: str) -> Node:
    """Parse ``"(0,((1,3),2))"``; whitespace is ignored"""
    compact = re.sub(r"\s+", "", text)
    tokens = _TOKEN_RE.findall(compact)
    if "".join(tokens) != compact or not tokens:
        raise InvalidTreeError(f"unparsable tree: {text!r}")
    pos = 0

    def expect(token: str) -> None:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != token:
            raise InvalidTreeError(f"expected {token!r} at token {pos} of {text!r}")
        pos += 1

    def node() -> Node:
        nonlocal pos
        if pos >= len(tokens):
            raise InvalidTreeError(f"truncated tree: {text!r}")
        if tokens[pos] == "(":
            pos += 1
            left = node()
            expect(",")
            right = node()
            expect(")")
            return Internal(left, right)
        if tokens[pos].isdigit():
            pos += 1
            return Leaf(int(tokens[pos - 1]))
        raise InvalidTreeError(f"unexpected {tokens[pos]!r} in {text!r}")

    tree = node()
    if pos != len(tokens):
        raise InvalidTreeError(f"trailing input in {text!r}")
    return tree
