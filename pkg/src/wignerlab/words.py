"""Words over positive-integer letters, their graphs, and Dyck paths.

A word encodes an index tuple of the trace expansion: consecutive letters
are matrix-entry indices, so the word's graph (with edge traversal counts)
determines the expectation of the corresponding entry product.  Closed
words whose every edge is traversed at least twice are the only ones that
survive expectation; among those, maximal-weight words are in bijection
with Dyck paths via the first/second-traversal encoding implemented here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CapacityError

WORD_LENGTH_CAP = 11
DYCK_HALF_LENGTH_CAP = 12


class WordClass(str, enum.Enum):
    GENERAL = "general"
    WEAK_WIGNER = "weak_wigner"
    WIGNER = "wigner"
    CRITICAL_WEAK_WIGNER = "critical_weak_wigner"

    def __str__(self) -> str:  # CLI-friendly
        return self.value


@dataclass(frozen=True)
class Word:
    """A finite sequence of positive-integer letters, at least one long."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if len(self.letters) < 1:
            raise ValueError("a word needs at least one letter")
        if any((not isinstance(s, int)) or s < 1 for s in self.letters):
            raise ValueError(f"letters must be positive integers, got {self.letters}")

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return len(set(self.letters))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.letters)

    @property
    def is_closed(self) -> bool:
        return self.letters[0] == self.letters[-1]

    def steps(self) -> list[tuple[int, int]]:
        """Directed steps (s_i, s_{i+1}); empty for single-letter words."""
        return list(zip(self.letters, self.letters[1:]))

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, idx):
        return self.letters[idx]

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.letters)


def word(letters: Iterable[int]) -> Word:
    return Word(tuple(int(s) for s in letters))


def undirected_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class WordGraph:
    """Graph on a word's support with undirected edge traversal counts."""

    vertices: frozenset[int]
    traversal_count: dict[tuple[int, int], int] = field(hash=False)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.traversal_count)

    @property
    def total_traversals(self) -> int:
        return sum(self.traversal_count.values())

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adjacency: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.traversal_count:
            adjacency[a].add(b)
            adjacency[b].add(a)
        start = next(iter(self.vertices))
        seen = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nxt in adjacency[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen == set(self.vertices)


def word_graph(w: Word) -> WordGraph:
    counts: dict[tuple[int, int], int] = {}
    for a, b in w.steps():
        e = undirected_edge(a, b)
        counts[e] = counts.get(e, 0) + 1
    return WordGraph(vertices=w.support, traversal_count=counts)


@dataclass(frozen=True)
class Sentence:
    """An ordered collection of words with the union graph."""

    words: tuple[Word, ...]

    def __post_init__(self):
        if len(self.words) < 1:
            raise ValueError("a sentence needs at least one word")

    @property
    def support(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for w in self.words:
            out |= w.support
        return out

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for w in self.words:
            for a, b in w.steps():
                out.add(undirected_edge(a, b))
        return frozenset(out)

    def graph(self) -> WordGraph:
        """Union graph; traversal counts summed across constituent words."""
        counts: dict[tuple[int, int], int] = {}
        for w in self.words:
            for a, b in w.steps():
                e = undirected_edge(a, b)
                counts[e] = counts.get(e, 0) + 1
        return WordGraph(vertices=self.support, traversal_count=counts)


def canonical_form(w: Word) -> Word:
    """Relabel letters by first appearance; equivalent words map to one form."""
    relabel: dict[int, int] = {}
    out = []
    for s in w.letters:
        if s not in relabel:
            relabel[s] = len(relabel) + 1
        out.append(relabel[s])
    return Word(tuple(out))


def equivalent(w1: Word, w2: Word) -> bool:
    return canonical_form(w1) == canonical_form(w2)


def classify(w: Word) -> WordClass:
    """Classify by closedness, edge traversal counts, and weight."""
    if not w.is_closed:
        return WordClass.GENERAL
    graph = word_graph(w)
    if any(count < 2 for count in graph.traversal_count.values()):
        return WordClass.GENERAL
    if 2 * w.weight == w.length + 1:
        return WordClass.WIGNER
    if 2 * w.weight == w.length - 1:
        return WordClass.CRITICAL_WEAK_WIGNER
    return WordClass.WEAK_WIGNER


def enumerate_closed_classes(length: int, cap: int = WORD_LENGTH_CAP) -> list[Word]:
    """All canonical closed words of the given length, lexicographically.

    Canonical means first-appearance labels: the word starts with 1 and
    every new letter is one above the current maximum.
    """
    if length < 1:
        raise ValueError(f"word length must be >= 1, got {length}")
    if length > cap:
        raise CapacityError(f"length {length} above enumeration cap {cap}")
    if length == 1:
        return [Word((1,))]

    results: list[Word] = []
    prefix = [1] * length

    def extend(pos: int, max_letter: int) -> None:
        if pos == length - 1:
            prefix[pos] = 1
            results.append(Word(tuple(prefix)))
            return
        for letter in range(1, min(max_letter + 1, length) + 1):
            prefix[pos] = letter
            extend(pos + 1, max(max_letter, letter))

    extend(1, 1)
    return results


def class_counts(length: int, cap: int = WORD_LENGTH_CAP) -> dict[WordClass, int]:
    counts = {cls: 0 for cls in WordClass}
    for w in enumerate_closed_classes(length, cap=cap):
        counts[classify(w)] += 1
    return counts


@dataclass(frozen=True)
class DyckPath:
    """A +-1 step sequence with nonnegative partial sums returning to 0."""

    steps: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.steps):
            raise ValueError("steps must be +1 or -1")
        height = 0
        for s in self.steps:
            height += s
            if height < 0:
                raise ValueError("partial sums must stay nonnegative")
        if height != 0:
            raise ValueError("steps must sum to zero")

    @property
    def half_length(self) -> int:
        return len(self.steps) // 2

    def __str__(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def wigner_to_dyck(w: Word) -> DyckPath:
    """Encode a maximal-weight word as +1/-1 first/second edge traversals."""
    if classify(w) is not WordClass.WIGNER:
        raise ValueError(f"word {w} is not a Wigner word")
    seen: set[tuple[int, int]] = set()
    steps = []
    for a, b in w.steps():
        e = undirected_edge(a, b)
        if e in seen:
            steps.append(-1)
        else:
            seen.add(e)
            steps.append(1)
    return DyckPath(tuple(steps))


def dyck_to_wigner(path: DyckPath) -> Word:
    """Inverse encoding: walk the plane tree the path describes.

    A +1 opens an edge to a fresh letter, a -1 walks back to the parent;
    the visited-letter sequence is the canonical Wigner word.
    """
    letters = [1]
    stack = [1]
    next_letter = 2
    for s in path.steps:
        if s == 1:
            stack.append(next_letter)
            letters.append(next_letter)
            next_letter += 1
        else:
            stack.pop()
            letters.append(stack[-1])
    return Word(tuple(letters))


def enumerate_dyck(k: int, cap: int = DYCK_HALF_LENGTH_CAP) -> list[DyckPath]:
    """All Dyck paths of length 2k in lexicographic order (-1 sorts first)."""
    if k < 0:
        raise ValueError(f"half-length must be >= 0, got {k}")
    if k > cap:
        raise CapacityError(f"half-length {k} above enumeration cap {cap}")

    results: list[DyckPath] = []
    steps: list[int] = []

    def extend(ups: int, height: int) -> None:
        if len(steps) == 2 * k:
            results.append(DyckPath(tuple(steps)))
            return
        if height > 0:
            steps.append(-1)
            extend(ups, height - 1)
            steps.pop()
        if ups < k:
            steps.append(1)
            extend(ups + 1, height + 1)
            steps.pop()

    extend(0, 0)
    return results
