"""Exact expectations of trace powers at tiny n.

Two independent routes compute E[Tr W^k]: direct enumeration of all index
tuples, and a sum over canonical closed word classes weighted by falling
factorials.  Both accumulate exact rationals (entry moments are Fractions)
and only convert to float at the final 1/sqrt(n)^k scaling, so agreement
between the routes is exact rather than approximate.  The same machinery
evaluates exact centered joint moments of several trace powers at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ensemble import EntryDistribution
from .errors import CapacityError
from .words import Sentence, Word, enumerate_closed_classes, undirected_edge

DEFAULT_MOMENT_CAP = 16
DEFAULT_TUPLE_BUDGET = 10**7


@dataclass(frozen=True)
class MomentTable:
    """Exact entry moments E[x^p] for off-diagonal and diagonal entries."""

    name: str
    offdiag_moments: tuple[Fraction, ...]
    diag_moments: tuple[Fraction, ...]

    def __post_init__(self):
        for label, table in (("offdiag", self.offdiag_moments), ("diag", self.diag_moments)):
            if len(table) < 3:
                raise ValueError(f"{label} table needs moments up to order 2")
            if table[0] != 1 or table[1] != 0 or table[2] != Fraction(1, 4):
                raise ValueError(
                    f"{label} moments must start (1, 0, 1/4), got {table[:3]}"
                )

    @property
    def cap(self) -> int:
        return min(len(self.offdiag_moments), len(self.diag_moments)) - 1

    def offdiag(self, p: int) -> Fraction:
        if p > len(self.offdiag_moments) - 1:
            raise CapacityError(f"off-diagonal moment order {p} above table cap {self.cap}")
        return self.offdiag_moments[p]

    def diag(self, p: int) -> Fraction:
        if p > len(self.diag_moments) - 1:
            raise CapacityError(f"diagonal moment order {p} above table cap {self.cap}")
        return self.diag_moments[p]


def moment_table(dist: EntryDistribution, cap: int = DEFAULT_MOMENT_CAP) -> MomentTable:
    """Build the exact moment table of a registered distribution."""
    offdiag = tuple(dist.moment(p) for p in range(cap + 1))
    diag_dist = dist.diagonal if dist.diagonal is not None else dist
    diag = tuple(diag_dist.moment(p) for p in range(cap + 1))
    return MomentTable(name=dist.name, offdiag_moments=offdiag, diag_moments=diag)


def _edge_counts(letter_seqs: Iterable[Sequence[int]]) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for letters in letter_seqs:
        for a, b in zip(letters, letters[1:]):
            e = undirected_edge(a, b)
            counts[e] = counts.get(e, 0) + 1
    return counts


def _expectation_from_counts(
    counts: dict[tuple[int, int], int], table: MomentTable
) -> Fraction:
    result = Fraction(1)
    for (a, b), mult in counts.items():
        result *= table.diag(mult) if a == b else table.offdiag(mult)
        if result == 0:
            # Still validate remaining multiplicities against the cap.
            for (c, d), m in counts.items():
                if m > table.cap:
                    raise CapacityError(f"edge multiplicity {m} above table cap {table.cap}")
            return Fraction(0)
    return result


def expected_X_w(w: Word, table: MomentTable) -> Fraction:
    """Exact expectation of the entry product along a closed word.

    Entries for distinct undirected edges are independent, so the value is
    the product of one moment per distinct edge at its traversal count.
    """
    if not w.is_closed:
        raise ValueError(f"word must be closed, got {w}")
    return _expectation_from_counts(_edge_counts([w.letters]), table)


def expected_X_sentence(sentence: Sentence, table: MomentTable) -> Fraction:
    """Exact expectation of the product of entry products over a sentence.

    Factors over distinct undirected edges of the union graph, which makes
    groups of words with disjoint edge sets contribute independently.
    """
    for w in sentence.words:
        if not w.is_closed:
            raise ValueError(f"all words in the sentence must be closed, got {w}")
    return _expectation_from_counts(_edge_counts([w.letters for w in sentence.words]), table)


def _scaled(total: Fraction, n: int, half_power_numerator: int) -> float:
    """total / n^(half_power_numerator / 2), exact when the power is integral."""
    if half_power_numerator % 2 == 0:
        return float(total / Fraction(n ** (half_power_numerator // 2)))
    return float(total) / float(n) ** (half_power_numerator / 2)


def _check_tuple_budget(n: int, total_power: int, budget: int) -> None:
    if n**total_power > budget:
        raise CapacityError(
            f"{n}^{total_power} index tuples exceed the enumeration budget {budget}"
        )


def trace_moment_direct(
    n: int, k: int, table: MomentTable, budget: int = DEFAULT_TUPLE_BUDGET
) -> float:
    """E[Tr W^k] by brute-force enumeration of all n^k index tuples."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    _check_tuple_budget(n, k, budget)

    total = Fraction(0)
    for tup in itertools.product(range(1, n + 1), repeat=k):
        closed = tup + (tup[0],)
        total += _expectation_from_counts(_edge_counts([closed]), table)
    return _scaled(total, n, k)


def _falling_factorial(n: int, v: int) -> int:
    out = 1
    for i in range(v):
        out *= n - i
    return out


def trace_moment_by_classes(n: int, k: int, table: MomentTable, cap: int = 11) -> float:
    """E[Tr W^k] summed over canonical closed word classes.

    Each class of weight v is realized by n(n-1)...(n-v+1) index tuples and
    all of them share one expectation, so the sum has one term per class.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    total = Fraction(0)
    for cls in enumerate_closed_classes(k + 1, cap=cap):
        count = _falling_factorial(n, cls.weight)
        if count == 0:
            continue
        total += count * expected_X_w(cls, table)
    return _scaled(total, n, k)


def _centered_product_expectation(
    words_tuple: Sequence[tuple[int, ...]],
    means: Sequence[Fraction],
    table: MomentTable,
) -> Fraction:
    """E[prod_i (X_{w_i} - mu_i)] by inclusion-exclusion over subsets."""
    m = len(words_tuple)
    total = Fraction(0)
    for mask in range(1 << m):
        value = _expectation_from_counts(
            _edge_counts([words_tuple[i] for i in range(m) if mask & (1 << i)]), table
        )
        sign = 1
        for i in range(m):
            if not mask & (1 << i):
                value *= means[i]
                sign = -sign
        total += sign * value
    return total


def _closed_tuples(n: int, k: int) -> list[tuple[int, ...]]:
    return [tup + (tup[0],) for tup in itertools.product(range(1, n + 1), repeat=k)]


def exact_joint_centered(
    n: int,
    powers: Sequence[int],
    table: MomentTable,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> float:
    """Exact E[prod_i (Tr W^{m_i} - E Tr W^{m_i})] by multilinear expansion."""
    split = joint_centered_split(n, powers, (), table, budget=budget)
    return split.total


@dataclass(frozen=True)
class JointSplit:
    """Exact decomposition of a centered joint moment over two word groups.

    ``shared`` collects sentence pairs whose edge sets intersect, ``disjoint``
    the rest; ``total = shared + disjoint`` exactly.  The product of the two
    marginal centered moments decomposes the same way with ``shared_marginal``
    in place of ``shared``, so the factorization gap is their difference.
    """

    n: int
    powers_a: tuple[int, ...]
    powers_b: tuple[int, ...]
    total: float
    shared: float
    disjoint: float
    marginal_a: float
    marginal_b: float
    product: float
    shared_marginal: float


def joint_centered_split(
    n: int,
    powers_a: Sequence[int],
    powers_b: Sequence[int],
    table: MomentTable,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> JointSplit:
    """Exact centered joint moment split by whether the two groups share edges."""
    powers_a = tuple(int(m) for m in powers_a)
    powers_b = tuple(int(m) for m in powers_b)
    if not powers_a and not powers_b:
        raise ValueError("need at least one power")
    if any(m < 1 for m in powers_a + powers_b):
        raise ValueError(f"powers must be >= 1, got {powers_a + powers_b}")
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    total_power = sum(powers_a) + sum(powers_b)
    _check_tuple_budget(n, total_power, budget)

    per_factor_a = [_closed_tuples(n, m) for m in powers_a]
    per_factor_b = [_closed_tuples(n, m) for m in powers_b]
    mean_cache: dict[tuple[int, ...], Fraction] = {}

    def mean_of(word_letters: tuple[int, ...]) -> Fraction:
        if word_letters not in mean_cache:
            mean_cache[word_letters] = _expectation_from_counts(
                _edge_counts([word_letters]), table
            )
        return mean_cache[word_letters]

    def edges_of(word_letters: tuple[int, ...]) -> frozenset[tuple[int, int]]:
        return frozenset(_edge_counts([word_letters]))

    shared = Fraction(0)
    disjoint = Fraction(0)
    shared_marginal = Fraction(0)

    sentences_a = list(itertools.product(*per_factor_a)) if per_factor_a else [()]
    sentences_b = list(itertools.product(*per_factor_b)) if per_factor_b else [()]

    centered_a = [
        _centered_product_expectation(sa, [mean_of(w) for w in sa], table)
        for sa in sentences_a
    ]
    centered_b = [
        _centered_product_expectation(sb, [mean_of(w) for w in sb], table)
        for sb in sentences_b
    ]
    edges_a = [frozenset().union(*(edges_of(w) for w in sa)) if sa else frozenset() for sa in sentences_a]
    edges_b = [frozenset().union(*(edges_of(w) for w in sb)) if sb else frozenset() for sb in sentences_b]

    marginal_a = sum(centered_a, Fraction(0))
    marginal_b = sum(centered_b, Fraction(0))

    for sa, ca, ea in zip(sentences_a, centered_a, edges_a):
        for sb, cb, eb in zip(sentences_b, centered_b, edges_b):
            if ea & eb:
                combined = sa + sb
                shared += _centered_product_expectation(
                    combined, [mean_of(w) for w in combined], table
                )
                shared_marginal += ca * cb
            else:
                disjoint += ca * cb

    total = shared + disjoint
    scale_a = sum(powers_a)
    scale_b = sum(powers_b)
    return JointSplit(
        n=n,
        powers_a=powers_a,
        powers_b=powers_b,
        total=_scaled(total, n, total_power),
        shared=_scaled(shared, n, total_power),
        disjoint=_scaled(disjoint, n, total_power),
        marginal_a=_scaled(marginal_a, n, scale_a),
        marginal_b=_scaled(marginal_b, n, scale_b),
        product=_scaled(marginal_a * marginal_b, n, total_power),
        shared_marginal=_scaled(shared_marginal, n, total_power),
    )
