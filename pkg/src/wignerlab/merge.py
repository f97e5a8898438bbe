"""Splicing two closed words that share an edge into one closed word.

The merged word starts and ends at the frame word's first letter, detours
through the full circuit of the inner word at the first shared edge, and
keeps the combined undirected edge multiset exactly equal to the disjoint
union of the inputs' multisets.  When the inner word traverses the shared
edge in the opposite direction, its circuit is walked in reverse.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .errors import NoSharedEdgeError
from .words import Word, undirected_edge, word_graph


class SharedEdge(NamedTuple):
    edge: tuple[int, int]
    pos_w2: int  # step index of the edge's first traversal in the frame word w2
    pos_w1: int  # step index of its first traversal in the inner word w1
    same_orientation: bool  # w1 traverses it in the same direction as w2


def _require_closed(w: Word, label: str) -> None:
    if not w.is_closed:
        raise ValueError(f"{label} must be closed, got {w}")


def find_shared_edge(w1: Word, w2: Word) -> Optional[SharedEdge]:
    """Locate the first edge of w2 (scanning left to right) that w1 also uses.

    Returns the first-traversal step positions in both words and whether the
    first traversal in w1 runs in the same direction as in w2; None when the
    edge sets are disjoint.
    """
    _require_closed(w1, "w1")
    _require_closed(w2, "w2")
    edges_w1 = word_graph(w1).edges
    for pos2, (a, b) in enumerate(w2.steps()):
        e = undirected_edge(a, b)
        if e not in edges_w1:
            continue
        for pos1, (c, d) in enumerate(w1.steps()):
            if undirected_edge(c, d) == e:
                return SharedEdge(
                    edge=e,
                    pos_w2=pos2,
                    pos_w1=pos1,
                    same_orientation=(c, d) == (a, b),
                )
    return None


def merge_words(w1: Word, w2: Word) -> Word:
    """Merge two closed words sharing an edge into one closed word.

    Output length is l(w1) + l(w2) - 1 and its undirected edge multiset is
    the disjoint union of the inputs'.  Raises NoSharedEdgeError when the
    words have no edge in common.
    """
    shared = find_shared_edge(w1, w2)
    if shared is None:
        raise NoSharedEdgeError(f"words {w1} and {w2} share no edge")

    # Cyclic vertex sequence of the inner word (drop the repeated last letter).
    cycle = w1.letters[:-1]
    period = len(cycle)
    q = shared.pos_w1

    if shared.same_orientation:
        # Walk w1 forward starting after its shared step, ending back at the
        # shared step's endpoint; uses every step of w1 exactly once.
        detour = tuple(cycle[(q + 1 + t) % period] for t in range(1, period + 1))
    else:
        # Shared step runs (b, a) in w1: walk the circuit backwards from b.
        detour = tuple(cycle[(q - t) % period] for t in range(1, period + 1))

    p = shared.pos_w2
    merged = w2.letters[: p + 2] + detour + w2.letters[p + 2 :]
    return Word(merged)


def merge_report(w1: Word, w2: Word) -> dict:
    """Merge and check the postconditions; used by the CLI report."""
    merged = merge_words(w1, w2)

    def multiset(w: Word) -> dict[tuple[int, int], int]:
        return word_graph(w).traversal_count

    combined = dict(multiset(w1))
    for e, count in multiset(w2).items():
        combined[e] = combined.get(e, 0) + count

    return {
        "merged": merged,
        "closed_ok": merged.is_closed,
        "length_ok": merged.length == w1.length + w2.length - 1,
        "multiset_ok": multiset(merged) == combined,
        "support_ok": merged.support == w1.support | w2.support,
    }
