"""Even closed walks and the vertex-sequence primitivity test.

A closed walk is stored as its vertex sequence (i_1, ..., i_2p); the closing
step back to i_1 is implicit.  The walk's move assigns +1 to edges traversed
at odd positions and -1 at even positions, accumulated over repeats.

A walk is primitive exactly when
  (a) every vertex appears once or twice in the sequence, and
  (b) splitting the walk at any twice-visited vertex yields two closed
      sub-walks of odd length that share no vertex besides the split point.
Primitive walks are the walks whose moves cannot be written as a sum of two
nonzero moves without sign cancellation; see oracles.is_primitive_bruteforce
for the definitional check used to validate this test.
"""

from __future__ import annotations

from typing import Sequence

from .graphs import Graph, InputFormatError, Move, canonical_edge


class WalkError(ValueError):
    """The vertex sequence is not a valid even closed walk."""


class ClosedWalk:
    """An even closed walk of length >= 4, as a vertex sequence.

    Length-2 sequences are rejected: they induce the zero move and never
    contribute a usable basis element.  Immutable; all operations are pure.
    """

    __slots__ = ("graph", "vertices")

    def __init__(self, graph: Graph, vertices: Sequence[int]):
        seq = tuple(vertices)
        if len(seq) < 4:
            raise WalkError(f"closed walk needs length >= 4, got {len(seq)}")
        if len(seq) % 2 != 0:
            raise WalkError(f"closed walk must have even length, got {len(seq)}")
        edge_set = graph.edge_set
        for k, v in enumerate(seq):
            w = seq[(k + 1) % len(seq)]
            if v == w:
                raise WalkError(f"consecutive repeat at position {k + 1}: vertex {v}")
            if canonical_edge(v, w) not in edge_set:
                raise WalkError(f"({v},{w}) is not an edge of the graph")
        self.graph = graph
        self.vertices = seq

    def __len__(self) -> int:
        return len(self.vertices)

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    def edge_sequence(self) -> list[tuple[int, int]]:
        seq = self.vertices
        p = len(seq)
        return [canonical_edge(seq[k], seq[(k + 1) % p]) for k in range(p)]

    def rotate(self, offset: int) -> "ClosedWalk":
        seq = self.vertices
        k = offset % len(seq)
        return ClosedWalk(self.graph, seq[k:] + seq[:k])

    def reverse(self) -> "ClosedWalk":
        return ClosedWalk(self.graph, self.vertices[::-1])

    def to_text(self) -> str:
        return ",".join(str(v) for v in self.vertices)

    @classmethod
    def from_text(cls, graph: Graph, text: str) -> "ClosedWalk":
        try:
            seq = tuple(int(tok) for tok in text.strip().split(",") if tok.strip())
        except ValueError as exc:
            raise InputFormatError(f"bad walk serialization: {exc}") from exc
        return cls(graph, seq)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ClosedWalk)
            and self.graph == other.graph
            and self.vertices == other.vertices
        )

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"ClosedWalk({self.to_text()})"


def vertex_multiplicity(walk: ClosedWalk, vertex: int) -> int:
    """Number of positions of the vertex in the walk's sequence."""
    return walk.vertices.count(vertex)


def is_primitive(walk: ClosedWalk) -> bool:
    """Primitivity test on the vertex sequence; see the module docstring.

    Quadratic in the walk length in the worst case, which is irrelevant next
    to chain length: generated walks are short.
    """
    return _is_primitive_seq(walk.vertices)


def _is_primitive_seq(seq: tuple[int, ...]) -> bool:
    # Multiplicity pass: every vertex once or twice, record the repeats.
    first: dict[int, int] = {}
    second: dict[int, int] = {}
    for pos, v in enumerate(seq):
        if v not in first:
            first[v] = pos
        elif v not in second:
            second[v] = pos
        else:
            return False
    if not second:
        return True
    for v, hi in second.items():
        lo = first[v]
        # Both split sub-walks must be odd; the total is even, so one check
        # settles both.
        if (hi - lo) % 2 == 0:
            return False
        # The two sides may share no vertex besides the split point.
        inner = seq[lo + 1 : hi]
        outer_set = set(seq[:lo])
        outer_set.update(seq[hi + 1 :])
        for u in inner:
            if u in outer_set:
                return False
    return True


def walk_to_move(walk: ClosedWalk) -> Move:
    """Net move of the walk: odd-position edges count +1, even -1.

    The result always balances at every vertex.  Walks passing the
    primitivity test give a nonzero move with disjoint positive and negative
    supports.
    """
    entries = _walk_entries(walk.vertices)
    return Move(walk.graph, entries)


def _walk_entries(seq: Sequence[int]) -> dict[tuple[int, int], int]:
    entries: dict[tuple[int, int], int] = {}
    p = len(seq)
    sign = 1
    for k in range(p):
        a = seq[k]
        b = seq[k + 1] if k + 1 < p else seq[0]
        e = (a, b) if a < b else (b, a)
        entries[e] = entries.get(e, 0) + sign
        sign = -sign
    return {e: z for e, z in entries.items() if z != 0}


def is_square_free(move: Move) -> bool:
    """True iff every entry of the move has absolute value at most 1."""
    return all(-1 <= z <= 1 for z in move.entries.values())
