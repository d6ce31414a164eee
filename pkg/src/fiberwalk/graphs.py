"""Core data model: graphs, edge-weight vectors, degree sequences, capacities, moves.

Vertices are labeled 1..n.  An edge is an unordered pair stored canonically as
(min, max).  An EdgeVector assigns a nonnegative integer weight to each edge of
an underlying graph (a multigraph on that support; all weights 0/1 means a
simple graph).  A Move is a signed integer edge vector with zero net degree at
every vertex; adding a feasible move to an EdgeVector preserves its degree
sequence.

File formats
------------
Edge list: one ``i j`` pair per line, whitespace separated, 1-based; ``#``
starts a comment; duplicate pairs and loops are rejected (loops can be dropped
with a flag).  Degree sequence: a single comma-separated line.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping


class InvalidEdgeError(ValueError):
    """An edge key refers to a pair that is not an edge of the graph."""


class InputFormatError(ValueError):
    """A data file or serialized value could not be parsed."""


def canonical_edge(i: int, j: int) -> tuple[int, int]:
    """Return the unordered pair {i, j} in canonical (min, max) form."""
    if i == j:
        raise InvalidEdgeError(f"loop edge ({i},{i}) is not allowed")
    return (i, j) if i < j else (j, i)


class Graph:
    """Simple undirected graph on vertices 1..n with a fixed edge set.

    Immutable after construction; safe to share across chains.
    """

    __slots__ = ("n", "edges", "edge_set", "_adjacency")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        canon = set()
        for i, j in edges:
            e = canonical_edge(i, j)
            if not (1 <= e[0] and e[1] <= n):
                raise InvalidEdgeError(f"edge {e} has an endpoint outside 1..{n}")
            canon.add(e)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(canon))
        self.edge_set: frozenset[tuple[int, int]] = frozenset(canon)
        self._adjacency: dict[int, tuple[int, ...]] | None = None

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return _complete_cached(n)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def has_edge(self, i: int, j: int) -> bool:
        return canonical_edge(i, j) in self.edge_set

    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Vertex -> sorted tuple of neighbors (computed once, then cached)."""
        if self._adjacency is None:
            adj: dict[int, list[int]] = {v: [] for v in self.vertices()}
            for i, j in self.edges:
                adj[i].append(j)
                adj[j].append(i)
            self._adjacency = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        return self._adjacency

    def degree_of(self, v: int) -> int:
        return len(self.adjacency()[v])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edge_set == other.edge_set
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edge_set))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@lru_cache(maxsize=None)
def _complete_cached(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


@dataclass(frozen=True)
class DegreeSequence:
    """Vertex degree vector; the sufficient statistic of the beta model.

    The total is always even (it equals twice the total edge weight), so odd
    totals are rejected as unrealizable.
    """

    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(d < 0 or not isinstance(d, int) for d in self.degrees):
            raise ValueError("degrees must be nonnegative integers")
        if sum(self.degrees) % 2 != 0:
            raise ValueError(f"degree total {sum(self.degrees)} is odd; no graph realizes it")

    def __len__(self) -> int:
        return len(self.degrees)

    def __getitem__(self, i: int) -> int:
        return self.degrees[i]

    def to_text(self) -> str:
        return ",".join(str(d) for d in self.degrees)

    @classmethod
    def from_text(cls, text: str) -> "DegreeSequence":
        try:
            degrees = tuple(int(tok) for tok in text.strip().split(",") if tok.strip())
        except ValueError as exc:
            raise InputFormatError(f"bad degree sequence: {exc}") from exc
        if not degrees:
            raise InputFormatError("empty degree sequence")
        try:
            return cls(degrees)
        except ValueError as exc:
            raise InputFormatError(str(exc)) from exc


class Capacities:
    """Per-edge upper bounds on weights: all-ones, unbounded, or an explicit map.

    ``cap(e)`` returns None for unbounded edges.  All-ones mode restricts the
    fiber to simple graphs.  In map mode, edges missing from the map default
    to capacity 1.
    """

    __slots__ = ("kind", "caps")

    ONE = "one"
    UNBOUNDED = "unbounded"
    MAP = "map"

    def __init__(self, kind: str, caps: Mapping[tuple[int, int], int] | None = None):
        if kind not in (self.ONE, self.UNBOUNDED, self.MAP):
            raise ValueError(f"unknown capacity kind {kind!r}")
        if kind == self.MAP:
            if caps is None:
                raise ValueError("map capacities need an edge->cap mapping")
            clean = {}
            for (i, j), c in caps.items():
                if not isinstance(c, int) or c < 1:
                    raise ValueError(f"capacity for edge ({i},{j}) must be an integer >= 1")
                clean[canonical_edge(i, j)] = c
            caps = clean
        else:
            caps = None
        self.kind = kind
        self.caps = caps

    @classmethod
    def one(cls) -> "Capacities":
        return cls(cls.ONE)

    @classmethod
    def unbounded(cls) -> "Capacities":
        return cls(cls.UNBOUNDED)

    @classmethod
    def from_map(cls, caps: Mapping[tuple[int, int], int]) -> "Capacities":
        return cls(cls.MAP, caps)

    @property
    def is_one(self) -> bool:
        return self.kind == self.ONE

    def cap(self, edge: tuple[int, int]) -> int | None:
        if self.kind == self.ONE:
            return 1
        if self.kind == self.UNBOUNDED:
            return None
        return self.caps.get(edge, 1) if self.caps is not None else 1

    def __repr__(self) -> str:
        return f"Capacities({self.kind})"


class EdgeVector:
    """Nonnegative integer weights on the edges of an underlying graph.

    Stored sparsely: only nonzero entries are kept.  Value-like; operations
    return new vectors and never mutate.
    """

    __slots__ = ("graph", "weights")

    def __init__(self, graph: Graph, weights: Mapping[tuple[int, int], int]):
        clean: dict[tuple[int, int], int] = {}
        for (i, j), w in weights.items():
            e = canonical_edge(i, j)
            if e not in graph.edge_set:
                raise InvalidEdgeError(f"{e} is not an edge of the underlying graph")
            if not isinstance(w, int) or w < 0:
                raise ValueError(f"weight for edge {e} must be a nonnegative integer")
            if w > 0:
                clean[e] = w
        self.graph = graph
        self.weights = clean

    @classmethod
    def _trusted(cls, graph: Graph, weights: dict[tuple[int, int], int]) -> "EdgeVector":
        # Internal fast path: weights already canonical, positive, valid.
        vec = cls.__new__(cls)
        vec.graph = graph
        vec.weights = weights
        return vec

    @classmethod
    def from_edges(cls, graph: Graph, edges: Iterable[tuple[int, int]]) -> "EdgeVector":
        """All-ones vector on the given edges (an observed simple graph)."""
        return cls(graph, {canonical_edge(i, j): 1 for i, j in edges})

    def weight(self, edge: tuple[int, int]) -> int:
        return self.weights.get(edge, 0)

    def support(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.weights))

    def total(self) -> int:
        return sum(self.weights.values())

    def is_square_free(self) -> bool:
        return all(w <= 1 for w in self.weights.values())

    def key(self) -> tuple[tuple[int, int, int], ...]:
        """Hashable identity of the vector (for state counting and sets)."""
        return tuple((i, j, w) for (i, j), w in sorted(self.weights.items()))

    def tokens(self) -> str:
        """Serialize as sorted ``i-j:w`` tokens, e.g. ``1-2:1 3-4:1``."""
        return " ".join(f"{i}-{j}:{w}" for (i, j), w in sorted(self.weights.items()))

    def respects(self, caps: Capacities) -> bool:
        if caps.kind == Capacities.UNBOUNDED:
            return True
        return all(w <= (caps.cap(e) or w) for e, w in self.weights.items())

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, EdgeVector)
            and self.graph == other.graph
            and self.weights == other.weights
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"EdgeVector({self.tokens() or '0'})"


class Move:
    """Signed integer edge vector with zero net degree at every vertex.

    Entries are the signed multiplicities of each edge; zero entries are
    dropped.  Construction checks balance, so every Move object is valid.
    """

    __slots__ = ("graph", "entries")

    def __init__(self, graph: Graph, entries: Mapping[tuple[int, int], int]):
        clean: dict[tuple[int, int], int] = {}
        for (i, j), z in entries.items():
            e = canonical_edge(i, j)
            if e not in graph.edge_set:
                raise InvalidEdgeError(f"{e} is not an edge of the underlying graph")
            if not isinstance(z, int):
                raise ValueError(f"entry for edge {e} must be an integer")
            if z != 0:
                clean[e] = z
        if not is_move(graph, clean):
            raise ValueError("entries do not balance: some vertex has nonzero net degree")
        self.graph = graph
        self.entries = clean

    def negate(self) -> "Move":
        neg = Move.__new__(Move)
        neg.graph = self.graph
        neg.entries = {e: -z for e, z in self.entries.items()}
        return neg

    def support(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.entries))

    def is_zero(self) -> bool:
        return not self.entries

    def norm1(self) -> int:
        return sum(abs(z) for z in self.entries.values())

    def key(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((i, j, z) for (i, j), z in sorted(self.entries.items()))

    def canonical_key(self) -> tuple[tuple[int, int, int], ...]:
        """Sign-normalized identity: the same for z and -z."""
        k = self.key()
        nk = tuple((i, j, -z) for (i, j, z) in k)
        return min(k, nk)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Move)
            and self.graph == other.graph
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        body = " ".join(f"{i}-{j}:{z:+d}" for (i, j), z in sorted(self.entries.items()))
        return f"Move({body or '0'})"


def is_move(graph: Graph, entries: Mapping[tuple[int, int], int]) -> bool:
    """True iff every vertex has zero signed degree under the given entries.

    Raises InvalidEdgeError for entries on pairs that are not edges of the
    graph; imbalance just returns False.
    """
    net: dict[int, int] = {}
    for (i, j), z in entries.items():
        e = canonical_edge(i, j)
        if e not in graph.edge_set:
            raise InvalidEdgeError(f"{e} is not an edge of the underlying graph")
        if z == 0:
            continue
        net[e[0]] = net.get(e[0], 0) + z
        net[e[1]] = net.get(e[1], 0) + z
    return all(v == 0 for v in net.values())


def degree_sequence(x: EdgeVector) -> DegreeSequence:
    """Degrees induced by an edge-weight vector: d_i = sum of weights at i."""
    deg = [0] * x.graph.n
    for (i, j), w in x.weights.items():
        deg[i - 1] += w
        deg[j - 1] += w
    return DegreeSequence(tuple(deg))


def apply_move(x: EdgeVector, z: Move, caps: Capacities) -> EdgeVector | None:
    """Return x + z if every entry stays within [0, cap], else None.

    A None result is the infeasible case; the caller treats it as a rejected
    proposal.  Feasible results keep the degree sequence of x.
    """
    new = dict(x.weights)
    for e, dz in z.entries.items():
        w = new.get(e, 0) + dz
        if w < 0:
            return None
        c = caps.cap(e)
        if c is not None and w > c:
            return None
        if w == 0:
            new.pop(e, None)
        else:
            new[e] = w
    return EdgeVector._trusted(x.graph, new)


def read_edge_list(
    path: str | Path, n: int | None = None, drop_loops: bool = False
) -> Graph:
    """Parse an edge-list file into a Graph.

    The vertex count is the largest label seen unless ``n`` is given.  Loops
    raise unless ``drop_loops``; duplicate pairs always raise.
    """
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    max_v = 0
    path = Path(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputFormatError(f"{path}:{lineno}: expected 'i j', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: non-integer vertex label") from exc
        if i < 1 or j < 1:
            raise InputFormatError(f"{path}:{lineno}: vertex labels are 1-based")
        if i == j:
            if drop_loops:
                continue
            raise InputFormatError(f"{path}:{lineno}: loop edge ({i},{i}) rejected")
        e = canonical_edge(i, j)
        if e in seen:
            raise InputFormatError(f"{path}:{lineno}: duplicate edge {e}")
        seen.add(e)
        edges.append(e)
        max_v = max(max_v, e[1])
    if not edges:
        raise InputFormatError(f"{path}: no edges found")
    if n is None:
        n = max_v
    elif max_v > n:
        raise InputFormatError(f"{path}: edge endpoint {max_v} exceeds declared n={n}")
    return Graph(n, edges)


def read_degree_file(path: str | Path) -> DegreeSequence:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.split("#", 1)[0].strip()]
    if len(lines) != 1:
        raise InputFormatError(f"{path}: expected exactly one comma-separated line")
    return DegreeSequence.from_text(lines[0].split("#", 1)[0])


def read_capacity_file(path: str | Path) -> Capacities:
    """Parse ``i j cap`` lines into per-edge map capacities."""
    caps: dict[tuple[int, int], int] = {}
    path = Path(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InputFormatError(f"{path}:{lineno}: expected 'i j cap'")
        try:
            i, j, c = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: non-integer field") from exc
        e = canonical_edge(i, j)
        if e in caps:
            raise InputFormatError(f"{path}:{lineno}: duplicate capacity for {e}")
        caps[e] = c
    if not caps:
        raise InputFormatError(f"{path}: no capacities found")
    return Capacities.from_map(caps)
