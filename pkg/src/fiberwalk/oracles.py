"""Brute-force ground truth at desk scale.

Everything here trades speed for directness: fibers are enumerated by
depth-first search with degree pruning, primitivity is checked straight from
its definition (no sub-move splits the move without sign cancellation), and
fiber connectivity is decided by building the whole transition graph.  Guard
rails reject instances whose search space exceeds a fixed node budget.
"""

from __future__ import annotations

from random import Random
from typing import Iterable, NamedTuple, Sequence

from .graphs import Capacities, DegreeSequence, EdgeVector, Graph, Move, apply_move
from .graver import GenMode, sample_graver_element

_GUARD_NODES = 10**9


class InstanceTooLargeError(ValueError):
    """The brute-force search space exceeds the configured guard."""


def _effective_caps(d: DegreeSequence, graph: Graph, caps: Capacities) -> list[int]:
    eff = []
    for i, j in graph.edges:
        c = caps.cap((i, j))
        bound = min(d[i - 1], d[j - 1])
        eff.append(bound if c is None else min(c, bound))
    return eff


def enumerate_fiber(
    d: DegreeSequence, graph: Graph, caps: Capacities
) -> list[EdgeVector]:
    """All edge vectors with the given degrees, in lexicographic edge order.

    Depth-first over edges in canonical order with residual-degree pruning:
    a branch dies as soon as some vertex cannot reach its remaining degree
    with the capacity left on its later edges.
    """
    if len(d) != graph.n:
        raise ValueError(f"degree sequence has {len(d)} entries for {graph.n} vertices")
    eff = _effective_caps(d, graph, caps)
    space = 1.0
    for c in eff:
        space *= c + 1
        if space > _GUARD_NODES:
            raise InstanceTooLargeError(
                f"fiber search space exceeds {_GUARD_NODES:.0e} nodes"
            )

    edges = graph.edges
    m = len(edges)
    # suffix[v] evolves as the scan passes v's edges; start with full slack.
    slack = [0] * (graph.n + 1)
    for k, (i, j) in enumerate(edges):
        slack[i] += eff[k]
        slack[j] += eff[k]
    rem = list(d.degrees)
    for v in graph.vertices():
        if rem[v - 1] > slack[v]:
            return []

    out: list[EdgeVector] = []
    assignment: list[int] = [0] * m

    def search(k: int) -> None:
        if k == m:
            if all(r == 0 for r in rem):
                weights = {
                    edges[t]: assignment[t] for t in range(m) if assignment[t] > 0
                }
                out.append(EdgeVector._trusted(graph, weights))
            return
        i, j = edges[k]
        ii, jj = i - 1, j - 1
        cap_k = eff[k]
        slack[i] -= cap_k
        slack[j] -= cap_k
        top = min(cap_k, rem[ii], rem[jj])
        for w in range(top + 1):
            rem[ii] -= w
            rem[jj] -= w
            if rem[ii] <= slack[i] and rem[jj] <= slack[j]:
                assignment[k] = w
                search(k + 1)
            rem[ii] += w
            rem[jj] += w
        assignment[k] = 0
        slack[i] += cap_k
        slack[j] += cap_k

    search(0)
    return out


def is_primitive_bruteforce(move: Move, graph: Graph) -> bool:
    """Definitional basis-membership test by conformal decomposition search.

    True iff the move is nonzero and no sub-move z' (sign-compatible,
    entrywise no larger, z' not 0 or the move itself) balances at every
    vertex; such a z' splits the move into two nonzero moves without sign
    cancellation.  Exact and exponential: guard-limited.
    """
    entries = sorted(move.entries.items())
    if not entries:
        return False
    space = 1.0
    for _, z in entries:
        space *= abs(z) + 1
        if space > _GUARD_NODES:
            raise InstanceTooLargeError(
                f"decomposition search space exceeds {_GUARD_NODES:.0e} nodes"
            )

    m = len(entries)
    sign = [1 if z > 0 else -1 for _, z in entries]
    bound = [abs(z) for _, z in entries]
    # last_at[k]: vertices whose incident support ends at edge k; their net
    # must be exactly zero once edge k is assigned.
    last_at: list[list[int]] = [[] for _ in range(m)]
    seen: dict[int, int] = {}
    for k, ((i, j), _) in enumerate(entries):
        seen[i] = k
        seen[j] = k
    for v, k in seen.items():
        last_at[k].append(v)

    net: dict[int, int] = {v: 0 for v in seen}
    choice = [0] * m

    def search(k: int, all_zero: bool, all_max: bool) -> bool:
        """True iff a proper balanced sub-move exists from this prefix."""
        if k == m:
            return not (all_zero or all_max)
        (i, j), _ = entries[k]
        # Splits come in complementary pairs (z', move - z'), so the first
        # coordinate only needs its lower half.
        top = bound[k] // 2 if k == 0 else bound[k]
        for c in range(top + 1):
            s = sign[k] * c
            net[i] += s
            net[j] += s
            ok = all(net[v] == 0 for v in last_at[k])
            if ok and search(
                k + 1, all_zero and c == 0, all_max and c == bound[k]
            ):
                net[i] -= s
                net[j] -= s
                return True
            net[i] -= s
            net[j] -= s
        return False

    return not search(0, True, True)


class ConnectivityReport(NamedTuple):
    connected: bool
    components: int


def connectivity_check(
    fiber: Sequence[EdgeVector], moves: Iterable[Move], caps: Capacities
) -> ConnectivityReport:
    """Decide whether the given moves connect the fiber.

    Builds the transition graph with an edge wherever some move (either
    sign) leads from one fiber element to another, then counts components.
    """
    index = {x.key(): t for t, x in enumerate(fiber)}
    parent = list(range(len(fiber)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    move_list: list[Move] = []
    for z in moves:
        move_list.append(z)
        move_list.append(z.negate())
    for t, x in enumerate(fiber):
        for z in move_list:
            y = apply_move(x, z, caps)
            if y is None:
                continue
            s = index.get(y.key())
            if s is not None and s != t:
                union(t, s)

    roots = {find(t) for t in range(len(fiber))}
    components = len(roots) if fiber else 0
    return ConnectivityReport(components <= 1, components)


def sample_moves_to_saturation(
    graph: Graph,
    fiber: Sequence[EdgeVector],
    caps: Capacities,
    mode: GenMode,
    rng: Random,
    window: int = 1000,
    max_draws: int = 1_000_000,
) -> list[Move]:
    """Draw basis moves until the fiber transition graph stops growing.

    The stopping rule is empirical: quit after ``window`` consecutive draws
    that add no new transition edge.  Repeat draws of an already-collected
    move count as fruitless without rescanning the fiber.
    """
    index = {x.key(): t for t, x in enumerate(fiber)}
    edge_pairs: set[tuple[int, int]] = set()
    collected: dict[tuple, Move] = {}
    fruitless = 0
    draws = 0
    while fruitless < window and draws < max_draws:
        draws += 1
        z = sample_graver_element(graph, mode, rng)
        if z is None:
            fruitless += 1
            continue
        ck = z.canonical_key()
        if ck in collected:
            fruitless += 1
            continue
        collected[ck] = z
        added = False
        for t, x in enumerate(fiber):
            for cand in (z, z.negate()):
                y = apply_move(x, cand, caps)
                if y is None:
                    continue
                s = index.get(y.key())
                if s is not None and s != t:
                    pair = (t, s) if t < s else (s, t)
                    if pair not in edge_pairs:
                        edge_pairs.add(pair)
                        added = True
        fruitless = 0 if added else fruitless + 1
    return list(collected.values())
