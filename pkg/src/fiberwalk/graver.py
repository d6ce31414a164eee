"""Random generation of basis moves via weighted trees.

Every primitive walk traces a cactus: a set of cycles in the host graph that
pairwise share at most one vertex, the sharing pattern forming a tree.
Encoding each cycle as a tree node weighted by its length gives a compact
blueprint.  A weighted tree corresponds to a primitive walk exactly when

  * every node's tree degree is at most its weight and has the same parity
    (the parity is what makes every detour an odd closed sub-walk), and
  * total weight minus edge count is at most the host vertex budget n (each
    tree edge merges one shared vertex, so that difference is the number of
    distinct host vertices the cactus consumes).

``build_weighted_tree`` grows such a tree at random, ``tree_to_walk`` plants
it on the complete graph K_n and emits the depth-first circuit, and
``sample_graver_element`` keeps only walks whose move is supported on the
target graph (rejection handles non-complete hosts).  ``tree_from_walk``
recovers the blueprint from any primitive walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random

from .graphs import Graph, Move
from .walks import ClosedWalk, _walk_entries

# A whole-tree redraw is needed only when the post-growth parity fixups have
# no legal value (a budget-saturated tree whose leaves are stuck at weight 2).
_REDRAW_LIMIT = 10_000


class BudgetTooSmallError(ValueError):
    """The vertex budget cannot host any usable cactus."""


@dataclass(frozen=True)
class GenMode:
    """Generator settings.

    square_free restricts node weights to >= 3, so no edge is ever traversed
    twice and every emitted move has entries in {-1, 0, +1}.  max_attempts
    bounds the rejection loop for non-complete hosts.
    """

    square_free: bool = True
    max_attempts: int = 100

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    @property
    def min_weight(self) -> int:
        return 3 if self.square_free else 2


@dataclass
class WeightedTree:
    """Rooted tree with node weights: the cycle-structure blueprint of a walk.

    Nodes are integer ids; parent[root] is None.  weights[v] is the length of
    the cycle that node v stands for.
    """

    weights: dict[int, int]
    parent: dict[int, int | None]
    children: dict[int, list[int]] = field(default_factory=dict)
    root: int = 0

    def __post_init__(self) -> None:
        if not self.children:
            self.children = {v: [] for v in self.weights}
            for v, p in self.parent.items():
                if p is not None:
                    self.children[p].append(v)

    def node_count(self) -> int:
        return len(self.weights)

    def edge_count(self) -> int:
        return len(self.weights) - 1

    def total_weight(self) -> int:
        return sum(self.weights.values())

    def vertex_demand(self) -> int:
        """Distinct host vertices the planted cactus needs."""
        return self.total_weight() - self.edge_count()

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (0 if self.parent[v] is None else 1)

    def validate(self, budget: int, min_weight: int = 2) -> None:
        """Assert the degree/parity constraint and the vertex budget bound."""
        for v, mu in self.weights.items():
            if mu < min_weight:
                raise AssertionError(f"node {v} weight {mu} below minimum {min_weight}")
            d = self.degree(v)
            if d > mu:
                raise AssertionError(f"node {v} degree {d} exceeds weight {mu}")
            if (d - mu) % 2 != 0:
                raise AssertionError(f"node {v} degree {d} and weight {mu} differ in parity")
        if self.node_count() == 1 and self.weights[self.root] % 2 != 0:
            raise AssertionError("a lone cycle must have even length to close an even walk")
        if self.vertex_demand() > budget:
            raise AssertionError(
                f"tree needs {self.vertex_demand()} vertices, budget is {budget}"
            )

    def weight_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.weights.values()))


_OPTION_CACHE: dict[tuple[int, bool], list[int]] = {}


def _child_count_options(mu: int, is_root: bool) -> list[int]:
    """Legal numbers of new children for a node of weight mu, ascending.

    The node's final degree must be <= mu with matching parity.  A non-root
    node already holds its parent edge and may stop at zero children when mu
    is odd; the root always extends here, lone roots arise only through a
    budget rollback.
    """
    opts = _OPTION_CACHE.get((mu, is_root))
    if opts is None:
        if is_root:
            opts = list(range(2 - (mu % 2), mu + 1, 2))
        else:
            opts = list(range((mu - 1) % 2, mu, 2))
        _OPTION_CACHE[(mu, is_root)] = opts
    return opts


def build_weighted_tree(budget: int, mode: GenMode, rng: Random) -> WeightedTree:
    """Grow a random weighted tree satisfying the blueprint constraints.

    Growth is level by level: each deepest node draws how many children it
    gets (respecting degree/parity), new weights are drawn against the
    remaining vertex budget, and an iteration that would overflow the budget
    is dropped whole, ending growth.  Post-growth fixups repair parity: a
    lone root must be even (a single cycle has to close an even walk) and a
    leaf must be odd, so offending weights are nudged by one, direction
    chosen by coin with the other direction as fallback.  When no legal
    nudge exists the whole draw is retried.
    """
    _check_budget(budget, mode)
    tree = _sample_tree(budget, mode.min_weight, rng)
    tree.validate(budget, mode.min_weight)
    return tree


def _check_budget(budget: int, mode: GenMode) -> None:
    if mode.square_free:
        if budget < 4:
            raise BudgetTooSmallError(
                f"square-free generation needs a vertex budget of at least 4, got {budget}"
            )
    elif budget < 2:
        raise BudgetTooSmallError(f"generation needs a vertex budget of at least 2, got {budget}")


def _sample_tree(budget: int, lo: int, rng: Random) -> WeightedTree:
    for _ in range(_REDRAW_LIMIT):
        tree = _grow_tree(budget, lo, rng)
        if tree is not None:
            return tree
    raise RuntimeError("tree generation failed to produce a legal tree")  # pragma: no cover


def _grow_tree(budget: int, lo: int, rng: Random) -> WeightedTree | None:
    randrange = rng.randrange
    weights: dict[int, int] = {0: randrange(lo, budget + 1)}
    parent: dict[int, int | None] = {0: None}
    children: dict[int, list[int]] = {0: []}
    next_id = 1
    deepest = [0]
    edge_count = 0
    weight_sum = weights[0]
    is_root_level = True

    while True:
        plan: list[tuple[int, int]] = []
        total_new = 0
        for v in deepest:
            opts = _child_count_options(weights[v], is_root_level)
            k = opts[0] if len(opts) == 1 else opts[randrange(len(opts))]
            plan.append((v, k))
            total_new += k
        is_root_level = False
        if total_new == 0:
            break

        # Budget snapshot for the whole iteration: assigned weight total
        # minus all edges including the pending ones (each edge merges one
        # shared vertex, so unweighted new nodes are worth -1 for now).
        alpha = weight_sum - (edge_count + total_new)
        hi = budget - alpha
        if hi < lo:
            break  # nothing was added; the iteration is abandoned whole

        drawn = [randrange(lo, hi + 1) for _ in range(total_new)]
        if weight_sum + sum(drawn) - (edge_count + total_new) > budget:
            break  # overflow: drop the entire iteration

        idx = 0
        new_nodes: list[int] = []
        for v, k in plan:
            for _ in range(k):
                node = next_id
                next_id += 1
                weights[node] = drawn[idx]
                weight_sum += drawn[idx]
                idx += 1
                parent[node] = v
                children[v].append(node)
                children[node] = []
                new_nodes.append(node)
                edge_count += 1
        deepest = new_nodes

    tree = WeightedTree(weights, parent, children)

    if tree.node_count() == 1:
        mu = weights[0]
        if mu % 2 == 1:
            choices = [mu - 1, mu + 1]
            rng.shuffle(choices)
            for c in choices:
                if lo <= c <= budget:
                    weights[0] = c
                    return tree
            return None
        return tree

    # Leaves forced even by a rollback are nudged to odd weight.
    for v in sorted(tree.weights):
        if tree.children[v] or tree.parent[v] is None:
            continue
        mu = tree.weights[v]
        if mu % 2 == 0:
            deltas = [-1, 1]
            rng.shuffle(deltas)
            for d in deltas:
                c = mu + d
                if c < lo or tree.vertex_demand() + d > budget:
                    continue
                tree.weights[v] = c
                break
            else:
                return None
    return tree


def tree_to_walk(tree: WeightedTree, budget: int, rng: Random) -> ClosedWalk:
    """Plant the tree's cycles on K_budget and emit the depth-first circuit.

    Each node draws its cycle's vertices: one shared with the parent, the
    rest fresh, in uniformly random cyclic order.  The circuit walks every
    cycle from its shared vertex and detours into a child cycle the moment
    the child's shared vertex is reached, which keeps each vertex visited at
    most twice and makes every detour an odd closed sub-walk.
    """
    if tree.total_weight() < 4:
        raise ValueError("tree traces a walk of length < 4 (a lone doubled edge)")
    if tree.vertex_demand() > budget:
        raise ValueError("tree does not fit the vertex budget")
    host = Graph.complete(budget)
    return ClosedWalk(host, _plant_and_trace(tree, budget, rng))


def _plant_and_trace(tree: WeightedTree, budget: int, rng: Random) -> list[int]:
    randrange = rng.randrange
    pool = list(range(1, budget + 1))

    def draw_fresh(k: int) -> list[int]:
        # Swap-pop sampling: a uniformly ordered draw that also consumes the
        # pool, so no separate shuffle or removal pass is needed.
        out = []
        for _ in range(k):
            j = randrange(len(pool))
            out.append(pool[j])
            pool[j] = pool[-1]
            pool.pop()
        return out

    cycle_order: dict[int, list[int]] = {}
    open_hosts: dict[int, list[int]] = {}  # cycle vertices still free to share

    order = _bfs_order(tree)
    for node in order:
        mu = tree.weights[node]
        p = tree.parent[node]
        if p is None:
            verts = draw_fresh(mu)
        else:
            hosts = open_hosts[p]
            shared = hosts.pop(randrange(len(hosts)))
            verts = [shared] + draw_fresh(mu - 1)
        cycle_order[node] = verts
        # A shared entry is already used twice; only the other vertices (or
        # all of them, for the root) may host children.
        open_hosts[node] = list(verts) if p is None else verts[1:]

    child_at: dict[tuple[int, int], int] = {}
    for node in order[1:]:
        child_at[(tree.parent[node], cycle_order[node][0])] = node

    out: list[int] = []

    def emit(node: int, skip_entry: bool) -> None:
        seq = cycle_order[node]
        for v in seq[1:] if skip_entry else seq:
            out.append(v)
            c = child_at.get((node, v))
            if c is not None:
                emit(c, True)  # the child's entry is v itself, just appended
                out.append(v)

    emit(tree.root, False)
    return out


def _bfs_order(tree: WeightedTree) -> list[int]:
    order = [tree.root]
    k = 0
    while k < len(order):
        order.extend(tree.children[order[k]])
        k += 1
    return order


def sample_graver_element(graph: Graph, mode: GenMode, rng: Random) -> Move | None:
    """Draw a basis move supported on the given graph, or None when exhausted.

    Generation runs on the complete graph over the same vertex count; draws
    whose support leaves the target edge set are discarded, as are degenerate
    lone doubled edges (their move is zero).  None after max_attempts tells
    the chain to book a rejected proposal.
    """
    n = graph.n
    edge_set = graph.edge_set
    complete = len(edge_set) == n * (n - 1) // 2
    _check_budget(n, mode)
    lo = mode.min_weight
    for _ in range(mode.max_attempts):
        tree = _sample_tree(n, lo, rng)
        if len(tree.weights) == 1 and tree.weights[tree.root] == 2:
            continue
        # Same trace as tree_to_walk, minus the host-edge revalidation: the
        # sequence lives on a complete graph by construction.  tree_to_walk
        # with an equal rng stream reproduces the walk exactly.
        seq = _plant_and_trace(tree, n, rng)
        entries = _walk_entries(seq)
        if complete or all(e in edge_set for e in entries):
            # Entries come from a closed walk, so they balance by
            # construction; skip re-validation on this hot path.
            move = Move.__new__(Move)
            move.graph = graph
            move.entries = entries
            return move
    return None


def tree_from_walk(walk: ClosedWalk) -> WeightedTree:
    """Recover the weighted-tree blueprint of a primitive walk.

    Twice-visited vertices bracket the detours, and a primitive walk's
    brackets never cross, so one recursive scan splits the sequence into
    nested cycles.  Raises on non-primitive input.
    """
    from .walks import is_primitive

    if not is_primitive(walk):
        raise ValueError("walk is not primitive; its cycle structure is not a cactus")

    weights: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    counter = [0]

    def parse(sub: tuple[int, ...], par: int | None) -> None:
        node = counter[0]
        counter[0] += 1
        parent[node] = par
        own = 0
        i = 0
        while i < len(sub):
            v = sub[i]
            nxt = None
            for k in range(i + 1, len(sub)):
                if sub[k] == v:
                    nxt = k
                    break
            if nxt is None:
                own += 1
                i += 1
            else:
                parse(sub[i:nxt], node)
                own += 1
                i = nxt + 1
        weights[node] = own

    parse(walk.vertices, None)
    tree = WeightedTree(weights, parent)
    tree.validate(walk.graph.n)
    return tree
