"""Beta-model fitting and the test statistics of the conditional test.

The model: independent binomial edge weights x_ij ~ B(n_ij, p_ij) with
p_ij = a_i a_j / (1 + a_i a_j), one positive parameter a_i per vertex.  The
degree sequence is sufficient, so the maximum likelihood estimate solves the
moment equations d_i = sum_j n_ij p_ij.  The fit drives a Pearson chi-square
statistic; clustering coefficient and triangle count are auxiliary statistics
evaluated on simple-graph samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Capacities, DegreeSequence, EdgeVector, Graph, Move


class DegenerateFitError(ValueError):
    """The MLE sits on the boundary (some degree at 0 or at its maximum)."""

    def __init__(self, vertices: list[int], message: str):
        super().__init__(f"{message}: vertices {vertices}")
        self.vertices = vertices


@dataclass(frozen=True)
class BetaFit:
    """Fitted vertex parameters a_i = exp(b_i) with convergence diagnostics."""

    alpha: tuple[float, ...]
    converged: bool
    iterations: int
    residual: float

    def p(self, i: int, j: int) -> float:
        """Fitted edge probability for vertices i, j (1-based)."""
        prod = self.alpha[i - 1] * self.alpha[j - 1]
        return prod / (1.0 + prod)


def _cap_matrix(graph: Graph, caps: Capacities) -> np.ndarray:
    """Symmetric n x n matrix of edge capacities; zero off the edge set."""
    n = graph.n
    mat = np.zeros((n, n))
    for i, j in graph.edges:
        c = caps.cap((i, j))
        if c is None:
            raise ValueError("beta-model fitting needs finite capacities")
        mat[i - 1, j - 1] = c
        mat[j - 1, i - 1] = c
    return mat


def fit_beta_mle(
    d: DegreeSequence,
    graph: Graph,
    caps: Capacities,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> BetaFit:
    """Fit the beta model by fixed-point iteration on the moment equations.

    Iterates a_i <- d_i / sum_j n_ij a_j / (1 + a_i a_j) from a_i = 1 until
    the moment residual max_i |d_i - sum_j n_ij p_ij| drops below tol.  A
    geometric-mean damping step kicks in if the residual ever stalls, which
    keeps the iteration monotone on awkward instances.  Boundary degrees
    (0 or maximal) have no finite MLE and raise with the offending vertices.
    """
    if len(d) != graph.n:
        raise ValueError(f"degree sequence has {len(d)} entries for {graph.n} vertices")
    N = _cap_matrix(graph, caps)
    dv = np.asarray(d.degrees, dtype=float)
    max_deg = N.sum(axis=1)
    low = [v + 1 for v in range(graph.n) if dv[v] <= 0]
    high = [v + 1 for v in range(graph.n) if dv[v] >= max_deg[v]]
    if low or high:
        raise DegenerateFitError(
            sorted(low + high), "degree at boundary, MLE does not exist"
        )

    alpha = np.ones(graph.n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        prod = np.outer(alpha, alpha)
        denom = (N * (alpha[None, :] / (1.0 + prod))).sum(axis=1)
        fitted = alpha * denom
        new_residual = float(np.max(np.abs(dv - fitted)))
        if new_residual <= tol:
            return BetaFit(tuple(alpha), True, it - 1, new_residual)
        new_alpha = dv / denom
        if new_residual > residual:
            new_alpha = np.sqrt(alpha * new_alpha)
        alpha = new_alpha
        residual = new_residual
    prod = np.outer(alpha, alpha)
    fitted = (N * (prod / (1.0 + prod))).sum(axis=1)
    return BetaFit(tuple(alpha), False, max_iter, float(np.max(np.abs(dv - fitted))))


def log_likelihood(
    beta: np.ndarray, d: DegreeSequence, graph: Graph, caps: Capacities
) -> float:
    """Log likelihood in the exponential parameters b_i (up to the binomial
    coefficients, which do not depend on b)."""
    total = float(np.dot(beta, np.asarray(d.degrees, dtype=float)))
    for i, j in graph.edges:
        c = caps.cap((i, j))
        if c is None:
            raise ValueError("beta-model likelihood needs finite capacities")
        total -= c * float(np.log1p(np.exp(beta[i - 1] + beta[j - 1])))
    return total


def moment_gradient(
    alpha: np.ndarray, d: DegreeSequence, graph: Graph, caps: Capacities
) -> np.ndarray:
    """Gradient of the log likelihood in b: d_i - sum_j n_ij p_ij."""
    N = _cap_matrix(graph, caps)
    prod = np.outer(alpha, alpha)
    fitted = (N * (prod / (1.0 + prod))).sum(axis=1)
    return np.asarray(d.degrees, dtype=float) - fitted


def chi_square(x: EdgeVector, fit: BetaFit, caps: Capacities) -> float:
    """Pearson chi-square of x against the fitted independent binomials.

    Sum over edges of (x_e - n_e p_e)^2 / (n_e p_e (1 - p_e)).  Requires a
    converged interior fit; p at 0 or 1 would divide by zero.
    """
    if not fit.converged:
        raise ValueError("chi-square needs a converged fit")
    total = 0.0
    alpha = fit.alpha
    for i, j in x.graph.edges:
        c = caps.cap((i, j))
        if c is None:
            raise ValueError("chi-square needs finite capacities")
        prod = alpha[i - 1] * alpha[j - 1]
        p = prod / (1.0 + prod)
        var = c * p * (1.0 - p)
        if var <= 0.0:
            raise ValueError(f"fitted probability degenerate on edge ({i},{j})")
        diff = x.weight((i, j)) - c * p
        total += diff * diff / var
    return total


def _simple_adjacency(x: EdgeVector) -> dict[int, set[int]]:
    if not x.is_square_free():
        raise ValueError("statistic defined for simple graphs only (weights 0/1)")
    adj: dict[int, set[int]] = {v: set() for v in x.graph.vertices()}
    for i, j in x.weights:
        adj[i].add(j)
        adj[j].add(i)
    return adj


def triangle_count(x: EdgeVector) -> int:
    """Number of vertex triples pairwise joined in the simple graph x."""
    adj = _simple_adjacency(x)
    count = 0
    for i, j in x.weights:
        count += sum(1 for k in adj[i] & adj[j] if k > j)
    return count


def clustering_coefficient(x: EdgeVector) -> float:
    """Average local clustering over vertices of degree >= 2.

    Local value at v: (edges among neighbors) / (deg(v) choose 2).  Vertices
    of degree below 2 are excluded from the average; a graph with no such
    vertex returns 0 by convention.
    """
    adj = _simple_adjacency(x)
    total = 0.0
    counted = 0
    for v, nbrs in adj.items():
        k = len(nbrs)
        if k < 2:
            continue
        links = 0
        for u in nbrs:
            links += sum(1 for w in adj[u] if w > u and w in nbrs)
        total += 2.0 * links / (k * (k - 1))
        counted += 1
    return total / counted if counted else 0.0


class StreamingStats:
    """Incremental chi-square / triangles / clustering along a chain.

    Re-evaluating each statistic from scratch per sample costs O(edges); a
    chain step only flips the few edges of one move, so the trackers update
    from move deltas instead.  Restricted to all-ones capacities (simple
    graph states), which is the only place long chains need it.  Agreement
    with the direct functions is covered by tests.
    """

    def __init__(
        self,
        x0: EdgeVector,
        fit: BetaFit | None,
        caps: Capacities,
        want: set[str],
    ):
        if not caps.is_one:
            raise ValueError("streaming statistics support all-ones capacities only")
        self.want = want
        self.graph = x0.graph
        self._adj: dict[int, set[int]] = {v: set() for v in x0.graph.vertices()}
        for i, j in x0.weights:
            self._adj[i].add(j)
            self._adj[j].add(i)

        self._chi2 = 0.0
        self._chi_delta: dict[tuple[int, int], float] = {}
        if "chi2" in want:
            if fit is None:
                raise ValueError("chi2 tracking needs a fit")
            base = 0.0
            alpha = fit.alpha
            for i, j in x0.graph.edges:
                prod = alpha[i - 1] * alpha[j - 1]
                p = prod / (1.0 + prod)
                var = p * (1.0 - p)
                base += p * p / var
                # (x - p)^2 / var with x in {0, 1}: adds (1 - 2p)/var when
                # the edge is present.
                self._chi_delta[(i, j)] = (1.0 - 2.0 * p) / var
            self._chi2 = base + sum(
                self._chi_delta[e] for e in x0.weights
            )

        self._triangles = 0
        self._tri_per_vertex: dict[int, int] = {v: 0 for v in x0.graph.vertices()}
        if want & {"triangles", "clustering"}:
            for i, j in x0.weights:
                for k in self._adj[i] & self._adj[j]:
                    if k > j:
                        self._triangles += 1
            for v in self._adj:
                nbrs = self._adj[v]
                t = 0
                for u in nbrs:
                    t += sum(1 for w in self._adj[u] if w > u and w in nbrs)
                self._tri_per_vertex[v] = t

    def apply(self, move: Move) -> None:
        """Advance the trackers across an accepted move (0/1 edge flips)."""
        adj = self._adj
        track_tri = bool(self.want & {"triangles", "clustering"})
        for (i, j), dz in move.entries.items():
            if dz > 0:
                if track_tri:
                    common = adj[i] & adj[j]
                    self._triangles += len(common)
                    self._tri_per_vertex[i] += len(common)
                    self._tri_per_vertex[j] += len(common)
                    for k in common:
                        self._tri_per_vertex[k] += 1
                adj[i].add(j)
                adj[j].add(i)
            else:
                adj[i].discard(j)
                adj[j].discard(i)
                if track_tri:
                    common = adj[i] & adj[j]
                    self._triangles -= len(common)
                    self._tri_per_vertex[i] -= len(common)
                    self._tri_per_vertex[j] -= len(common)
                    for k in common:
                        self._tri_per_vertex[k] -= 1
            if self._chi_delta:
                self._chi2 += dz * self._chi_delta[(i, j)]

    def chi2(self) -> float:
        return self._chi2

    def triangles(self) -> int:
        return self._triangles

    def clustering(self) -> float:
        total = 0.0
        counted = 0
        for v, nbrs in self._adj.items():
            k = len(nbrs)
            if k < 2:
                continue
            total += 2.0 * self._tri_per_vertex[v] / (k * (k - 1))
            counted += 1
        return total / counted if counted else 0.0

    def value(self, name: str) -> float:
        if name == "chi2":
            return self._chi2
        if name == "triangles":
            return float(self._triangles)
        if name == "clustering":
            return self.clustering()
        raise KeyError(name)
