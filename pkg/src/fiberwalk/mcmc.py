"""Metropolis random walk over a fiber using randomly generated basis moves.

The proposal draws a basis move independently of the current state and flips
its sign with a fair coin, so proposing z from x is exactly as likely as
proposing -z from x+z.  With a uniform target the acceptance ratio is
therefore 1: a feasible proposal is always taken, an infeasible or exhausted
one leaves the state in place.  Every visited state keeps the starting degree
sequence.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from random import Random
from typing import Callable, Iterator, Mapping

from .graphs import Capacities, EdgeVector, Move, apply_move
from .graver import GenMode, sample_graver_element


class ChainConfigError(ValueError):
    """The chain configuration violates its invariants."""


@dataclass(frozen=True)
class ChainConfig:
    """Chain run parameters.

    mode None means: square-free generation exactly when capacities are
    all-ones (simple-graph fibers need only square-free moves; multigraph
    fibers need the general ones).  The only supported target distribution
    is the uniform one; the field exists to make that contract explicit.
    """

    steps: int
    burn_in: int = 0
    thinning: int = 1
    seed: int = 0
    mode: GenMode | None = None
    target: str = "uniform"

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ChainConfigError(f"steps must be >= 1, got {self.steps}")
        if not 0 <= self.burn_in < self.steps:
            raise ChainConfigError(
                f"burn_in must satisfy 0 <= burn_in < steps, got {self.burn_in}"
            )
        if self.thinning < 1:
            raise ChainConfigError(f"thinning must be >= 1, got {self.thinning}")
        if self.target != "uniform":
            raise ChainConfigError(f"unsupported target {self.target!r}")

    def resolve_mode(self, caps: Capacities) -> GenMode:
        if self.mode is not None:
            return self.mode
        return GenMode(square_free=caps.is_one)


@dataclass
class ChainState:
    """Mutable chain bookkeeping; one instance per chain, never shared."""

    current: EdgeVector
    step_index: int = 0
    accepted: int = 0
    rejected_infeasible: int = 0
    rejected_exhausted: int = 0
    last_move: Move | None = None


@dataclass(frozen=True)
class ChainReport:
    steps: int
    burn_in: int
    thinning: int
    accepted: int
    rejected_infeasible: int
    rejected_exhausted: int
    samples: int
    distinct_states: int | None = None

    def to_dict(self) -> dict:
        out = {
            "steps": self.steps,
            "burn_in": self.burn_in,
            "thinning": self.thinning,
            "accepted": self.accepted,
            "rejected_infeasible": self.rejected_infeasible,
            "rejected_exhausted": self.rejected_exhausted,
            "samples": self.samples,
        }
        if self.distinct_states is not None:
            out["distinct_states"] = self.distinct_states
        return out


@dataclass
class ChainResult:
    report: ChainReport
    stats: dict[str, array] = field(default_factory=dict)
    samples: list[EdgeVector] | None = None
    state_counts: dict[tuple, int] | None = None


def mh_step(
    state: ChainState,
    caps: Capacities,
    mode: GenMode,
    rng: Random,
) -> ChainState:
    """Advance the chain one step in place and return it.

    Draws a move, symmetrizes its sign, applies it when feasible; updates
    the acceptance counters either way.
    """
    z = sample_graver_element(state.current.graph, mode, rng)
    state.step_index += 1
    state.last_move = None
    if z is None:
        state.rejected_exhausted += 1
        return state
    if rng.random() < 0.5:
        # safe to flip in place: the sampler hands over a fresh, unshared move
        z.entries = {e: -w for e, w in z.entries.items()}
    nxt = apply_move(state.current, z, caps)
    if nxt is None:
        state.rejected_infeasible += 1
        return state
    state.current = nxt
    state.accepted += 1
    state.last_move = z
    return state


def iter_chain(
    x0: EdgeVector, caps: Capacities, config: ChainConfig
) -> Iterator[EdgeVector]:
    """Yield the retained samples of one chain (post burn-in, thinned)."""
    if not x0.respects(caps):
        raise ChainConfigError("initial state violates the capacities")
    mode = config.resolve_mode(caps)
    rng = Random(config.seed)
    state = ChainState(current=x0)
    for t in range(1, config.steps + 1):
        mh_step(state, caps, mode, rng)
        if t > config.burn_in and (t - config.burn_in - 1) % config.thinning == 0:
            yield state.current


def run_chain(
    x0: EdgeVector,
    caps: Capacities,
    config: ChainConfig,
    stats: Mapping[str, Callable[[EdgeVector], float]] | None = None,
    keep_samples: bool = False,
    track_states: bool = False,
) -> ChainResult:
    """Run one chain, streaming per-sample statistics.

    stats maps a name to a function of the sampled state; values are
    accumulated in compact double arrays.  keep_samples stores the retained
    states themselves (memory: opt in).  track_states counts visits per
    distinct state, for small fibers.
    """
    if not x0.respects(caps):
        raise ChainConfigError("initial state violates the capacities")
    mode = config.resolve_mode(caps)
    rng = Random(config.seed)
    state = ChainState(current=x0)
    values: dict[str, array] = {name: array("d") for name in (stats or {})}
    samples: list[EdgeVector] | None = [] if keep_samples else None
    counts: dict[tuple, int] | None = {} if track_states else None

    burn_in = config.burn_in
    thinning = config.thinning
    for t in range(1, config.steps + 1):
        mh_step(state, caps, mode, rng)
        if t <= burn_in or (t - burn_in - 1) % thinning != 0:
            continue
        x = state.current
        if stats:
            for name, fn in stats.items():
                values[name].append(fn(x))
        if samples is not None:
            samples.append(x)
        if counts is not None:
            k = x.key()
            counts[k] = counts.get(k, 0) + 1

    retained = max(0, config.steps - burn_in + thinning - 1) // thinning
    report = ChainReport(
        steps=config.steps,
        burn_in=burn_in,
        thinning=thinning,
        accepted=state.accepted,
        rejected_infeasible=state.rejected_infeasible,
        rejected_exhausted=state.rejected_exhausted,
        samples=retained,
        distinct_states=len(counts) if counts is not None else None,
    )
    return ChainResult(report, values, samples, counts)


def run_streaming_chain(
    x0: EdgeVector,
    caps: Capacities,
    config: ChainConfig,
    fit,
    stats: list[str],
    keep_states: bool = False,
) -> tuple[ChainReport, dict[str, array], list[EdgeVector] | None]:
    """Chain loop with incremental statistics (the report path's hot loop).

    Statistics advance from move deltas instead of per-sample re-evaluation,
    so a step costs O(move size) regardless of graph size.  Equivalent to
    run_chain with the direct statistic functions; the equivalence is under
    test.
    """
    from .betamodel import StreamingStats

    if not x0.respects(caps):
        raise ChainConfigError("initial state violates the capacities")
    mode = config.resolve_mode(caps)
    rng = Random(config.seed)
    state = ChainState(current=x0)
    tracker = StreamingStats(x0, fit, caps, set(stats))
    values: dict[str, array] = {name: array("d") for name in stats}
    states: list[EdgeVector] | None = [] if keep_states else None

    burn_in = config.burn_in
    thinning = config.thinning
    for t in range(1, config.steps + 1):
        mh_step(state, caps, mode, rng)
        if state.last_move is not None:
            tracker.apply(state.last_move)
        if t <= burn_in or (t - burn_in - 1) % thinning != 0:
            continue
        for name in stats:
            values[name].append(tracker.value(name))
        if states is not None:
            states.append(state.current)

    retained = max(0, config.steps - burn_in + thinning - 1) // thinning
    report = ChainReport(
        steps=config.steps,
        burn_in=burn_in,
        thinning=thinning,
        accepted=state.accepted,
        rejected_infeasible=state.rejected_infeasible,
        rejected_exhausted=state.rejected_exhausted,
        samples=retained,
    )
    return report, values, states


def estimate_pvalue(samples, observed: float) -> float:
    """Upper-tail Monte-Carlo p-value: fraction of samples >= observed.

    Ties count as extreme, which never understates significance.
    """
    total = 0
    hits = 0
    for v in samples:
        total += 1
        if v >= observed:
            hits += 1
    if total == 0:
        raise ValueError("p-value needs at least one sample")
    return hits / total
