"""Seeded Monte Carlo estimators for Bubble Radius and bounded closeness.

Sample sizes follow the Hoeffding bound for the Bubble Radius (a union bound
over all nodes) and a Chebyshev/Popoviciu bound for the closeness estimate.
Randomness comes from counter-based Philox streams keyed on
``(master seed, purpose, node id)``: walk ``i`` of a node reads row ``i`` of
that node's uniform block, so scheduling or worker count can never change a
result and identical (graph, config, seed) gives bit-identical estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptySourceSet, MixedColorSet
from .exact import BrTable
from .graph import ColoredGraph, opposite

# Stream purposes; part of the Philox key, never reused across call sites.
_STREAM_BR = 1
_STREAM_RWCC_SOURCES = 2
_STREAM_RWCC_WALKS = 3
_STREAM_SESSION = 4
_STREAM_CHOICE = 5

#: Above this many padded table entries the sampler falls back to grouped
#: per-state sampling instead of one dense (n, max_degree) lookup table.
_DENSE_TABLE_LIMIT = 50_000_000


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent counter-based generator for one (seed, purpose, ...) task."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse (seed, key...) into a fresh 64-bit master seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _check_accuracy(epsilon: float, delta: float) -> None:
    # epsilon = 1 (one whole step of slack) is a legitimate accuracy target.
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def _ceil(x: float) -> int:
    # Guard against float noise pushing an exact integer over the ceiling.
    nearest = round(x)
    if abs(x - nearest) < 1e-9:
        return int(nearest)
    return math.ceil(x)


@dataclass(frozen=True)
class SampleBudget:
    """Walk counts for one estimation round."""

    r_br: int         # walks per node for the Bubble Radius
    z_sources: int    # sampled sources for the closeness estimate
    kappa: int        # inner walks per sampled source

    def __post_init__(self):
        if min(self.r_br, self.z_sources, self.kappa) < 1:
            raise ValueError("all sample counts must be positive")

    @classmethod
    def for_accuracy(
        cls, n: int, t: int, t_prime: int, epsilon: float, delta: float,
        kappa: int = 4,
    ) -> "SampleBudget":
        """Budget meeting the (epsilon, delta) guarantees at both horizons."""
        return cls(
            r_br=br_sample_size(n, t, epsilon, delta),
            z_sources=rwcc_sample_size(t_prime, epsilon, delta),
            kappa=kappa,
        )


def br_sample_size(n: int, t: int, epsilon: float, delta: float) -> int:
    """Walks per node so that every node's estimate is epsilon-close w.p. 1-delta."""
    _check_accuracy(epsilon, delta)
    if n < 1 or t < 1:
        raise ValueError("need n >= 1 and t >= 1")
    return _ceil((t * t / (epsilon * epsilon)) * math.log(2.0 * n / delta))


def rwcc_sample_size(t_prime: int, epsilon: float, delta: float) -> int:
    """Sampled sources so the closeness estimate is epsilon-close w.p. 1-delta."""
    _check_accuracy(epsilon, delta)
    if t_prime < 1:
        raise ValueError("need t' >= 1")
    return _ceil((t_prime / (2.0 * epsilon)) ** 2 / delta)


class _WalkSampler:
    """Vectorized next-state sampling from the CSR rows of a graph."""

    def __init__(self, graph: ColoredGraph):
        self.graph = graph
        deg = np.diff(graph.indptr)
        self.deg = deg
        n = graph.n
        max_deg = int(deg.max()) if n else 0
        self.dense = n * max_deg <= _DENSE_TABLE_LIMIT
        # Per-row cumulative weights; padding inf keeps searchsorted in-row.
        cs = np.cumsum(graph.weights)
        row_prefix = cs[graph.indptr[:-1]] - graph.weights[graph.indptr[:-1]]
        rowcum = cs - np.repeat(row_prefix, deg)
        if self.dense:
            self.cum = np.full((n, max_deg), np.inf)
            self.tgt = np.zeros((n, max_deg), dtype=np.int64)
            rows = np.repeat(np.arange(n), deg)
            cols = np.arange(graph.edge_count) - np.repeat(graph.indptr[:-1], deg)
            self.cum[rows, cols] = rowcum
            self.tgt[rows, cols] = graph.targets
        else:
            self.rowcum = rowcum

    def step(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        if self.dense:
            idx = (self.cum[states] <= u[:, None]).sum(axis=1)
            idx = np.minimum(idx, self.deg[states] - 1)
            return self.tgt[states, idx]
        out = np.empty_like(states)
        for s in np.unique(states):
            mask = states == s
            lo, hi = self.graph.indptr[s], self.graph.indptr[s + 1]
            idx = np.searchsorted(self.rowcum[lo:hi], u[mask], side="right")
            idx = np.minimum(idx, hi - lo - 1)
            out[mask] = self.graph.targets[lo:hi][idx]
        return out


def _walk_lengths(
    sampler: _WalkSampler, start: int, absorbing: np.ndarray, uniforms: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Capped walk lengths from ``start``; row i of uniforms drives walk i.

    Returns (lengths, absorbed): walks that never touch the absorbing set
    have length t and absorbed False.
    """
    r, t = uniforms.shape
    lengths = np.full(r, t, dtype=np.int64)
    reached = np.zeros(r, dtype=bool)
    states = np.full(r, start, dtype=np.int64)
    rows = np.arange(r)
    for step in range(1, t + 1):
        nxt = sampler.step(states, uniforms[rows, step - 1])
        hit = absorbing[nxt]
        lengths[rows[hit]] = step
        reached[rows[hit]] = True
        rows = rows[~hit]
        states = nxt[~hit]
        if rows.size == 0:
            break
    return lengths, reached


def estimate_br(
    graph: ColoredGraph,
    t: int,
    epsilon: float,
    delta: float,
    seed: int,
    walks_per_node: int | None = None,
) -> BrTable:
    """Monte Carlo Bubble Radius table: mean of r capped walk lengths per node.

    Walks stop when they hit the opposite color or after ``t`` steps,
    whichever comes first.  Deterministic for a fixed seed.
    """
    if t < 1:
        raise ValueError(f"horizon must be >= 1, got {t}")
    r = walks_per_node if walks_per_node is not None else br_sample_size(
        graph.n, t, epsilon, delta
    )
    if r < 1:
        raise ValueError("need at least one walk per node")
    sampler = _WalkSampler(graph)
    values = np.empty(graph.n)
    for v in range(graph.n):
        absorbing = graph.color_mask(opposite(graph.color_of(v)))
        uniforms = stream(seed, _STREAM_BR, v).random((r, t))
        lengths, _ = _walk_lengths(sampler, v, absorbing, uniforms)
        values[v] = lengths.mean()
    return BrTable(values=values, t=t, provenance="estimated")


def _hit_times(
    sampler: _WalkSampler,
    start: int,
    target: int,
    forbidden: np.ndarray,
    uniforms: np.ndarray,
) -> np.ndarray:
    """Capped color-avoiding hit times of ``target``: walks touching the
    opposite color, or running out of steps, count the full horizon."""
    kappa, t_prime = uniforms.shape
    times = np.full(kappa, t_prime, dtype=np.int64)
    states = np.full(kappa, start, dtype=np.int64)
    rows = np.arange(kappa)
    for step in range(1, t_prime + 1):
        nxt = sampler.step(states, uniforms[rows, step - 1])
        hit = nxt == target
        times[rows[hit]] = step
        done = hit | forbidden[nxt]
        rows = rows[~done]
        states = nxt[~done]
        if rows.size == 0:
            break
    return times


def estimate_rwcc(
    graph: ColoredGraph,
    v: int,
    sources: Iterable[int],
    t_prime: int,
    epsilon: float,
    delta: float,
    kappa: int = 4,
    seed: int = 0,
    num_sources: int | None = None,
) -> float:
    """Monte Carlo bounded closeness of ``v`` w.r.t. a monochromatic set.

    Draws z sources uniformly at random with replacement, estimates each
    source's capped hit time of ``v`` as the mean of ``kappa`` walks, and
    returns t' minus the grand mean.  A drawn source equal to ``v`` itself
    contributes the full horizon (zero centrality), matching the exact form
    in which the self term is skipped.
    """
    if t_prime < 1:
        raise ValueError(f"horizon must be >= 1, got {t_prime}")
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    src = np.asarray(sorted(set(int(w) for w in sources)), dtype=np.int64)
    if src.size == 0:
        raise EmptySourceSet("closeness estimation needs a non-empty source set")
    if not (graph.colors[src] == graph.color_of(v)).all():
        raise MixedColorSet("sources must all share the color of v")

    z = num_sources if num_sources is not None else rwcc_sample_size(
        t_prime, epsilon, delta
    )
    picks = stream(seed, _STREAM_RWCC_SOURCES, v).integers(0, src.size, size=z)
    sampler = _WalkSampler(graph)
    forbidden = graph.color_mask(opposite(graph.color_of(v)))

    h_bars = np.empty(z)
    for i, pick in enumerate(picks):
        w = int(src[pick])
        if w == v:
            h_bars[i] = t_prime
            continue
        uniforms = stream(seed, _STREAM_RWCC_WALKS, v, i).random((kappa, t_prime))
        h_bars[i] = _hit_times(sampler, w, v, forbidden, uniforms).mean()
    return float(t_prime - h_bars.mean())


def simulate_restart_session(
    graph: ColoredGraph, v: int, t: int, restarts: int, seed: int
) -> int | None:
    """Browsing session from ``v`` with up to ``restarts`` attempts.

    Runs sequential walk segments of at most ``t`` steps each; a segment that
    ends without touching the opposite color triggers a restart from ``v``.
    Returns the total number of steps across segments up to the first hit,
    or None if every segment failed.
    """
    if t < 1 or restarts < 1:
        raise ValueError("need t >= 1 and restarts >= 1")
    sampler = _WalkSampler(graph)
    absorbing = graph.color_mask(opposite(graph.color_of(v)))
    rng = stream(seed, _STREAM_SESSION, v)
    total = 0
    for _ in range(restarts):
        uniforms = rng.random((1, t))
        lengths, reached = _walk_lengths(sampler, v, absorbing, uniforms)
        total += int(lengths[0])
        if reached[0]:
            return total
    return None
