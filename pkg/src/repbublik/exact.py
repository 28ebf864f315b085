"""Exact dynamic programs for bounded random-walk quantities.

Every estimator and property test in the package is checked against these
routines.  All of them run in O(t * |E|) per source/target via sparse
matrix-vector products, so they stay practical for small and medium graphs
while avoiding the cubic cost of Laplacian-based hitting-time solvers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySourceSet,
    EnumerationTooLarge,
    MixedColorSet,
    SourceIsTarget,
    TargetInAvoidSet,
)
from .graph import (
    BLUE,
    RED,
    ColoredGraph,
    EdgeInsertion,
    InsertionPlan,
    apply_plan,
    opposite,
    weight_oracle,
)

#: Absolute tolerance for the dynamic programs.
DP_TOL = 1e-9
#: Probability mass below this (in absolute value) is clamped to zero.
CLAMP = 1e-15


def _clamped(x: np.ndarray) -> np.ndarray:
    x[np.abs(x) < CLAMP] = 0.0
    return x


@dataclass(frozen=True, eq=False)
class BrTable:
    """Per-node Bubble Radius values for one horizon.

    ``values[v]`` is E[min(t, steps to first hit the opposite color)] and
    always lies in [1, t]; nodes that cannot reach the opposite color sit at
    the cap t.  ``provenance`` records whether the table came from the exact
    engine or a Monte Carlo estimate.
    """

    values: np.ndarray
    t: int
    provenance: str  # "exact" | "estimated"

    def __post_init__(self):
        self.values.setflags(write=False)
        if self.values.size and (
            self.values.min() < 1.0 - DP_TOL or self.values.max() > self.t + DP_TOL
        ):
            raise ValueError(f"Bubble Radius values must lie in [1, {self.t}]")


@dataclass(frozen=True, eq=False)
class FirstPassageProfile:
    """Color-avoiding first-passage probabilities from one node to another.

    ``probs[i]`` is the probability that a walk from ``source`` is at
    ``target`` at exactly step ``i`` (1-indexed; ``probs[0]`` is unused and
    zero) without visiting ``target`` or any opposite-color node earlier.
    """

    source: int
    target: int
    horizon: int
    probs: np.ndarray  # shape (horizon + 1,)

    def __post_init__(self):
        self.probs.setflags(write=False)

    @property
    def total(self) -> float:
        return float(self.probs.sum())


def _node_set(graph: ColoredGraph, nodes: Iterable[int]) -> np.ndarray:
    arr = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    if arr.size and (arr[0] < 0 or arr[-1] >= graph.n):
        raise ValueError(f"node set {arr} contains ids outside 0..{graph.n - 1}")
    return arr


def exact_bounded_hitting(
    graph: ColoredGraph, absorbing: Iterable[int], t: int
) -> np.ndarray:
    """E[min(t, first hit of the absorbing set)] for every start node.

    Uses the survival identity E[min(t, T)] = sum_{i=0}^{t-1} P(T > i) with
    the recurrence s_{i+1} = M @ s_i zeroed on the absorbing set.  An empty
    absorbing set is allowed and yields t everywhere (the walk is never
    absorbed, only capped).
    """
    if t < 1:
        raise ValueError(f"horizon must be >= 1, got {t}")
    absorbed = _node_set(graph, absorbing)
    survival = np.ones(graph.n)
    survival[absorbed] = 0.0
    expected = survival.copy()
    for _ in range(t - 1):
        survival = graph.matrix @ survival
        survival[absorbed] = 0.0
        expected += _clamped(survival)
    return expected


def exact_br(graph: ColoredGraph, t: int) -> BrTable:
    """Exact Bubble Radius of every node at horizon ``t``.

    Two absorbing-set passes: blue nodes absorb the walks of red sources and
    vice versa.  A color with no opposite nodes sits at the cap ``t``.
    """
    values = np.empty(graph.n)
    for color in (RED, BLUE):
        sources = graph.color_mask(color)
        if not sources.any():
            continue
        hit = exact_bounded_hitting(graph, graph.nodes_of(opposite(color)), t)
        values[sources] = hit[sources]
    return BrTable(values=values, t=t, provenance="exact")


def exact_first_passage(
    graph: ColoredGraph, source: int, target: int, t: int
) -> FirstPassageProfile:
    """Distribution of the first hit of ``target`` avoiding the other color.

    Step-wise distribution propagation with absorbing set
    {target} union opposite-color nodes.  Source and target must share a
    color; the conflicting case is rejected rather than guessing precedence
    between "hit the target" and "avoid the other color".
    """
    if source == target:
        raise SourceIsTarget(f"first passage from {source} to itself is a return mass")
    if graph.color_of(source) != graph.color_of(target):
        raise TargetInAvoidSet(
            f"target {target} has the opposite color of source {source}"
        )
    if t < 1:
        raise ValueError(f"horizon must be >= 1, got {t}")

    absorb = graph.color_mask(opposite(graph.color_of(source))).copy()
    absorb[target] = True
    dist = np.zeros(graph.n)
    dist[source] = 1.0
    probs = np.zeros(t + 1)
    for step in range(1, t + 1):
        dist = _clamped(graph.matrix_t @ dist)
        probs[step] = dist[target]
        dist[absorb] = 0.0
    return FirstPassageProfile(source=source, target=target, horizon=t, probs=probs)


def exact_return_mass(
    graph: ColoredGraph, v: int, t_prime: int
) -> tuple[np.ndarray, float]:
    """Return-visit probabilities of ``v`` before touching the other color.

    ``p[i]`` is the probability that a walk from ``v`` is at ``v`` at step
    ``i`` while avoiding the opposite color at steps 1..i; earlier revisits
    of ``v`` do not stop the walk.  Returns ``(p[0..t'-1], F)`` with
    ``F = sum(p)``; ``p[0] = 1`` and ``p[1] = 0`` always (no self-loops).
    """
    if t_prime < 1:
        raise ValueError(f"horizon must be >= 1, got {t_prime}")
    avoid = graph.color_mask(opposite(graph.color_of(v)))
    p = np.zeros(t_prime)
    p[0] = 1.0
    dist = np.zeros(graph.n)
    dist[v] = 1.0
    for step in range(1, t_prime):
        dist = _clamped(graph.matrix_t @ dist)
        dist[avoid] = 0.0
        p[step] = dist[v]
    assert t_prime < 2 or p[1] == 0.0, "a self-loop slipped past graph validation"
    return p, float(p.sum())


def exact_gamma(graph: ColoredGraph, t: int) -> float:
    """max over nodes of the total return mass F_t(v).

    Computed with one block propagation per color: column j of the block is
    the distribution of the walk started at the color's j-th node.
    """
    if t < 1:
        raise ValueError(f"horizon must be >= 1, got {t}")
    best = 1.0  # p_0 = 1 contributes to every node
    for color in (RED, BLUE):
        nodes = graph.nodes_of(color)
        if nodes.size == 0:
            continue
        avoid = graph.color_mask(opposite(color))
        block = np.zeros((graph.n, nodes.size))
        block[nodes, np.arange(nodes.size)] = 1.0
        totals = np.ones(nodes.size)
        for _ in range(1, t):
            block = _clamped(graph.matrix_t @ block)
            block[avoid, :] = 0.0
            totals += block[nodes, np.arange(nodes.size)]
        if totals.size:
            best = max(best, float(totals.max()))
    return best


def _validate_centrality_set(
    graph: ColoredGraph, v: int, sources: np.ndarray
) -> None:
    if sources.size == 0:
        raise EmptySourceSet("centrality needs at least one source node")
    colors = graph.colors[sources]
    if not (colors == graph.color_of(v)).all():
        raise MixedColorSet(
            f"sources of c(v={v}, S) must all share the color of v"
        )


def exact_rwcc(
    graph: ColoredGraph, v: int, sources: Iterable[int], t_prime: int
) -> float:
    """Bounded random-walk closeness centrality of ``v`` w.r.t. ``sources``.

    c_{t'}(v, S) = (1/|S|) * sum_{w in S} sum_{i=1}^{t'} (t' - i) * P(walk
    from w first hits v at step i avoiding the opposite color).  Sources that
    cannot reach v within t' contribute zero; the self term w == v is
    skipped (the sum starts at step 1, not 0).

    One backward DP over all sources: q_i(w) = P(from w, first hit of v at
    step i avoiding the absorbing set), so the whole set costs O(t' * |E|).
    """
    if t_prime < 1:
        raise ValueError(f"horizon must be >= 1, got {t_prime}")
    src = _node_set(graph, sources)
    _validate_centrality_set(graph, v, src)

    keep = ~graph.color_mask(opposite(graph.color_of(v)))
    keep = keep.copy()
    keep[v] = False  # the walk stops at its first visit of v

    q = graph.matrix_t[v].toarray().ravel().astype(np.float64)  # q_1(w) = M[w, v]
    acc = (t_prime - 1) * q
    for i in range(2, t_prime):
        q = _clamped(graph.matrix @ (q * keep))
        acc += (t_prime - i) * q

    contributors = src[src != v]
    return float(acc[contributors].sum() / src.size)


def exact_gain(
    graph: ColoredGraph,
    nodes: Iterable[int],
    plan: InsertionPlan | Sequence[EdgeInsertion],
    t: int,
) -> float:
    """Mean Bubble Radius drop over ``nodes`` after applying ``plan``.

    Insertions are applied in plan order, so same-source weights renormalize
    sequentially.  An empty plan is the identity and gains zero.
    """
    targets = _node_set(graph, nodes)
    if targets.size == 0:
        raise EmptySourceSet("gain needs a non-empty node set")
    edges = tuple(plan)
    if not edges:
        return 0.0
    before = exact_br(graph, t).values
    after = exact_br(apply_plan(graph, edges), t).values
    return float(np.mean(before[targets] - after[targets]))


def parochial_nodes(
    graph: ColoredGraph, br: BrTable, color: str, theta_bad: float
) -> np.ndarray:
    """Nodes of ``color`` whose Bubble Radius is at least ``theta_bad``."""
    mask = graph.color_mask(color) & (br.values >= theta_bad)
    return np.flatnonzero(mask)


def brute_force_opt(
    graph: ColoredGraph,
    color: str,
    k: int,
    t: int,
    theta_bad: float | None = None,
    enumeration_cap: int = 200_000,
) -> tuple[InsertionPlan, float]:
    """Exhaustive optimum of the k-edge insertion problem (test oracle).

    Enumerates every k-subset of candidate cross-color edges with parochial
    sources (weights assigned sequentially by the oracle) and returns the
    plan maximizing the exact gain over the parochial set, breaking ties by
    enumeration order.  Refuses instances above ``enumeration_cap`` plans.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if theta_bad is None:
        theta_bad = t / 2
    if k == 0:
        return InsertionPlan(edges=(), color=color, requested=0), 0.0

    br = exact_br(graph, t)
    parochial = parochial_nodes(graph, br, color, theta_bad)
    others = graph.nodes_of(opposite(color))
    candidates = [
        (int(v), int(w))
        for v in parochial
        for w in others
        if not graph.has_edge(int(v), int(w))
    ]
    if len(candidates) < k:
        return InsertionPlan(edges=(), color=color, requested=k), 0.0
    n_plans = math.comb(len(candidates), k)
    if n_plans > enumeration_cap:
        raise EnumerationTooLarge(n_plans, enumeration_cap)

    best_gain = -np.inf
    best_edges: tuple[EdgeInsertion, ...] = ()
    for combo in itertools.combinations(candidates, k):
        edges: list[EdgeInsertion] = []
        for v, w in combo:
            edges.append(EdgeInsertion(v, w, weight_oracle(graph, v, edges)))
        gain = exact_gain(graph, parochial, edges, t)
        if gain > best_gain:
            best_gain = gain
            best_edges = tuple(edges)
    return InsertionPlan(edges=best_edges, color=color, requested=k), float(best_gain)
