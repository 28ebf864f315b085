"""Greedy cross-color edge recommendation and the randomized baselines.

The main algorithm repairs parochial nodes one edge at a time: each round it
scores every parochial node of the requested color by bounded closeness
centrality times the oracle weight of its next insertion, inserts an edge
from the argmax, and repeats on the grown graph.  The cheaper ``_plus``
variant freezes the parochial set and the centralities at the start and
divides each node's score by a penalty that grows with the edges already
planned from it, which spreads insertions across sources.
"""
from __future__ import annotations

import warnings
from typing import Callable

import numpy as np

from .errors import EmptyParochialSet, NoLegalTarget, NoOppositeColor
from .bias import br_table
from .exact import BrTable, exact_rwcc
from .graph import (
    ColoredGraph,
    EdgeInsertion,
    InsertionPlan,
    WalkConfig,
    insert_edge,
    apply_plan,
    opposite,
    weight_oracle,
)
from .montecarlo import derive_seed, estimate_rwcc, stream

_TAG_BR = 11
_TAG_RWCC = 12
_TAG_TARGET = 13
_TAG_BASELINE = 14

DEFAULT_TOP_PCT = 10.0
TARGET_POLICIES = ("lowest-br", "uniform-seeded")


def _parochial_of_color(
    graph: ColoredGraph, color: str, br: BrTable, theta_bad: float
) -> np.ndarray:
    mask = graph.color_mask(color) & (br.values >= theta_bad)
    return np.flatnonzero(mask)


def _centralities(
    graph: ColoredGraph,
    pool: np.ndarray,
    cfg: WalkConfig,
    backend: str,
    seed: int,
    kappa: int,
) -> np.ndarray:
    """c_{t-2}(v, pool) for every v in pool; zeros when the horizon collapses."""
    horizon = cfg.t - 2
    if horizon < 1 or pool.size == 0:
        return np.zeros(pool.size)
    out = np.empty(pool.size)
    for i, v in enumerate(pool):
        if backend == "exact":
            out[i] = exact_rwcc(graph, int(v), pool, horizon)
        else:
            out[i] = estimate_rwcc(
                graph, int(v), pool, horizon, cfg.epsilon, cfg.delta,
                kappa=kappa, seed=seed,
            )
    return out


def _legal_targets(current: ColoredGraph, v: int) -> np.ndarray:
    candidates = current.nodes_of(opposite(current.color_of(v)))
    existing, _ = current.row(v)
    return np.setdiff1d(candidates, existing, assume_unique=True)


def _select_target(
    current: ColoredGraph,
    v: int,
    policy: str,
    cfg: WalkConfig,
    backend: str,
    seed: int,
    rng: np.random.Generator | None = None,
    br: BrTable | None = None,
) -> int:
    legal = _legal_targets(current, v)
    if legal.size == 0:
        raise NoLegalTarget(v)
    if policy == "uniform-seeded":
        if rng is None:
            rng = stream(seed, _TAG_TARGET, v)
        return int(legal[rng.integers(legal.size)])
    if policy == "lowest-br":
        if br is None:
            br = br_table(current, cfg, backend, seed)
        order = np.lexsort((legal, br.values[legal]))
        return int(legal[order[0]])
    raise ValueError(f"unknown target policy {policy!r}")


def target_selection(
    graph: ColoredGraph,
    v: int,
    plan: InsertionPlan | tuple[EdgeInsertion, ...] = (),
    policy: str = "lowest-br",
    cfg: WalkConfig | None = None,
    backend: str = "exact",
    seed: int | None = None,
) -> int:
    """Pick the destination for the next insertion from ``v`` given ``plan``.

    ``lowest-br`` (default) returns the opposite-color node with the smallest
    current Bubble Radius among targets not already linked from ``v``;
    ``uniform-seeded`` draws uniformly from the legal targets.  Ties go to
    the lowest node id.
    """
    if policy == "lowest-br" and cfg is None:
        raise ValueError("the lowest-br policy needs a WalkConfig for the horizon")
    if seed is None:
        seed = cfg.seed if cfg is not None else 0
    current = apply_plan(graph, plan)
    return _select_target(current, v, policy, cfg, backend, seed)


def repbublik(
    graph: ColoredGraph,
    color: str,
    budget: int,
    cfg: WalkConfig,
    backend: str = "exact",
    policy: str = "lowest-br",
    seed: int | None = None,
    kappa: int = 4,
) -> InsertionPlan:
    """Greedy insertion plan with per-round recomputation.

    Each of the ``budget`` rounds recomputes the parochial set and the
    centralities on the graph grown so far, then inserts an edge from the
    node maximizing centrality times oracle weight (ties: lowest id).  Stops
    early once no parochial node of ``color`` is left.
    """
    _check_run_args(graph, color, budget)
    if seed is None:
        seed = cfg.seed
    rng = stream(seed, _TAG_TARGET)
    current = graph
    edges: list[EdgeInsertion] = []
    for round_no in range(budget):
        br = br_table(current, cfg, backend, derive_seed(seed, _TAG_BR, round_no))
        pool = _parochial_of_color(current, color, br, cfg.theta_bad)
        if pool.size == 0:
            break
        scores = _centralities(
            current, pool, cfg, backend,
            derive_seed(seed, _TAG_RWCC, round_no), kappa,
        )
        oracle = np.array([weight_oracle(graph, int(v), edges) for v in pool])
        scores = scores * oracle
        source = int(pool[int(np.argmax(scores))])  # argmax returns the first max
        target = _select_target(
            current, source, policy, cfg, backend, seed, rng=rng, br=br
        )
        edge = EdgeInsertion(source, target, weight_oracle(graph, source, edges))
        current = insert_edge(current, edge)
        edges.append(edge)
    return InsertionPlan(edges=tuple(edges), color=color, requested=budget)


def repbublik_plus(
    graph: ColoredGraph,
    color: str,
    budget: int,
    cfg: WalkConfig,
    backend: str = "exact",
    policy: str = "lowest-br",
    seed: int | None = None,
    kappa: int = 4,
) -> InsertionPlan:
    """Penalized greedy plan with a single up-front scoring pass.

    Parochial nodes and centralities are computed once on the input graph;
    each round maximizes centrality * oracle weight / penalty, where the
    penalty is one plus the edges already planned from the node.  Ties
    prefer the node with the smaller penalty, then the lowest id, so equal
    scores still rotate across untouched sources.
    """
    _check_run_args(graph, color, budget)
    if seed is None:
        seed = cfg.seed
    rng = stream(seed, _TAG_TARGET)
    br = br_table(graph, cfg, backend, derive_seed(seed, _TAG_BR, 0))
    pool = _parochial_of_color(graph, color, br, cfg.theta_bad)
    if pool.size == 0 or budget == 0:
        return InsertionPlan(edges=(), color=color, requested=budget)
    base_scores = _centralities(
        graph, pool, cfg, backend, derive_seed(seed, _TAG_RWCC, 0), kappa
    )

    current = graph
    edges: list[EdgeInsertion] = []
    eta = {int(v): 1 for v in pool}
    blocked: set[int] = set()  # sources with no legal target left
    for _ in range(budget):
        inserted = False
        while not inserted:
            best_key: tuple[float, int, int] | None = None
            best_source = -1
            for i, v in enumerate(pool):
                v = int(v)
                if v in blocked:
                    continue
                score = base_scores[i] * weight_oracle(graph, v, edges) / eta[v]
                key = (score, -eta[v], -v)
                if best_key is None or key > best_key:
                    best_key = key
                    best_source = v
            if best_source < 0:
                return InsertionPlan(edges=tuple(edges), color=color, requested=budget)
            try:
                target = _select_target(
                    current, best_source, policy, cfg, backend, seed, rng=rng
                )
            except NoLegalTarget:
                blocked.add(best_source)
                continue
            edge = EdgeInsertion(
                best_source, target, weight_oracle(graph, best_source, edges)
            )
            current = insert_edge(current, edge)
            edges.append(edge)
            eta[best_source] += 1
            inserted = True
    return InsertionPlan(edges=tuple(edges), color=color, requested=budget)


def _check_run_args(graph: ColoredGraph, color: str, budget: int) -> None:
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if not graph.color_mask(opposite(color)).any():
        raise NoOppositeColor(f"no node of color {opposite(color)} to link toward")


def _random_plan_from_pool(
    graph: ColoredGraph,
    pool: np.ndarray,
    color: str,
    budget: int,
    rng: np.random.Generator,
) -> InsertionPlan:
    """Sample (source, target) pairs: sources uniform from the pool with
    replacement, targets uniform over the still-legal cross edges."""
    pool = [int(v) for v in pool]
    planned: dict[int, set[int]] = {}
    edges: list[EdgeInsertion] = []
    while len(edges) < budget and pool:
        v = pool[int(rng.integers(len(pool)))]
        legal = _legal_targets(graph, v)
        taken = planned.get(v)
        if taken:
            legal = legal[~np.isin(legal, sorted(taken))]
        if legal.size == 0:
            pool.remove(v)
            continue
        w = int(legal[rng.integers(legal.size)])
        edges.append(EdgeInsertion(v, w, weight_oracle(graph, v, edges)))
        planned.setdefault(v, set()).add(w)
    if len(edges) < budget:
        warnings.warn(
            f"only {len(edges)} of {budget} insertions were possible for color {color}",
            RuntimeWarning,
            stacklevel=3,
        )
    return InsertionPlan(edges=tuple(edges), color=color, requested=budget)


def baseline_pure_random(
    graph: ColoredGraph,
    color: str,
    budget: int,
    cfg: WalkConfig,
    seed: int | None = None,
    backend: str = "exact",
) -> InsertionPlan:
    """Sources uniform over the parochial set of ``color``, targets uniform."""
    _check_run_args(graph, color, budget)
    if seed is None:
        seed = cfg.seed
    br = br_table(graph, cfg, backend, derive_seed(seed, _TAG_BR, 0))
    pool = _parochial_of_color(graph, color, br, cfg.theta_bad)
    if pool.size == 0:
        warnings.warn(
            EmptyParochialSet(f"no parochial node of color {color}").args[0],
            RuntimeWarning,
            stacklevel=2,
        )
        return InsertionPlan(edges=(), color=color, requested=budget)
    rng = stream(seed, _TAG_BASELINE, 0)
    return _random_plan_from_pool(graph, pool, color, budget, rng)


def _top_pool(
    pool: np.ndarray, scores: np.ndarray, top_pct: float
) -> np.ndarray:
    """Top-N-percent slice (ceiling) of the pool by descending score."""
    keep = int(np.ceil(top_pct / 100.0 * pool.size))
    order = np.lexsort((pool, -scores))
    return pool[order[:keep]]


def baseline_rcn(
    graph: ColoredGraph,
    color: str,
    budget: int,
    cfg: WalkConfig,
    seed: int | None = None,
    backend: str = "exact",
    top_pct: float = DEFAULT_TOP_PCT,
    kappa: int = 4,
) -> InsertionPlan:
    """Random sources from the top-N-percent most central parochial nodes."""
    return _central_baseline(
        graph, color, budget, cfg, seed, backend, top_pct, kappa, weighted=False
    )


def baseline_rwcn(
    graph: ColoredGraph,
    color: str,
    budget: int,
    cfg: WalkConfig,
    seed: int | None = None,
    backend: str = "exact",
    top_pct: float = DEFAULT_TOP_PCT,
    kappa: int = 4,
) -> InsertionPlan:
    """Like the central baseline, but ranks by centrality * oracle weight."""
    return _central_baseline(
        graph, color, budget, cfg, seed, backend, top_pct, kappa, weighted=True
    )


def _central_baseline(
    graph: ColoredGraph,
    color: str,
    budget: int,
    cfg: WalkConfig,
    seed: int | None,
    backend: str,
    top_pct: float,
    kappa: int,
    weighted: bool,
) -> InsertionPlan:
    if not 0.0 < top_pct < 100.0:
        raise ValueError(f"top_pct must lie in (0, 100), got {top_pct}")
    _check_run_args(graph, color, budget)
    if seed is None:
        seed = cfg.seed
    br = br_table(graph, cfg, backend, derive_seed(seed, _TAG_BR, 0))
    pool = _parochial_of_color(graph, color, br, cfg.theta_bad)
    if pool.size == 0:
        warnings.warn(
            EmptyParochialSet(f"no parochial node of color {color}").args[0],
            RuntimeWarning,
            stacklevel=3,
        )
        return InsertionPlan(edges=(), color=color, requested=budget)
    scores = _centralities(
        graph, pool, cfg, backend, derive_seed(seed, _TAG_RWCC, 0), kappa
    )
    if weighted:
        scores = scores * np.array([weight_oracle(graph, int(v)) for v in pool])
    top = _top_pool(pool, scores, top_pct)
    rng = stream(seed, _TAG_BASELINE, 1 if not weighted else 2)
    return _random_plan_from_pool(graph, top, color, budget, rng)


AlgorithmFn = Callable[[ColoredGraph, str, int, WalkConfig, int, str], InsertionPlan]


def _algo_repbublik(graph, color, budget, cfg, seed, backend):
    return repbublik(graph, color, budget, cfg, backend=backend, seed=seed)


def _algo_repbublik_plus(graph, color, budget, cfg, seed, backend):
    return repbublik_plus(graph, color, budget, cfg, backend=backend, seed=seed)


def _algo_pure_random(graph, color, budget, cfg, seed, backend):
    return baseline_pure_random(graph, color, budget, cfg, seed=seed, backend=backend)


def _algo_rcn(graph, color, budget, cfg, seed, backend):
    return baseline_rcn(graph, color, budget, cfg, seed=seed, backend=backend)


def _algo_rwcn(graph, color, budget, cfg, seed, backend):
    return baseline_rwcn(graph, color, budget, cfg, seed=seed, backend=backend)


#: Registry used by the sweep harness; all entries share one call signature.
ALGORITHMS: dict[str, AlgorithmFn] = {
    "repbublik": _algo_repbublik,
    "repbublik-plus": _algo_repbublik_plus,
    "pure-random": _algo_pure_random,
    "rcn": _algo_rcn,
    "rwcn": _algo_rwcn,
}
