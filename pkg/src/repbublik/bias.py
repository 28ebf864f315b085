"""Cosmopolitan/parochial classification, structural bias, gain, budgets."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BothColorsUnbiased, EmptySourceSet, ThresholdOrder
from .exact import BrTable, exact_br, exact_gain
from .graph import (
    BLUE,
    RED,
    ColoredGraph,
    EdgeInsertion,
    InsertionPlan,
    WalkConfig,
    apply_plan,
)
from .montecarlo import estimate_br


def br_table(
    graph: ColoredGraph, cfg: WalkConfig, backend: str = "exact",
    seed: int | None = None,
) -> BrTable:
    """Bubble Radius table for one config, exact or estimated."""
    if backend == "exact":
        return exact_br(graph, cfg.t)
    if backend == "mc":
        warn_if_estimate_too_coarse(cfg)
        return estimate_br(
            graph, cfg.t, cfg.epsilon, cfg.delta,
            cfg.seed if seed is None else seed,
        )
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class BiasPartition:
    """Cosmopolitan and per-color parochial node sets for one threshold pair.

    The two groups are disjoint but need not cover all nodes: anything with
    a Bubble Radius strictly between the thresholds belongs to neither.
    """

    cosmopolitan: frozenset[int]
    parochial_red: frozenset[int]
    parochial_blue: frozenset[int]
    theta_good: float
    theta_bad: float

    @property
    def parochial(self) -> frozenset[int]:
        return self.parochial_red | self.parochial_blue

    def parochial_of(self, color: str) -> frozenset[int]:
        return self.parochial_red if color == RED else self.parochial_blue


def classify(
    br: BrTable,
    colors: np.ndarray | Sequence[str],
    theta_good: float,
    theta_bad: float,
) -> BiasPartition:
    """Split nodes by Bubble Radius; both threshold boundaries are inclusive."""
    if not 1.0 <= theta_good < theta_bad <= br.t:
        raise ThresholdOrder(
            f"need 1 <= theta_good < theta_bad <= {br.t}, got "
            f"theta_good={theta_good}, theta_bad={theta_bad}"
        )
    color_arr = np.asarray(list(colors), dtype="<U1")
    values = br.values
    cosmo = np.flatnonzero(values <= theta_good)
    bad = values >= theta_bad
    return BiasPartition(
        cosmopolitan=frozenset(int(v) for v in cosmo),
        parochial_red=frozenset(int(v) for v in np.flatnonzero(bad & (color_arr == RED))),
        parochial_blue=frozenset(int(v) for v in np.flatnonzero(bad & (color_arr == BLUE))),
        theta_good=float(theta_good),
        theta_bad=float(theta_bad),
    )


def structural_bias(
    br: BrTable, partition: BiasPartition, color: str | None = None
) -> float:
    """Sum of the Bubble Radii of the parochial nodes (optionally one color)."""
    if color is None:
        nodes = partition.parochial
    else:
        nodes = partition.parochial_of(color)
    if not nodes:
        return 0.0
    return float(br.values[sorted(nodes)].sum())


def gain(
    graph: ColoredGraph,
    nodes: Iterable[int],
    plan: InsertionPlan | Sequence[EdgeInsertion],
    t: int,
    backend: str = "exact",
    cfg: WalkConfig | None = None,
) -> float:
    """Mean Bubble Radius drop over ``nodes`` due to ``plan``.

    The Monte Carlo backend estimates the before/after tables with the same
    seed, so walk noise largely cancels in the difference.
    """
    targets = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    if targets.size == 0:
        raise EmptySourceSet("gain needs a non-empty node set")
    if backend == "exact":
        return exact_gain(graph, targets, plan, t)
    if backend != "mc":
        raise ValueError(f"unknown backend {backend!r}")
    if cfg is None:
        raise ValueError("the mc backend needs a WalkConfig for epsilon/delta/seed")
    edges = tuple(plan)
    if not edges:
        return 0.0
    before = estimate_br(graph, t, cfg.epsilon, cfg.delta, cfg.seed)
    after = estimate_br(apply_plan(graph, edges), t, cfg.epsilon, cfg.delta, cfg.seed)
    return float(np.mean(before.values[targets] - after.values[targets]))


def warn_if_estimate_too_coarse(cfg: WalkConfig) -> None:
    """Advise when the estimation accuracy cannot separate the thresholds.

    Classification from an estimated table uses the point estimate with no
    hysteresis band, so epsilon should be at most (theta_bad - theta_good)/2.
    """
    limit = (cfg.theta_bad - cfg.theta_good) / 2.0
    if cfg.epsilon > limit:
        warnings.warn(
            f"estimation epsilon={cfg.epsilon} exceeds (theta_bad - theta_good)/2"
            f"={limit}; estimated classifications may flip near the thresholds",
            RuntimeWarning,
            stacklevel=3,
        )


def budget_allocation(y_red: float, y_blue: float, total: int) -> tuple[int, int]:
    """Split a budget between the colors proportionally to their bias sums.

    Returns ``(k_red, k_blue)`` with ``k_blue = ceil(total * Y_B / (Y_B + Y_R))``
    and ``k_red`` the remainder.  Raises :class:`BothColorsUnbiased` when both
    sums are zero and the budget is positive; callers typically fall back to
    an even split.
    """
    if total < 0:
        raise ValueError(f"budget must be >= 0, got {total}")
    if min(y_red, y_blue) < 0:
        raise ValueError("bias sums must be non-negative")
    if total == 0:
        return 0, 0
    if y_red + y_blue == 0:
        raise BothColorsUnbiased(
            "no parochial mass in either color; split the budget explicitly"
        )
    k_blue = math.ceil(total * y_blue / (y_blue + y_red))
    return total - k_blue, k_blue


def even_split(total: int) -> tuple[int, int]:
    """Fallback split when neither color carries bias: blue gets the ceiling."""
    k_blue = math.ceil(total / 2)
    return total - k_blue, k_blue
