"""Dataset ingestion, fixture generators, budget sweeps, and plot data.

The sweep reproduces the standard evaluation protocol: split each budget K
between the colors proportionally to their parochial Bubble Radius mass, run
the requested algorithms per color, and measure the mean Bubble Radius gain
over the originally parochial nodes plus the fraction of them healed.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bias import BiasPartition, budget_allocation, classify, even_split, structural_bias
from .errors import (
    BothColorsUnbiased,
    EmptyRecords,
    ParseError,
    UncoveredElement,
    UnknownColor,
)
from .exact import BrTable
from .graph import (
    BLUE,
    RED,
    ColoredGraph,
    WalkConfig,
    apply_plan,
    build_graph,
    opposite,
)
from .montecarlo import derive_seed, stream
from .bias import br_table
from .recommend import ALGORITHMS

_TAG_EVAL = 31
_TAG_POLARIZED = 32

CSV_HEADER = "algo,K,pct_candidate,delta,pct_parochial,seed,runtime_ms"


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


@dataclass(frozen=True)
class DatasetStats:
    """Headline statistics of a loaded graph (one row of the datasets table)."""

    n_red: int
    n_blue: int
    edges_red_to_blue: int
    edges_blue_to_red: int
    edge_count: int
    pct_parochial_red: float | None = None
    pct_parochial_blue: float | None = None


@dataclass(frozen=True)
class LoadedDataset:
    graph: ColoredGraph
    stats: DatasetStats
    original_ids: np.ndarray        # dense id -> original id
    dense_ids: dict[int, int]       # original id -> dense id


@dataclass(frozen=True)
class ExperimentRecord:
    """One (algorithm, K, seed) cell of a sweep."""

    algorithm: str
    budget: int
    pct_candidate: float
    delta: float
    pct_parochial: float
    seed: int
    runtime_ms: float
    error: str | None = None

    def csv_row(self) -> str:
        if self.error is not None:
            delta = pct = "ERROR"
        else:
            delta, pct = _fmt(self.delta), _fmt(self.pct_parochial)
        return ",".join(
            (
                self.algorithm,
                str(self.budget),
                _fmt(self.pct_candidate),
                delta,
                pct,
                str(self.seed),
                _fmt(self.runtime_ms),
            )
        )


def cross_edge_counts(graph: ColoredGraph) -> tuple[int, int]:
    src_colors = np.repeat(graph.colors, np.diff(graph.indptr))
    dst_colors = graph.colors[graph.targets]
    red_to_blue = int(((src_colors == RED) & (dst_colors == BLUE)).sum())
    blue_to_red = int(((src_colors == BLUE) & (dst_colors == RED)).sum())
    return red_to_blue, blue_to_red


def dataset_stats(
    graph: ColoredGraph, cfg: WalkConfig | None = None, backend: str = "exact"
) -> DatasetStats:
    """Recompute the stats row from a graph; parochial shares need a config."""
    rb, br_ = cross_edge_counts(graph)
    n_red = int(graph.color_mask(RED).sum())
    n_blue = graph.n - n_red
    pct_red = pct_blue = None
    if cfg is not None:
        table = br_table(graph, cfg, backend, cfg.seed)
        part = classify(table, graph.colors, cfg.theta_good, cfg.theta_bad)
        pct_red = 100.0 * len(part.parochial_red) / n_red if n_red else 0.0
        pct_blue = 100.0 * len(part.parochial_blue) / n_blue if n_blue else 0.0
    return DatasetStats(
        n_red=n_red,
        n_blue=n_blue,
        edges_red_to_blue=rb,
        edges_blue_to_red=br_,
        edge_count=graph.edge_count,
        pct_parochial_red=pct_red,
        pct_parochial_blue=pct_blue,
    )


def _parse_int(token: str, path: str, line_no: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(path, line_no, f"bad {what} {token!r}") from None
    if value < 0:
        raise ParseError(path, line_no, f"{what} must be non-negative, got {value}")
    return value


def load_dataset(
    edge_path: str | Path,
    color_path: str | Path,
    cfg: WalkConfig | None = None,
    backend: str = "exact",
) -> LoadedDataset:
    """Load `src<TAB>dst<TAB>weight` edges and `node<TAB>R|B` colors.

    Original node ids may be any non-negative integers; they are compacted
    to dense 0..n-1 ids (ascending original order) and the mapping is
    returned alongside the graph and its stats row.
    """
    color_path, edge_path = Path(color_path), Path(edge_path)
    colors_by_node: dict[int, str] = {}
    for line_no, line in enumerate(color_path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise ParseError(str(color_path), line_no, f"expected 2 fields, got {len(parts)}")
        node = _parse_int(parts[0], str(color_path), line_no, "node id")
        if node in colors_by_node:
            raise ParseError(str(color_path), line_no, f"duplicate color for node {node}")
        if parts[1] not in (RED, BLUE):
            raise UnknownColor(f"{color_path}:{line_no}: color {parts[1]!r} is not 'R' or 'B'")
        colors_by_node[node] = parts[1]

    original_ids = np.asarray(sorted(colors_by_node), dtype=np.int64)
    dense_ids = {int(orig): i for i, orig in enumerate(original_ids)}

    edges: list[tuple[int, int, float]] = []
    for line_no, line in enumerate(edge_path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 3:
            raise ParseError(str(edge_path), line_no, f"expected 3 fields, got {len(parts)}")
        src = _parse_int(parts[0], str(edge_path), line_no, "source id")
        dst = _parse_int(parts[1], str(edge_path), line_no, "target id")
        try:
            weight = float(parts[2])
        except ValueError:
            raise ParseError(str(edge_path), line_no, f"bad weight {parts[2]!r}") from None
        for node in (src, dst):
            if node not in dense_ids:
                raise UnknownColor(
                    f"{edge_path}:{line_no}: node {node} has no color entry"
                )
        edges.append((dense_ids[src], dense_ids[dst], weight))

    graph = build_graph([colors_by_node[int(v)] for v in original_ids], edges)
    stats = dataset_stats(graph, cfg, backend)
    return LoadedDataset(
        graph=graph, stats=stats, original_ids=original_ids, dense_ids=dense_ids
    )


def write_dataset(graph: ColoredGraph, edge_path: str | Path, color_path: str | Path) -> None:
    """Write a graph back out in the loader's TSV formats."""
    lines = []
    for v in range(graph.n):
        targets, weights = graph.row(v)
        for w, m in zip(targets, weights):
            lines.append(f"{v}\t{int(w)}\t{_fmt(m)}")
    Path(edge_path).write_text("\n".join(lines) + "\n")
    Path(color_path).write_text(
        "\n".join(f"{v}\t{graph.color_of(v)}" for v in range(graph.n)) + "\n"
    )


@dataclass(frozen=True)
class Gadget:
    """Set-cover hardness gadget with its node roles exposed for tests.

    All nodes are red except the single blue sink.  Element node i links
    uniformly to the nodes of the subsets containing it; each subset node
    starts a weight-1 path of ceil(t/2)-1 edges ending at the sink, which
    pins the subset nodes' Bubble Radius to ceil(t/2)-1 and the element
    nodes' to ceil(t/2).
    """

    graph: ColoredGraph
    elements: np.ndarray
    subsets: np.ndarray
    path_nodes: np.ndarray
    sink: int


def generate_gadget(
    n_elements: int, subsets: Sequence[Iterable[int]], t: int
) -> Gadget:
    if t < 3:
        raise ValueError(f"the gadget needs t >= 3, got {t}")
    if n_elements < 1 or not subsets:
        raise ValueError("need at least one element and one subset")
    members = [sorted(set(int(u) for u in s)) for s in subsets]
    for s in members:
        if s and (s[0] < 0 or s[-1] >= n_elements):
            raise ValueError(f"subset {s} references elements outside 0..{n_elements - 1}")
    counts = np.zeros(n_elements, dtype=np.int64)
    for s in members:
        counts[s] += 1
    if (counts == 0).any():
        raise UncoveredElement(int(np.flatnonzero(counts == 0)[0]))

    n_sets = len(members)
    path_len = math.ceil(t / 2) - 1          # edges from each subset node to the sink
    per_set_inner = path_len - 1             # intermediate nodes per path
    set_base = n_elements
    path_base = set_base + n_sets
    sink = path_base + n_sets * per_set_inner
    n = sink + 1

    colors = [RED] * n
    colors[sink] = BLUE
    edges: list[tuple[int, int, float]] = []
    for i in range(n_elements):
        for j, s in enumerate(members):
            if i in s:
                edges.append((i, set_base + j, 1.0 / counts[i]))
    for j in range(n_sets):
        chain = [set_base + j]
        chain += [path_base + j * per_set_inner + k for k in range(per_set_inner)]
        chain.append(sink)
        for a, b in zip(chain, chain[1:]):
            edges.append((a, b, 1.0))
    # The sink needs an out-edge; walks of red nodes stop at the sink, so
    # pointing it back into the first path keeps every red Bubble Radius intact.
    escape = path_base if per_set_inner > 0 else set_base
    edges.append((sink, escape, 1.0))

    graph = build_graph(colors, edges)
    return Gadget(
        graph=graph,
        elements=np.arange(n_elements),
        subsets=np.arange(set_base, set_base + n_sets),
        path_nodes=np.arange(path_base, sink),
        sink=sink,
    )


def generate_polarized(
    n_red: int, n_blue: int, p_within: float, p_cross: float, seed: int
) -> ColoredGraph:
    """Random two-community digraph with uniform out-weights.

    Every ordered same-color pair gets an edge with probability ``p_within``,
    cross-color pairs with ``p_cross`` (``p_cross <= p_within``; zero means
    no escape at all and every Bubble Radius sits at the cap).  Nodes that
    sample no edge receive one forced within-color edge so the graph stays
    sink-free.
    """
    if n_red < 1 or n_blue < 1:
        raise ValueError("need at least one node of each color")
    if not 0.0 <= p_cross <= p_within <= 1.0 or p_within == 0.0:
        raise ValueError(
            f"need 0 <= p_cross <= p_within <= 1 with p_within > 0, "
            f"got p_within={p_within}, p_cross={p_cross}"
        )
    n = n_red + n_blue
    colors = [RED] * n_red + [BLUE] * n_blue
    rng = stream(seed, _TAG_POLARIZED)
    red = np.zeros(n, dtype=bool)
    red[:n_red] = True
    same = red[:, None] == red[None, :]
    prob = np.where(same, p_within, p_cross)
    np.fill_diagonal(prob, 0.0)
    adj = rng.random((n, n)) < prob

    for v in range(n):
        if not adj[v].any():
            peers = np.flatnonzero(same[v])
            peers = peers[peers != v]
            if peers.size == 0:
                peers = np.flatnonzero(~same[v])
            adj[v, peers[int(rng.integers(peers.size))]] = True

    edges = []
    for v in range(n):
        targets = np.flatnonzero(adj[v])
        w = 1.0 / targets.size
        edges.extend((v, int(u), w) for u in targets)
    return build_graph(colors, edges)


def candidate_universe(graph: ColoredGraph, partition: BiasPartition) -> int:
    """Number of insertable cross-color edges with parochial sources."""
    total = 0
    for color in (RED, BLUE):
        parochial = sorted(partition.parochial_of(color))
        n_other = int(graph.color_mask(opposite(color)).sum())
        other_mask = graph.color_mask(opposite(color))
        for v in parochial:
            targets, _ = graph.row(v)
            total += n_other - int(other_mask[targets].sum())
    return total


def run_sweep(
    graph: ColoredGraph,
    algorithms: Sequence[str],
    k_values: Sequence[int],
    cfg: WalkConfig,
    seeds: Sequence[int],
    out_path: str | Path,
    backend: str = "exact",
    measure_runtime: bool = False,
) -> list[ExperimentRecord]:
    """Run every (algorithm, K, seed) cell and stream the rows to a CSV.

    Each budget K is split across the colors proportionally to their
    parochial Bubble Radius mass (even split if neither color is biased),
    the algorithm runs once per color, and the gain and healed fraction are
    measured with freshly computed Bubble Radii on the grown graph.  A
    failing cell is recorded with an error marker and the sweep continues.

    With ``measure_runtime`` left off, runtime_ms is written as 0 so that
    identical inputs and seeds produce byte-identical CSV files.
    """
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ValueError(f"unregistered algorithms: {unknown}")
    if list(k_values) != sorted(k_values):
        raise ValueError("k_values must be ascending")

    base_br = br_table(graph, cfg, backend, cfg.seed)
    partition = classify(base_br, graph.colors, cfg.theta_good, cfg.theta_bad)
    y_red = structural_bias(base_br, partition, RED)
    y_blue = structural_bias(base_br, partition, BLUE)
    parochial = np.asarray(sorted(partition.parochial), dtype=np.int64)
    universe = candidate_universe(graph, partition)

    records: list[ExperimentRecord] = []
    with open(out_path, "w", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for algo in algorithms:
            for k in k_values:
                for seed in seeds:
                    record = _run_cell(
                        graph, algo, int(k), cfg, int(seed), backend,
                        base_br, parochial, y_red, y_blue, universe,
                        measure_runtime,
                    )
                    records.append(record)
                    fh.write(record.csv_row() + "\n")
                    fh.flush()
    return records


def _run_cell(
    graph: ColoredGraph,
    algo: str,
    k: int,
    cfg: WalkConfig,
    seed: int,
    backend: str,
    base_br: BrTable,
    parochial: np.ndarray,
    y_red: float,
    y_blue: float,
    universe: int,
    measure_runtime: bool,
) -> ExperimentRecord:
    pct_candidate = 100.0 * k / universe if universe else 0.0
    started = time.perf_counter()
    try:
        try:
            k_red, k_blue = budget_allocation(y_red, y_blue, k)
        except BothColorsUnbiased:
            k_red, k_blue = even_split(k)
        edges = []
        for color, k_c in ((RED, k_red), (BLUE, k_blue)):
            if k_c > 0:
                plan = ALGORITHMS[algo](graph, color, k_c, cfg, seed, backend)
                edges.extend(plan.edges)
        grown = apply_plan(graph, edges)
        new_br = br_table(grown, cfg, backend, derive_seed(seed, _TAG_EVAL))
        if parochial.size:
            delta = float(
                np.mean(base_br.values[parochial] - new_br.values[parochial])
            )
            new_partition = classify(
                new_br, grown.colors, cfg.theta_good, cfg.theta_bad
            )
            healed = (parochial.size - len(new_partition.parochial)) / parochial.size
        else:
            delta, healed = 0.0, 0.0
        runtime = (time.perf_counter() - started) * 1000.0 if measure_runtime else 0.0
        return ExperimentRecord(
            algorithm=algo,
            budget=k,
            pct_candidate=pct_candidate,
            delta=delta,
            pct_parochial=float(healed),
            seed=seed,
            runtime_ms=runtime,
        )
    except Exception as exc:  # record the failure, keep sweeping
        runtime = (time.perf_counter() - started) * 1000.0 if measure_runtime else 0.0
        return ExperimentRecord(
            algorithm=algo,
            budget=k,
            pct_candidate=pct_candidate,
            delta=float("nan"),
            pct_parochial=float("nan"),
            seed=seed,
            runtime_ms=runtime,
            error=f"{type(exc).__name__}: {exc}",
        )


def default_k_values(k_max: int, universe: int | None = None) -> list[int]:
    """1, 2, 4, 6, ... capped at ``k_max`` and the candidate universe."""
    cap = k_max if universe is None else min(k_max, universe)
    values = [k for k in [1, *range(2, cap + 1, 2)] if k <= cap]
    return values


def emit_plotdata(
    records: Sequence[ExperimentRecord], out_dir: str | Path
) -> list[Path]:
    """One `pct_candidate<TAB>mean<TAB>stddev` TSV per (algorithm, metric) curve.

    Aggregates across seeds per budget; the standard deviation is the
    population one, so a single record yields 0.  Error cells are skipped.
    """
    usable = [r for r in records if r.error is None]
    if not usable:
        raise EmptyRecords("no successful experiment records to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    algorithms = sorted({r.algorithm for r in usable})
    written: list[Path] = []
    for algo in algorithms:
        rows = [r for r in usable if r.algorithm == algo]
        budgets = sorted({r.budget for r in rows})
        for metric in ("delta", "pct_parochial"):
            path = out_dir / f"{metric}_{algo}.tsv"
            lines = ["pct_candidate\tmean\tstddev"]
            for k in budgets:
                cell = [r for r in rows if r.budget == k]
                values = np.array([getattr(r, metric) for r in cell])
                lines.append(
                    f"{_fmt(cell[0].pct_candidate)}\t{_fmt(values.mean())}"
                    f"\t{_fmt(values.std(ddof=0))}"
                )
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
    return written
