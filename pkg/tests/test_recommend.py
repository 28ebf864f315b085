"""Greedy recommenders, target policies, and the randomized baselines."""
import math

import numpy as np
import pytest

from repbublik import (
    ALGORITHMS,
    WalkConfig,
    baseline_pure_random,
    baseline_rcn,
    baseline_rwcn,
    brute_force_opt,
    build_graph,
    exact_br,
    exact_gain,
    exact_gamma,
    exact_rwcc,
    generate_gadget,
    repbublik,
    repbublik_plus,
    target_selection,
    weight_oracle,
)
from repbublik.errors import NoLegalTarget, NoOppositeColor
from repbublik.recommend import _top_pool

from conftest import random_polarized


def dominant_hub_graph():
    """One red hub fed by six parochial feeders; hub escape chain 0->7->8->blue.

    At t=6, theta_bad=3: parochial = {hub 0, feeders 1..6}; only the hub has
    positive centrality, and by a wide margin.  Two blue nodes so the hub can
    legally take more than one new cross edge.
    """
    edges = [(f, 0, 1.0) for f in range(1, 7)]
    edges += [(0, 7, 1.0), (7, 8, 1.0), (8, 9, 1.0), (9, 0, 1.0), (10, 0, 1.0)]
    return build_graph(["R"] * 9 + ["B", "B"], edges)


def twin_hub_graph():
    """Two symmetric red hubs (ids 0, 1), three feeders each, equal chains."""
    edges = [(f, 0, 1.0) for f in (2, 3, 4)]
    edges += [(f, 1, 1.0) for f in (5, 6, 7)]
    edges += [(0, 8, 1.0), (8, 9, 1.0), (9, 12, 1.0)]
    edges += [(1, 10, 1.0), (10, 11, 1.0), (11, 12, 1.0)]
    edges += [(12, 0, 1.0)]
    return build_graph(["R"] * 12 + ["B"], edges)


class TestRepbublik:
    def test_zero_budget(self, g2):
        cfg = WalkConfig(t=4, theta_good=1.5, theta_bad=2.0)
        plan = repbublik(g2, "R", 0, cfg)
        assert len(plan) == 0 and plan.requested == 0

    def test_gadget_picks_element_node(self):
        gadget = generate_gadget(3, [[0, 1], [1, 2], [2]], 6)
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=4)
        plan = repbublik(gadget.graph, "R", 1, cfg)
        assert len(plan) == 1
        assert plan.edges[0].src in set(int(v) for v in gadget.elements)
        assert plan.edges[0].dst == gadget.sink

    def test_approximation_bound_on_small_instance(self):
        rng = np.random.default_rng(99)
        t = 6
        while True:
            graph, _ = random_polarized(rng, n_max=10, t_range=(t, t))
            br = exact_br(graph, t)
            parochial = [
                int(v) for v in graph.nodes_of("R") if br.values[v] >= t / 2
            ]
            if parochial:
                break
        cfg = WalkConfig(t=t, theta_good=2.0, theta_bad=t / 2, seed=1)
        plan = repbublik(graph, "R", 1, cfg)
        _, opt_gain = brute_force_opt(graph, "R", 1, t)
        mine = exact_gain(graph, parochial, plan.edges, t) if len(plan) else 0.0
        factor = (4 * exact_gamma(graph, t) + 1) * (1 + 1 / math.e)
        assert mine * factor + 1e-9 >= opt_gain

    def test_early_stop_when_healed(self):
        gadget = generate_gadget(2, [[0], [1]], 6)
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=0)
        plan = repbublik(gadget.graph, "R", 5, cfg)
        assert plan.requested == 5
        assert len(plan) == 2  # one edge heals each element, then P is empty

    def test_no_opposite_color_rejected(self, all_red_cycle):
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0)
        with pytest.raises(NoOppositeColor):
            repbublik(all_red_cycle, "R", 1, cfg)

    def test_plans_are_legal(self):
        rng = np.random.default_rng(3)
        cfgs = 0
        while cfgs < 10:
            graph, t = random_polarized(rng, n_max=20, t_range=(5, 8))
            cfg = WalkConfig(t=t, theta_good=1.5, theta_bad=t / 2, seed=7)
            plan = repbublik(graph, "R", 3, cfg)
            plan.validate_against(graph)
            assert all(e.weight == pytest.approx(
                1.0 / (graph.out_degree(e.src) + sum(
                    1 for prev in plan.edges[:i] if prev.src == e.src
                ) + 1)
            ) for i, e in enumerate(plan.edges))
            cfgs += 1


class TestRepbublikPlus:
    def test_first_pick_matches_plain_greedy(self):
        rng = np.random.default_rng(13)
        for _ in range(8):
            graph, t = random_polarized(rng, n_max=16, t_range=(5, 8))
            cfg = WalkConfig(t=t, theta_good=1.5, theta_bad=t / 2, seed=5)
            a = repbublik(graph, "R", 1, cfg)
            b = repbublik_plus(graph, "R", 1, cfg)
            assert a.edges == b.edges

    def test_dominant_hub_takes_both_edges(self):
        graph = dominant_hub_graph()
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=2)
        br = exact_br(graph, 6)
        pool = [int(v) for v in graph.nodes_of("R") if br.values[v] >= 3.0]
        assert pool == [0, 1, 2, 3, 4, 5, 6]
        scores = {
            v: exact_rwcc(graph, v, pool, 4) * weight_oracle(graph, v)
            for v in pool
        }
        ranked = sorted(scores.values(), reverse=True)
        assert ranked[0] > 2 * ranked[1]  # the dominance premise
        plan = repbublik_plus(graph, "R", 2, cfg)
        assert [e.src for e in plan.edges] == [0, 0]

    def test_near_tied_hubs_use_distinct_sources(self):
        graph = twin_hub_graph()
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=2)
        br = exact_br(graph, 6)
        pool = [int(v) for v in graph.nodes_of("R") if br.values[v] >= 3.0]
        c0 = exact_rwcc(graph, 0, pool, 4)
        c1 = exact_rwcc(graph, 1, pool, 4)
        assert c0 == pytest.approx(c1)  # exactly tied by symmetry
        plan = repbublik_plus(graph, "R", 2, cfg)
        assert sorted(e.src for e in plan.edges) == [0, 1]

    def test_plans_are_legal_and_eta_consistent(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            graph, t = random_polarized(rng, n_max=20, t_range=(5, 8))
            cfg = WalkConfig(t=t, theta_good=1.5, theta_bad=t / 2, seed=9)
            plan = repbublik_plus(graph, "B", 4, cfg)
            plan.validate_against(graph)
            for v in set(e.src for e in plan.edges):
                assert plan.eta(v) == 1 + sum(1 for e in plan.edges if e.src == v)


class TestTargetSelection:
    def test_only_blue_node_is_chosen(self):
        g = build_graph(
            ["R", "B", "R"], [(0, 1, 1.0), (1, 0, 1.0), (2, 0, 1.0)]
        )
        cfg = WalkConfig(t=5, theta_good=2.0, theta_bad=2.5)
        assert target_selection(g, 2, (), cfg=cfg) == 1

    def test_no_legal_target(self, g1):
        cfg = WalkConfig(t=5, theta_good=2.0, theta_bad=2.5)
        with pytest.raises(NoLegalTarget):
            target_selection(g1, 0, (), cfg=cfg)

    def test_gadget_lowest_br_is_sink(self):
        gadget = generate_gadget(2, [[0, 1], [1]], 6)
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0)
        assert target_selection(gadget.graph, 0, (), cfg=cfg) == gadget.sink

    def test_uniform_policy_is_seeded(self, g2):
        g = build_graph(
            ["R", "B", "B", "B"],
            [(0, 1, 1.0), (1, 0, 1.0), (2, 0, 1.0), (3, 0, 1.0)],
        )
        picks = {
            target_selection(g, 0, (), policy="uniform-seeded", seed=s)
            for s in range(30)
        }
        assert picks <= {2, 3}  # 1 is an existing edge
        assert len(picks) == 2
        assert target_selection(g, 0, (), policy="uniform-seeded", seed=5) == \
            target_selection(g, 0, (), policy="uniform-seeded", seed=5)


class TestBaselines:
    @pytest.fixture
    def polarized(self):
        rng = np.random.default_rng(1)
        graph, _ = random_polarized(rng, n_max=30, t_range=(6, 6))
        return graph

    def test_zero_budget(self, polarized):
        cfg = WalkConfig(t=6, theta_good=1.5, theta_bad=3.0, seed=3)
        for fn in (baseline_pure_random, baseline_rcn, baseline_rwcn):
            assert len(fn(polarized, "R", 0, cfg)) == 0

    def test_reproducible_given_seed(self, polarized):
        cfg = WalkConfig(t=6, theta_good=1.5, theta_bad=3.0, seed=3)
        for fn in (baseline_pure_random, baseline_rcn, baseline_rwcn):
            a = fn(polarized, "R", 4, cfg, seed=11)
            b = fn(polarized, "R", 4, cfg, seed=11)
            assert a.edges == b.edges

    def test_sources_come_from_static_parochial_set(self, polarized):
        cfg = WalkConfig(t=6, theta_good=1.5, theta_bad=3.0, seed=3)
        br = exact_br(polarized, 6)
        parochial = {
            int(v) for v in polarized.nodes_of("R") if br.values[v] >= 3.0
        }
        plan = baseline_pure_random(polarized, "R", 6, cfg, seed=2)
        plan.validate_against(polarized)
        assert {e.src for e in plan.edges} <= parochial

    def test_empty_parochial_warns(self, g1):
        cfg = WalkConfig(t=5, theta_good=2.0, theta_bad=4.0, seed=3)
        with pytest.warns(RuntimeWarning):
            plan = baseline_pure_random(g1, "R", 2, cfg)
        assert len(plan) == 0

    def test_top_pool_ceiling(self):
        pool = np.arange(58)
        scores = np.linspace(1.0, 0.0, 58)
        assert _top_pool(pool, scores, 10.0).size == 6

    def test_rcn_pool_ordering_matches_exact_centrality(self):
        graph = dominant_hub_graph()
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=8)
        # 10% of 7 parochial nodes -> pool of 1: must be the hub (node 0).
        plan = baseline_rcn(graph, "R", 2, cfg, seed=4)
        assert len(plan) == 2
        assert {e.src for e in plan.edges} == {0}

    def test_rwcn_matches_rcn_when_degrees_equal(self):
        graph = twin_hub_graph()
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=8)
        br = exact_br(graph, 6)
        pool = np.array(
            [int(v) for v in graph.nodes_of("R") if br.values[v] >= 3.0]
        )
        cent = np.array([exact_rwcc(graph, int(v), pool, 4) for v in pool])
        weights = np.array([weight_oracle(graph, int(v)) for v in pool])
        # All out-degrees equal -> the two rankings coincide.
        assert len(set(graph.out_degree(int(v)) for v in pool)) == 1
        a = _top_pool(pool, cent, 30.0)
        b = _top_pool(pool, cent * weights, 30.0)
        assert a.tolist() == b.tolist()

    def test_rwcn_diverges_from_rcn_when_degrees_differ(self):
        # Hub 0: two feeders, out-degree 1.  Hub 1: three feeders, out-degree
        # 3.  Centrality ranks hub 1 first, the weighted score ranks hub 0
        # first, so the two top-10% pools differ.
        edges = [(2, 0, 1.0), (3, 0, 1.0)]
        edges += [(f, 1, 1.0) for f in (4, 5, 6)]
        edges += [(0, 7, 1.0), (7, 8, 1.0), (8, 13, 1.0)]
        edges += [(1, m, 1 / 3) for m in (9, 10, 11)]
        edges += [(m, 12, 1.0) for m in (9, 10, 11)]
        edges += [(12, 13, 1.0), (13, 0, 1.0)]
        graph = build_graph(["R"] * 13 + ["B"], edges)
        cfg = WalkConfig(t=6, theta_good=2.0, theta_bad=3.0, seed=8)
        br = exact_br(graph, 6)
        pool = np.array(
            [int(v) for v in graph.nodes_of("R") if br.values[v] >= 3.0]
        )
        assert set(pool.tolist()) == {0, 1, 2, 3, 4, 5, 6}
        rcn_plan = baseline_rcn(graph, "R", 2, cfg, seed=6)
        rwcn_plan = baseline_rwcn(graph, "R", 2, cfg, seed=6)
        assert {e.src for e in rcn_plan.edges} == {1}
        assert {e.src for e in rwcn_plan.edges} == {0}

    def test_registry_names(self):
        assert set(ALGORITHMS) == {
            "repbublik", "repbublik-plus", "pure-random", "rcn", "rwcn"
        }
