import random
import time

import numpy as np
import pytest

from kgqa.activation import (
    ActivationParams,
    ActivationState,
    HAVE_NUMBA,
    candidate_answers,
    spread_from,
    spread_step,
    subgraph_search,
)
from kgqa.activation.kernels import spread_round
from kgqa.errors import UnknownEntityError
from kgqa.kg import KnowledgeGraph, WeightPolicy

from oracles import naive_spread, naive_two_sided_search

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


def graph_of(edges, weights=None, extra_nodes=()):
    kg = KnowledgeGraph(weights or WeightPolicy(default=0.9))
    for item in edges:
        if len(item) == 4:
            s, p, t, w = item
            kg.add_edge(s, p, t, weight=w)
        else:
            kg.add_edge(*item)
    for node in extra_nodes:
        kg.add_entity(node)
    return kg


def random_graph(seed, max_nodes=50, max_edges=150):
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    nodes = [f"n{i:02d}" for i in range(n)]
    kg = KnowledgeGraph()
    for node in nodes:
        kg.add_entity(node)
    target_edges = rng.randint(1, max_edges)
    predicates = ["p0", "p1", "p2", "p3"]
    attempts = 0
    while len(kg.edges) < target_edges and attempts < max_edges * 4:
        attempts += 1
        s, t = rng.choice(nodes), rng.choice(nodes)
        if s == t:
            continue
        kg.add_edge(s, t and s and rng.choice(predicates), t,
                    weight=rng.uniform(0.05, 0.99))
    return kg, nodes


def as_tuples(kg):
    return [(e.source, e.predicate, e.target, e.weight) for e in kg.edges]


class TestSpreadStepBranches:
    """Direct substitution into the per-round update and clamp rules."""

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_value_stored_when_threshold_reached(self, backend):
        kg = graph_of([("i", "link", "j", 0.9)])
        state = ActivationState({"i": 0.9, "j": 0.2}, frontier={"i"})
        out = spread_step(state, kg, ActivationParams(), backend=backend)
        assert out.activation["j"] == pytest.approx(0.8885, abs=1e-12)
        assert out.frontier == {"j"}

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_clamped_to_one(self, backend):
        kg = graph_of([("i", "link", "j", 0.99)])
        state = ActivationState({"i": 1.0, "j": 0.5}, frontier={"i"})
        out = spread_step(state, kg, ActivationParams(), backend=backend)
        assert out.activation["j"] == 1.0

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_below_threshold_unchanged(self, backend):
        kg = graph_of([("i", "link", "j", 0.1)])
        state = ActivationState({"i": 0.9, "j": 0.0}, frontier={"i"})
        out = spread_step(state, kg, ActivationParams(), backend=backend)
        assert out.activation["j"] == 0.0
        assert out.frontier == set()

    def test_kernel_clamp_with_unit_weight(self):
        # the raw update admits w = 1 even though graph edges stay in (0,1)
        indptr = np.array([0, 1, 2], dtype=np.int64)
        nbr = np.array([1, 0], dtype=np.int64)
        wts = np.array([1.0, 1.0])
        act = np.array([1.0, 0.5])
        hits = np.zeros(2, dtype=np.bool_)
        newly = spread_round(indptr, nbr, wts, act, np.array([0], dtype=np.int64),
                             0.8, 0.85, np.zeros(2, dtype=np.bool_), hits,
                             backend="numpy")
        assert act[1] == 1.0
        assert list(newly) == [1]

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_simultaneous_contributions_sum_before_clamping(self, backend):
        kg = graph_of([("a", "link", "j", 0.6), ("b", "link", "j", 0.6)])
        state = ActivationState({"a": 0.9, "b": 0.9, "j": 0.0},
                                frontier={"a", "b"})
        out = spread_step(state, kg, ActivationParams(), backend=backend)
        expected = 0.9 * 0.6 * 0.85 * 2
        assert out.activation["j"] == pytest.approx(expected, abs=1e-12)


class TestRandomizedStepProperties:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_thousand_random_inputs_match_scalar_rule(self, backend):
        rng = random.Random(99)
        params = ActivationParams()
        checked = 0
        while checked < 1000:
            a_j = rng.choice([0.0, rng.uniform(0, 1)])
            a_i = rng.uniform(params.active_threshold, 1.0)
            w = rng.uniform(0.01, 0.99)
            kg = graph_of([("i", "link", "j", w)])
            state = ActivationState({"i": a_i, "j": a_j}, frontier={"i"})
            out = spread_step(state, kg, params, backend=backend)
            temp = a_j + a_i * w * params.decay_factor
            if temp >= 1.0:
                expected = 1.0
            elif temp >= params.active_threshold:
                expected = temp
            else:
                expected = a_j
            got = out.activation["j"]
            assert got == pytest.approx(expected, abs=1e-12)
            assert 0.0 <= got <= 1.0
            assert got >= a_j - 1e-12      # monotone non-decreasing
            checked += 1


class TestOracleEquivalence:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_twenty_random_graphs(self, backend):
        params = ActivationParams()
        start = time.perf_counter()
        for seed in range(20):
            kg, nodes = random_graph(seed)
            rng = random.Random(1000 + seed)
            subj, obj = rng.choice(nodes), rng.choice(nodes)
            result = subgraph_search(kg, subj, obj, params, backend=backend)
            o_subj_act, o_subj, o_obj_act, o_obj, o_cr = naive_two_sided_search(
                list(kg.entities), as_tuples(kg), subj, obj,
                at=params.active_threshold, df=params.decay_factor,
                st=params.max_iterations)
            assert set(result.sg_subj) == o_subj
            assert set(result.sg_obj) == o_obj
            for node, value in result.sg_subj.items():
                assert value == pytest.approx(o_subj_act[node], abs=1e-12)
            for node, value in result.sg_obj.items():
                assert value == pytest.approx(o_obj_act[node], abs=1e-12)
            got_cr = {(c.subj_node, c.edge.source, c.edge.predicate,
                       c.edge.target, c.obj_node) for c in result.cr}
            assert got_cr == o_cr
        assert time.perf_counter() - start < 10.0

    @pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
    def test_backends_bitwise_identical(self):
        params = ActivationParams()
        for seed in (3, 7, 11):
            kg, nodes = random_graph(seed)
            rng = random.Random(seed)
            subj, obj = rng.choice(nodes), rng.choice(nodes)
            a = subgraph_search(kg, subj, obj, params, backend="numpy")
            b = subgraph_search(kg, subj, obj, params, backend="numba")
            assert a.sg_subj == b.sg_subj
            assert a.sg_obj == b.sg_obj
            assert [c.key() for c in a.cr] == [c.key() for c in b.cr]


class TestSubgraphSearchFixture:
    def test_sample_quad_subject_side(self, fixture_kg):
        result = subgraph_search(fixture_kg, "graph_database", "python")
        assert set(result.sg_subj) >= {
            "graph_database", "neo4j", "virtuoso", "allegrograph"}
        crs = {(c.subj_node, c.edge.predicate, c.obj_node) for c in result.cr}
        assert ("virtuoso", "support", "python") in crs

    def test_isolated_subject(self):
        kg = graph_of([("a", "link", "b", 0.95)], extra_nodes=["loner"])
        result = subgraph_search(kg, "loner", "a")
        assert set(result.sg_subj) == {"loner"}
        assert result.cr == []

    def test_equal_seed_nodes(self, fixture_kg):
        result = subgraph_search(fixture_kg, "python", "python")
        # the object side is walled in by the finished subject side, so every
        # crossover is an edge adjacent to the seed itself
        assert set(result.sg_obj) <= set(result.sg_subj)
        for c in result.cr:
            assert c.obj_node == "python"
        o_subj_act, o_subj, _, o_obj, o_cr = naive_two_sided_search(
            list(fixture_kg.entities), as_tuples(fixture_kg),
            "python", "python", at=0.8, df=0.85, st=30)
        assert set(result.sg_subj) == o_subj
        assert {(c.subj_node, c.edge.source, c.edge.predicate, c.edge.target,
                 c.obj_node) for c in result.cr} == o_cr

    def test_unknown_node_rejected(self, fixture_kg):
        with pytest.raises(UnknownEntityError):
            subgraph_search(fixture_kg, "nope", "python")

    def test_cr_edges_exist_and_join_sides(self, fixture_kg):
        result = subgraph_search(fixture_kg, "graph_database", "sparql")
        for c in result.cr:
            assert c.subj_node in result.sg_subj
            assert fixture_kg.has_edge(c.edge.source, c.edge.predicate,
                                       c.edge.target)
            assert {c.subj_node, c.obj_node} == {c.edge.source, c.edge.target}


class TestTerminationAndBounds:
    @pytest.mark.parametrize("seed", [0, 5, 9])
    def test_activations_bounded_and_monotone(self, seed):
        kg, nodes = random_graph(seed, max_nodes=25, max_edges=60)
        state = ActivationState(
            {n: 0.0 for n in kg.entities} | {nodes[0]: 1.0},
            frontier={nodes[0]})
        params = ActivationParams()
        for _ in range(10):
            nxt = spread_step(state, kg, params)
            for node in kg.entities:
                assert 0.0 <= nxt.activation[node] <= 1.0
                assert nxt.activation[node] >= state.activation[node] - 1e-12
            state = nxt

    def test_iteration_budget_respected(self):
        # ladder of paired rungs: two contributions per target keep the
        # spread alive indefinitely, so only ST can stop it
        edges = [("s", "next", "a0", 0.97), ("s", "next", "a1", 0.97)]
        for level in range(5):
            cur, nxt = f"{chr(97 + level)}", f"{chr(98 + level)}"
            for i in (0, 1):
                for j in (0, 1):
                    edges.append((f"{cur}{i}", "next", f"{nxt}{j}", 0.97))
        kg = graph_of(edges)
        two = spread_from(kg, "s", ActivationParams(max_iterations=2))
        assert set(two) == {"s", "a0", "a1", "b0", "b1"}
        three = spread_from(kg, "s", ActivationParams(max_iterations=3))
        assert set(three) == {"s", "a0", "a1", "b0", "b1", "c0", "c1"}


class TestCandidateAnswers:
    def test_fixture_leaves(self, fixture_kg):
        result = subgraph_search(fixture_kg, "graph_database", "python")
        assert candidate_answers(result, fixture_kg, "graph_database") == [
            "allegrograph", "neo4j", "virtuoso"]

    def test_category_without_subclasses(self):
        kg = graph_of([("solo", "uses", "tool", 0.95)])
        result = subgraph_search(kg, "solo", "tool")
        assert candidate_answers(result, kg, "solo") == ["solo"]

    def test_two_level_chain_deepest_only(self):
        kg = graph_of([("b", "is_a", "a", 0.97), ("c", "is_a", "b", 0.97)])
        params = ActivationParams(max_iterations=30)
        result = subgraph_search(kg, "a", "c", params)
        # c cannot activate through two decayed hops; within the activated
        # subgraph b is the deepest reachable subclass
        assert candidate_answers(result, kg, "a") == ["b"]

    def test_two_level_chain_fully_activated(self):
        kg = graph_of([("b", "is_a", "a", 0.97), ("c", "is_a", "b", 0.97),
                       ("x", "is_a", "b", 0.97), ("x", "is_a", "c", 0.97)])
        result = subgraph_search(kg, "a", "c")
        inside = set(result.sg_subj)
        leaves = candidate_answers(result, kg, "a")
        for leaf in leaves:
            assert not any(
                e.predicate == "is_a" and e.target == leaf and e.source in inside
                for e in kg.edges)
