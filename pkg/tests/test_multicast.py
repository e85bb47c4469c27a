import itertools
import random
from fractions import Fraction

import pytest

from khier import (
    GraphOracle,
    LastParams,
    NetworkError,
    OracleUndefinedError,
    RoutingNetwork,
    TableOracle,
    TreeOracle,
    build_last,
    graph_multicast_cost,
    metric_closure,
    mst_of_metric,
    table_multicast_cost,
    tree_multicast_cost,
)
from khier.instances import GenSpec, gen_random

from conftest import TABLE9_COSTS, TABLE9_MEMBERS, table9_instance


def star_network():
    return RoutingNetwork.tree(
        [("r", "u", 1), ("u", "v1", 1), ("u", "v2", 1), ("u", "v3", 1)])


def test_tree_multicast_cost_star():
    net = star_network()
    assert tree_multicast_cost(net, "r", {"v1"}) == 2
    assert tree_multicast_cost(net, "r", {"v1", "v2"}) == 3
    assert tree_multicast_cost(net, "r", set()) == 0
    with pytest.raises(NetworkError, match="unknown member"):
        tree_multicast_cost(net, "r", {"nope"})


def test_tree_multicast_monotone_on_random_trees():
    rnd = random.Random(3)
    for trial in range(30):
        inst = gen_random(GenSpec("random-tree", rnd.randint(2, 8), seed=trial))
        oracle = TreeOracle(inst.network, inst.controller)
        members = sorted(inst.members)
        sub = set(rnd.sample(members, rnd.randint(1, len(members))))
        grown = set(sub)
        while grown != set(members):
            grown.add(rnd.choice(members))
            assert oracle(sub) <= oracle(grown)


def test_metric_closure_path_and_triangle():
    path = RoutingNetwork.graph([("r", "a", 2), ("a", "b", 3)])
    metric = metric_closure(path, "r", {"a", "b"})
    assert metric.distance("r", "b") == 5
    assert metric.distance("r", "a") == 2

    single = RoutingNetwork.graph([("r", "m", 7)])
    assert metric_closure(single, "r", {"m"}).distance("r", "m") == 7

    tri = RoutingNetwork.graph([("r", "x", 1), ("r", "y", 1), ("x", "y", 1)])
    metric = metric_closure(tri, "r", {"x", "y"})
    for u, v in itertools.combinations(metric.points, 2):
        assert metric.distance(u, v) == 1


def test_metric_closure_rejects_disconnected():
    net = RoutingNetwork(kind="graph", vertices=frozenset({"r", "a", "b"}),
                         edges={("a", "r"): 1}, table={})
    with pytest.raises(NetworkError, match="disconnected"):
        metric_closure(net, "r", {"a", "b"})


def _all_spanning_tree_weights(metric):
    """Brute-force every spanning tree of the complete graph on the points."""
    points = metric.points
    pairs = list(itertools.combinations(points, 2))
    n = len(points)
    weights = []
    for chosen in itertools.combinations(pairs, n - 1):
        comp = {p: p for p in points}

        def find(x):
            while comp[x] != x:
                x = comp[x]
            return x

        ok = True
        for u, v in chosen:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            comp[ru] = rv
        if ok:
            weights.append(sum(metric.distance(u, v) for u, v in chosen))
    return weights


def test_mst_of_metric_small_cases():
    two = metric_closure(RoutingNetwork.graph([("r", "m", 4)]), "r", {"m"})
    mst = mst_of_metric(two)
    assert mst.edge_list() == [("m", "r", 4)]
    assert mst.total_weight() == 4

    tri = metric_closure(
        RoutingNetwork.graph([("r", "x", 1), ("r", "y", 1), ("x", "y", 1)]),
        "r", {"x", "y"})
    mst = mst_of_metric(tri)
    assert mst.total_weight() == 2 == min(_all_spanning_tree_weights(tri))
    assert mst.edge_list() == [("r", "x", 1), ("r", "y", 1)]

    path = metric_closure(RoutingNetwork.graph([("r", "a", 2), ("a", "b", 3)]),
                          "r", {"a", "b"})
    mst = mst_of_metric(path)
    assert mst.total_weight() == 5 == min(_all_spanning_tree_weights(path))
    assert mst.edge_list() == [("a", "b", 3), ("a", "r", 2)]


def test_mst_matches_enumeration_on_random_metrics():
    rnd = random.Random(5)
    for trial in range(25):
        inst = gen_random(GenSpec("random-graph", rnd.randint(2, 5), seed=100 + trial))
        metric = metric_closure(inst.network, "r", inst.members)
        mst = mst_of_metric(metric)
        assert mst.total_weight() == min(_all_spanning_tree_weights(metric))


def test_graph_multicast_cost_examples():
    tri = RoutingNetwork.graph([("r", "x", 1), ("r", "y", 1), ("x", "y", 1)])
    assert graph_multicast_cost(tri, "r", {"x", "y"}) == 2
    assert graph_multicast_cost(tri, "r", {"x"}) == 1
    assert graph_multicast_cost(tri, "r", set()) == 0


def test_graph_multicast_cost_bounds():
    rnd = random.Random(9)
    for trial in range(20):
        inst = gen_random(GenSpec("random-graph", rnd.randint(2, 6), seed=200 + trial))
        oracle = GraphOracle(inst.network, "r", inst.members)
        metric = oracle.metric
        members = sorted(inst.members)
        for _ in range(5):
            sub = rnd.sample(members, rnd.randint(1, len(members)))
            cost = oracle(sub)
            dists = [metric.distance("r", m) for m in sub]
            assert max(dists) <= cost <= sum(dists)


def test_closure_mst_sandwiched_by_exact_tree_cost():
    rnd = random.Random(10)
    for trial in range(25):
        inst = gen_random(GenSpec("random-tree", rnd.randint(2, 10), seed=300 + trial))
        exact = TreeOracle(inst.network, "r")
        members = sorted(inst.members)
        as_graph = RoutingNetwork.graph(
            (u, v, c) for (u, v), c in inst.network.edges.items())
        for _ in range(5):
            sub = rnd.sample(members, rnd.randint(1, len(members)))
            mst_cost = graph_multicast_cost(as_graph, "r", sub)
            assert exact(sub) <= mst_cost <= 2 * exact(sub)


def test_table_oracle_lookup_and_missing():
    instance = table9_instance()
    assert table_multicast_cost(instance.network, {"U1", "U2"}) == 3
    assert table_multicast_cost(instance.network, set(TABLE9_MEMBERS[:5])) == 7
    assert table_multicast_cost(instance.network, set()) == 0
    with pytest.raises(OracleUndefinedError, match="U1 U6"):
        table_multicast_cost(instance.network, {"U1", "U6"})
    oracle = TableOracle(instance.network)
    assert oracle({"U6"}) == 1
    assert TABLE9_COSTS[("U7", "U8", "U9")] == oracle({"U7", "U8", "U9"})


def test_last_returns_mst_when_stretch_holds():
    path = metric_closure(RoutingNetwork.graph([("r", "a", 2), ("a", "b", 3)]),
                          "r", {"a", "b"})
    mst = mst_of_metric(path)
    last = build_last(path, "r", LastParams(gamma=Fraction(7)))
    assert last == mst

    two = metric_closure(RoutingNetwork.graph([("r", "m", 4)]), "r", {"m"})
    last = build_last(two, "r")
    assert last.edge_list() == [("m", "r", 4)]


def test_last_guarantees_on_random_metrics():
    rnd = random.Random(21)
    params = LastParams(gamma=Fraction(7))
    for trial in range(100):
        n = rnd.randint(2, 12)
        inst = gen_random(GenSpec("random-graph", n, seed=400 + trial,
                                  extra_edge_factor=1.0))
        metric = metric_closure(inst.network, "r", inst.members)
        mst = mst_of_metric(metric)
        last = build_last(metric, "r", params)
        assert last.vertices() == frozenset(metric.points)
        dists = last.root_distances()
        for v in metric.points:
            assert params.stretch_ok(dists[v], metric.distance("r", v))
        assert params.lightness_ok(last.total_weight(), mst.total_weight())


def test_last_guarantees_with_aggressive_gamma():
    # small gamma forces grafts; both bounds must still hold
    rnd = random.Random(23)
    params = LastParams(gamma=Fraction(1, 10))
    grafted = 0
    for trial in range(60):
        inst = gen_random(GenSpec("random-graph", rnd.randint(3, 10),
                                  seed=500 + trial, extra_edge_factor=1.5))
        metric = metric_closure(inst.network, "r", inst.members)
        mst = mst_of_metric(metric)
        last = build_last(metric, "r", params)
        if last != mst:
            grafted += 1
        dists = last.root_distances()
        for v in metric.points:
            assert params.stretch_ok(dists[v], metric.distance("r", v))
        assert params.lightness_ok(last.total_weight(), mst.total_weight())
    assert grafted > 0  # the aggressive setting actually exercised grafting


def test_zero_cost_edges_supported_throughout():
    net = RoutingNetwork.tree([("r", "u", 0), ("u", "a", 2), ("u", "b", 0)])
    assert tree_multicast_cost(net, "r", {"b"}) == 0
    assert tree_multicast_cost(net, "r", {"a", "b"}) == 2
    as_graph = RoutingNetwork.graph([("r", "u", 0), ("u", "a", 2), ("u", "b", 0)])
    metric = metric_closure(as_graph, "r", {"a", "b"})
    assert metric.distance("r", "b") == 0
    last = build_last(metric, "r", LastParams(gamma=Fraction(1, 10)))
    dists = last.root_distances()
    params = LastParams(gamma=Fraction(1, 10))
    for v in metric.points:
        assert params.stretch_ok(dists[v], metric.distance("r", v))


def test_last_params_validation():
    with pytest.raises(ValueError):
        LastParams(gamma=Fraction(0))
    p = LastParams(gamma=Fraction(7))
    assert p.alpha == pytest.approx(1 + 7 * 2 ** 0.5)
    assert p.beta == pytest.approx(1 + 2 ** 0.5 / 7)


def test_network_validation_errors():
    with pytest.raises(NetworkError, match="duplicate edge"):
        RoutingNetwork.tree([("a", "b", 1), ("b", "a", 2)])
    with pytest.raises(NetworkError, match="self-loop"):
        RoutingNetwork.tree([("a", "a", 1)])
    with pytest.raises(NetworkError, match="cycle"):
        RoutingNetwork.tree(
            [("a", "b", 1), ("b", "c", 1), ("c", "a", 1)]).validate()
