import itertools
import random

import pytest

from khier import (
    BruteForceCapError,
    BruteForceConfig,
    InfeasibleError,
    KhierError,
    RoutingNetwork,
    Instance,
    TreeOracle,
    UniformOracle,
    brute_force_opt,
    combine,
    eval_cost_total,
    leaf,
    optimal_hierarchy,
    uniform_optimal_build,
    uniform_optimal_cost_f,
    weighted_lower_bound,
)

from conftest import random_table_oracle, random_weights

F_VALUES = [0, 4, 9, 16, 23, 30, 38, 46, 54]


def test_closed_form_first_nine():
    assert [uniform_optimal_cost_f(n) for n in range(1, 10)] == F_VALUES
    with pytest.raises(KhierError):
        uniform_optimal_cost_f(0)


def test_built_hierarchy_evaluates_to_closed_form_up_to_200():
    for n in range(1, 201):
        members = [f"m{i:03d}" for i in range(n)]
        h = uniform_optimal_build(members)
        total = eval_cost_total(h, {m: 1 for m in members}, UniformOracle()).total
        assert total == uniform_optimal_cost_f(n), n


def test_uniform_build_shapes():
    assert uniform_optimal_build(["a"]).signature() == "a"
    assert uniform_optimal_build(["a", "b", "c"]).signature() == ("a", "b", "c")
    h4 = uniform_optimal_build(["a", "b", "c", "d"])
    sizes = sorted(len(kids) if isinstance(kids, tuple) else 1
                   for kids in h4.signature())
    assert sizes == [1, 1, 2]
    h9 = uniform_optimal_build([f"m{i}" for i in range(9)])
    sig = h9.signature()
    assert len(sig) == 3 and all(len(part) == 3 for part in sig)
    with pytest.raises(KhierError):
        uniform_optimal_build([])
    with pytest.raises(KhierError):
        uniform_optimal_build(["a", "a"])


def test_brute_force_examples():
    _, cost = optimal_hierarchy({m: 1 for m in "abc"}, UniformOracle())
    assert cost == 9

    _, cost = optimal_hierarchy({"a": 1, "b": 2}, UniformOracle())
    assert cost == 6

    net = RoutingNetwork.tree(
        [("r", "u", 1), ("u", "v1", 1), ("u", "v2", 1), ("u", "v3", 1)])
    inst = Instance(frozenset({"v1", "v2", "v3"}), {"v1": 1, "v2": 1, "v3": 1},
                    net, "r")
    h, cost = brute_force_opt(inst, TreeOracle(net, "r"))
    assert cost == 18
    assert h.signature() == ("v1", "v2", "v3")


def test_brute_force_cap():
    weights = {f"m{i}": 1 for i in range(5)}
    with pytest.raises(BruteForceCapError):
        optimal_hierarchy(weights, UniformOracle(), BruteForceConfig(max_members=4))


def test_brute_force_deterministic():
    rnd = random.Random(31)
    weights = random_weights(rnd, [f"m{i}" for i in range(6)])
    h1, c1 = optimal_hierarchy(weights, UniformOracle())
    h2, c2 = optimal_hierarchy(weights, UniformOracle())
    assert c1 == c2
    assert h1.signature() == h2.signature()


# Independent oracle for the memoized solver: spell out every rooted tree
# whose internal nodes have >= 2 children and take the cheapest.


def _every_partition(elems):
    if len(elems) == 1:
        yield [elems]
        return
    head, rest = elems[0], elems[1:]
    for part in _every_partition(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [head]] + part[i + 1:]
        yield [[head]] + part


def _every_hierarchy(members):
    if len(members) == 1:
        yield leaf(members[0])
        return
    for part in _every_partition(list(members)):
        if len(part) < 2:
            continue
        for subtrees in itertools.product(
                *(list(_every_hierarchy(tuple(block))) for block in part)):
            yield combine(list(subtrees))


def test_explicit_enumeration_counts():
    # rooted multiway trees on labeled leaves: 1, 1, 4, 26, 236
    counts = [sum(1 for _ in _every_hierarchy(tuple(f"m{i}" for i in range(n))))
              for n in range(1, 6)]
    assert counts == [1, 1, 4, 26, 236]


def test_solver_matches_explicit_enumeration():
    rnd = random.Random(29)
    for _ in range(15):
        n = rnd.randint(1, 5)
        members = tuple(f"m{i}" for i in range(n))
        weights = random_weights(rnd, members)
        oracle = random_table_oracle(rnd, members)
        _, solved = optimal_hierarchy(weights, oracle)
        explicit = min(eval_cost_total(h, weights, oracle).total
                       for h in _every_hierarchy(members))
        assert solved == explicit


def test_brute_matches_closed_form_small():
    for n in range(1, 8):
        weights = {f"m{i}": 1 for i in range(n)}
        _, cost = optimal_hierarchy(weights, UniformOracle())
        assert cost == uniform_optimal_cost_f(n)


def test_degree_restriction_matches_unrestricted():
    rnd = random.Random(37)
    restricted_cfg = BruteForceConfig(degree_restriction=frozenset({2, 3}))
    for trial in range(25):
        n = rnd.randint(2, 7)
        weights = random_weights(rnd, [f"m{i}" for i in range(n)])
        _, full = optimal_hierarchy(weights, UniformOracle())
        _, limited = optimal_hierarchy(weights, UniformOracle(), restricted_cfg)
        assert full == limited


def test_degree_restriction_refused_for_routed_oracle():
    net = RoutingNetwork.tree([("r", "a", 1), ("r", "b", 1)])
    oracle = TreeOracle(net, "r")
    cfg = BruteForceConfig(degree_restriction=frozenset({2, 3}))
    with pytest.raises(InfeasibleError, match="uniform"):
        optimal_hierarchy({"a": 1, "b": 1}, oracle, cfg)


def test_degree_restriction_value_checked():
    with pytest.raises(ValueError):
        BruteForceConfig(degree_restriction=frozenset({2, 4}))


def test_weighted_lower_bound_values():
    nine = {f"m{i}": 1 for i in range(9)}
    assert weighted_lower_bound(nine) == pytest.approx(54, rel=1e-12)
    three = {f"m{i}": 1 for i in range(3)}
    assert weighted_lower_bound(three) == pytest.approx(9, rel=1e-12)
    assert weighted_lower_bound({"a": 5}) == pytest.approx(0, abs=1e-12)
    with pytest.raises(KhierError, match="non-positive"):
        weighted_lower_bound({"a": 0})


def test_lower_bound_below_optimum():
    rnd = random.Random(41)
    for _ in range(60):
        n = rnd.randint(1, 6)
        weights = random_weights(rnd, [f"m{i}" for i in range(n)])
        _, opt = optimal_hierarchy(weights, UniformOracle())
        assert weighted_lower_bound(weights) <= opt * (1 + 1e-9)
