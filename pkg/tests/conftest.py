"""Shared fixtures: the nine-member table instance, random builders."""

from __future__ import annotations

import random

import pytest

from khier import Instance, RoutingNetwork, TableOracle, combine, leaf

# Worked nine-member setup: three subgroups (U1-U2, U3-U5, U7-U9) plus the
# lone U6 under the root.  The singleton costs for U1/U2/U7/U8/U9 are free
# choices; they do not enter U4's update cost.
TABLE9_COSTS = {
    ("U1", "U2"): 3,
    ("U3", "U4", "U5"): 5,
    ("U1", "U2", "U3", "U4", "U5"): 7,
    ("U6",): 1,
    ("U7", "U8", "U9"): 4,
    ("U3",): 3,
    ("U4",): 3,
    ("U5",): 3,
    ("U1",): 3,
    ("U2",): 3,
    ("U7",): 2,
    ("U8",): 2,
    ("U9",): 2,
}

TABLE9_MEMBERS = tuple(f"U{i}" for i in range(1, 10))


def table9_instance() -> Instance:
    network = RoutingNetwork.from_table(TABLE9_COSTS, set(TABLE9_MEMBERS) | {"r"})
    weights = {m: 1 for m in TABLE9_MEMBERS}
    return Instance(frozenset(TABLE9_MEMBERS), weights, network, "r")


def table9_hierarchy():
    k4 = combine([leaf("U1"), leaf("U2")])
    k5 = combine([leaf("U3"), leaf("U4"), leaf("U5")])
    k2 = combine([k4, k5])
    k3 = combine([leaf("U7"), leaf("U8"), leaf("U9")])
    return combine([k2, leaf("U6"), k3])


@pytest.fixture
def table9():
    return table9_instance(), table9_hierarchy()


def random_hierarchy(rnd: random.Random, members):
    """Random multiway tree over the members, built by repeated combines."""
    pool = [leaf(m) for m in members]
    while len(pool) > 1:
        k = rnd.randint(2, min(4, len(pool)))
        picked = [pool.pop(rnd.randrange(len(pool))) for _ in range(k)]
        pool.append(combine(picked))
    return pool[0]


def random_table_oracle(rnd: random.Random, members) -> TableOracle:
    """Arbitrary subset costs over every non-empty subset of the members."""
    members = sorted(members)
    entries = {}
    for mask in range(1, 1 << len(members)):
        subset = tuple(m for i, m in enumerate(members) if mask >> i & 1)
        entries[subset] = rnd.randint(0, 30)
    network = RoutingNetwork.from_table(entries, set(members) | {"r"})
    return TableOracle(network)


def random_weights(rnd: random.Random, members, max_weight: int = 20) -> dict:
    return {m: rnd.randint(1, max_weight) for m in members}
