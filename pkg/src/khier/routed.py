"""Routing-aware hierarchy construction.

Both builders here follow the same divide-and-conquer scheme: split the
member set at a routing vertex into a weight-balanced pair (or peel off one
very heavy member), build each side, and join the two trees under a fresh
root.  When the split vertex sits far from the controller (its path cost
exceeds a fifth of the current multicast cost) the split-off side is built
from weights alone instead of recursing, which caps how often that path
cost can be paid.

``approx_tree`` works directly on a tree network.  ``approx_graph``
replays the same recursion on an arbitrary graph by taking, per level, the
shortest-path metric on the remaining members, its MST (whose weight serves
as the multicast cost), and a light approximate shortest-path tree of that
metric to partition on.

``binarize`` rewrites any hierarchy into a binary one whose cost is at most
three times the input's, splitting high-degree nodes into weight-balanced
halves (or isolating a child heavier than two thirds of its node).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InfeasibleError, KhierError
from .model import Hierarchy, Instance, combine, hierarchy_weight, leaf
from .multicast import (
    GraphOracle,
    LastParams,
    RoutingNetwork,
    SpanningTree,
    TreeOracle,
    UniformOracle,
    _rooted_tree,
    build_last,
    mst_of_metric,
)
from .uniform import PtasParams, as_fraction, ptas_build


@dataclass(frozen=True)
class PartitionResult:
    members: frozenset[str]  # the split-off subset X
    vertex: str              # routing vertex the split was made at
    delta: int               # routing cost from the controller to that vertex
    balanced: bool

    def check(self, total_weight: int, split_weight: int,
              weights: Mapping[str, int]) -> None:
        if self.balanced:
            if not (3 * split_weight >= total_weight and 3 * split_weight <= 2 * total_weight):
                raise KhierError("balanced split outside [W/3, 2W/3]")
        else:
            if len(self.members) != 1:
                raise KhierError("unbalanced split must be a single member")
            (m,) = self.members
            if not 3 * weights[m] > 2 * total_weight:
                raise KhierError("unbalanced split member is not heavy")


def _children_view(tree, controller: str):
    """Child map plus per-edge costs for a tree network or spanning tree."""
    if isinstance(tree, SpanningTree):
        kids = tree.children_map()
        return kids, dict(tree.edge_cost)
    if isinstance(tree, RoutingNetwork):
        if tree.kind != "tree":
            raise InfeasibleError("partitioning requires a tree")
        parent, cost = _rooted_tree(tree, controller)
        kids: dict[str, list[str]] = {v: [] for v in tree.vertices}
        for v, p in parent.items():
            kids[p].append(v)
        for lst in kids.values():
            lst.sort()
        return kids, cost
    raise InfeasibleError(f"cannot partition a {type(tree).__name__}")


def partition_tree(tree, controller: str, members, weights: Mapping[str, int]) -> PartitionResult:
    """Split the members at a routing vertex of the tree.

    Descends from the controller: while some child subtree holds more than
    two thirds of the member weight, move into it.  At the stopping vertex,
    children (a member sitting at the vertex itself counts as a zero-cost
    virtual child) are taken in descending subtree weight, ties by id, until
    at least a third of the total weight is gathered; that child set is the
    split.  If the descent bottoms out at one member heavier than two
    thirds, that member alone is returned as an unbalanced split.
    """
    member_set = frozenset(members)
    if not member_set:
        raise KhierError("empty member set")
    kids, ecost = _children_view(tree, controller)

    # member weight under each vertex (the member at a vertex included)
    subw: dict[str, int] = {}

    def fill(v: str) -> int:
        w = weights[v] if v in member_set else 0
        for c in kids.get(v, ()):
            w += fill(c)
        subw[v] = w
        return w

    total = fill(controller)
    if total <= 0:
        raise KhierError("total member weight must be positive")

    def collect(v: str) -> frozenset[str]:
        out = set()
        if v in member_set:
            out.add(v)
        for c in kids.get(v, ()):
            out |= collect(c)
        return frozenset(out)

    cur, dist = controller, 0
    while True:
        # (weight, tie id, is-virtual) for each child subtree worth taking
        options: list[tuple[int, str, bool]] = []
        if cur in member_set and weights[cur] > 0:
            options.append((weights[cur], cur, True))
        for c in kids.get(cur, ()):
            if subw[c] > 0:
                options.append((subw[c], c, False))

        heavy = [(w, c, virt) for w, c, virt in options if 3 * w > 2 * total]
        if heavy:
            w, c, virt = heavy[0]
            if virt:
                return PartitionResult(frozenset({c}), cur, dist, balanced=False)
            if c in member_set and subw[c] == weights[c]:
                # the whole heavy subtree is the one member at its root
                return PartitionResult(frozenset({c}), c, dist + ecost[c], balanced=False)
            cur, dist = c, dist + ecost[c]
            continue

        taken: set[str] = set()
        acc = 0
        for w, c, virt in sorted(options, key=lambda o: (-o[0], o[1])):
            acc += w
            taken |= {c} if virt else collect(c)
            if 3 * acc >= total:
                break
        result = PartitionResult(frozenset(taken), cur, dist, balanced=True)
        result.check(total, acc, weights)
        return result


def approx_tree(instance: Instance, epsilon=Fraction(1, 2),
                partition_log: list | None = None) -> Hierarchy:
    """Divide-and-conquer hierarchy for a tree network."""
    if instance.network.kind != "tree":
        raise InfeasibleError("approx_tree requires a tree network")
    oracle = TreeOracle(instance.network, instance.controller)
    params = PtasParams(epsilon=epsilon)
    weights = instance.weights

    def rec(subset: frozenset[str]) -> Hierarchy:
        if len(subset) == 1:
            (m,) = subset
            return leaf(m)
        part = partition_tree(instance.network, instance.controller, subset, weights)
        if partition_log is not None:
            partition_log.append(part)
        split, rest = part.members, subset - part.members
        if 5 * part.delta <= oracle(subset):
            first = rec(split)
        else:
            first = ptas_build({m: weights[m] for m in sorted(split)},
                               _UNIFORM, params)
        return combine([first, rec(rest)])

    return rec(frozenset(instance.members))


def approx_graph(instance: Instance, epsilon=Fraction(1, 2), gamma=Fraction(7),
                 partition_log: list | None = None,
                 last_log: list | None = None) -> Hierarchy:
    """Divide-and-conquer hierarchy for an arbitrary routing graph.

    Each level takes the shortest-path metric on the remaining members plus
    the controller, uses its MST weight as the multicast cost, and splits
    on a light approximate shortest-path tree of the metric so that the
    split vertex's distance bound carries over to real member distances.
    """
    if instance.network.kind != "graph":
        raise InfeasibleError("approx_graph requires a graph network")
    oracle = GraphOracle(instance.network, instance.controller, instance.members)
    params = PtasParams(epsilon=epsilon)
    last_params = LastParams(gamma=as_gamma(gamma))
    weights = instance.weights
    controller = instance.controller

    def rec(subset: frozenset[str]) -> Hierarchy:
        if len(subset) == 1:
            (m,) = subset
            return leaf(m)
        metric = oracle.metric.restrict(subset)
        mst = mst_of_metric(metric)
        light_tree = build_last(metric, controller, last_params)
        if last_log is not None:
            last_log.append((metric, mst, light_tree))
        part = partition_tree(light_tree, controller, subset, weights)
        if partition_log is not None:
            partition_log.append(part)
        split, rest = part.members, subset - part.members
        if 5 * part.delta <= mst.total_weight():
            first = rec(split)
        else:
            first = ptas_build({m: weights[m] for m in sorted(split)},
                               _UNIFORM, params)
        return combine([first, rec(rest)])

    return rec(frozenset(instance.members))


def as_gamma(value) -> Fraction:
    g = as_fraction(value)
    if g <= 0:
        raise ValueError("gamma must be positive")
    return g


_UNIFORM = UniformOracle()


def binarize(h: Hierarchy, weights: Mapping[str, int]) -> Hierarchy:
    """Binary hierarchy with cost at most three times the input's.

    Nodes of degree above two are rewritten bottom-up.  If no child carries
    more than two thirds of the node's weight, the children are dealt in
    descending weight order into whichever of two groups is lighter, which
    leaves both groups at a third of the weight or more; otherwise the
    heavy child is isolated from its siblings.  Groups of one child attach
    directly, groups of several become nodes and are split again.  Leaves
    and degree-<=2 nodes pass through unchanged.
    """

    def weight_of(t: Hierarchy) -> int:
        return hierarchy_weight(t, weights)

    def reduce_group(group: list[tuple[int, str, Hierarchy]]) -> Hierarchy:
        if len(group) == 1:
            return group[0][2]
        if len(group) == 2:
            return combine([group[0][2], group[1][2]])
        total = sum(w for w, _, _ in group)
        ordered = sorted(group, key=lambda g: (-g[0], g[1]))
        heaviest = ordered[0]
        if 3 * heaviest[0] > 2 * total:
            rest = reduce_group(ordered[1:])
            return combine([heaviest[2], rest])
        sides: tuple[list, list] = ([], [])
        loads = [0, 0]
        for item in ordered:
            side = 0 if loads[0] <= loads[1] else 1
            sides[side].append(item)
            loads[side] += item[0]
        return combine([reduce_group(sides[0]), reduce_group(sides[1])])

    def rebuild(node: str) -> Hierarchy:
        if h.is_leaf(node):
            return leaf(h.leaf_member[node])
        kids = [rebuild(v) for v in h.children[node]]
        if len(kids) <= 2:
            return combine(kids)
        tagged = [(weight_of(k), min(k.leaf_member.values()), k) for k in kids]
        return reduce_group(tagged)

    return rebuild(h.root)
