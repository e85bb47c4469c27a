"""Key hierarchies over member sets and exact update-cost evaluation.

A hierarchy is a rooted tree whose leaves are the group members.  When a
member updates, every node on its root path is rekeyed, and each rekeyed
node sends one multicast per child, addressed to that child's leaf set.
With a multicast-cost oracle M, the update cost of member x is therefore

    sum over proper ancestors u of x  of  sum over children v of u  of  M(leaves(v))

and the total cost of a hierarchy weights each member's update cost by its
update frequency.  The same total can be accumulated per node instead:
node u contributes W(leaves(u)) times the sum of M over its child subtrees.
``eval_cost_member`` implements the per-member form directly;
``eval_cost_total`` implements the per-node form, so the two act as
independent routes to the same integer.

All weights and costs are unsigned 64-bit; evaluation raises
``CostOverflowError`` instead of silently leaving that range.  Every type
here is immutable after construction and all operations are pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CostOverflowError, HierarchyError
from .multicast import RoutingNetwork

U64_MAX = 2**64 - 1

MulticastOracle = Callable[[frozenset], int]

_INTERNAL_ID = re.compile(r"^#(\d+)$")


def _check_u64(value: int, what: str) -> int:
    if value > U64_MAX:
        raise CostOverflowError(f"{what} exceeds 64-bit range: {value}")
    return value


@dataclass(frozen=True)
class Instance:
    """A problem instance: members with update weights on a routing network."""

    members: frozenset[str]
    weights: Mapping[str, int]
    network: RoutingNetwork
    controller: str

    def validate(self) -> None:
        if not self.members:
            raise HierarchyError("instance has no members")
        for vid in sorted(self.network.vertices | {self.controller}):
            # ids must survive the whitespace-tokenized file format, where
            # '#' starts comments and node references
            if not vid or any(ch.isspace() for ch in vid) or "#" in vid:
                raise HierarchyError(f"invalid vertex id {vid!r}")
        for m in sorted(self.members):
            if m not in self.network.vertices and self.network.kind != "table":
                raise HierarchyError(f"member {m} is not a network vertex")
            if not m or any(ch.isspace() for ch in m) or "#" in m:
                raise HierarchyError(f"invalid member id {m!r}")
            if m not in self.weights:
                raise HierarchyError(f"member {m} has no weight")
            w = self.weights[m]
            if not (0 <= w <= U64_MAX):
                raise HierarchyError(f"weight of {m} out of range: {w}")
        if self.network.kind != "table" and self.controller not in self.network.vertices:
            raise HierarchyError(f"controller {self.controller} is not a network vertex")
        self.network.validate()


@dataclass(frozen=True)
class Hierarchy:
    """Rooted tree with members at the leaves.

    Internal nodes are keyed by ids of the form ``#<int>``; leaf node ids
    are the member ids themselves.  ``children`` holds internal nodes only,
    in a preserved (but semantically irrelevant) child order.
    """

    root: str
    children: Mapping[str, tuple[str, ...]]
    leaf_member: Mapping[str, str]

    def nodes(self) -> frozenset[str]:
        return frozenset(self.children) | frozenset(self.leaf_member)

    def is_leaf(self, node: str) -> bool:
        return node in self.leaf_member

    def member_set(self) -> frozenset[str]:
        return frozenset(self.leaf_member.values())

    def parent_map(self) -> dict[str, str]:
        parents: dict[str, str] = {}
        for u, kids in self.children.items():
            for v in kids:
                parents[v] = u
        return parents

    def leaf_node_of(self, member: str) -> str:
        for node, m in self.leaf_member.items():
            if m == member:
                return node
        raise HierarchyError(f"{member} is not a leaf of this hierarchy")

    def subtree_members(self) -> dict[str, frozenset[str]]:
        """Leaf member set of every node, computed bottom-up."""
        sets: dict[str, frozenset[str]] = {
            node: frozenset((m,)) for node, m in self.leaf_member.items()
        }
        for node in self._postorder():
            if node not in sets:
                acc: set[str] = set()
                for v in self.children[node]:
                    acc |= sets[v]
                sets[node] = frozenset(acc)
        return sets

    def _postorder(self) -> list[str]:
        order: list[str] = []
        stack: list[tuple[str, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded or self.is_leaf(node):
                order.append(node)
                continue
            stack.append((node, True))
            for v in reversed(self.children.get(node, ())):
                stack.append((v, False))
        return order

    def depths(self) -> dict[str, int]:
        out = {self.root: 0}
        stack = [self.root]
        while stack:
            u = stack.pop()
            for v in self.children.get(u, ()):
                out[v] = out[u] + 1
                stack.append(v)
        return out

    def signature(self):
        """Order-preserving nested-tuple form, for structural comparison."""

        def sig(node):
            if self.is_leaf(node):
                return self.leaf_member[node]
            return tuple(sig(v) for v in self.children[node])

        return sig(self.root)

    def max_internal_index(self) -> int:
        best = -1
        for node in self.children:
            m = _INTERNAL_ID.match(node)
            if m:
                best = max(best, int(m.group(1)))
        return best


@dataclass(frozen=True)
class CostBreakdown:
    total: int
    per_member: Mapping[str, int]
    per_node: Mapping[str, int]


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" | "warning"
    message: str


def leaf(member: str) -> Hierarchy:
    return Hierarchy(root=member, children={}, leaf_member={member: member})


def combine(parts: Sequence[Hierarchy]) -> Hierarchy:
    """New hierarchy whose root has the parts' roots as children, in order.

    Part node ids are preserved; if two parts carry the same internal id the
    later part's clashing nodes are renumbered (fresh ids above every id in
    use).  Leaf member sets must be pairwise disjoint.
    """
    if not parts:
        raise HierarchyError("combine requires at least one part")
    seen_members: set[str] = set()
    for p in parts:
        overlap = seen_members & p.member_set()
        if overlap:
            raise HierarchyError(f"overlapping member sets: {sorted(overlap)}")
        seen_members |= p.member_set()

    next_idx = max(p.max_internal_index() for p in parts) + 1
    used: set[str] = set()
    children: dict[str, tuple[str, ...]] = {}
    leaf_member: dict[str, str] = {}
    roots: list[str] = []
    for p in parts:
        rename: dict[str, str] = {}
        for node in p.children:
            if node in used:
                rename[node] = f"#{next_idx}"
                next_idx += 1
        for node, kids in p.children.items():
            new_id = rename.get(node, node)
            used.add(new_id)
            children[new_id] = tuple(rename.get(v, v) for v in kids)
        leaf_member.update(p.leaf_member)
        roots.append(rename.get(p.root, p.root))

    root_id = f"#{next_idx}"
    children[root_id] = tuple(roots)
    return Hierarchy(root=root_id, children=children, leaf_member=leaf_member)


def graft(host: Hierarchy, at_node: str, sub: Hierarchy) -> Hierarchy:
    """Attach ``sub`` at a node of ``host``.

    At an internal node the sub-hierarchy's root becomes an extra (last)
    child.  At a leaf a new internal node is spliced into the leaf's place,
    with the leaf and the sub-root as its children, so leaves stay members.
    """
    if at_node not in host.nodes():
        raise HierarchyError(f"unknown node {at_node}")
    overlap = host.member_set() & sub.member_set()
    if overlap:
        raise HierarchyError(f"overlapping member sets: {sorted(overlap)}")

    next_idx = max(host.max_internal_index(), sub.max_internal_index()) + 1
    used = set(host.children)
    rename: dict[str, str] = {}
    for node in sub.children:
        if node in used:
            rename[node] = f"#{next_idx}"
            next_idx += 1
    children = dict(host.children)
    for node, kids in sub.children.items():
        children[rename.get(node, node)] = tuple(rename.get(v, v) for v in kids)
    leaf_member = dict(host.leaf_member)
    leaf_member.update(sub.leaf_member)
    sub_root = rename.get(sub.root, sub.root)

    root = host.root
    if host.is_leaf(at_node):
        splice = f"#{next_idx}"
        children[splice] = (at_node, sub_root)
        parents = host.parent_map()
        if at_node in parents:
            p = parents[at_node]
            children[p] = tuple(splice if v == at_node else v for v in children[p])
        else:
            root = splice
    else:
        children[at_node] = children[at_node] + (sub_root,)
    return Hierarchy(root=root, children=children, leaf_member=leaf_member)


def hierarchy_weight(h: Hierarchy, weights: Mapping[str, int]) -> int:
    total = 0
    for m in h.leaf_member.values():
        if m not in weights:
            raise HierarchyError(f"unknown member {m}")
        total += weights[m]
    return _check_u64(total, "hierarchy weight")


def eval_cost_member(h: Hierarchy, member: str, oracle: MulticastOracle) -> int:
    """Update cost of one member: per-ancestor, per-child multicast sums."""
    node = h.leaf_node_of(member)
    leafsets = h.subtree_members()
    parents = h.parent_map()
    total = 0
    u = parents.get(node)
    while u is not None:
        for v in h.children[u]:
            total += oracle(leafsets[v])
        u = parents.get(u)
    return _check_u64(total, f"update cost of {member}")


def eval_cost_total(h: Hierarchy, weights: Mapping[str, int],
                    oracle: MulticastOracle) -> CostBreakdown:
    """Weighted total cost, accumulated per node.

    per_node(u) = W(leaves under u) * sum of M over u's child subtrees;
    the total is the sum of the per-node contributions.  per_member is
    also reported (path sums of the per-node multicast totals).
    """
    leafsets = h.subtree_members()
    for m in h.leaf_member.values():
        if m not in weights:
            raise HierarchyError(f"unknown member {m}")

    msum: dict[str, int] = {}
    per_node: dict[str, int] = {}
    total = 0
    for u, kids in h.children.items():
        s = sum(oracle(leafsets[v]) for v in kids)
        msum[u] = s
        w_u = sum(weights[m] for m in leafsets[u])
        per_node[u] = _check_u64(w_u * s, f"per-node cost at {u}")
        total += per_node[u]
    _check_u64(total, "total cost")

    per_member: dict[str, int] = {}

    def walk(u: str, acc: int) -> None:
        if h.is_leaf(u):
            per_member[h.leaf_member[u]] = _check_u64(acc, "per-member cost")
            return
        for v in h.children[u]:
            walk(v, acc + msum[u])

    walk(h.root, 0)
    return CostBreakdown(total=total, per_member=per_member, per_node=per_node)


def validate_hierarchy(h: Hierarchy, instance: Instance) -> list[Violation]:
    """All structural violations of the hierarchy against the instance.

    An empty list means the hierarchy is valid; degree-1 internal nodes are
    reported as warnings only, since intermediate construction states may
    produce them and evaluation still works.
    """
    out: list[Violation] = []

    def err(msg):
        out.append(Violation("error", msg))

    both = set(h.children) & set(h.leaf_member)
    for node in sorted(both):
        err(f"node {node} is both internal and leaf")

    nodes = h.nodes()
    if h.root not in nodes:
        err(f"root {h.root} is not a node")
        return out

    ref_count: dict[str, int] = {}
    for u, kids in h.children.items():
        if not kids:
            err(f"internal node {u} has no children")
        if len(kids) == 1:
            out.append(Violation("warning", f"internal node {u} has a single child"))
        for v in kids:
            if v not in nodes:
                err(f"node {u} references undefined node {v}")
            ref_count[v] = ref_count.get(v, 0) + 1

    for v, count in sorted(ref_count.items()):
        if count > 1:
            err(f"not a tree: node {v} has {count} parents")
    if h.root in ref_count:
        err(f"not a tree: root {h.root} has a parent")

    reachable = {h.root}
    stack = [h.root]
    while stack:
        u = stack.pop()
        for v in h.children.get(u, ()):
            if v in nodes and v not in reachable:
                reachable.add(v)
                stack.append(v)
    for v in sorted(nodes - reachable):
        err(f"not a tree: node {v} is unreachable from the root")

    members_seen: dict[str, str] = {}
    for node, m in sorted(h.leaf_member.items()):
        if m in members_seen:
            err(f"member {m} appears at two leaves")
        members_seen[m] = node
        if m not in instance.members:
            err(f"unknown member {m}")
    for m in sorted(instance.members - set(members_seen)):
        err(f"missing member {m}")

    return out


def hierarchy_ok(violations: Iterable[Violation]) -> bool:
    return all(v.severity != "error" for v in violations)
