"""Instance generators and the line-oriented file formats.

Instance files (UTF-8, whitespace-separated tokens, ``#`` starts a comment)::

    khier-instance v1
    kind tree|graph|table
    root <vertex-id>
    edge <u> <v> <cost>          # tree/graph kinds; undirected, cost >= 0
    member <vertex-id> <weight>  # weight >= 1
    mcast <cost> <member-id>...  # table kind only; one subset per line

Hierarchy files (``#`` introduces node ids here, so no comments)::

    khier-hierarchy v1
    node <#id> <child>...        # child: member id or a #id defined later;
                                 # the first node line is the root

Writers are canonical (sorted edges/members/subsets, internal nodes
renumbered in preorder) so identical inputs produce byte-identical files.
Hierarchy child order is preserved as produced by the algorithms.

Random generation runs on the splitmix64 stream documented in
:mod:`khier.rng`, so a spec plus seed pins the instance exactly.  The two
reduction generators build the classic hard families: a two-level star
whose member weights encode number sizes to be grouped in equal-sum
triples, and a hub graph whose triple vertices encode a three-dimensional
matching.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import KhierError, ParseError
from .model import Hierarchy, Instance, leaf
from .multicast import KINDS, TABLE, TREE, RoutingNetwork
from .rng import SplitMix64

log = logging.getLogger(__name__)

INSTANCE_HEADER = "khier-instance v1"
HIERARCHY_HEADER = "khier-hierarchy v1"


# ---------------------------------------------------------------------------
# random instances


@dataclass(frozen=True)
class GenSpec:
    kind: str  # "random-tree" | "random-graph"
    n: int
    seed: int = 0
    max_weight: int = 10
    max_edge_cost: int = 10
    extra_edge_factor: float = 0.5

    def __post_init__(self):
        if self.kind not in ("random-tree", "random-graph"):
            raise KhierError(f"unknown generator kind {self.kind!r}")
        if self.n < 1:
            raise KhierError("n must be at least 1")
        if self.max_weight < 1 or self.max_edge_cost < 1:
            raise KhierError("max_weight and max_edge_cost must be at least 1")
        if self.extra_edge_factor < 0:
            raise KhierError("extra_edge_factor must be non-negative")


def gen_random(spec: GenSpec) -> Instance:
    """Random instance, fully determined by the GenSpec (seed included).

    The skeleton is a random recursive tree over the controller plus n-1
    interior vertices; each member then hangs as a leaf off a uniformly
    chosen skeleton vertex.  Graph instances add floor(factor * n) extra
    edges between random non-adjacent vertex pairs.
    """
    rng = SplitMix64(spec.seed)
    controller = "r"
    skeleton = [controller]
    edges: list[tuple[str, str, int]] = []
    for i in range(1, spec.n):
        v = f"u{i}"
        parent = skeleton[rng.below(len(skeleton))]
        edges.append((parent, v, rng.randint(1, spec.max_edge_cost)))
        skeleton.append(v)
    members = {}
    for i in range(1, spec.n + 1):
        m = f"m{i}"
        parent = skeleton[rng.below(len(skeleton))]
        edges.append((parent, m, rng.randint(1, spec.max_edge_cost)))
        members[m] = rng.randint(1, spec.max_weight)

    if spec.kind == "random-tree":
        network = RoutingNetwork.tree(edges)
    else:
        vertices = skeleton + sorted(members)
        present = {(min(u, v), max(u, v)) for u, v, _ in edges}
        extra = int(spec.extra_edge_factor * spec.n)
        for _ in range(extra):
            for _attempt in range(64):
                u = vertices[rng.below(len(vertices))]
                v = vertices[rng.below(len(vertices))]
                key = (min(u, v), max(u, v))
                if u != v and key not in present:
                    present.add(key)
                    edges.append((u, v, rng.randint(1, spec.max_edge_cost)))
                    break
        network = RoutingNetwork.graph(edges)

    instance = Instance(frozenset(members), members, network, controller)
    instance.validate()
    return instance


# ---------------------------------------------------------------------------
# hardness-reduction families


def _next_power_of_3(n: int) -> int:
    p = 1
    while p < n:
        p *= 3
    return p


@dataclass(frozen=True)
class ThreePartitionSpec:
    """Numbers to be grouped into equal-sum triples, plus star parameters.

    ``sizes`` holds 3m positive integers strictly between bound/4 and
    bound/2 summing to m * bound; each becomes a member of weight
    base_weight + size whose leaf edge costs the same, all hanging off one
    hub that sits root_edge_cost away from the controller.
    """

    sizes: tuple[int, ...]
    bound: int
    base_weight: int
    root_edge_cost: int

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) % 3 or not self.sizes:
            raise KhierError("sizes must come in non-empty groups of three")
        m = len(self.sizes) // 3
        for s in self.sizes:
            if not self.bound / 4 < s < self.bound / 2:
                raise KhierError(f"size {s} outside (bound/4, bound/2)")
        if sum(self.sizes) != m * self.bound:
            raise KhierError("sizes must sum to m * bound")
        if self.base_weight < 1 or self.root_edge_cost < 0:
            raise KhierError("bad base weight or root edge cost")


def gen_3partition(spec: ThreePartitionSpec) -> Instance:
    """Two-level star instance encoding an equal-sum-triples problem.

    Pads with (bound, 0, 0) size groups until the member count is a power
    of three (padding is exempt from the size-window check).  Rejects base
    weights too small to keep w_max/w_min below 1 + 1/(3 N log3 N), which
    is what pins optimal hierarchies to balanced ternary shape.
    """
    sizes = list(spec.sizes)
    target = _next_power_of_3(len(sizes))
    while len(sizes) < target:
        sizes.extend((spec.bound, 0, 0))
    n = len(sizes)

    weights_list = [spec.base_weight + s for s in sizes]
    w_max, w_min = max(weights_list), min(weights_list)
    depth = 0
    p = 1
    while p < n:
        p *= 3
        depth += 1
    denom = 3 * n * depth  # 3 N log3(N), an integer since N is a power of 3
    if denom > 0 and w_max * denom >= w_min * (denom + 1):
        raise KhierError(
            "base weight too small: member weight ratio exceeds "
            f"1 + 1/{denom}")

    total_w = sum(weights_list)
    if spec.root_edge_cost <= total_w * total_w * depth:
        log.warning("root edge cost %d is not above W^2 log3 N = %d; "
                    "optimal shape may not be pinned",
                    spec.root_edge_cost, total_w * total_w * depth)

    width = len(str(n))
    edges = [("r", "u", spec.root_edge_cost)]
    members = {}
    for i, w in enumerate(weights_list, start=1):
        vid = f"v{i:0{width}d}"
        edges.append(("u", vid, w))
        members[vid] = w
    instance = Instance(frozenset(members), members, RoutingNetwork.tree(edges), "r")
    instance.validate()
    return instance


@dataclass(frozen=True)
class ThreeDMatchingSpec:
    """Triples over three q-element ground sets, plus the root edge cost."""

    q: int
    triples: tuple[tuple[int, int, int], ...]
    root_edge_cost: int

    def __post_init__(self):
        object.__setattr__(
            self, "triples", tuple(tuple(int(x) for x in t) for t in self.triples))
        if self.q < 1:
            raise KhierError("q must be at least 1")
        if not self.triples:
            raise KhierError("at least one triple is required")
        for t in self.triples:
            if len(t) != 3 or not all(1 <= x <= self.q for x in t):
                raise KhierError(f"triple {t} out of range 1..{self.q}")
        for coord in range(3):
            covered = {t[coord] for t in self.triples}
            if covered != set(range(1, self.q + 1)):
                missing = sorted(set(range(1, self.q + 1)) - covered)
                raise KhierError(
                    f"coordinate {coord + 1} leaves elements {missing} untouched; "
                    "the routing graph would be disconnected")


def gen_3dmatching(spec: ThreeDMatchingSpec) -> Instance:
    """Hub graph encoding a three-dimensional matching problem.

    Members are the 3q element vertices at unit weight; each triple vertex
    links its three elements and the hub at unit cost, and the controller
    reaches the hub over one edge of the configured cost.  q is padded to a
    power of three with fresh, trivially matched triples.
    """
    q = spec.q
    triples = list(spec.triples)
    q_target = _next_power_of_3(q)
    for i in range(q + 1, q_target + 1):
        triples.append((i, i, i))
    q = q_target

    width = len(str(q))

    def vid(prefix: str, i: int) -> str:
        return f"{prefix}{i:0{width}d}"

    edges = [("r", "s", spec.root_edge_cost)]
    for t_index, (a, b, c) in enumerate(triples, start=1):
        t = f"t{t_index:0{len(str(len(triples)))}d}"
        edges.append(("s", t, 1))
        edges.append((t, vid("w", a), 1))
        edges.append((t, vid("u", b), 1))
        edges.append((t, vid("v", c), 1))
    members = {vid(p, i): 1 for p in "wuv" for i in range(1, q + 1)}
    instance = Instance(frozenset(members), members, RoutingNetwork.graph(edges), "r")
    instance.validate()
    return instance


# ---------------------------------------------------------------------------
# instance file format


def _tokenize(text: str, strip_comments: bool) -> list[tuple[int, list[str]]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0] if strip_comments else raw
        tokens = line.split()
        if tokens:
            lines.append((lineno, tokens))
    return lines


def parse_instance(data: str | bytes) -> Instance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = _tokenize(data, strip_comments=True)
    if not lines:
        raise ParseError("empty instance file")
    lineno, tokens = lines[0]
    if tokens != INSTANCE_HEADER.split():
        raise ParseError(f"expected header {INSTANCE_HEADER!r}", lineno, 1)

    kind = None
    root = None
    edges: dict[tuple[str, str], tuple[int, int]] = {}  # key -> (cost, lineno)
    members: dict[str, int] = {}
    mcast: list[tuple[int, int, tuple[str, ...]]] = []  # (lineno, cost, ids)

    for lineno, tokens in lines[1:]:
        tag, args = tokens[0], tokens[1:]
        if tag == "kind":
            if kind is not None:
                raise ParseError("duplicate kind line", lineno, 1)
            if len(args) != 1 or args[0] not in KINDS:
                raise ParseError("kind must be tree, graph, or table", lineno, 2)
            kind = args[0]
        elif tag == "root":
            if root is not None:
                raise ParseError("duplicate root line", lineno, 1)
            if len(args) != 1:
                raise ParseError("root takes one vertex id", lineno, 2)
            root = args[0]
        elif tag == "edge":
            if len(args) != 3:
                raise ParseError("edge takes <u> <v> <cost>", lineno, 2)
            u, v, cost_s = args
            cost = _int_field(cost_s, "edge cost", lineno, 4, minimum=0)
            if u == v:
                raise ParseError(f"self-loop at {u}", lineno, 2)
            key = (min(u, v), max(u, v))
            if key in edges:
                raise ParseError(
                    f"duplicate edge ({key[0]}, {key[1]}), first seen on line "
                    f"{edges[key][1]}", lineno, 2)
            edges[key] = (cost, lineno)
        elif tag == "member":
            if len(args) != 2:
                raise ParseError("member takes <vertex-id> <weight>", lineno, 2)
            m, weight_s = args
            weight = _int_field(weight_s, "member weight", lineno, 3, minimum=1)
            if m in members:
                raise ParseError(f"duplicate member {m}", lineno, 2)
            if m.startswith("#"):
                raise ParseError(f"member id {m} may not start with '#'", lineno, 2)
            members[m] = weight
        elif tag == "mcast":
            if len(args) < 2:
                raise ParseError("mcast takes <cost> <member-id>...", lineno, 2)
            cost = _int_field(args[0], "multicast cost", lineno, 2, minimum=0)
            mcast.append((lineno, cost, tuple(args[1:])))
        else:
            raise ParseError(f"unknown directive {tag!r}", lineno, 1)

    if kind is None:
        raise ParseError("missing kind line")
    if root is None:
        raise ParseError("missing root line")
    if not members:
        raise ParseError("no members declared")

    if kind == TABLE:
        if edges:
            raise ParseError("table instances carry no edges")
        entries = {}
        for lineno, cost, ids in mcast:
            for m in ids:
                if m not in members:
                    raise ParseError(f"mcast references unknown member {m}", lineno, 3)
            subset = frozenset(ids)
            if subset in entries:
                raise ParseError("duplicate mcast subset", lineno, 2)
            entries[subset] = cost
        network = RoutingNetwork.from_table(entries, set(members) | {root})
    else:
        if mcast:
            raise ParseError("mcast lines are only valid for table instances",
                             mcast[0][0], 1)
        builder = RoutingNetwork.tree if kind == TREE else RoutingNetwork.graph
        try:
            network = builder((u, v, c) for (u, v), (c, _) in sorted(edges.items()))
            network = RoutingNetwork(kind, network.vertices | {root} | set(members),
                                     network.edges, {})
            network.validate()
        except KhierError as exc:
            raise ParseError(str(exc)) from None

    instance = Instance(frozenset(members), members, network, root)
    try:
        instance.validate()
    except KhierError as exc:
        raise ParseError(str(exc)) from None
    return instance


def _int_field(text: str, what: str, lineno: int, column: int, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {text!r}",
                         lineno, column) from None
    if value < minimum:
        raise ParseError(f"{what} must be >= {minimum}", lineno, column)
    return value


def write_instance(instance: Instance) -> str:
    out = [INSTANCE_HEADER, f"kind {instance.network.kind}",
           f"root {instance.controller}"]
    for (u, v), cost in sorted(instance.network.edges.items()):
        out.append(f"edge {u} {v} {cost}")
    for m in sorted(instance.members):
        out.append(f"member {m} {instance.weights[m]}")
    for subset, cost in sorted(instance.network.table.items(),
                               key=lambda kv: sorted(kv[0])):
        out.append(f"mcast {cost} " + " ".join(sorted(subset)))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# hierarchy file format


def parse_hierarchy(data: str | bytes, instance: Instance) -> Hierarchy:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = _tokenize(data, strip_comments=False)
    if not lines:
        raise ParseError("empty hierarchy file")
    lineno, tokens = lines[0]
    if tokens != HIERARCHY_HEADER.split():
        raise ParseError(f"expected header {HIERARCHY_HEADER!r}", lineno, 1)

    defs: list[tuple[int, str, tuple[str, ...]]] = []
    for lineno, tokens in lines[1:]:
        if tokens[0] != "node":
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno, 1)
        if len(tokens) < 3:
            raise ParseError("node takes <#id> and at least one child", lineno, 2)
        node_id = tokens[1]
        if not (node_id.startswith("#") and node_id[1:].isdigit()):
            raise ParseError(f"bad node id {node_id!r}", lineno, 2)
        defs.append((lineno, node_id, tuple(tokens[2:])))

    if not defs:
        if len(instance.members) == 1:
            (only,) = instance.members
            return leaf(only)
        raise ParseError("no node lines, but the instance has several members")

    defined_at = {}
    for lineno, node_id, _ in defs:
        if node_id in defined_at:
            raise ParseError(f"node {node_id} defined twice", lineno, 2)
        defined_at[node_id] = lineno

    children: dict[str, tuple[str, ...]] = {}
    leaf_member: dict[str, str] = {}
    referenced: set[str] = set()
    for lineno, node_id, kids in defs:
        for col, child in enumerate(kids, start=3):
            if child.startswith("#"):
                if child not in defined_at:
                    raise ParseError(f"reference to undeclared node {child}",
                                     lineno, col)
                if defined_at[child] <= lineno:
                    raise ParseError(
                        f"node {child} must be defined after this reference",
                        lineno, col)
            else:
                if child not in instance.members:
                    raise ParseError(f"unknown member {child}", lineno, col)
                if child in leaf_member:
                    raise ParseError(f"member {child} appears twice", lineno, col)
                leaf_member[child] = child
            if child in referenced:
                raise ParseError(f"node {child} has two parents", lineno, col)
            referenced.add(child)
        children[node_id] = kids

    root = defs[0][1]
    if root in referenced:
        raise ParseError(f"root {root} may not be referenced")
    for node_id in children:
        if node_id != root and node_id not in referenced:
            raise ParseError(f"node {node_id} is unreachable from the root",
                             defined_at[node_id], 2)
    return Hierarchy(root=root, children=children, leaf_member=leaf_member)


def write_hierarchy(h: Hierarchy) -> str:
    """Canonical text form: internal nodes renumbered in preorder."""
    if h.is_leaf(h.root):
        return HIERARCHY_HEADER + "\n"
    order: list[str] = []
    rename: dict[str, str] = {}

    def visit(node: str) -> None:
        rename[node] = f"#{len(rename)}"
        order.append(node)
        for v in h.children[node]:
            if not h.is_leaf(v):
                visit(v)

    visit(h.root)
    out = [HIERARCHY_HEADER]
    for node in order:
        kids = " ".join(
            rename[v] if not h.is_leaf(v) else h.leaf_member[v]
            for v in h.children[node])
        out.append(f"node {rename[node]} {kids}")
    return "\n".join(out) + "\n"
