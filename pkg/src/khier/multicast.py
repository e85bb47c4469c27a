"""Routing networks and multicast-cost oracles.

A multicast-cost oracle is any callable mapping a member subset to a
non-negative integer; the empty subset always costs 0.  Three concrete
oracles are provided:

* ``TreeOracle`` -- exact cost on a tree network: the weight of the minimal
  subtree connecting the controller to the subset.
* ``GraphOracle`` -- on a general graph the cost is *defined* as the weight
  of a minimum spanning tree of the shortest-path metric on the subset plus
  the controller (a 2-approximation of the optimal Steiner multicast).
* ``TableOracle`` -- explicit per-subset costs, for fixtures and file input.

``UniformOracle`` charges a flat amount per multicast regardless of the
subset, which models counting messages instead of routed cost.

All distances and costs are integers.  MST ties are broken on
(cost, smaller endpoint, larger endpoint) so every construction here is
reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import NetworkError, OracleUndefinedError

TREE = "tree"
GRAPH = "graph"
TABLE = "table"
KINDS = (TREE, GRAPH, TABLE)


def _edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class RoutingNetwork:
    """Undirected routing network: a tree, a general graph, or a cost table."""

    kind: str
    vertices: frozenset[str]
    edges: Mapping[tuple[str, str], int]
    table: Mapping[frozenset[str], int]

    @classmethod
    def tree(cls, edges: Iterable[tuple[str, str, int]]) -> "RoutingNetwork":
        return cls._from_edges(TREE, edges)

    @classmethod
    def graph(cls, edges: Iterable[tuple[str, str, int]]) -> "RoutingNetwork":
        return cls._from_edges(GRAPH, edges)

    @classmethod
    def from_table(cls, entries: Mapping[Iterable[str], int],
                   vertices: Iterable[str]) -> "RoutingNetwork":
        table = {frozenset(k): int(c) for k, c in entries.items()}
        for subset, cost in table.items():
            if cost < 0:
                raise NetworkError("negative multicast cost in table")
        return cls(TABLE, frozenset(vertices), {}, table)

    @classmethod
    def _from_edges(cls, kind, edges):
        emap: dict[tuple[str, str], int] = {}
        verts = set()
        for u, v, cost in edges:
            if u == v:
                raise NetworkError(f"self-loop at vertex {u}")
            if int(cost) < 0:
                raise NetworkError(f"negative cost on edge ({u}, {v})")
            key = _edge_key(u, v)
            if key in emap:
                raise NetworkError(f"duplicate edge ({key[0]}, {key[1]})")
            emap[key] = int(cost)
            verts.add(u)
            verts.add(v)
        return cls(kind, frozenset(verts), emap, {})

    def adjacency(self) -> dict[str, list[tuple[str, int]]]:
        adj: dict[str, list[tuple[str, int]]] = {v: [] for v in self.vertices}
        for (u, v), cost in self.edges.items():
            adj[u].append((v, cost))
            adj[v].append((u, cost))
        for lst in adj.values():
            lst.sort()
        return adj

    def check_connected(self) -> None:
        if not self.vertices:
            return
        adj = self.adjacency()
        start = min(self.vertices)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if seen != self.vertices:
            missing = sorted(self.vertices - seen)
            raise NetworkError(f"network is disconnected (unreachable: {missing})")

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise NetworkError(f"unknown network kind {self.kind!r}")
        if self.kind == TABLE:
            if self.edges:
                raise NetworkError("table networks carry no edges")
            return
        self.check_connected()
        if self.kind == TREE and len(self.edges) != max(len(self.vertices) - 1, 0):
            raise NetworkError("tree network has a cycle")


@dataclass(frozen=True)
class Metric:
    """Pairwise shortest-path distances among a point set rooted at the controller."""

    root: str
    points: tuple[str, ...]
    dist: Mapping[tuple[str, str], int]

    def distance(self, u: str, v: str) -> int:
        if u == v:
            return 0
        return self.dist[_edge_key(u, v)]

    def restrict(self, points: Iterable[str]) -> "Metric":
        keep = frozenset(points) | {self.root}
        sub = tuple(sorted(keep))
        dist = {
            (u, v): self.dist[(u, v)]
            for (u, v) in self.dist
            if u in keep and v in keep
        }
        return Metric(self.root, sub, dist)


@dataclass(frozen=True)
class SpanningTree:
    """Rooted spanning tree given by parent pointers with per-edge costs."""

    root: str
    parent: Mapping[str, str]
    edge_cost: Mapping[str, int]

    def vertices(self) -> frozenset[str]:
        return frozenset(self.parent) | {self.root}

    def total_weight(self) -> int:
        return sum(self.edge_cost.values())

    def children_map(self) -> dict[str, list[str]]:
        kids: dict[str, list[str]] = {v: [] for v in self.vertices()}
        for v, p in self.parent.items():
            kids[p].append(v)
        for lst in kids.values():
            lst.sort()
        return kids

    def root_distances(self) -> dict[str, int]:
        dists = {self.root: 0}
        kids = self.children_map()
        stack = [self.root]
        while stack:
            u = stack.pop()
            for v in kids[u]:
                dists[v] = dists[u] + self.edge_cost[v]
                stack.append(v)
        return dists

    def edge_list(self) -> list[tuple[str, str, int]]:
        return sorted((*_edge_key(v, p), self.edge_cost[v]) for v, p in self.parent.items())


@dataclass(frozen=True)
class LastParams:
    """Stretch/lightness trade-off for light approximate shortest-path trees.

    For gamma > 0 the construction guarantees per-vertex stretch
    alpha = 1 + sqrt(2)*gamma and total weight within
    beta = 1 + sqrt(2)/gamma of the MST.  Both guarantees are checked with
    exact arithmetic by comparing squared quantities, so sqrt(2) never
    appears as a float in any decision.
    """

    gamma: Fraction = Fraction(7)

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def alpha(self) -> float:
        return float(1 + 2 ** 0.5 * self.gamma)

    @property
    def beta(self) -> float:
        return float(1 + 2 ** 0.5 / self.gamma)

    def stretch_ok(self, tree_dist: int, metric_dist: int) -> bool:
        """tree_dist <= (1 + sqrt(2)*gamma) * metric_dist, exactly."""
        if tree_dist <= metric_dist:
            return True
        gap = Fraction(tree_dist - metric_dist)
        return gap * gap <= 2 * self.gamma * self.gamma * metric_dist * metric_dist

    def lightness_ok(self, tree_weight: int, mst_weight: int) -> bool:
        """tree_weight <= (1 + sqrt(2)/gamma) * mst_weight, exactly."""
        if tree_weight <= mst_weight:
            return True
        gap = Fraction(tree_weight - mst_weight)
        return gap * gap * self.gamma * self.gamma <= 2 * mst_weight * mst_weight


def _rooted_tree(network: RoutingNetwork, controller: str):
    """Parent/cost maps of the tree network rooted at the controller."""
    if controller not in network.vertices:
        raise NetworkError(f"controller {controller} is not a network vertex")
    adj = network.adjacency()
    parent: dict[str, str] = {}
    cost: dict[str, int] = {}
    seen = {controller}
    stack = [controller]
    while stack:
        u = stack.pop()
        for v, c in adj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                cost[v] = c
                stack.append(v)
    if seen != network.vertices:
        raise NetworkError("tree network is disconnected")
    return parent, cost


def tree_multicast_cost(network: RoutingNetwork, controller: str,
                        members: Iterable[str]) -> int:
    """Weight of the minimal subtree connecting the controller to the members."""
    if network.kind != TREE:
        raise NetworkError("exact subtree cost requires a tree network")
    parent, cost = _rooted_tree(network, controller)
    return _subtree_cost(parent, cost, controller, members, network.vertices)


def _subtree_cost(parent, cost, controller, members, vertices) -> int:
    total = 0
    covered = {controller}
    for m in sorted(set(members)):
        if m not in vertices:
            raise NetworkError(f"unknown member {m}")
        v = m
        while v not in covered:
            covered.add(v)
            total += cost[v]
            v = parent[v]
    return total


def dijkstra(network: RoutingNetwork, source: str) -> dict[str, int]:
    adj = network.adjacency()
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, c in adj[u]:
            nd = d + c
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def metric_closure(network: RoutingNetwork, controller: str,
                   members: Iterable[str]) -> Metric:
    """All-pairs shortest-path distances among members plus the controller."""
    if network.kind == TABLE:
        raise NetworkError("table networks have no metric closure")
    points = sorted(set(members) | {controller})
    for p in points:
        if p not in network.vertices:
            raise NetworkError(f"unknown vertex {p}")
    dist: dict[tuple[str, str], int] = {}
    for i, u in enumerate(points):
        du = dijkstra(network, u)
        for v in points[i + 1:]:
            if v not in du:
                raise NetworkError(f"network is disconnected: no path {u} -> {v}")
            dist[(u, v)] = du[v]
    return Metric(controller, tuple(points), dist)


def mst_of_metric(metric: Metric) -> SpanningTree:
    """Minimum spanning tree of the closure, rooted at the metric's controller.

    Kruskal with ties broken on (cost, smaller id, larger id).
    """
    points = metric.points
    if len(points) == 1:
        return SpanningTree(metric.root, {}, {})
    edges = sorted(
        (metric.distance(u, v), u, v)
        for i, u in enumerate(points)
        for v in points[i + 1:]
    )
    comp = {p: p for p in points}

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    chosen = []
    for cost, u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            comp[ru] = rv
            chosen.append((u, v, cost))
            if len(chosen) == len(points) - 1:
                break
    return _root_edges(metric.root, points, chosen)


def _root_edges(root, points, chosen) -> SpanningTree:
    adj: dict[str, list[tuple[str, int]]] = {p: [] for p in points}
    for u, v, cost in chosen:
        adj[u].append((v, cost))
        adj[v].append((u, cost))
    for lst in adj.values():
        lst.sort()
    parent: dict[str, str] = {}
    ecost: dict[str, int] = {}
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v, c in adj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                ecost[v] = c
                stack.append(v)
    return SpanningTree(root, parent, ecost)


def graph_multicast_cost(network: RoutingNetwork, controller: str,
                         members: Iterable[str]) -> int:
    """MST weight of the shortest-path metric on the members plus the controller."""
    subset = set(members)
    if not subset:
        return 0
    return mst_of_metric(metric_closure(network, controller, subset)).total_weight()


def table_multicast_cost(network: RoutingNetwork, members: Iterable[str]) -> int:
    if network.kind != TABLE:
        raise NetworkError("table lookup requires a table network")
    subset = frozenset(members)
    if not subset:
        return 0
    try:
        return network.table[subset]
    except KeyError:
        raise OracleUndefinedError(subset) from None


def build_last(metric: Metric, controller: str,
               params: LastParams | None = None) -> SpanningTree:
    """Light approximate shortest-path tree over the metric closure.

    Walks an Euler tour of the closure's MST, relaxing tentative distances
    along the tour; whenever a vertex is discovered with tentative distance
    worse than alpha times its metric distance from the controller, the
    direct closure edge from the controller is grafted in instead.  The
    parent pointers left by the relaxations form the output tree, which
    satisfies the per-vertex alpha stretch and global beta lightness bounds
    of ``LastParams``.  If the MST already meets every stretch bound it is
    returned unchanged.
    """
    if params is None:
        params = LastParams()
    mst = mst_of_metric(metric)
    if controller != metric.root:
        raise NetworkError("LAST controller must be the metric root")
    kids = mst.children_map()
    d = {controller: 0}
    parent: dict[str, str] = {}

    def relax(u, v):
        cand = d[u] + metric.distance(u, v)
        if v not in d or cand < d[v]:
            d[v] = cand
            parent[v] = u

    def walk(u):
        for v in kids[u]:
            relax(u, v)
            if not params.stretch_ok(d[v], metric.distance(controller, v)):
                d[v] = metric.distance(controller, v)
                parent[v] = controller
            walk(v)
            relax(v, u)

    walk(controller)
    ecost = {v: metric.distance(v, p) for v, p in parent.items()}
    return SpanningTree(controller, parent, ecost)


class UniformOracle:
    """Flat cost per multicast: M(Y) = value for every non-empty Y."""

    is_uniform = True

    def __init__(self, value: int = 1):
        if value < 0:
            raise ValueError("multicast cost must be non-negative")
        self.value = value

    def __call__(self, members: Iterable[str]) -> int:
        return self.value if frozenset(members) else 0


class TreeOracle:
    """Exact multicast cost on a tree network, cached per subset."""

    is_uniform = False

    def __init__(self, network: RoutingNetwork, controller: str):
        if network.kind != TREE:
            raise NetworkError("TreeOracle requires a tree network")
        self._parent, self._cost = _rooted_tree(network, controller)
        self._controller = controller
        self._vertices = network.vertices
        self._cache: dict[frozenset[str], int] = {}

    def __call__(self, members: Iterable[str]) -> int:
        key = frozenset(members)
        if key not in self._cache:
            self._cache[key] = _subtree_cost(
                self._parent, self._cost, self._controller, key, self._vertices)
        return self._cache[key]


class GraphOracle:
    """MST-of-closure multicast cost; the full closure is computed once."""

    is_uniform = False

    def __init__(self, network: RoutingNetwork, controller: str,
                 members: Iterable[str]):
        self.metric = metric_closure(network, controller, members)
        self._cache: dict[frozenset[str], int] = {}

    def __call__(self, members: Iterable[str]) -> int:
        key = frozenset(members)
        if not key:
            return 0
        if key not in self._cache:
            sub = self.metric.restrict(key)
            self._cache[key] = mst_of_metric(sub).total_weight()
        return self._cache[key]


class TableOracle:
    is_uniform = False

    def __init__(self, network: RoutingNetwork):
        if network.kind != TABLE:
            raise NetworkError("TableOracle requires a table network")
        self._network = network

    def __call__(self, members: Iterable[str]) -> int:
        return table_multicast_cost(self._network, members)
