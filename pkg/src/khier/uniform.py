"""Hierarchy construction that ignores routing: weights are all that matter.

These builders assume a flat cost per multicast (a uniform oracle), so the
objective is the weighted number of messages.  ``huffman_binary_build`` is
the classic two-lightest merge and is 3-approximate on its own.
``ptas_build`` sharpens that to (1 + 3*eps): the heaviest few members are
solved exactly, the light tail is packed by repeated equal-weight triple
merges followed by Huffman merging, and the tail tree is hung below a
light, shallow node of the exact part.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import InfeasibleError, KhierError
from .exact import BruteForceConfig, optimal_hierarchy
from .model import Hierarchy, MulticastOracle, combine, graft, leaf

log = logging.getLogger(__name__)

Weight = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Exact rational from int, Fraction, or a decimal/ratio string.

    Floats are routed through str() so that e.g. 0.5 means 1/2 rather than
    its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value))


@dataclass(frozen=True)
class PtasParams:
    epsilon: Fraction = Fraction(1, 2)
    heavy_set_cap: int = 9

    def __post_init__(self):
        eps = as_fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        if self.heavy_set_cap < 1:
            raise ValueError("heavy_set_cap must be at least 1")

    @property
    def rounding_base(self) -> Fraction:
        return 1 + self.epsilon

    @property
    def depth_bound(self) -> int:
        return -((-1) // self.epsilon)  # ceil(1/eps)

    def heavy_count(self, n: int) -> int:
        exponent = -((-1) // self.epsilon ** 2)  # ceil(1/eps^2)
        if exponent > 60:
            # 3**exponent dwarfs any sane cap
            return min(self.heavy_set_cap, n)
        return min(3 ** exponent, self.heavy_set_cap, n)


def round_up_to_power(value: int, base: Fraction) -> Fraction:
    """Smallest power of base that is >= value (powers start at base**0 = 1)."""
    if value < 1:
        raise KhierError("weights must be positive")
    p = Fraction(1)
    while p < value:
        p *= base
    return p


def _tie_id(h: Hierarchy) -> str:
    return min(h.leaf_member.values())


def _sorted_pool(pool):
    return sorted(pool, key=lambda wh: (wh[0], _tie_id(wh[1])))


def triple_merge_pass(pool: list[tuple[Weight, Hierarchy]]) -> list[tuple[Weight, Hierarchy]]:
    """Merge any three equal-weight hierarchies until no triple remains.

    Scans in ascending (weight, smallest-leaf-id) order; a merge of three
    trees of weight w re-enters the pool at weight 3w.
    """
    work = _sorted_pool(pool)
    while True:
        merged = False
        for i in range(len(work) - 2):
            if work[i][0] == work[i + 1][0] == work[i + 2][0]:
                w = work[i][0]
                tree = combine([work[i][1], work[i + 1][1], work[i + 2][1]])
                del work[i:i + 3]
                work.append((3 * w, tree))
                work = _sorted_pool(work)
                merged = True
                break
        if not merged:
            return work


def _huffman_merge(pool: list[tuple[Weight, Hierarchy]]) -> tuple[Weight, Hierarchy]:
    """Repeatedly combine the two lightest entries; ties on smallest leaf id."""
    if not pool:
        raise KhierError("empty pool")
    work = _sorted_pool(pool)
    while len(work) > 1:
        (w1, t1), (w2, t2) = work[0], work[1]
        work = work[2:]
        work.append((w1 + w2, combine([t1, t2])))
        work = _sorted_pool(work)
    return work[0]


def huffman_binary_build(weights: Mapping[str, int]) -> Hierarchy:
    """Binary hierarchy by two-lightest merging (strictly binary for n >= 2)."""
    _check_positive(weights)
    pool = [(weights[m], leaf(m)) for m in sorted(weights)]
    return _huffman_merge(pool)[1]


def _check_positive(weights: Mapping[str, int]) -> None:
    if not weights:
        raise KhierError("no members")
    for m, w in weights.items():
        if w <= 0:
            raise KhierError(f"member {m} has non-positive weight")


def ptas_build(weights: Mapping[str, int], oracle: MulticastOracle,
               params: PtasParams | None = None) -> Hierarchy:
    """Near-optimal hierarchy for a uniform oracle.

    1. Split off the heavy set H: the min(3**ceil(1/eps^2), cap, n)
       heaviest members (ties by id); the rest form the light tail L.
    2. Round each tail weight up to the nearest power of (1 + eps); the
       rounded weights steer structure only, never reported costs.
    3. Triple-merge equal-rounded-weight tail trees, then Huffman-merge the
       remainder into a single tail tree.
    4. Solve H exactly and hang the tail tree from a node of the exact tree
       with rounded weight at most eps * W(S) and depth at most ceil(1/eps)
       (preferring lighter, then shallower, then smaller id; a leaf gets a
       spliced parent).  If no node qualifies the tail goes directly under
       the root, which is logged.
    """
    if params is None:
        params = PtasParams()
    if not getattr(oracle, "is_uniform", False):
        raise InfeasibleError("this construction requires a uniform oracle")
    _check_positive(weights)

    members = sorted(weights, key=lambda m: (-weights[m], m))
    h_count = params.heavy_count(len(members))
    heavy, light = members[:h_count], members[h_count:]

    exact_tree, _ = optimal_hierarchy({m: weights[m] for m in heavy}, oracle,
                                      BruteForceConfig())
    if not light:
        return exact_tree

    rounded = {m: round_up_to_power(weights[m], params.rounding_base) for m in light}
    pool = [(rounded[m], leaf(m)) for m in sorted(light)]
    pool = triple_merge_pass(pool)
    _, tail_tree = _huffman_merge(pool)

    # Structural weights: heavy members keep their originals, tail members
    # count at their rounded values.
    w_all = sum(weights[m] for m in heavy) + sum(rounded[m] for m in light)
    budget = params.epsilon * w_all
    leafsets = exact_tree.subtree_members()
    depths = exact_tree.depths()
    candidates = []
    for node in sorted(exact_tree.nodes()):
        node_w = sum(weights[m] for m in leafsets[node])
        if node_w <= budget and depths[node] <= params.depth_bound:
            candidates.append((node_w, depths[node], node))
    if candidates:
        _, _, at_node = min(candidates)
    else:
        at_node = exact_tree.root
        log.info("no light shallow node available; attaching tail at the root")
    return graft(exact_tree, at_node, tail_tree)
