"""Ground truth for small instances.

``optimal_hierarchy`` finds a minimum-cost hierarchy by recursing over all
set partitions of the member set (every rooted tree whose internal nodes
have two or more children corresponds to exactly one chain of such
partitions), memoized on the member subset.  That keeps the search at
Bell-number scale while still covering every tree shape, so nine members
finish in well under a second.  ``uniform_optimal_build`` /
``uniform_optimal_cost_f`` give the closed-form optimum for equal weights
under a flat per-multicast cost, and ``weighted_lower_bound`` the
information-style floor 3 * w * log3(W/w) summed over members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import BruteForceCapError, InfeasibleError, KhierError
from .model import Hierarchy, Instance, MulticastOracle, combine, leaf

DEFAULT_MAX_MEMBERS = 9


@dataclass(frozen=True)
class BruteForceConfig:
    max_members: int = DEFAULT_MAX_MEMBERS
    degree_restriction: frozenset[int] | None = None

    def __post_init__(self):
        if self.max_members < 1:
            raise ValueError("max_members must be at least 1")
        if self.degree_restriction is not None and set(self.degree_restriction) != {2, 3}:
            raise ValueError("the only supported degree restriction is {2, 3}")


def _partitions(elems: tuple[str, ...]):
    """Every partition of elems into unordered non-empty blocks."""
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1:]
        yield part + [[first]]


def optimal_hierarchy(weights: Mapping[str, int], oracle: MulticastOracle,
                      cfg: BruteForceConfig | None = None) -> tuple[Hierarchy, int]:
    """Exhaustive minimum-cost hierarchy over the weighted members.

    Deterministic: among equal-cost optima the one with the smallest
    sorted serialized form wins, and children are emitted in that order.
    """
    if cfg is None:
        cfg = BruteForceConfig()
    members = tuple(sorted(weights))
    if not members:
        raise KhierError("no members")
    if len(members) > cfg.max_members:
        raise BruteForceCapError(
            f"{len(members)} members exceed the exact-solver cap {cfg.max_members}")
    if cfg.degree_restriction is not None and not getattr(oracle, "is_uniform", False):
        raise InfeasibleError("degree restriction is valid only for uniform oracles")
    allowed = cfg.degree_restriction

    mcost: dict[frozenset[str], int] = {}

    def m(block: frozenset[str]) -> int:
        if block not in mcost:
            mcost[block] = oracle(block)
        return mcost[block]

    memo: dict[frozenset[str], tuple[int, str, Hierarchy]] = {}

    def best(subset: frozenset[str]) -> tuple[int, str, Hierarchy]:
        if subset in memo:
            return memo[subset]
        if len(subset) == 1:
            (only,) = subset
            result = (0, only, leaf(only))
        else:
            elems = tuple(sorted(subset))
            w_total = sum(weights[x] for x in elems)
            champion = None
            for part in _partitions(elems):
                k = len(part)
                if k < 2 or (allowed is not None and k not in allowed):
                    continue
                blocks = [frozenset(b) for b in part]
                cost = w_total * sum(m(b) for b in blocks)
                subs = []
                for b in blocks:
                    c, serial, tree = best(b)
                    cost += c
                    subs.append((serial, tree))
                if champion is not None and cost > champion[0]:
                    continue
                subs.sort(key=lambda st: st[0])
                serial = "(" + ",".join(s for s, _ in subs) + ")"
                cand = (cost, serial, subs)
                if champion is None or (cost, serial) < (champion[0], champion[1]):
                    champion = cand
            cost, serial, subs = champion
            result = (cost, serial, combine([tree for _, tree in subs]))
        memo[subset] = result
        return result

    cost, _, tree = best(frozenset(members))
    return tree, cost


def brute_force_opt(instance: Instance, oracle: MulticastOracle,
                    cfg: BruteForceConfig | None = None) -> tuple[Hierarchy, int]:
    weights = {m: instance.weights[m] for m in instance.members}
    return optimal_hierarchy(weights, oracle, cfg)


def uniform_optimal_build(members: Sequence[str]) -> Hierarchy:
    """Balanced ternary optimum for equal weights under flat multicast cost.

    Up to three members sit flat under the root; larger sets split into
    three groups of near-equal size (floor(n/3) or ceil(n/3)), recursively.
    """
    ordered = tuple(members)
    if not ordered:
        raise KhierError("no members")
    if len(set(ordered)) != len(ordered):
        raise KhierError("duplicate member ids")

    def build(chunk: tuple[str, ...]) -> Hierarchy:
        n = len(chunk)
        if n == 1:
            return leaf(chunk[0])
        if n <= 3:
            return combine([leaf(m) for m in chunk])
        q, r = divmod(n, 3)
        sizes = [q + 1] * r + [q] * (3 - r)
        parts = []
        at = 0
        for s in sizes:
            parts.append(build(chunk[at:at + s]))
            at += s
        return combine(parts)

    return build(ordered)


@lru_cache(maxsize=None)
def uniform_optimal_cost_f(n: int) -> int:
    """Cost of the balanced ternary optimum for n equal-weight members."""
    if n < 1:
        raise KhierError("n must be at least 1")
    k, depth = 1, 0
    while k * 3 <= n:
        k *= 3
        depth += 1
    if n < 2 * k:
        return 3 * n * depth + 4 * (n - k)
    return 3 * n * depth + 5 * n - 6 * k


def weighted_lower_bound(weights: Mapping[str, int]) -> float:
    """Floor on the optimal cost under any flat multicast cost of 1.

    Sum of 3 * w * log3(W / w) over the members.  The logarithm makes this
    a float; callers compare with about 1e-9 relative slack.
    """
    total = 0
    for member, w in weights.items():
        if w <= 0:
            raise KhierError(f"member {member} has non-positive weight")
        total += w
    log3 = math.log(3)
    return sum(3 * w * (math.log(total) - math.log(w)) / log3 for w in weights.values())
