"""Shared orchestration for the CLI and the HTTP service.

Solving always reports cost under the instance's own oracle (exact subtree
cost on trees, MST-of-metric cost on graphs, table lookup) unless the
caller asks for the uniform message-count oracle instead, so a solve and a
subsequent evaluate of its output always agree.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleError, KhierError
from .exact import BruteForceConfig, brute_force_opt, uniform_optimal_build, weighted_lower_bound
from .instances import GenSpec, gen_random
from .model import (
    CostBreakdown,
    Hierarchy,
    Instance,
    eval_cost_total,
    hierarchy_ok,
    validate_hierarchy,
)
from .multicast import GraphOracle, TableOracle, TreeOracle, UniformOracle
from .rng import SplitMix64
from .routed import approx_graph, approx_tree
from .uniform import PtasParams, as_fraction, huffman_binary_build, ptas_build

ALGORITHMS = ("brute", "uniform-opt", "ptas", "huffman", "approx-tree", "approx-graph")
BASELINES = ("brute-opt", "lower-bound")
BRUTE_CAP_ENV = "KHIER_BRUTE_CAP"


def brute_config() -> BruteForceConfig:
    cap = os.environ.get(BRUTE_CAP_ENV)
    if cap is None:
        return BruteForceConfig()
    try:
        return BruteForceConfig(max_members=int(cap))
    except ValueError as exc:
        raise KhierError(f"bad {BRUTE_CAP_ENV}: {cap!r}") from exc


def build_oracle(instance: Instance, uniform: bool = False):
    if uniform:
        return UniformOracle()
    kind = instance.network.kind
    if kind == "tree":
        return TreeOracle(instance.network, instance.controller)
    if kind == "graph":
        return GraphOracle(instance.network, instance.controller, instance.members)
    return TableOracle(instance.network)


def solve(instance: Instance, algorithm: str, *, epsilon=Fraction(1, 2),
          gamma=Fraction(7), uniform_oracle: bool = False) -> tuple[Hierarchy, int]:
    """Run one construction algorithm and price its output."""
    if algorithm not in ALGORITHMS:
        raise KhierError(f"unknown algorithm {algorithm!r}")
    oracle = build_oracle(instance, uniform_oracle)
    epsilon = as_fraction(epsilon)

    if algorithm == "brute":
        return brute_force_opt(instance, oracle, brute_config())
    if algorithm == "uniform-opt":
        hierarchy = uniform_optimal_build(sorted(instance.members))
    elif algorithm == "ptas":
        weights = {m: instance.weights[m] for m in instance.members}
        hierarchy = ptas_build(weights, oracle, PtasParams(epsilon=epsilon))
    elif algorithm == "huffman":
        hierarchy = huffman_binary_build(
            {m: instance.weights[m] for m in instance.members})
    elif algorithm == "approx-tree":
        hierarchy = approx_tree(instance, epsilon)
    else:  # approx-graph
        hierarchy = approx_graph(instance, epsilon, gamma)
    cost = eval_cost_total(hierarchy, instance.weights, oracle).total
    return hierarchy, cost


def evaluate(instance: Instance, hierarchy: Hierarchy, *,
             uniform_oracle: bool = False) -> CostBreakdown:
    violations = validate_hierarchy(hierarchy, instance)
    if not hierarchy_ok(violations):
        problems = "; ".join(v.message for v in violations if v.severity == "error")
        raise InfeasibleError(f"invalid hierarchy: {problems}")
    oracle = build_oracle(instance, uniform_oracle)
    return eval_cost_total(hierarchy, instance.weights, oracle)


@dataclass(frozen=True)
class RatioRecord:
    n: int
    seed: int
    algorithm: str
    cost: int
    baseline: str
    baseline_value: int | float
    ratio: float


def ratio_sweep(algorithm: str, kind: str, n_range: tuple[int, int], trials: int,
                seed: int, *, epsilon=Fraction(1, 2), gamma=Fraction(7),
                uniform_oracle: bool = False, baseline: str = "brute-opt",
                max_weight: int = 10, max_edge_cost: int = 10,
                extra_edge_factor: float = 0.5) -> list[RatioRecord]:
    """Per-trial algorithm-vs-baseline costs over seeded random instances.

    Instance seeds are drawn from one splitmix64 stream in (n, trial)
    order, so a sweep is reproducible from its arguments alone.
    """
    if baseline not in BASELINES:
        raise KhierError(f"unknown baseline {baseline!r}")
    if baseline == "lower-bound" and not uniform_oracle:
        raise InfeasibleError("the lower-bound baseline is only valid "
                              "for the uniform oracle")
    if trials < 0:
        raise KhierError("trials must be non-negative")
    n_lo, n_hi = n_range
    if n_lo < 1 or n_hi < n_lo:
        raise KhierError(f"bad n range {n_lo}..{n_hi}")
    cap = brute_config().max_members
    if baseline == "brute-opt" and n_hi > cap:
        raise InfeasibleError(
            f"brute-opt baseline infeasible: n up to {n_hi} exceeds cap {cap}")

    master = SplitMix64(seed)
    records = []
    for n in range(n_lo, n_hi + 1):
        for _trial in range(trials):
            inst_seed = master.next_u64()
            instance = gen_random(GenSpec(
                kind, n, seed=inst_seed, max_weight=max_weight,
                max_edge_cost=max_edge_cost, extra_edge_factor=extra_edge_factor))
            _, cost = solve(instance, algorithm, epsilon=epsilon, gamma=gamma,
                            uniform_oracle=uniform_oracle)
            if baseline == "brute-opt":
                _, base_value = solve(instance, "brute",
                                      uniform_oracle=uniform_oracle)
            else:
                base_value = weighted_lower_bound(
                    {m: instance.weights[m] for m in instance.members})
            if base_value > 0:
                ratio = cost / base_value
            else:
                ratio = 1.0 if cost == 0 else math.inf
            records.append(RatioRecord(
                n=n, seed=inst_seed, algorithm=algorithm, cost=cost,
                baseline=baseline, baseline_value=base_value, ratio=ratio))
    return records


def ratio_csv(records: list[RatioRecord]) -> str:
    out = ["n,seed,alg,cost,baseline,baseline_value,ratio"]
    for r in records:
        base = r.baseline_value if isinstance(r.baseline_value, int) \
            else f"{r.baseline_value:.6f}"
        out.append(f"{r.n},{r.seed},{r.algorithm},{r.cost},{r.baseline},"
                   f"{base},{r.ratio:.6f}")
    return "\n".join(out) + "\n"
