"""HTTP front end: the same solve / evaluate / generate / ratio operations
as the CLI, with instances and hierarchies travelling as their file-format
text.  Run with ``uvicorn khier.service:app``.

Error mapping: malformed instance/hierarchy text answers 400; operations
that cannot run on an otherwise well-formed input (algorithm/network
mismatch, solver cap, failed validation, undefined oracle entries) answer
422.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import bench
from .errors import (
    BruteForceCapError,
    CostOverflowError,
    InfeasibleError,
    KhierError,
    OracleUndefinedError,
    ParseError,
)
from .instances import (
    GenSpec,
    ThreeDMatchingSpec,
    ThreePartitionSpec,
    gen_3dmatching,
    gen_3partition,
    gen_random,
    parse_hierarchy,
    parse_instance,
    write_hierarchy,
    write_instance,
)
from .uniform import as_fraction

app = FastAPI(title="khier", description="Multicast rekeying hierarchy service")

_INFEASIBLE = (InfeasibleError, BruteForceCapError, OracleUndefinedError,
               CostOverflowError)


def _run(fn):
    try:
        return fn()
    except ParseError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    except _INFEASIBLE as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    except (KhierError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


class SolveRequest(BaseModel):
    algorithm: str = Field(description="one of: " + ", ".join(bench.ALGORITHMS))
    instance: str = Field(description="instance file text")
    epsilon: str = "1/2"
    gamma: str = "7"
    uniform_oracle: bool = False


class SolveResponse(BaseModel):
    cost: int
    hierarchy: str


class EvaluateRequest(BaseModel):
    instance: str
    hierarchy: str
    uniform_oracle: bool = False


class EvaluateResponse(BaseModel):
    total: int
    per_member: dict[str, int]


class RandomGenRequest(BaseModel):
    kind: str = Field(description="random-tree or random-graph")
    n: int = 5
    seed: int = 0
    max_weight: int = 10
    max_edge_cost: int = 10
    extra_edge_factor: float = 0.5


class ThreePartitionRequest(BaseModel):
    sizes: list[int]
    bound: int
    base_weight: int = 50
    root_edge_cost: int = 1


class ThreeDMatchingRequest(BaseModel):
    q: int
    triples: list[tuple[int, int, int]]
    root_edge_cost: int = 1


class InstanceResponse(BaseModel):
    instance: str


class RatioRequest(BaseModel):
    algorithm: str
    kind: str
    n_min: int
    n_max: int
    trials: int
    seed: int = 0
    epsilon: str = "1/2"
    gamma: str = "7"
    uniform_oracle: bool = False
    baseline: str = "brute-opt"
    max_weight: int = 10
    max_edge_cost: int = 10
    extra_edge_factor: float = 0.5


class RatioRow(BaseModel):
    n: int
    seed: int
    algorithm: str
    cost: int
    baseline: str
    baseline_value: float
    ratio: float


class RatioResponse(BaseModel):
    csv: str
    rows: list[RatioRow]


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    def run():
        instance = parse_instance(req.instance)
        hierarchy, cost = bench.solve(
            instance, req.algorithm, epsilon=as_fraction(req.epsilon),
            gamma=as_fraction(req.gamma), uniform_oracle=req.uniform_oracle)
        return SolveResponse(cost=cost, hierarchy=write_hierarchy(hierarchy))

    return _run(run)


@app.post("/evaluate", response_model=EvaluateResponse)
def evaluate(req: EvaluateRequest) -> EvaluateResponse:
    def run():
        instance = parse_instance(req.instance)
        hierarchy = parse_hierarchy(req.hierarchy, instance)
        breakdown = bench.evaluate(instance, hierarchy,
                                   uniform_oracle=req.uniform_oracle)
        return EvaluateResponse(total=breakdown.total,
                                per_member=dict(sorted(breakdown.per_member.items())))

    return _run(run)


@app.post("/generate/random", response_model=InstanceResponse)
def generate_random(req: RandomGenRequest) -> InstanceResponse:
    def run():
        instance = gen_random(GenSpec(
            req.kind, req.n, seed=req.seed, max_weight=req.max_weight,
            max_edge_cost=req.max_edge_cost,
            extra_edge_factor=req.extra_edge_factor))
        return InstanceResponse(instance=write_instance(instance))

    return _run(run)


@app.post("/generate/three-partition", response_model=InstanceResponse)
def generate_three_partition(req: ThreePartitionRequest) -> InstanceResponse:
    def run():
        instance = gen_3partition(ThreePartitionSpec(
            sizes=tuple(req.sizes), bound=req.bound,
            base_weight=req.base_weight, root_edge_cost=req.root_edge_cost))
        return InstanceResponse(instance=write_instance(instance))

    return _run(run)


@app.post("/generate/three-d-matching", response_model=InstanceResponse)
def generate_three_d_matching(req: ThreeDMatchingRequest) -> InstanceResponse:
    def run():
        instance = gen_3dmatching(ThreeDMatchingSpec(
            q=req.q, triples=tuple(req.triples),
            root_edge_cost=req.root_edge_cost))
        return InstanceResponse(instance=write_instance(instance))

    return _run(run)


@app.post("/ratio", response_model=RatioResponse)
def ratio(req: RatioRequest) -> RatioResponse:
    def run():
        records = bench.ratio_sweep(
            req.algorithm, req.kind, (req.n_min, req.n_max), req.trials,
            req.seed, epsilon=as_fraction(req.epsilon),
            gamma=as_fraction(req.gamma), uniform_oracle=req.uniform_oracle,
            baseline=req.baseline, max_weight=req.max_weight,
            max_edge_cost=req.max_edge_cost,
            extra_edge_factor=req.extra_edge_factor)
        rows = [RatioRow(n=r.n, seed=r.seed, algorithm=r.algorithm, cost=r.cost,
                         baseline=r.baseline, baseline_value=float(r.baseline_value),
                         ratio=r.ratio) for r in records]
        return RatioResponse(csv=bench.ratio_csv(records), rows=rows)

    return _run(run)
