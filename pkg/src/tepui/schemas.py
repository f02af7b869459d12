"""Request and response models for the HTTP service and the CLI client.

These model the wire envelopes only; semantic validation (polynomial
syntax, shape consistency, domain rules) lives in jsonio and the core
modules, which raise TepuiError subclasses that the service maps to
status codes and the CLI maps to exit codes.
"""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

Coordinate = Union[str, int, float]


class BundlePiece(BaseModel):
    cell: List[List[Any]] = Field(default_factory=list)
    generators: List[List[str]] = Field(default_factory=list)


class BundlePayload(BaseModel):
    vars: List[str]
    ambient_rank: int
    pieces: List[BundlePiece]
    domain: Optional[List[List[Optional[Coordinate]]]] = None


class FPModulePayload(BaseModel):
    kind: Literal["module"] = "module"
    vars: List[str]
    free_rank: int
    presentation: List[List[str]]


class SectionModulePayload(BaseModel):
    vars: List[str]
    ambient: int
    columns: List[List[str]]


class MapPayload(BaseModel):
    source_vars: List[str]
    target_vars: List[str]
    components: List[str]


class AlgebroidPayload(BaseModel):
    vars: List[str]
    rank: int
    anchor: List[List[str]]
    c: List[List[Union[int, str]]] = Field(default_factory=list)


class JetFactorPayload(BaseModel):
    kind: Literal["module", "flat"]
    vars: List[str]
    free_rank: Optional[int] = None
    presentation: Optional[List[List[str]]] = None
    cell: Optional[List[List[Any]]] = None


class FPathSegment(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: List[Coordinate] = Field(alias="lambda")
    t: float


class FPathPayload(BaseModel):
    start: List[float]
    segments: List[FPathSegment]


# ------------------------------------------------------------------ requests

class FiberRequest(BaseModel):
    bundle: BundlePayload
    point: List[Coordinate]


class RankMapRequest(BaseModel):
    bundle: BundlePayload
    box: List[List[Coordinate]]
    step: Coordinate


class TensorRequest(BaseModel):
    left: BundlePayload
    right: BundlePayload


class PullbackRequest(BaseModel):
    bundle: BundlePayload
    map: MapPayload
    source_domain: Optional[List[List[Optional[Coordinate]]]] = None
    samples: Optional[int] = None
    seed: Optional[int] = None


class InvisibleRequest(BaseModel):
    module: FPModulePayload
    element: List[str]
    samples: Optional[int] = None
    seed: Optional[int] = None


class FibdetRequest(BaseModel):
    module: FPModulePayload


class CheckRequest(BaseModel):
    algebroid: AlgebroidPayload
    ideal: Optional[SectionModulePayload] = None
    obstruction: bool = False
    bound: int = 2


class SynthesizeRequest(BaseModel):
    vars: List[str]
    anchor: List[List[str]]


class BaseChangeRequest(BaseModel):
    v_rank: int
    subbundle: SectionModulePayload
    map: MapPayload
    point: List[Coordinate]
    order: int
    pointwise_model: Optional[List[List[str]]] = None


class JetTensorRequest(BaseModel):
    left: JetFactorPayload
    right: JetFactorPayload
    point: List[Coordinate]
    order: int


class LeafRequest(BaseModel):
    vars: List[str]
    gens: List[List[str]]
    start: List[float]
    step_time: float
    depth: int
    step: Optional[float] = None
    dedup_tol: Optional[float] = None


class TransportRequest(BaseModel):
    vars: List[str]
    gens: List[List[str]]
    path: FPathPayload
    w0: List[float]
    step: Optional[float] = None
    nodes: int = 100


class FixturesRequest(BaseModel):
    names: Optional[List[str]] = None
    data_dir: Optional[str] = None


# ----------------------------------------------------------------- responses

class FiberResponse(BaseModel):
    dim: int


class RankMapResponse(BaseModel):
    nodes: List[List[str]]
    dims: List[int]
    semicontinuity: Literal["pass", "fail"]
    csv: str


class BundleResponse(BaseModel):
    bundle: BundlePayload


class InvisibleResponse(BaseModel):
    status: str
    witness: Optional[List[str]] = None
    certificate: Optional[str] = None
    samples_used: int = 0


class FibdetResponse(BaseModel):
    invisible_generators: List[List[str]]
    quotient: FPModulePayload
    smith_diag: List[str]
    rho: List[Optional[str]]


class LeibnizWitness(BaseModel):
    frame_a: int
    frame_b: int
    function: str
    defect: List[str]


class JacobiEntry(BaseModel):
    triple: List[int]
    section: List[str]


class IdealWitness(BaseModel):
    generator: List[str]
    frame: int
    bracket: List[str]


class ObstructionWitnessPayload(BaseModel):
    frame: int
    section: List[str]
    bracket: List[str]
    point: List[str]


class CheckResponse(BaseModel):
    leibniz: bool
    leibniz_witness: Optional[LeibnizWitness] = None
    jacobi_zero: bool
    jacobi: List[JacobiEntry] = Field(default_factory=list)
    weak_jacobi: bool
    ideal: Optional[bool] = None
    ideal_witness: Optional[IdealWitness] = None
    obstruction_checked: bool = False
    obstruction_witness: Optional[ObstructionWitnessPayload] = None


class SynthesizeResponse(BaseModel):
    algebroid: AlgebroidPayload
    leibniz: bool
    weak_jacobi: bool


class BaseChangeResponse(BaseModel):
    alpha_D_surjective_at_order_k: bool
    ker_alpha_nontrivial: bool
    witness: Optional[List[str]] = None


class JetTensorResponse(BaseModel):
    dim: int


class LeafResponse(BaseModel):
    points: List[List[float]]
    ranks: List[int]
    rank_constant: bool
    csv: str


class TransportResponse(BaseModel):
    point: List[float]
    representative: List[float]
    raw: List[float]
    residual: float
    rank: int


class FixtureRow(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class FixturesResponse(BaseModel):
    results: List[FixtureRow]
    ok: bool


class ErrorResponse(BaseModel):
    error: str
    detail: str
    exit_code: int


REQUEST_MODELS: Dict[str, type] = {
    "fiber": FiberRequest,
    "rankmap": RankMapRequest,
    "tensor": TensorRequest,
    "pullback": PullbackRequest,
    "invisible": InvisibleRequest,
    "fibdet": FibdetRequest,
    "check": CheckRequest,
    "synthesize": SynthesizeRequest,
    "basechange": BaseChangeRequest,
    "jettensor": JetTensorRequest,
    "leaf": LeafRequest,
    "transport": TransportRequest,
    "fixtures": FixturesRequest,
}
