from pydantic import BaseModel, ConfigDict, Field
from typing import List, Optional, Dict, Any


class MeasureRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    fspec: str = Field(..., description="Function spec in tt:<n>:<hex> form")
    n: int = Field(..., ge=0, description="Arity")
    s0: Optional[int] = Field(None, description="Maximum sensitivity over 0-inputs")
    s1: Optional[int] = Field(None, description="Maximum sensitivity over 1-inputs")
    s: Optional[int] = Field(None, description="Sensitivity s(f)")
    avg_sensitivity: Optional[float] = Field(None, description="E_x[s_x(f)]")
    bs: Optional[int] = Field(None, description="Block sensitivity bs(f)")
    C0: Optional[int] = Field(None, description="Certificate complexity over 0-inputs")
    C1: Optional[int] = Field(None, description="Certificate complexity over 1-inputs")
    C: Optional[int] = Field(None, description="Certificate complexity C(f)")
    D: Optional[int] = Field(None, description="Deterministic query complexity D(f)")
    deg: Optional[int] = Field(None, description="Degree of the real multilinear representation")
    deg2: Optional[int] = Field(None, description="Degree over GF(2)")
    lambda_value: Optional[float] = Field(None, alias="lambda", description="Spectral sensitivity ||A_f||")
    koutsoupias: Optional[float] = Field(None, description="Norm of the 0-inputs x 1-inputs distance-1 block")
    adeg: Optional[int] = Field(None, description="epsilon-approximate degree (unit-interval convention)")
    adeg_epsilon: Optional[float] = Field(None, description="epsilon used for adeg")


class RelationInfo(BaseModel):
    id: str = Field(..., description="Relation identifier")
    citation: str = Field(..., description="Statement the relation checks")
    kind: str = Field(..., description="'le', 'eq' or 'holds'")
    max_arity: int = Field(..., description="Largest n the relation runs on")


class RelationFailure(BaseModel):
    relation: str = Field(..., description="Relation identifier")
    fspec: str = Field(..., description="Offending truth table, verbatim")
    lhs: Optional[float] = Field(None, description="Left-hand side value")
    rhs: Optional[float] = Field(None, description="Right-hand side value")
    detail: str = Field("", description="Error message or extra context")


class RelationSummary(BaseModel):
    id: str = Field(..., description="Relation identifier")
    citation: str = Field(..., description="Statement the relation checks")
    checked: int = Field(0, description="Functions evaluated")
    passed: int = Field(0, description="Functions satisfying the relation")
    failed: int = Field(0, description="Functions violating the relation")
    skipped: int = Field(0, description="Functions outside the relation's domain (e.g. constants)")
    worst_margin: Optional[float] = Field(None, description="Smallest rhs - lhs observed (negative is a violation)")


class CampaignReport(BaseModel):
    campaign_id: str = Field(..., description="Deterministic campaign identifier")
    mode: str = Field(..., description="'exhaustive' or 'random'")
    n: int = Field(..., description="Arity of the sampled functions")
    seed: int = Field(..., description="PRNG seed (PCG64 streams keyed by function index)")
    function_count: int = Field(..., description="Number of truth tables checked")
    relations: List[RelationSummary] = Field(default_factory=list, description="Per-relation statistics")
    failures: List[RelationFailure] = Field(default_factory=list, description="Every violation found")
    elapsed_seconds: Optional[float] = Field(None, description="Wall time, present only with --timing")

    @property
    def failure_count(self) -> int:
        return sum(r.failed for r in self.relations)


class SigningMatrixReport(BaseModel):
    n: int = Field(..., description="Dimension of the hypercube")
    size: int = Field(..., description="Matrix order 2^n")
    nonzeros: int = Field(..., description="Number of +/-1 entries")
    square_is_nI: bool = Field(..., description="B_n^2 = n I exactly")
    trace: int = Field(..., description="Trace of B_n")
    pattern_is_hypercube: bool = Field(..., description="Zero pattern equals the hypercube adjacency")
    matrix: Optional[List[List[int]]] = Field(None, description="Rows of B_n, present only with --emit-matrix")


class HuangWitnessReport(BaseModel):
    fspec: str = Field(..., description="Input function")
    restricted_to: List[int] = Field(..., description="Variables of the top monomial kept free")
    n: int = Field(..., description="Arity after restriction")
    v0_size: int = Field(..., description="|{x : f(x) = parity(x)}|")
    v1_size: int = Field(..., description="Size of the complement of V0")
    support_side: str = Field(..., description="Parity class carrying the witness")
    ratio: float = Field(..., description="||A_f v|| / ||v||")
    sqrt_n: float = Field(..., description="Target sqrt(n)")
    eigen_residual: float = Field(..., description="||B_n v - sqrt(n) v||")
    vanishing_residual: float = Field(..., description="max |v| on the smaller side")
    holds: bool = Field(..., description="ratio >= sqrt(n) - 1e-8")


class HadamardIdentityReport(BaseModel):
    fspec: str
    adjacency_identity_exact: bool = Field(..., description="2A_f = A_H - diag(g) A_H diag(g)")
    conjugation_residual: float = Field(..., description="max |H A_H H - (nI - 2X)|")
    top_eigenvalue: float = Field(..., description="Largest eigenvalue of RXR - X")
    lambda_value: float = Field(..., alias="lambda", description="Spectral sensitivity")
    holds: bool

    model_config = ConfigDict(populate_by_name=True)


class ComposeReport(BaseModel):
    f: str
    g: str
    composed: str = Field(..., description="Spec of f o g")
    lambda_f: float
    lambda_g: float
    lambda_composed: float
    deg_f: int
    deg_g: int
    deg_composed: int
    lambda_product_holds: bool = Field(..., description="lambda(f o g) = lambda(f) lambda(g) within tolerance")
    degree_product_holds: bool = Field(..., description="deg(f o g) = deg(f) deg(g)")


class CoefficientModel(BaseModel):
    vars: List[int] = Field(..., description="1-based variables of the monomial")
    value: float


class WitnessPolynomialModel(BaseModel):
    n: int
    convention: str
    epsilon: float
    coeffs: List[CoefficientModel]


class FarkasModel(BaseModel):
    degree: int = Field(..., description="Degree proven infeasible")
    delta: float = Field(..., description="Optimal uniform violation at that degree")
    gap: float = Field(..., description="u_hi.hi - u_lo.lo (negative certifies infeasibility)")
    residual: float = Field(..., description="max |Phi^T (u_hi - u_lo)|")
    valid: bool


class AdegReport(BaseModel):
    fspec: str
    epsilon: float
    convention: str
    degree: int
    slack: float = Field(..., description="Worst pointwise constraint margin of the witness")
    witness: WitnessPolynomialModel
    infeasible_below: Optional[FarkasModel] = Field(None, description="Certificate that degree - 1 is impossible")


class Gamma2CertificateModel(BaseModel):
    n: int
    d: int
    bound: float = Field(..., description="c(S) c(T)")
    band_holds: bool = Field(..., description="M_st = s - t whenever |s - t| <= d")
    S: Optional[List[List[int]]] = None
    T: Optional[List[List[int]]] = None
    M: Optional[List[List[int]]] = None


class ChainLinkModel(BaseModel):
    name: str
    lhs: float
    rhs: float
    holds: bool


class ChainReportModel(BaseModel):
    fspec: str
    epsilon: float
    degree: int
    lambda_value: float = Field(..., alias="lambda")
    bq_norm: float
    gamma2: float
    links: List[ChainLinkModel]
    holds: bool

    model_config = ConfigDict(populate_by_name=True)


class FormulaReport(BaseModel):
    formula: str = Field(..., description="Normalised formula")
    n: int = Field(..., description="Number of leaves")
    fspec: str = Field(..., description="Truth table")
    degree: int
    degree_equals_n: bool
    adeg: Optional[int] = None
    adeg_epsilon: Optional[float] = None
    adeg_lower_bound: Optional[float] = Field(None, description="(1 - 2 eps) sqrt(n)")
    adeg_window_holds: Optional[bool] = None


class GraphPropertyReport(BaseModel):
    name: str
    vertices: int
    edge_variables: int
    fspec: str
    invariant: Optional[bool] = None
    monotone: Optional[bool] = None
    nontrivial: Optional[bool] = None
    deg2: int
    deg: int
    lambda_value: float = Field(..., alias="lambda")
    s: int
    bs: Optional[int] = None
    C: Optional[int] = None
    D: Optional[int] = None
    query_lower_bound: float = Field(..., description="sqrt(deg2)")

    model_config = ConfigDict(populate_by_name=True)


class ErrorResponse(BaseModel):
    detail: str = Field(..., description="Error message")
    exit_code: int = Field(..., description="Process exit code")
    extra: Dict[str, Any] = Field(default_factory=dict)
