"""
Registry of the relations the verification harness checks.

Every relation is a ``Relation`` record holding an identifier, the
statement it checks, its kind (an inequality ``lhs <= rhs``, an equality,
or a pass/fail construction check), an arity cap and an evaluator.  The
evaluator receives a ``MeasureContext``, which computes each measure of
the function at most once no matter how many relations ask for it.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..core.config import settings
from ..core.errors import ArityCapError, UnknownRelationError
from ..core.polynomial import degree, degree_gf2, top_monomial_restriction
from ..core.truth_table import TruthTable, compose
from .adversary import (
    check_feasible,
    composed_eigenvector,
    sample_mm1_objectives,
    sqrt_sensitivity_scheme,
    swa1_witness,
)
from .approx import ADEG_MAX_ARITY, approx_degree
from .combinatorial import (
    BS_MAX_ARITY,
    CERT_MAX_ARITY,
    DQ_MAX_ARITY,
    PointMeasures,
    block_sensitivity,
    certificate_complexity,
    det_query_complexity,
    sensitivity,
)
from .gamma2 import certificate_chain
from .spectral import (
    HUANG_WITNESS_MAX_ARITY,
    IDENTITY_MAX_ARITY,
    SensitivityGraph,
    hadamard_identities,
    huang_witness,
    koutsoupias,
    sensitivity_graph,
    spectral_adversary_witness,
    spectral_sensitivity,
)

logger = logging.getLogger(__name__)

SPECTRAL_MAX_ARITY = 10
COMPOSITION_MAX_ARITY = 6
DEGREE_MAX_ARITY = 16
# random feasible MM1 schemes drawn per function
MM1_DRAWS = 500


class MeasureContext:
    """Lazily computed measures of one function, shared across relations."""

    def __init__(self, f: TruthTable, rng_factory: Optional[Callable[[int], np.random.Generator]] = None):
        self.f = f
        self._rng_factory = rng_factory or (lambda key: np.random.default_rng(key))

    def rng(self, key: int) -> np.random.Generator:
        return self._rng_factory(key)

    @cached_property
    def graph(self) -> SensitivityGraph:
        return sensitivity_graph(self.f)

    @cached_property
    def sens(self) -> PointMeasures:
        return sensitivity(self.f)

    @cached_property
    def bs(self) -> int:
        return block_sensitivity(self.f).bs

    @cached_property
    def cert(self) -> PointMeasures:
        return certificate_complexity(self.f)

    @cached_property
    def d(self) -> int:
        return det_query_complexity(self.f)

    @cached_property
    def deg(self) -> int:
        return degree(self.f)

    @cached_property
    def deg2(self) -> int:
        return degree_gf2(self.f)

    @cached_property
    def lam(self) -> float:
        return spectral_sensitivity(self.f, graph=self.graph).value

    @cached_property
    def adeg(self) -> int:
        return approx_degree(self.f).degree


@dataclass(frozen=True)
class Outcome:
    passed: bool
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    margin: Optional[float] = None
    skipped: bool = False
    detail: str = ""


@dataclass(frozen=True)
class Relation:
    id: str
    citation: str
    kind: str
    max_arity: int
    evaluate: Callable[[MeasureContext, float], Outcome] = field(repr=False)
    # relations whose tolerance is fixed regardless of --tolerance
    tolerance: Optional[float] = None

    def check(self, ctx: MeasureContext, tolerance: Optional[float] = None) -> Outcome:
        tol = self.tolerance if self.tolerance is not None else (
            tolerance if tolerance is not None else settings.TOLERANCE
        )
        return self.evaluate(ctx, tol)


def _le(lhs: float, rhs: float, tol: float) -> Outcome:
    lhs, rhs = float(lhs), float(rhs)
    return Outcome(lhs <= rhs + tol, lhs, rhs, rhs - lhs)


def _eq(lhs: float, rhs: float, tol: float) -> Outcome:
    lhs, rhs = float(lhs), float(rhs)
    gap = abs(lhs - rhs)
    return Outcome(gap <= tol, lhs, rhs, -gap)


def _skip(reason: str) -> Outcome:
    return Outcome(True, skipped=True, detail=reason)


def _composition_lambda(ctx: MeasureContext, tol: float) -> Outcome:
    # inner function: a random non-constant 2-bit function
    rng = ctx.rng(1)
    while True:
        g = TruthTable.from_values(rng.integers(0, 2, size=4))
        if not g.is_constant:
            break
    lam_g = spectral_sensitivity(g).value
    lam_fg = spectral_sensitivity(compose(ctx.f, g)).value
    outcome = _eq(lam_fg, ctx.lam * lam_g, tol)
    return Outcome(outcome.passed, outcome.lhs, outcome.rhs, outcome.margin, detail=f"g={g.spec}")


def _composed_eigenvector(ctx: MeasureContext, tol: float) -> Outcome:
    if ctx.f.is_constant:
        return _skip("constant function")
    rng = ctx.rng(2)
    while True:
        g = TruthTable.from_values(rng.integers(0, 2, size=4))
        if not g.is_constant:
            break
    check = composed_eigenvector(ctx.f, g)
    target = check.lambda_f * check.lambda_g
    return Outcome(check.holds, check.rayleigh, target, check.rayleigh - target, detail=f"g={g.spec}")


def _swa1(ctx: MeasureContext, tol: float) -> Outcome:
    if ctx.f.is_constant:
        return _skip("constant function")
    witness = swa1_witness(ctx.f)
    return _eq(witness.value, witness.lambda_value, tol)


def _mm1(ctx: MeasureContext, tol: float) -> Outcome:
    if ctx.f.is_constant:
        return _skip("constant function")
    scheme = sqrt_sensitivity_scheme(ctx.f)
    check_feasible(ctx.f, scheme)
    objectives = sample_mm1_objectives(ctx.f, ctx.rng(3), MM1_DRAWS)
    outcome = _le(ctx.lam, min(scheme.objective(), float(objectives.min())), tol)
    return replace(outcome, detail=f"{objectives.size + 1} feasible schemes")


def _sqrt_scheme(ctx: MeasureContext, tol: float) -> Outcome:
    if ctx.f.is_constant:
        return _skip("constant function")
    objective = sqrt_sensitivity_scheme(ctx.f).objective()
    return _eq(objective, np.sqrt(ctx.sens.s0 * ctx.sens.s1), tol)


def _hadamard(ctx: MeasureContext, tol: float) -> Outcome:
    check = hadamard_identities(ctx.f)
    return Outcome(check.holds, check.top_eigenvalue, check.lambda_value, -check.eigen_gap,
                   detail="" if check.adjacency_identity_exact else "adjacency identity not exact")


def _direction_blocks(ctx: MeasureContext, tol: float) -> Outcome:
    check = spectral_adversary_witness(ctx.f)
    return Outcome(check.partial_permutations, check.gamma_norm, check.max_direction_norm * ctx.f.n)


def _huang_witness(ctx: MeasureContext, tol: float) -> Outcome:
    if ctx.f.is_constant:
        return _skip("constant function")
    restricted, kept = top_monomial_restriction(ctx.f)
    witness = huang_witness(restricted)
    root = float(np.sqrt(witness.n))
    return Outcome(witness.holds, root, witness.ratio, witness.ratio - root, detail=f"kept={kept}")


def _cert_chain(ctx: MeasureContext, tol: float) -> Outcome:
    worst = None
    failed = []
    for epsilon in (0.0, 1.0 / 3.0):
        report = certificate_chain(ctx.f, epsilon)
        for link in report.links:
            margin = link.rhs - link.lhs
            worst = margin if worst is None else min(worst, margin)
            if not link.holds:
                failed.append(f"eps={epsilon:.4f}: {link.name}")
    return Outcome(not failed, margin=worst, detail="; ".join(failed))


RELATIONS: Dict[str, Relation] = {
    r.id: r
    for r in [
        Relation("huang", "deg(f) <= lambda(f)^2", "le", SPECTRAL_MAX_ARITY,
                 lambda c, t: _le(c.deg, c.lam ** 2, t)),
        Relation("s-le-lambda2", "s(f) <= lambda(f)^2", "le", SPECTRAL_MAX_ARITY,
                 lambda c, t: _le(c.sens.s, c.lam ** 2, t)),
        Relation("lambda-le-deg", "lambda(f) <= deg(f)", "le", SPECTRAL_MAX_ARITY,
                 lambda c, t: _le(c.lam, c.deg, t)),
        Relation("lambda-s-product", "lambda(f) <= sqrt(s0(f) s1(f))", "le", SPECTRAL_MAX_ARITY,
                 lambda c, t: _le(c.lam, np.sqrt(c.sens.s0 * c.sens.s1), t)),
        Relation("avg-sensitivity", "E_x[s_x(f)] <= lambda(f)", "le", SPECTRAL_MAX_ARITY,
                 lambda c, t: _le(c.sens.avg_sensitivity, c.lam, t)),
        Relation("deg-s0s1", "deg(f) <= s0(f) s1(f)", "le", DEGREE_MAX_ARITY,
                 lambda c, t: _le(c.deg, c.sens.s0 * c.sens.s1, t)),
        Relation("tightadeg", "lambda(f) <= 3 adeg_{1/3}(f)", "le", ADEG_MAX_ARITY,
                 lambda c, t: _le(c.lam, 3 * c.adeg, t)),
        Relation("adeg-deg", "deg(f) <= 9 adeg_{1/3}(f)^2", "le", ADEG_MAX_ARITY,
                 lambda c, t: _le(c.deg, 9 * c.adeg ** 2, t)),
        Relation("midrijanis", "D(f) <= bs(f) deg(f)", "le", DQ_MAX_ARITY,
                 lambda c, t: _le(c.d, c.bs * c.deg, t)),
        Relation("bs-ge-s", "s(f) <= bs(f)", "le", BS_MAX_ARITY,
                 lambda c, t: _le(c.sens.s, c.bs, t)),
        Relation("bs-le-c", "bs(f) <= C(f)", "le", min(BS_MAX_ARITY, CERT_MAX_ARITY),
                 lambda c, t: _le(c.bs, c.cert.c, t)),
        Relation("c-le-bs-s", "C(f) <= bs(f) s(f)", "le", min(BS_MAX_ARITY, CERT_MAX_ARITY),
                 lambda c, t: _le(c.cert.c, c.bs * c.sens.s, t)),
        Relation("c-le-d", "C(f) <= D(f)", "le", min(CERT_MAX_ARITY, DQ_MAX_ARITY),
                 lambda c, t: _le(c.cert.c, c.d, t)),
        Relation("deg-le-d", "deg(f) <= D(f)", "le", DQ_MAX_ARITY,
                 lambda c, t: _le(c.deg, c.d, t)),
        Relation("deg2-le-deg", "deg_2(f) <= deg(f)", "le", DEGREE_MAX_ARITY,
                 lambda c, t: _le(c.deg2, c.deg, t)),
        Relation("koutsoupias-eq", "K(f) = lambda(f)", "eq", SPECTRAL_MAX_ARITY,
                 lambda c, t: _eq(koutsoupias(c.f, graph=c.graph), c.lam, t), tolerance=1e-8),
        Relation("hadamard-identity", "top eig(R X R - X) = lambda(f), H A_H H = nI - 2X", "holds",
                 IDENTITY_MAX_ARITY, _hadamard),
        Relation("composition-lambda", "lambda(f o g) = lambda(f) lambda(g)", "eq", COMPOSITION_MAX_ARITY,
                 _composition_lambda),
        Relation("composed-eigenvector", "Rayleigh quotient of the tensored eigenvector is lambda(f) lambda(g)",
                 "holds", COMPOSITION_MAX_ARITY, _composed_eigenvector),
        Relation("swa1-witness", "SWA1 value of w = v v^T o A_f equals lambda(f)", "eq", SPECTRAL_MAX_ARITY,
                 _swa1),
        Relation("mm1-duality", "lambda(f) <= objective of every feasible MM1 scheme", "le", SPECTRAL_MAX_ARITY,
                 _mm1),
        Relation("sqrt-scheme", "the sqrt(s1/s0) scheme has objective sqrt(s0 s1)", "eq", SPECTRAL_MAX_ARITY,
                 _sqrt_scheme),
        Relation("direction-blocks", "A_f o D_i is a partial permutation for every i", "holds",
                 SPECTRAL_MAX_ARITY, _direction_blocks),
        Relation("huang-witness", "a top-monomial restriction has a witness with ratio >= sqrt(n)", "holds",
                 HUANG_WITNESS_MAX_ARITY, _huang_witness),
        Relation("cert-chain", "lambda <= ||B_q||/(1-2eps) <= gamma2/(1-2eps) <= d/(1-2eps)", "holds",
                 ADEG_MAX_ARITY, _cert_chain),
    ]
}


def get_relation(relation_id: str) -> Relation:
    try:
        return RELATIONS[relation_id]
    except KeyError:
        raise UnknownRelationError(relation_id) from None


def resolve_relations(ids: Sequence[str], n: int) -> List[Relation]:
    """Expand ``all`` and validate arity caps.

    ``all`` keeps every relation whose cap admits ``n``; a relation named
    explicitly above its cap raises ``ArityCapError``.
    """
    if not ids or list(ids) == ["all"]:
        return [r for r in RELATIONS.values() if n <= r.max_arity]
    chosen = []
    for relation_id in ids:
        if relation_id == "all":
            chosen.extend(r for r in RELATIONS.values() if n <= r.max_arity and r not in chosen)
            continue
        relation = get_relation(relation_id)
        if n > relation.max_arity:
            raise ArityCapError(relation.id, n, relation.max_arity)
        if relation not in chosen:
            chosen.append(relation)
    return chosen


def list_relations() -> List[Relation]:
    return list(RELATIONS.values())
