"""
Command handlers behind the ``bftk`` command line.

Handlers are registered by name with the ``command`` decorator, take the
parsed arguments together with the effective ``Settings`` and return a
``CommandResult``: the report to emit and whether every check in it
passed.  ``BftkError`` subclasses propagate to ``bftk.main``, which maps
them to exit codes.
"""

from dataclasses import dataclass
import argparse
import logging
import math
from typing import Awaitable, Callable, Dict, List, Union

from pydantic import BaseModel

from ..core.config import Settings
from ..core.errors import PreconditionError
from ..core.polynomial import degree, top_monomial_restriction
from ..core.truth_table import compose, load_function
from ..models.schemas import (
    AdegReport,
    ChainLinkModel,
    ChainReportModel,
    CoefficientModel,
    ComposeReport,
    FarkasModel,
    FormulaReport,
    Gamma2CertificateModel,
    GraphPropertyReport,
    HadamardIdentityReport,
    HuangWitnessReport,
    RelationInfo,
    SigningMatrixReport,
    WitnessPolynomialModel,
)
from ..services.approx import ADEG_MAX_ARITY, approx_degree
from ..services.formulas import formula_to_table, parse_formula, readonce_adeg_window, readonce_degree_check
from ..services.gamma2 import build_gamma2_certificate, certificate_chain
from ..services.graph_properties import check_graph_property, graph_property, graph_property_report, CHECK_MAX_VERTICES
from ..services.harness import measure_cmd, verify_exhaustive_async, verify_random_async
from ..services.relations import list_relations
from ..services.spectral import (
    hadamard_identities,
    huang_witness,
    sensitivity_graph,
    signing_matrix,
    spectral_sensitivity,
)
from ..utils.report_writer import write_report

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    report: Union[BaseModel, List[BaseModel]]
    passed: bool = True


Handler = Callable[[argparse.Namespace, Settings], Awaitable[CommandResult]]
COMMANDS: Dict[str, Handler] = {}


def command(name: str) -> Callable[[Handler], Handler]:
    def register(handler: Handler) -> Handler:
        COMMANDS[name] = handler
        return handler

    return register


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


@command("measure")
async def measure(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Compute the requested measures of one function."""
    measures = _split(args.measures) if args.measures else None
    record = measure_cmd(args.fn, measures, args.epsilon)
    if args.emit_graph:
        await write_report(sensitivity_graph(load_function(args.fn)).edge_list_text(), args.emit_graph)
    return CommandResult(record)


@command("relations")
async def relations(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """List every relation id with the statement it checks."""
    return CommandResult(
        [RelationInfo(id=r.id, citation=r.citation, kind=r.kind, max_arity=r.max_arity) for r in list_relations()]
    )


@command("verify")
async def verify(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Run an exhaustive or random verification campaign."""
    if args.list_relations:
        return await relations(args, cfg)
    if args.n is None:
        raise PreconditionError("verify needs --n")
    ids = _split(args.relations) or ["all"]
    if args.random is not None:
        report = await verify_random_async(args.n, args.random, cfg.SEED, ids, cfg.JOBS, cfg.TOLERANCE)
    else:
        report = await verify_exhaustive_async(args.n, ids, cfg.JOBS, cfg.SEED, cfg.TOLERANCE)
    return CommandResult(report, passed=report.failure_count == 0)


@command("gamma2")
async def gamma2(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Build and validate the explicit gamma_2 factorization of M."""
    cert = build_gamma2_certificate(args.n, args.d)
    model = Gamma2CertificateModel(n=cert.n, d=cert.d, bound=cert.bound, band_holds=cert.band_holds)
    if args.emit_matrix:
        model.S = cert.s.tolist()
        model.T = cert.t.tolist()
        model.M = cert.m.tolist()
    # c(S) = c(T) = sqrt(d)
    return CommandResult(model, passed=model.band_holds and math.isclose(cert.bound, cert.d, abs_tol=cfg.TOLERANCE))


@command("huang")
async def huang(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Build B_n and report its checks; construction raises if any fails."""
    b = signing_matrix(args.n)
    report = SigningMatrixReport(
        n=b.n,
        size=1 << b.n,
        nonzeros=int(b.matrix.nnz),
        square_is_nI=b.square_is_scalar,
        trace=b.trace,
        pattern_is_hypercube=b.pattern_is_hypercube,
    )
    if args.emit_matrix:
        report.matrix = b.matrix.toarray().astype(int).tolist()
    return CommandResult(report, passed=b.square_is_scalar and b.pattern_is_hypercube and b.trace == 0)


@command("huang-witness")
async def huang_witness_cmd(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    f = load_function(args.fn)
    if f.is_constant:
        raise PreconditionError(f"{f.spec} is constant: there is no monomial to restrict to")
    restricted, kept = top_monomial_restriction(f)
    witness = huang_witness(restricted)
    report = HuangWitnessReport(
        fspec=f.spec,
        restricted_to=kept,
        n=witness.n,
        v0_size=witness.v0_size,
        v1_size=witness.v1_size,
        support_side=witness.support_side,
        ratio=witness.ratio,
        sqrt_n=math.sqrt(witness.n),
        eigen_residual=witness.eigen_residual,
        vanishing_residual=witness.vanishing_residual,
        holds=witness.holds,
    )
    return CommandResult(report, passed=witness.holds)


@command("identities")
async def identities(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Hadamard-basis identities for A_f."""
    check = hadamard_identities(load_function(args.fn))
    report = HadamardIdentityReport(
        fspec=check.spec,
        adjacency_identity_exact=check.adjacency_identity_exact,
        conjugation_residual=check.conjugation_residual,
        top_eigenvalue=check.top_eigenvalue,
        lambda_value=check.lambda_value,
        holds=check.holds,
    )
    return CommandResult(report, passed=check.holds)


@command("compose")
async def compose_cmd(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    f, g = load_function(args.f), load_function(args.g)
    fg = compose(f, g)
    lam_f, lam_g, lam_fg = (spectral_sensitivity(h).value for h in (f, g, fg))
    deg_f, deg_g, deg_fg = degree(f), degree(g), degree(fg)
    report = ComposeReport(
        f=f.spec,
        g=g.spec,
        composed=fg.spec,
        lambda_f=lam_f,
        lambda_g=lam_g,
        lambda_composed=lam_fg,
        deg_f=deg_f,
        deg_g=deg_g,
        deg_composed=deg_fg,
        lambda_product_holds=abs(lam_fg - lam_f * lam_g) <= cfg.TOLERANCE,
        degree_product_holds=deg_fg == deg_f * deg_g,
    )
    return CommandResult(report, passed=report.lambda_product_holds and report.degree_product_holds)


@command("parse")
async def parse(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Parse a read-once formula and check deg = n (and the adeg window when small)."""
    ast = parse_formula(args.formula)
    check = readonce_degree_check(ast)
    report = FormulaReport(
        formula=check.formula,
        n=check.n,
        fspec=formula_to_table(ast).spec,
        degree=check.degree,
        degree_equals_n=check.holds,
    )
    passed = check.holds
    if args.adeg:
        if ast.n > ADEG_MAX_ARITY:
            logger.warning(f"Skipping adeg window: {ast.n} variables exceed the LP cap {ADEG_MAX_ARITY}")
        else:
            window = readonce_adeg_window(ast, args.epsilon)
            report.adeg = window.adeg
            report.adeg_epsilon = window.epsilon
            report.adeg_lower_bound = window.lower_bound
            report.adeg_window_holds = window.holds
            passed = passed and window.holds
    return CommandResult(report, passed=passed)


@command("graphprop")
async def graphprop(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    prop = graph_property(args.property, args.vertices)
    measures = graph_property_report(prop)
    report = GraphPropertyReport(
        name=prop.name,
        vertices=prop.n_vertices,
        edge_variables=prop.edge_count,
        fspec=prop.table.spec,
        deg2=measures.deg2,
        deg=measures.deg,
        lambda_value=measures.lambda_value,
        s=measures.s,
        bs=measures.bs,
        C=measures.c,
        D=measures.d,
        query_lower_bound=measures.query_lower_bound,
    )
    passed = measures.lambda_value ** 2 >= measures.deg - cfg.TOLERANCE and measures.deg >= measures.deg2
    if prop.n_vertices <= CHECK_MAX_VERTICES:
        flags = check_graph_property(prop)
        report.invariant = flags.invariant
        report.monotone = flags.monotone
        report.nontrivial = flags.nontrivial
        passed = passed and flags.invariant
    return CommandResult(report, passed=passed)


@command("chain")
async def chain(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """lambda <= ||B_q||/(1-2eps) <= gamma2(M)/(1-2eps) <= d/(1-2eps) for one function."""
    result = certificate_chain(load_function(args.fn), args.epsilon)
    report = ChainReportModel(
        fspec=result.spec,
        epsilon=result.epsilon,
        degree=result.degree,
        lambda_value=result.lambda_value,
        bq_norm=result.bq_norm,
        gamma2=result.gamma2,
        links=[ChainLinkModel(name=l.name, lhs=l.lhs, rhs=l.rhs, holds=l.holds) for l in result.links],
        holds=result.holds,
    )
    return CommandResult(report, passed=result.holds)


@command("adeg")
async def adeg(args: argparse.Namespace, cfg: Settings) -> CommandResult:
    """Approximate degree with its witness polynomial and infeasibility certificate."""
    f = load_function(args.fn)
    result = approx_degree(f, args.epsilon, args.convention)
    witness = WitnessPolynomialModel(
        n=f.n,
        convention=result.convention.value,
        epsilon=result.epsilon,
        coeffs=[CoefficientModel(vars=v, value=float(c)) for v, c in result.witness.terms()],
    )
    farkas = None
    if result.infeasibility is not None:
        cert = result.infeasibility
        farkas = FarkasModel(degree=cert.degree, delta=cert.delta, gap=cert.gap, residual=cert.residual,
                             valid=cert.valid)
    report = AdegReport(
        fspec=f.spec,
        epsilon=result.epsilon,
        convention=result.convention.value,
        degree=result.degree,
        slack=result.slack,
        witness=witness,
        infeasible_below=farkas,
    )
    return CommandResult(report, passed=farkas is None or farkas.valid)
