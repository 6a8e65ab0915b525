"""
Spectral sensitivity and the hypercube constructions built around it.

``spectral_sensitivity`` returns lambda(f) = ||A_f|| where A_f is the
adjacency matrix of the sensitivity graph G_f (hypercube edges whose ends
have different f-values).  Since G_f is bipartite between even and odd
inputs, lambda(f) is also the largest eigenvalue of A_f.
"""

from dataclasses import dataclass, field
from functools import cached_property
import logging
from typing import List, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from ..core.config import settings
from ..core.errors import ArityCapError, CertificateError, PreconditionError
from ..core.operators import (
    EigenResult,
    SymmetricMatrixView,
    dense_top_eigen,
    hadamard_matrix,
    hypercube_adjacency,
    operator_norm,
    power_iteration,
)
from ..core.polynomial import degree
from ..core.truth_table import TruthTable
from ..utils.bits import hamming_weights, parity_signs

logger = logging.getLogger(__name__)

SPARSE_GRAPH_MAX_ARITY = 16
SIGNING_MAX_ARITY = 12
HUANG_WITNESS_MAX_ARITY = 10
IDENTITY_MAX_ARITY = 10


@dataclass(frozen=True, eq=False)
class SensitivityGraph:
    n: int
    table: TruthTable
    adjacency: Optional[sp.csr_matrix] = None

    @cached_property
    def edges(self) -> np.ndarray:
        """Array of shape (E, 2); each undirected edge once, smaller endpoint first."""
        idx = np.arange(self.table.size)
        vals = self.table.values
        parts = []
        for i in range(self.n):
            low = idx[(idx >> i & 1) == 0]
            high = low | (1 << i)
            keep = vals[low] != vals[high]
            parts.append(np.column_stack([low[keep], high[keep]]))
        if not parts:
            return np.zeros((0, 2), dtype=np.int64)
        return np.concatenate(parts).astype(np.int64)

    def degrees(self) -> np.ndarray:
        counts = np.zeros(self.table.size, dtype=np.int64)
        np.add.at(counts, self.edges.ravel(), 1)
        return counts

    def operator(self) -> SymmetricMatrixView:
        if self.adjacency is not None:
            return SymmetricMatrixView.from_matrix(self.adjacency, "A_f")
        vals = self.table.values
        idx = np.arange(self.table.size)
        flips = [(1 << i) for i in range(self.n)]

        def matvec(v: np.ndarray) -> np.ndarray:
            out = np.zeros_like(v, dtype=np.float64)
            for bit in flips:
                partner = idx ^ bit
                out += np.where(vals != vals[partner], v[partner], 0.0)
            return out

        return SymmetricMatrixView.implicit(self.table.size, matvec, "A_f")

    def to_dense(self) -> np.ndarray:
        return self.operator().to_dense()

    def edge_list_text(self) -> str:
        return "".join(f"{x} {y}\n" for x, y in self.edges)


def sensitivity_graph(f: TruthTable) -> SensitivityGraph:
    if f.n > SPARSE_GRAPH_MAX_ARITY:
        logger.info(f"Using implicit sensitivity operator for n={f.n}")
        return SensitivityGraph(f.n, f)
    graph = SensitivityGraph(f.n, f)
    edges = graph.edges
    size = f.size
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    adjacency = sp.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(size, size))
    graph = SensitivityGraph(f.n, f, adjacency)
    # reuse the computed edge array
    graph.__dict__["edges"] = edges
    return graph


@dataclass(frozen=True, eq=False)
class SpectralResult:
    value: float
    principal_vector: np.ndarray
    iterations: int
    residual: float
    method: str


def spectral_sensitivity(f: TruthTable, method: str = "auto", graph: Optional[SensitivityGraph] = None) -> SpectralResult:
    """lambda(f) with a unit, entrywise nonnegative principal vector."""
    graph = graph or sensitivity_graph(f)
    size = f.size
    if f.is_constant:
        return SpectralResult(0.0, np.full(size, 1.0 / np.sqrt(size)), 0, 0.0, "empty")
    if method == "auto":
        method = "dense" if f.n <= settings.DENSE_MAX_ARITY else "power"
    op = graph.operator()
    if method == "dense":
        eig: EigenResult = dense_top_eigen(op)
    elif method == "power":
        eig = power_iteration(op)
    else:
        raise ValueError(f"unknown eigen method '{method}'")
    # the top eigenspace of a nonnegative matrix contains a nonnegative vector
    vector = np.abs(eig.vector)
    vector /= np.linalg.norm(vector)
    value = max(eig.value, 0.0)
    residual = float(np.linalg.norm(op.matvec(vector) - value * vector))
    return SpectralResult(value, vector, eig.iterations, residual, method)


def koutsoupias(f: TruthTable, graph: Optional[SensitivityGraph] = None) -> float:
    """Spectral norm of the distance-1 block between f^-1(0) rows and f^-1(1) columns."""
    if f.is_constant:
        return 0.0
    graph = graph or sensitivity_graph(f)
    zeros, ones = f.zeros(), f.ones()
    if graph.adjacency is not None:
        block = graph.adjacency[zeros][:, ones]
        if f.n <= settings.DENSE_MAX_ARITY:
            return operator_norm(block.toarray())
        return operator_norm(block.astype(np.float64))
    dense = graph.to_dense()
    return operator_norm(dense[np.ix_(zeros, ones)])


@dataclass(frozen=True, eq=False)
class SigningMatrix:
    n: int
    matrix: sp.csr_matrix

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @property
    def trace(self) -> int:
        return int(self.matrix.diagonal().sum())

    @cached_property
    def square_is_scalar(self) -> bool:
        """B_n^2 = n I, compared as integer matrices."""
        square = (self.matrix @ self.matrix - self.n * sp.identity(1 << self.n, dtype=np.int64, format="csr")).tocsr()
        square.eliminate_zeros()
        return square.nnz == 0

    @cached_property
    def pattern_is_hypercube(self) -> bool:
        pattern = abs(self.matrix).tocsr()
        pattern.eliminate_zeros()
        mismatch = (pattern - hypercube_adjacency(self.n)).tocsr()
        mismatch.eliminate_zeros()
        return mismatch.nnz == 0


def signing_matrix(n: int) -> SigningMatrix:
    """B_1 = [[0,1],[1,0]], B_i = [[B_{i-1}, I], [I, -B_{i-1}]]; validated on construction."""
    if not 1 <= n <= SIGNING_MAX_ARITY:
        raise ArityCapError("signing matrix", n, SIGNING_MAX_ARITY)
    b = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=np.int64))
    for i in range(2, n + 1):
        eye = sp.identity(1 << (i - 1), dtype=np.int64, format="csr")
        b = sp.bmat([[b, eye], [eye, -b]], format="csr")
    result = SigningMatrix(n, b)
    if not result.square_is_scalar:
        raise CertificateError(f"B_{n}^2 != {n} I")
    if not result.pattern_is_hypercube:
        raise CertificateError(f"zero pattern of B_{n} differs from the hypercube")
    if result.trace != 0:
        raise CertificateError(f"trace of B_{n} is {result.trace}")
    logger.debug(f"Built signing matrix B_{n} with {b.nnz} nonzeros")
    return result


@dataclass(frozen=True, eq=False)
class HuangWitness:
    spec: str
    n: int
    v0_size: int
    v1_size: int
    support_side: str
    ratio: float
    eigen_residual: float
    vanishing_residual: float
    vector: np.ndarray = field(repr=False)

    @property
    def holds(self) -> bool:
        return self.ratio >= np.sqrt(self.n) - 1e-8


def huang_witness(f: TruthTable) -> HuangWitness:
    """A nonnegative vector on one parity class with ||A_f v|| >= sqrt(n) ||v||.

    Requires deg(f) = n; restrict to a top monomial first otherwise.  The
    vector is |v| for a +sqrt(n) eigenvector v of B_n vanishing on the
    smaller of V0 = {x : f(x) = parity(x)} and its complement V1.
    """
    n = f.n
    if n > HUANG_WITNESS_MAX_ARITY:
        raise ArityCapError("huang witness", n, HUANG_WITNESS_MAX_ARITY)
    if n == 0 or degree(f) != n:
        raise PreconditionError(f"huang witness needs deg(f) = n; {f.spec} has degree {degree(f)}")
    parity = (hamming_weights(n) & 1).astype(np.uint8)
    in_v0 = f.values == parity
    v0_size = int(in_v0.sum())
    v1_size = f.size - v0_size
    if v0_size == v1_size:
        raise CertificateError(f"|V0| = |V1| = {v0_size} although deg(f) = n for {f.spec}")
    if v0_size > v1_size:
        support_side, small = "V0", np.flatnonzero(~in_v0)
    else:
        support_side, small = "V1", np.flatnonzero(in_v0)

    root = np.sqrt(n)
    b = signing_matrix(n).to_dense().astype(np.float64)
    # columns of B_n + sqrt(n) I span the +sqrt(n) eigenspace since B_n^2 = n I
    basis = scipy.linalg.orth(b + root * np.eye(f.size))
    if small.size == 0:
        coeffs = np.zeros(basis.shape[1])
        coeffs[0] = 1.0
    else:
        kernel = scipy.linalg.null_space(basis[small, :])
        if kernel.shape[1] == 0:
            raise CertificateError(f"no +sqrt(n) eigenvector of B_{n} vanishes on {small.size} points")
        coeffs = kernel[:, 0]
    v = basis @ coeffs
    v /= np.linalg.norm(v)
    eigen_residual = float(np.linalg.norm(b @ v - root * v))
    vanishing_residual = float(np.abs(v[small]).max()) if small.size else 0.0
    witness = np.abs(v)
    graph = sensitivity_graph(f)
    ratio = float(np.linalg.norm(graph.operator().matvec(witness)) / np.linalg.norm(witness))
    report = HuangWitness(f.spec, n, v0_size, v1_size, support_side, ratio,
                          eigen_residual, vanishing_residual, witness)
    if eigen_residual > 1e-8 or vanishing_residual > 1e-8:
        raise CertificateError(
            f"eigenvector residuals too large for {f.spec}: eigen {eigen_residual:.2e}, "
            f"vanishing {vanishing_residual:.2e}"
        )
    if not report.holds:
        raise CertificateError(f"witness ratio {ratio:.10f} below sqrt({n}) for {f.spec}")
    return report


@dataclass(frozen=True)
class HadamardIdentityCheck:
    spec: str
    adjacency_identity_exact: bool
    conjugation_residual: float
    top_eigenvalue: float
    lambda_value: float

    @property
    def eigen_gap(self) -> float:
        return abs(self.top_eigenvalue - self.lambda_value)

    @property
    def holds(self) -> bool:
        return self.adjacency_identity_exact and self.conjugation_residual <= 1e-9 and self.eigen_gap <= 1e-6


def hadamard_identities(f: TruthTable) -> HadamardIdentityCheck:
    """Check 2A_f = A_H - diag(g) A_H diag(g), H A_H H = nI - 2X and top eig(RXR - X) = lambda(f)."""
    n = f.n
    if n > IDENTITY_MAX_ARITY:
        raise ArityCapError("hadamard identities", n, IDENTITY_MAX_ARITY)
    g = f.signs
    a_h = hypercube_adjacency(n)
    diag_g = sp.diags(g, format="csr", dtype=np.int64)
    graph = sensitivity_graph(f)
    lhs = (2 * graph.adjacency).tocsr()
    rhs = (a_h - diag_g @ a_h @ diag_g).tocsr()
    diff = (lhs - rhs).tocsr()
    diff.eliminate_zeros()
    exact = diff.nnz == 0

    h = hadamard_matrix(n)
    weights = hamming_weights(n).astype(np.float64)
    conjugated = h @ a_h.toarray().astype(np.float64) @ h
    expected = np.diag(n - 2.0 * weights)
    conjugation_residual = float(np.abs(conjugated - expected).max())

    r = (h * g.astype(np.float64)) @ h
    x = np.diag(weights)
    operator = r @ x @ r - x
    operator = (operator + operator.T) / 2.0
    top = float(scipy.linalg.eigvalsh(operator, subset_by_index=[f.size - 1, f.size - 1])[0])
    lam = spectral_sensitivity(f, graph=graph).value
    return HadamardIdentityCheck(f.spec, exact, conjugation_residual, top, lam)


@dataclass(frozen=True)
class DirectionBlockCheck:
    """Gamma = A_f as a single-bit spectral adversary matrix."""

    spec: str
    partial_permutations: bool
    max_direction_norm: float
    gamma_norm: float

    @property
    def ratio(self) -> float:
        return self.gamma_norm / self.max_direction_norm if self.max_direction_norm else 0.0


def spectral_adversary_witness(f: TruthTable) -> DirectionBlockCheck:
    """Check each Gamma o D_i is a partial permutation and measure its norm (at most 1)."""
    graph = sensitivity_graph(f)
    edges = graph.edges
    directions = np.log2(edges[:, 1] - edges[:, 0]).astype(np.int64) if edges.size else np.zeros(0, np.int64)
    ok = True
    max_norm = 0.0
    for i in range(f.n):
        chosen = edges[directions == i]
        if chosen.size == 0:
            continue
        endpoints = np.concatenate([chosen[:, 0], chosen[:, 1]])
        # each row of Gamma o D_i has at most one nonzero entry, equal to 1
        if np.unique(endpoints).size != endpoints.size:
            ok = False
        block = sp.csr_matrix(
            (np.ones(endpoints.size), (endpoints, np.concatenate([chosen[:, 1], chosen[:, 0]]))),
            shape=(f.size, f.size),
        )
        max_norm = max(max_norm, operator_norm(block))
    lam = spectral_sensitivity(f, graph=graph).value
    return DirectionBlockCheck(f.spec, ok, max_norm, lam)


def star_lower_bound(f: TruthTable) -> float:
    """Rayleigh quotient of the star around a most sensitive input; equals sqrt(s(f))."""
    graph = sensitivity_graph(f)
    degrees = graph.degrees()
    s = int(degrees.max()) if degrees.size else 0
    if s == 0:
        return 0.0
    centre = int(np.argmax(degrees))
    vec = np.zeros(f.size)
    vec[centre] = np.sqrt(s)
    for i in range(f.n):
        partner = centre ^ (1 << i)
        if f.values[partner] != f.values[centre]:
            vec[partner] = 1.0
    return float(vec @ graph.operator().matvec(vec) / (vec @ vec))


def average_sensitivity_bound(f: TruthTable) -> float:
    """Rayleigh quotient of the normalised all-ones vector; equals E_x[s_x(f)]."""
    graph = sensitivity_graph(f)
    u = np.full(f.size, 1.0 / np.sqrt(f.size))
    return float(u @ graph.operator().matvec(u))
