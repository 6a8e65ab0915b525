"""
gamma_2 factorization certificates and the chain

    lambda(f) <= ||B_q|| / (1 - 2 eps) <= gamma_2(M) / (1 - 2 eps) <= d / (1 - 2 eps)

where q is a signed eps-approximating polynomial of degree d = adeg_eps(f),
(B_q)_xy = (q(x) - q(y)) / 2 on hypercube edges, and M is the (n+1) x (n+1)
band matrix with M_st = s - t whenever |s - t| <= d.  gamma_2 is only ever
bounded from above by an explicit factorization A = X^T Y, as c(X) c(Y)
with c the largest column norm.
"""

from dataclasses import dataclass, field
import logging
from typing import List, Tuple, Union

import numpy as np

from ..core.errors import ArityCapError, CertificateError, ConventionError, DimensionMismatchError, PreconditionError
from ..core.operators import operator_norm
from ..core.polynomial import MultilinearPolynomial, mobius
from ..core.truth_table import TruthTable
from ..core.config import settings
from ..utils.bits import hamming_weights
from .approx import ADEG_MAX_ARITY, Convention, approx_degree, r_tilde
from .spectral import spectral_sensitivity

logger = logging.getLogger(__name__)

BQ_MAX_ARITY = 10
GAMMA2_MAX_N = 4096


def max_column_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.sqrt(np.square(matrix.astype(np.float64)).sum(axis=0).max()))


@dataclass(frozen=True, eq=False)
class Gamma2Bound:
    value: float
    product: np.ndarray
    c_x: float
    c_y: float


def gamma2_upper(x: np.ndarray, y: np.ndarray) -> Gamma2Bound:
    """c(X) c(Y) for the factorization X^T Y, plus the product for equality checks."""
    x, y = np.asarray(x), np.asarray(y)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"inner dimensions differ: X is {x.shape}, Y is {y.shape}")
    cx, cy = max_column_norm(x), max_column_norm(y)
    return Gamma2Bound(cx * cy, x.T @ y, cx, cy)


@dataclass(frozen=True, eq=False)
class Gamma2Certificate:
    n: int
    d: int
    s: np.ndarray
    t: np.ndarray
    m: np.ndarray

    @property
    def bound(self) -> float:
        return gamma2_upper(self.s, self.t).value

    @property
    def band_holds(self) -> bool:
        """M_st = s - t whenever |s - t| <= d."""
        idx = np.arange(self.n + 1)
        diff = idx[:, None] - idx[None, :]
        band = np.abs(diff) <= self.d
        return bool(np.array_equal(self.m[band], diff[band]))

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "S": self.s.tolist(), "T": self.t.tolist()}


def build_gamma2_certificate(n: int, d: int) -> Gamma2Certificate:
    """S, T in {-1, 0, 1}^{2d x (n+1)} with S^T T = M and c(S) = c(T) = sqrt(d).

    With a = (s + j) mod 2d and b = floor((s + j) / 2d): for a < d,
    S_js = (-1)^b and T_js = 0; otherwise S_js = 0 and T_js = -(-1)^b.
    """
    if not 1 <= d <= n:
        raise PreconditionError(f"gamma2 certificate needs 1 <= d <= n, got n={n}, d={d}")
    if n > GAMMA2_MAX_N:
        raise ArityCapError("gamma2 certificate", n, GAMMA2_MAX_N)
    j = np.arange(2 * d)[:, None]
    s = np.arange(n + 1)[None, :]
    a = (s + j) % (2 * d)
    sign = np.where(((s + j) // (2 * d)) % 2 == 0, 1, -1)
    s_mat = np.where(a < d, sign, 0).astype(np.int64)
    t_mat = np.where(a < d, 0, -sign).astype(np.int64)
    m = s_mat.T @ t_mat
    cert = Gamma2Certificate(n, d, s_mat, t_mat, m)
    validate_certificate(cert)
    return cert


def validate_certificate(cert: Gamma2Certificate) -> None:
    d = cert.d
    for name, mat in (("S", cert.s), ("T", cert.t)):
        counts = np.count_nonzero(mat, axis=0)
        if np.any(counts != d):
            raise CertificateError(f"every column of {name} must have exactly {d} nonzeros")
    if not np.array_equal(cert.s.T @ cert.t, cert.m):
        raise CertificateError("M differs from S^T T")
    if not cert.band_holds:
        raise CertificateError(f"M_st != s - t inside the band |s - t| <= {d}")


def weight_projection(n: int) -> np.ndarray:
    """P with P[x, |x|] = 1, shape (2^n, n+1)."""
    p = np.zeros((1 << n, n + 1), dtype=np.int64)
    p[np.arange(1 << n), hamming_weights(n)] = 1
    return p


def lift_certificate(cert: Gamma2Certificate) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """V = P M P^T on the cube, with its factorization X = S P^T, Y = T P^T."""
    p = weight_projection(cert.n)
    x = cert.s @ p.T
    y = cert.t @ p.T
    return p @ cert.m @ p.T, x, y


def weight_difference(n: int) -> np.ndarray:
    """W_xy = |x| - |y|."""
    weights = hamming_weights(n)
    return (weights[:, None] - weights[None, :]).astype(np.float64)


@dataclass(frozen=True, eq=False)
class BqMatrix:
    spec: str
    matrix: np.ndarray
    norm: float
    wr_norm: float
    polynomial: MultilinearPolynomial = field(repr=False)


def build_bq(f: TruthTable, q: MultilinearPolynomial) -> BqMatrix:
    """(B_q)_xy = (q(x) - q(y)) / 2 on hypercube edges; checks ||B_q|| = ||W o R~||."""
    n = f.n
    if n > BQ_MAX_ARITY:
        raise ArityCapError("B_q", n, BQ_MAX_ARITY)
    if q.n != n:
        raise PreconditionError(f"q has {q.n} variables, f has {n}")
    values = q.values_on_cube().astype(np.float64)
    ones = f.values.astype(bool)
    tol = settings.LP_TOL
    if np.abs(values).max() > 1.0 + tol or np.any(values[ones] <= 0) or np.any(values[~ones] >= 0):
        raise ConventionError(f"q is not a signed approximation of {f.spec} (needs q > 0 on ones, < 0 on zeros, |q| <= 1)")
    size = f.size
    idx = np.arange(size)
    matrix = np.zeros((size, size))
    for i in range(n):
        partner = idx ^ (1 << i)
        matrix[idx, partner] = (values - values[partner]) / 2.0
    norm = operator_norm(matrix)
    wr = weight_difference(n) * r_tilde(q).to_dense()
    wr_norm = operator_norm(wr)
    if abs(norm - wr_norm) > 1e-7:
        raise CertificateError(f"||B_q|| = {norm:.10f} but ||W o R~|| = {wr_norm:.10f} for {f.spec}")
    return BqMatrix(f.spec, matrix, norm, wr_norm, q)


@dataclass(frozen=True)
class HadamardProductCheck:
    lhs: float
    gamma2: float
    b_norm: float

    @property
    def rhs(self) -> float:
        return self.gamma2 * self.b_norm

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-7


Factorization = Union[Gamma2Certificate, Tuple[np.ndarray, np.ndarray]]


def hadamard_product_bound(a: np.ndarray, b: np.ndarray, cert: Factorization) -> HadamardProductCheck:
    """||A o B|| <= c(X) c(Y) ||B|| for a factorization A = X^T Y."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"A is {a.shape}, B is {b.shape}")
    x, y = (cert.s, cert.t) if isinstance(cert, Gamma2Certificate) else cert
    bound = gamma2_upper(x, y)
    if bound.product.shape != a.shape or np.abs(bound.product - a).max() > 1e-10:
        raise CertificateError("factorization does not reproduce A")
    return HadamardProductCheck(operator_norm(a * b), bound.value, operator_norm(b))


@dataclass(frozen=True)
class ChainLink:
    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-6


@dataclass(frozen=True, eq=False)
class ChainReport:
    spec: str
    epsilon: float
    degree: int
    lambda_value: float
    bq_norm: float
    gamma2: float
    links: List[ChainLink]

    @property
    def holds(self) -> bool:
        return all(link.holds for link in self.links)


def certificate_chain(f: TruthTable, epsilon: float) -> ChainReport:
    """Run LP, eigensolve and certificate steps and check every link of the chain."""
    if f.n > ADEG_MAX_ARITY:
        raise ArityCapError("certificate chain", f.n, ADEG_MAX_ARITY)
    approx = approx_degree(f, epsilon, Convention.SIGNED)
    d = approx.degree
    q = approx.witness
    lam = spectral_sensitivity(f).value
    bq = build_bq(f, q)
    scale = 1.0 - 2.0 * epsilon
    links = [ChainLink("lambda <= ||B_q||/(1-2eps)", lam, bq.norm / scale)]
    if d == 0:
        gamma2 = 0.0
    else:
        cert = build_gamma2_certificate(f.n, d)
        v, x, y = lift_certificate(cert)
        product = hadamard_product_bound(v, r_tilde(q).to_dense(), (x, y))
        gamma2 = cert.bound
        # V agrees with W inside the band where R~ lives
        links.append(ChainLink("||B_q|| <= gamma2(V)||R~||", bq.norm, product.rhs))
    links.append(ChainLink("||B_q||/(1-2eps) <= gamma2(M)/(1-2eps)", bq.norm / scale, gamma2 / scale))
    links.append(ChainLink("gamma2(M)/(1-2eps) <= d/(1-2eps)", gamma2 / scale, d / scale))
    report = ChainReport(f.spec, epsilon, d, lam, bq.norm, gamma2, links)
    for link in links:
        if not link.holds:
            logger.error(f"Chain link '{link.name}' fails for {f.spec}: {link.lhs} > {link.rhs}")
    return report


def exact_signed_polynomial(f: TruthTable) -> MultilinearPolynomial:
    """2f - 1 as an exact polynomial (the eps = 0 signed witness)."""
    return mobius(f).affine(2, -1)
