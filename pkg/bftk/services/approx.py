"""
epsilon-approximate degree by linear programming, and the operator checks
built from an approximating polynomial q.

For each candidate degree d (ascending from 0) we solve

    minimize delta  subject to  lo(x) - k delta <= q(x) <= hi(x) + k delta,  delta >= 0

over the coefficients of q in the monomial basis {x_S : |S| <= d}, with
k = 1 in the unit-interval convention and k = 2 in the signed one.  The
first d with delta* <= LP_TOL is adeg_epsilon(f).  When delta* > 0 the LP
dual yields Farkas multipliers proving that no degree-d polynomial fits.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import logging
from typing import List, Optional

import numpy as np
from scipy.optimize import linprog

from ..core.config import settings
from ..core.errors import ArityCapError, PreconditionError, SolverError
from ..core.operators import SymmetricMatrixView, hadamard_matrix, operator_norm
from ..core.polynomial import FLOAT_ZERO, MultilinearPolynomial, walsh_hadamard
from ..core.truth_table import TruthTable, compose
from ..utils.bits import hamming_weights
from .spectral import spectral_sensitivity

logger = logging.getLogger(__name__)

ADEG_MAX_ARITY = 5
R_TILDE_MAX_ARITY = 10
QUADRATIC_FORM_MAX_ARITY = 8
DEFAULT_EPSILON = 1.0 / 3.0


class Convention(str, Enum):
    UNIT = "unit"
    SIGNED = "signed"

    @classmethod
    def parse(cls, value) -> "Convention":
        if isinstance(value, Convention):
            return value
        text = str(value).strip().lower()
        aliases = {"unit": cls.UNIT, "unit-interval": cls.UNIT, "signed": cls.SIGNED}
        if text not in aliases:
            raise PreconditionError(f"unknown convention '{value}' (use unit or signed)")
        return aliases[text]


def target_bounds(f: TruthTable, epsilon: float, convention: Convention):
    """Pointwise interval [lo(x), hi(x)] q must lie in."""
    ones = f.values.astype(bool)
    if convention is Convention.UNIT:
        lo = np.where(ones, 1.0 - epsilon, 0.0)
        hi = np.where(ones, 1.0, epsilon)
    else:
        lo = np.where(ones, 1.0 - 2.0 * epsilon, -1.0)
        hi = np.where(ones, 1.0, -1.0 + 2.0 * epsilon)
    return lo, hi


def monomial_masks(n: int, d: int) -> List[int]:
    return sorted((m for m in range(1 << n) if bin(m).count("1") <= d), key=lambda m: (bin(m).count("1"), m))


def design_matrix(n: int, masks: List[int]) -> np.ndarray:
    """Phi[x, j] = 1 when monomial masks[j] is a subset of x."""
    idx = np.arange(1 << n)[:, None]
    cols = np.asarray(masks, dtype=np.int64)[None, :]
    return ((idx & cols) == cols).astype(np.float64)


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers u_hi, u_lo >= 0 with Phi^T (u_hi - u_lo) = 0 and u_hi.hi - u_lo.lo < 0."""

    degree: int
    delta: float
    gap: float
    residual: float

    @property
    def valid(self) -> bool:
        return self.residual <= 1e-9 and self.gap < -1e-9


@dataclass(frozen=True)
class DegreeLP:
    degree: int
    delta: float
    coefficients: np.ndarray
    masks: List[int]
    certificate: Optional[FarkasCertificate]


def solve_degree_lp(f: TruthTable, d: int, epsilon: float, convention: Convention) -> DegreeLP:
    masks = monomial_masks(f.n, d)
    phi = design_matrix(f.n, masks)
    lo, hi = target_bounds(f, epsilon, convention)
    scale = 1.0 if convention is Convention.UNIT else 2.0
    size, k = phi.shape
    slack_col = np.full((size, 1), -scale)
    a_ub = np.block([[phi, slack_col], [-phi, slack_col]])
    b_ub = np.concatenate([hi, -lo])
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * k + [(0.0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"LP for {f.spec} at degree {d} ended with status {res.status}: {res.message}")
    delta = float(res.x[-1])
    certificate = None
    if delta > settings.LP_TOL:
        multipliers = -np.asarray(res.ineqlin.marginals)
        u_hi, u_lo = multipliers[:size], multipliers[size:]
        residual = float(np.abs(phi.T @ (u_hi - u_lo)).max())
        gap = float(u_hi @ hi - u_lo @ lo)
        certificate = FarkasCertificate(d, delta, gap, residual)
    return DegreeLP(d, delta, res.x[:-1], masks, certificate)


@dataclass(frozen=True, eq=False)
class ApproxDegreeResult:
    spec: str
    epsilon: float
    degree: int
    witness: MultilinearPolynomial
    convention: Convention
    slack: float
    infeasibility: Optional[FarkasCertificate] = field(default=None)

    def witness_json(self) -> dict:
        data = self.witness.to_json()
        data["convention"] = self.convention.value
        data["epsilon"] = self.epsilon
        return data


def _validate_epsilon(epsilon: float) -> None:
    if not 0.0 <= epsilon < 0.5:
        raise PreconditionError(f"epsilon must lie in [0, 1/2), got {epsilon}")


@lru_cache(maxsize=131_072)
def _approx_degree(f: TruthTable, epsilon: float, convention: Convention) -> ApproxDegreeResult:
    previous: Optional[DegreeLP] = None
    for d in range(f.n + 1):
        lp = solve_degree_lp(f, d, epsilon, convention)
        if lp.delta <= settings.LP_TOL:
            coeffs = {m: float(c) for m, c in zip(lp.masks, lp.coefficients) if abs(c) > FLOAT_ZERO}
            witness = MultilinearPolynomial(f.n, coeffs)
            lo, hi = target_bounds(f, epsilon, convention)
            values = witness.values_on_cube().astype(np.float64)
            slack = float(np.minimum(values - lo, hi - values).min())
            certificate = previous.certificate if previous is not None else None
            if certificate is not None and not certificate.valid:
                logger.warning(
                    f"Weak infeasibility certificate for {f.spec} at degree {d - 1}: "
                    f"gap {certificate.gap:.3e}, residual {certificate.residual:.3e}"
                )
            return ApproxDegreeResult(f.spec, epsilon, d, witness, convention, slack, certificate)
        previous = lp
    raise SolverError(f"no feasible polynomial of degree <= {f.n} for {f.spec}; the LP is inconsistent")


def approx_degree(f: TruthTable, epsilon: float = DEFAULT_EPSILON, convention="unit") -> ApproxDegreeResult:
    """Minimal degree of a polynomial epsilon-approximating f, with witness."""
    if f.n > ADEG_MAX_ARITY:
        raise ArityCapError("adeg", f.n, ADEG_MAX_ARITY)
    _validate_epsilon(epsilon)
    return _approx_degree(f, float(epsilon), Convention.parse(convention))


def composition_adeg_ratio(f: TruthTable, g: TruthTable, epsilon: float = DEFAULT_EPSILON) -> Optional[float]:
    """adeg(f o g) / (adeg(f) adeg(g)); reported, never asserted."""
    outer = approx_degree(f, epsilon).degree
    inner = approx_degree(g, epsilon).degree
    if outer == 0 or inner == 0:
        return None
    return approx_degree(compose(f, g), epsilon).degree / (outer * inner)


def fourier_coefficients(q: MultilinearPolynomial) -> np.ndarray:
    """q_hat(S) = E_x[q(x) (-1)^{|S & x|}] for the cube values of q."""
    values = q.values_on_cube().astype(np.float64)
    return walsh_hadamard(values, q.n) / float(1 << q.n)


def r_tilde(q: MultilinearPolynomial) -> SymmetricMatrixView:
    """H diag(q) H; its (x, y) entry is q_hat(x XOR y) and its norm is max |q(x)|."""
    if q.n > R_TILDE_MAX_ARITY:
        raise ArityCapError("r_tilde", q.n, R_TILDE_MAX_ARITY)
    values = q.values_on_cube().astype(np.float64)
    peak = float(np.abs(values).max())
    if peak > 1.0 + settings.LP_TOL:
        raise PreconditionError(f"sup norm of q is {peak:.9f} > 1 on the cube")
    h = hadamard_matrix(q.n)
    return SymmetricMatrixView.from_matrix((h * values) @ h, "R~")


@dataclass(frozen=True)
class SparsityCheck:
    degree: int
    max_outside_band: float
    max_fourier_mismatch: float

    @property
    def holds(self) -> bool:
        return self.max_outside_band <= 1e-10 and self.max_fourier_mismatch <= 1e-10


def check_sparsity(q: MultilinearPolynomial) -> SparsityCheck:
    """R~_xy vanishes for |x XOR y| > deg(q) and equals q_hat(x XOR y) elsewhere."""
    matrix = r_tilde(q).to_dense()
    size = 1 << q.n
    idx = np.arange(size)
    xor = idx[:, None] ^ idx[None, :]
    distance = hamming_weights(q.n)[xor]
    d = q.degree()
    outside = np.abs(matrix[distance > d])
    inside = distance <= d
    expected = fourier_coefficients(q)[xor]
    mismatch = np.abs(matrix[inside] - expected[inside])
    return SparsityCheck(
        degree=d,
        max_outside_band=float(outside.max()) if outside.size else 0.0,
        max_fourier_mismatch=float(mismatch.max()) if mismatch.size else 0.0,
    )


def level_masses(v: np.ndarray, n: int) -> np.ndarray:
    """Entry k is the squared mass of v on inputs of Hamming weight k."""
    return np.bincount(hamming_weights(n), weights=np.square(v), minlength=n + 1)


@dataclass(frozen=True, eq=False)
class TailCheck:
    c: np.ndarray
    b: np.ndarray
    worst_margin: float

    @property
    def holds(self) -> bool:
        return self.worst_margin >= -1e-8


def check_cibj(r: SymmetricMatrixView, v: np.ndarray, d: int) -> TailCheck:
    """sum_{i >= r} c_i <= sum_{j >= r-d} b_j for r = d+1..n.

    c and b are the Hamming-level masses of R v and v.  R must have norm at
    most 1 and vanish outside the band |x XOR y| <= d.
    """
    size = r.size
    n = size.bit_length() - 1
    dense = r.to_dense()
    if operator_norm(dense) > 1.0 + 1e-9:
        raise PreconditionError("check_cibj needs ||R|| <= 1")
    idx = np.arange(size)
    distance = hamming_weights(n)[idx[:, None] ^ idx[None, :]]
    if np.abs(dense[distance > d]).max(initial=0.0) > 1e-10:
        raise PreconditionError(f"R is not band-{d}")
    c = level_masses(dense @ v, n)
    b = level_masses(v, n)
    margins = [float(b[max(r_ - d, 0):].sum() - c[r_:].sum()) for r_ in range(d + 1, n + 1)]
    return TailCheck(c, b, min(margins, default=0.0))


@dataclass(frozen=True)
class QuadraticFormCheck:
    spec: str
    n: int
    mu: float
    degree: int
    lambda_value: float
    epsilon: float
    distance: float

    @property
    def degree_bound_holds(self) -> bool:
        return self.mu <= self.degree + 1e-6

    @property
    def lambda_bound_holds(self) -> bool:
        return self.lambda_value <= self.mu + 3 * self.epsilon * self.n + 1e-6

    @property
    def holds(self) -> bool:
        return self.degree_bound_holds and self.lambda_bound_holds


def check_quadratic_form_bound(f: TruthTable, q: MultilinearPolynomial, epsilon: float) -> QuadraticFormCheck:
    """mu = top eig(R~ X R~ - X) satisfies mu <= deg(q) and lambda(f) <= mu + 3 epsilon n.

    ``epsilon`` bounds |q(x) -/+ g(x)| pointwise, g = 1 - 2f; q may approximate
    either g or -g since R~ X R~ is unchanged by the sign.
    """
    if f.n > QUADRATIC_FORM_MAX_ARITY:
        raise ArityCapError("quadratic form bound", f.n, QUADRATIC_FORM_MAX_ARITY)
    if q.n != f.n:
        raise PreconditionError(f"q has {q.n} variables, f has {f.n}")
    values = q.values_on_cube().astype(np.float64)
    g = f.signs.astype(np.float64)
    distance = float(min(np.abs(values - g).max(), np.abs(values + g).max()))
    if distance > epsilon + settings.LP_TOL:
        raise PreconditionError(f"q is {distance:.6f} away from +/-(1 - 2f), more than epsilon = {epsilon}")
    r = r_tilde(q).to_dense()
    x = np.diag(hamming_weights(f.n).astype(np.float64))
    operator = r @ x @ r - x
    operator = (operator + operator.T) / 2.0
    mu = float(np.linalg.eigvalsh(operator)[-1])
    lam = spectral_sensitivity(f).value
    return QuadraticFormCheck(f.spec, f.n, mu, q.degree(), lam, epsilon, distance)
