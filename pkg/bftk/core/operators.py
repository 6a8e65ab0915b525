"""
Symmetric operators over the 2^n hypercube and the eigen-solvers run on them.

Two independent paths are provided: a dense symmetric eigensolve
(``scipy.linalg.eigh``) used up to ``settings.DENSE_MAX_ARITY`` and a shifted
power iteration that only needs matrix-vector products.
"""

from dataclasses import dataclass
import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .config import settings
from .errors import ConvergenceError, DimensionMismatchError

logger = logging.getLogger(__name__)

MatrixLike = Union[np.ndarray, sp.spmatrix, sp.sparray]


@dataclass(frozen=True, eq=False)
class SymmetricMatrixView:
    """A symmetric 2^n x 2^n operator held densely, sparsely or implicitly."""

    size: int
    name: str
    matrix: Optional[MatrixLike] = None
    matvec_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def from_matrix(cls, matrix: MatrixLike, name: str) -> "SymmetricMatrixView":
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"{name} is {matrix.shape}, expected square")
        return cls(size=matrix.shape[0], name=name, matrix=matrix)

    @classmethod
    def implicit(cls, size: int, matvec: Callable[[np.ndarray], np.ndarray], name: str) -> "SymmetricMatrixView":
        return cls(size=size, name=name, matvec_fn=matvec)

    @property
    def is_dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.matrix is not None:
            return np.asarray(self.matrix @ v).reshape(-1)
        return self.matvec_fn(v)

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        return self.matvec(v)

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator((self.size, self.size), matvec=self.matvec, rmatvec=self.matvec, dtype=np.float64)

    def to_dense(self) -> np.ndarray:
        if self.matrix is None:
            return np.column_stack([self.matvec(col) for col in np.eye(self.size)])
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)


@dataclass(frozen=True)
class EigenResult:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float
    method: str


def _seed_vector(size: int) -> np.ndarray:
    # all-ones plus a fixed positive perturbation
    idx = np.arange(size, dtype=np.int64)
    jitter = ((idx * 2654435761) % 1009) / 1009.0
    seed = 1.0 + 0.25 * jitter
    return seed / np.linalg.norm(seed)


def power_iteration(
    op: SymmetricMatrixView,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    shift: float = 1.0,
) -> EigenResult:
    """Top eigenpair of a nonnegative symmetric operator.

    Iterates with op + shift * I so that the +lambda / -lambda pair of a
    bipartite operator does not oscillate.  Stops once the residual
    ||A v - mu v|| drops below ``tol``.
    """
    tol = settings.POWER_TOL if tol is None else tol
    max_iter = settings.POWER_MAX_ITER if max_iter is None else max_iter
    v = _seed_vector(op.size)
    for iteration in range(1, max_iter + 1):
        av = op.matvec(v)
        mu = float(v @ av)
        residual = float(np.linalg.norm(av - mu * v))
        if residual <= tol * max(1.0, abs(mu)):
            return EigenResult(mu, v, iteration, residual, "power")
        w = av + shift * v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return EigenResult(0.0, v, iteration, 0.0, "power")
        v = w / norm
    raise ConvergenceError(f"power iteration on {op.name} did not converge in {max_iter} iterations "
                           f"(residual {residual:.3e})")


def dense_top_eigen(op: SymmetricMatrixView) -> EigenResult:
    """Largest eigenpair by a dense symmetric eigensolve."""
    dense = op.to_dense().astype(np.float64)
    values, vectors = scipy.linalg.eigh(dense, subset_by_index=[op.size - 1, op.size - 1])
    value = float(values[0])
    vector = vectors[:, 0]
    residual = float(np.linalg.norm(dense @ vector - value * vector))
    return EigenResult(value, vector, 1, residual, "dense")


def top_eigenvalue(op: SymmetricMatrixView, method: str = "auto") -> EigenResult:
    if method == "auto":
        method = "dense" if op.size <= (1 << settings.DENSE_MAX_ARITY) else "power"
    if method == "dense":
        return dense_top_eigen(op)
    if method == "power":
        return power_iteration(op)
    raise ValueError(f"unknown eigen method '{method}'")


def operator_norm(matrix: MatrixLike, tol: float = 1e-9, max_iter: int = 100_000) -> float:
    """Largest singular value.

    Dense inputs up to 1024 rows go through an SVD; larger or sparse inputs
    use power iteration on A^T A.
    """
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return 0.0
    if not sp.issparse(matrix) and max(rows, cols) <= 1024:
        return float(np.linalg.norm(np.asarray(matrix, dtype=np.float64), 2))
    gram = SymmetricMatrixView.implicit(cols, lambda v: matrix.T @ (matrix @ v), "A^T A")
    result = power_iteration(gram, tol=tol, max_iter=max_iter, shift=0.0)
    return float(np.sqrt(max(result.value, 0.0)))


def hadamard_matrix(n: int) -> np.ndarray:
    """Normalised Sylvester matrix H with H_xy = (-1)^{|x & y|} / sqrt(2^n); H^2 = I."""
    return scipy.linalg.hadamard(1 << n).astype(np.float64) / np.sqrt(float(1 << n))


def hypercube_adjacency(n: int) -> sp.csr_matrix:
    """A_H, the adjacency matrix of the n-dimensional hypercube."""
    idx = np.arange(1 << n)
    rows = np.repeat(idx, n)
    cols = (rows ^ np.tile(1 << np.arange(n), 1 << n))
    data = np.ones(rows.size, dtype=np.int64)
    return sp.csr_matrix((data, (rows, cols)), shape=(1 << n, 1 << n))
