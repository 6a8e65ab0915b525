"""
Multilinear polynomials and the fast subset transforms behind degrees.

All three transforms (Moebius, XOR-Moebius and Walsh-Hadamard) run in
O(n 2^n) with the butterfly reshape ``a.reshape(-1, 2, 2**i)``; the middle
axis separates inputs with x_{i+1} = 0 from those with x_{i+1} = 1.
Exact integer arithmetic is used for tables, floats only for LP witnesses.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import logging
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError
from .truth_table import TruthTable, restrict
from ..utils.bits import hamming_weights, mask_to_vars, popcount, vars_to_mask

logger = logging.getLogger(__name__)

Coefficient = Union[int, Fraction, float]

# LP witnesses drop coefficients below this magnitude
FLOAT_ZERO = 1e-12


def _butterflies(n: int, a: np.ndarray):
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        yield view[:, 0, :], view[:, 1, :]


def subset_sum_transform(a: np.ndarray, n: int) -> np.ndarray:
    """b[x] = sum of a[S] over S subset of x (evaluates coefficients on the cube)."""
    out = np.array(a, copy=True)
    for low, high in _butterflies(n, out):
        high += low
    return out


def mobius_transform(a: np.ndarray, n: int) -> np.ndarray:
    """Inverse of ``subset_sum_transform``."""
    out = np.array(a, copy=True)
    for low, high in _butterflies(n, out):
        high -= low
    return out


def xor_mobius_transform(a: np.ndarray, n: int) -> np.ndarray:
    """Reed-Muller transform over GF(2); an involution."""
    out = np.array(a, dtype=np.uint8, copy=True)
    for low, high in _butterflies(n, out):
        high ^= low
    return out


def walsh_hadamard(a: np.ndarray, n: int) -> np.ndarray:
    """Unnormalised transform: out[S] = sum_x a[x] (-1)^{|S & x|}."""
    out = np.array(a, copy=True)
    for low, high in _butterflies(n, out):
        low_copy = low.copy()
        low += high
        high *= -1
        high += low_copy
    return out


def inverse_walsh_hadamard(a: np.ndarray, n: int) -> np.ndarray:
    return walsh_hadamard(a, n) / float(1 << n)


@dataclass(frozen=True, eq=False)
class MultilinearPolynomial:
    """Sparse map from variable subsets (bit masks) to coefficients."""

    n: int
    coeffs: Mapping[int, Coefficient] = field(default_factory=dict)

    def __post_init__(self) -> None:
        limit = 1 << self.n
        for mask in self.coeffs:
            if not 0 <= mask < limit:
                raise DimensionMismatchError(f"monomial mask {mask} outside {self.n} variables")

    @classmethod
    def from_dense(cls, n: int, dense: np.ndarray, tol: float = FLOAT_ZERO) -> "MultilinearPolynomial":
        if dense.dtype.kind in "iu" or dense.dtype == object:
            coeffs = {int(m): (int(c) if dense.dtype.kind in "iu" else c)
                      for m, c in enumerate(dense) if c != 0}
        else:
            coeffs = {int(m): float(c) for m, c in enumerate(dense) if abs(c) > tol}
        return cls(n, coeffs)

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Tuple[Iterable[int], Coefficient]]) -> "MultilinearPolynomial":
        """Build from (1-based variable list, coefficient) pairs."""
        coeffs: Dict[int, Coefficient] = {}
        for variables, value in terms:
            mask = vars_to_mask(variables)
            coeffs[mask] = coeffs.get(mask, 0) + value
        return cls(n, {m: c for m, c in coeffs.items() if c != 0})

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Rational)) for c in self.coeffs.values())

    def degree(self) -> int:
        return max((popcount(m) for m, c in self.coeffs.items() if c != 0), default=0)

    def dense(self) -> np.ndarray:
        """Coefficient vector of length 2^n (object dtype when exact)."""
        if self.is_exact:
            out = np.zeros(1 << self.n, dtype=object)
        else:
            out = np.zeros(1 << self.n, dtype=np.float64)
        for mask, c in self.coeffs.items():
            out[mask] = c
        return out

    def values_on_cube(self) -> np.ndarray:
        """q(x) for every x in {0,1}^n."""
        return subset_sum_transform(self.dense(), self.n)

    def evaluate(self, x: int) -> Coefficient:
        return sum((c for m, c in self.coeffs.items() if m & x == m), 0)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values_on_cube().astype(np.float64))))

    def affine(self, scale: Coefficient, shift: Coefficient) -> "MultilinearPolynomial":
        """scale * q + shift."""
        coeffs = {m: scale * c for m, c in self.coeffs.items()}
        coeffs[0] = coeffs.get(0, 0) + shift
        return MultilinearPolynomial(self.n, {m: c for m, c in coeffs.items() if c != 0})

    def terms(self) -> List[Tuple[List[int], Coefficient]]:
        return [(mask_to_vars(m), c) for m, c in sorted(self.coeffs.items())]

    def to_json(self) -> Dict:
        return {
            "n": self.n,
            "coeffs": [{"vars": vars_, "value": float(c)} for vars_, c in self.terms()],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        return self.n == other.n and dict(self.coeffs) == dict(other.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for vars_, c in self.terms():
            mono = "*".join(f"x{v}" for v in vars_) or "1"
            parts.append(f"{c}*{mono}" if vars_ else f"{c}")
        return " + ".join(parts)


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """f_hat(S) = numerators[S] / 2^n, kept as exact integers."""

    n: int
    numerators: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.numerators / float(1 << self.n)

    def coefficient(self, variables: Iterable[int]) -> Fraction:
        return Fraction(int(self.numerators[vars_to_mask(variables)]), 1 << self.n)

    def degree(self) -> int:
        support = np.flatnonzero(self.numerators)
        if support.size == 0:
            return 0
        return int(hamming_weights(self.n)[support].max())

    def parseval_gap(self, f: TruthTable) -> Fraction:
        """sum_S f_hat(S)^2 - E_x[f(x)^2]; zero for every table."""
        squares = int(np.square(self.numerators.astype(object)).sum())
        return Fraction(squares, 1 << (2 * self.n)) - Fraction(int(f.values.sum()), 1 << self.n)

    def weights_by_level(self) -> List[float]:
        levels = hamming_weights(self.n)
        squares = np.square(self.values)
        return [float(squares[levels == k].sum()) for k in range(self.n + 1)]


def mobius(f: TruthTable) -> MultilinearPolynomial:
    """The unique multilinear polynomial agreeing with f on the cube."""
    dense = mobius_transform(f.values.astype(np.int64), f.n)
    return MultilinearPolynomial.from_dense(f.n, dense)


def degree(f: TruthTable) -> int:
    return mobius(f).degree()


def degree_gf2(f: TruthTable) -> int:
    anf = xor_mobius_transform(f.values, f.n)
    support = np.flatnonzero(anf)
    if support.size == 0:
        return 0
    return int(hamming_weights(f.n)[support].max())


def fourier(f: TruthTable) -> FourierSpectrum:
    numerators = walsh_hadamard(f.values.astype(np.int64), f.n)
    numerators.setflags(write=False)
    return FourierSpectrum(f.n, numerators)


def top_monomial_restriction(f: TruthTable) -> Tuple[TruthTable, List[int]]:
    """Zero every variable outside a maximum-degree monomial.

    The restricted function has degree equal to its arity.  Ties between
    monomials of the same size go to the smallest mask.
    """
    poly = mobius(f)
    d = poly.degree()
    top = min(m for m, c in poly.coeffs.items() if popcount(m) == d) if poly.coeffs else 0
    kept = mask_to_vars(top)
    assignment = {v: 0 for v in range(1, f.n + 1) if v not in kept}
    return restrict(f, assignment), kept
