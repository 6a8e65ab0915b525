"""
Single-bit adversary weight schemes.

An ``EdgeWeightScheme`` lives on the edges of the sensitivity graph and
certifies lower bounds on lambda(f) (the SWA1 form); a
``MinimaxWeightScheme`` assigns a weight to every (input, bit) pair and
certifies upper bounds (the MM1 form): any feasible scheme has objective
max_x sum_i w(x, i) >= lambda(f).
"""

from dataclasses import dataclass
import logging
from typing import Optional

import numpy as np

from ..core.errors import InfeasibleSchemeError, PreconditionError
from ..core.truth_table import TruthTable, compose
from .combinatorial import sensitive_bits, sensitivity
from .spectral import sensitivity_graph, spectral_sensitivity

logger = logging.getLogger(__name__)

# relative threshold below which an edge weight counts as outside the support
SUPPORT_TOL = 1e-12
FEASIBILITY_TOL = 1e-9
# weights held in memory at once by sample_mm1_objectives
MM1_CHUNK_ENTRIES = 1 << 20


@dataclass(frozen=True, eq=False)
class EdgeWeightScheme:
    n: int
    edges: np.ndarray
    weights: np.ndarray

    def weighted_degrees(self) -> np.ndarray:
        wt = np.zeros(1 << self.n)
        np.add.at(wt, self.edges[:, 0], self.weights)
        np.add.at(wt, self.edges[:, 1], self.weights)
        return wt

    def support(self) -> np.ndarray:
        if self.weights.size == 0:
            return np.zeros(0, dtype=bool)
        return self.weights > SUPPORT_TOL * self.weights.max()

    def value(self) -> float:
        """min over supported edges of sqrt(wt(x) wt(y)) / w(x, y)."""
        keep = self.support()
        if not keep.any():
            raise PreconditionError("weight scheme has empty support")
        wt = self.weighted_degrees()
        x, y = self.edges[keep, 0], self.edges[keep, 1]
        return float(np.min(np.sqrt(wt[x] * wt[y]) / self.weights[keep]))


@dataclass(frozen=True, eq=False)
class Swa1Witness:
    spec: str
    scheme: EdgeWeightScheme
    value: float
    lambda_value: float

    @property
    def holds(self) -> bool:
        return abs(self.value - self.lambda_value) <= 1e-6


def swa1_witness(f: TruthTable) -> Swa1Witness:
    """The scheme w(x, y) = v_x v_y A_f[x, y] from the principal vector v of A_f."""
    if f.is_constant:
        raise PreconditionError(f"{f.spec} is constant: the sensitivity graph has no edges")
    graph = sensitivity_graph(f)
    spectral = spectral_sensitivity(f, graph=graph)
    v = spectral.principal_vector
    edges = graph.edges
    scheme = EdgeWeightScheme(f.n, edges, v[edges[:, 0]] * v[edges[:, 1]])
    return Swa1Witness(f.spec, scheme, scheme.value(), spectral.value)


@dataclass(frozen=True, eq=False)
class MinimaxWeightScheme:
    """Nonnegative weights w[x, i] per input x and 0-based bit i."""

    n: int
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.weights.shape != (1 << self.n, self.n):
            raise PreconditionError(f"weights must have shape {(1 << self.n, self.n)}, got {self.weights.shape}")
        if np.any(self.weights < 0):
            raise PreconditionError("minimax weights must be nonnegative")

    def objective(self) -> float:
        return float(self.weights.sum(axis=1).max()) if self.n else 0.0


@dataclass(frozen=True)
class Mm1Result:
    spec: str
    objective: float
    lambda_value: float

    @property
    def holds(self) -> bool:
        return self.objective >= self.lambda_value - 1e-6


def check_feasible(f: TruthTable, w: MinimaxWeightScheme) -> None:
    """Raise ``InfeasibleSchemeError`` at the first sensitive pair with w(x,i) w(x^i,i) < 1."""
    if w.n != f.n:
        raise PreconditionError(f"scheme has {w.n} bits, function has {f.n}")
    sens = sensitive_bits(f)
    idx = np.arange(f.size)
    for i in range(f.n):
        products = w.weights[:, i] * w.weights[idx ^ (1 << i), i]
        bad = np.flatnonzero(sens[:, i] & (products < 1.0 - FEASIBILITY_TOL))
        if bad.size:
            x = int(bad[0])
            raise InfeasibleSchemeError(x, i, float(products[x]))


def mm1_verify(f: TruthTable, w: MinimaxWeightScheme) -> Mm1Result:
    """Check feasibility and weak duality max_x sum_i w(x, i) >= lambda(f)."""
    check_feasible(f, w)
    result = Mm1Result(f.spec, w.objective(), spectral_sensitivity(f).value)
    if not result.holds:
        logger.error(f"MM1 objective {result.objective} below lambda {result.lambda_value} for {f.spec}")
    return result


def sqrt_sensitivity_scheme(f: TruthTable) -> MinimaxWeightScheme:
    """sqrt(s0/s1) on sensitive pairs of 1-inputs, sqrt(s1/s0) on those of 0-inputs, 0 elsewhere.

    The objective is sqrt(s0 s1).
    """
    sens = sensitive_bits(f).astype(np.float64)
    measures = sensitivity(f)
    if f.is_constant:
        return MinimaxWeightScheme(f.n, np.zeros_like(sens))
    ratio = np.sqrt(measures.s0 / measures.s1)
    scale = np.where(f.values.astype(bool), ratio, 1.0 / ratio)
    return MinimaxWeightScheme(f.n, sens * scale[:, None])


def uniform_scheme(f: TruthTable) -> MinimaxWeightScheme:
    """Weight 1 on every sensitive pair."""
    return MinimaxWeightScheme(f.n, sensitive_bits(f).astype(np.float64))


def random_feasible_weights(f: TruthTable, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` random feasible weight arrays of shape (2^n, n), stacked on axis 0.

    Each sensitive edge {x, x^i} gets weights a t at its lower endpoint and
    t / a at the upper one, with a log-normal and t >= 1; every other entry
    is uniform on [0, 0.5).
    """
    size = f.size
    sens = sensitive_bits(f)
    weights = rng.uniform(0.0, 0.5, size=(count, size, f.n))
    idx = np.arange(size)
    for i in range(f.n):
        low = idx[((idx >> i) & 1) == 0]
        high = low | (1 << i)
        on_edge = sens[low, i]
        a = np.exp(rng.normal(0.0, 1.0, size=(count, low.size)))
        t = 1.0 + 0.5 * np.abs(rng.normal(0.0, 1.0, size=(count, low.size)))
        weights[:, low[on_edge], i] = (a * t)[:, on_edge]
        weights[:, high[on_edge], i] = (t / a)[:, on_edge]
    return weights


def random_feasible_scheme(f: TruthTable, rng: np.random.Generator) -> MinimaxWeightScheme:
    """A single random feasible scheme."""
    return MinimaxWeightScheme(f.n, random_feasible_weights(f, rng, 1)[0])


def check_feasible_batch(f: TruthTable, weights: np.ndarray) -> None:
    """``check_feasible`` over a stack of weight arrays of shape (count, 2^n, n)."""
    sens = sensitive_bits(f)
    idx = np.arange(f.size)
    for i in range(f.n):
        products = weights[:, :, i] * weights[:, idx ^ (1 << i), i]
        bad = sens[None, :, i] & (products < 1.0 - FEASIBILITY_TOL)
        if bad.any():
            draw, x = (int(v) for v in np.argwhere(bad)[0])
            raise InfeasibleSchemeError(x, i, float(products[draw, x]))


def sample_mm1_objectives(
    f: TruthTable, rng: np.random.Generator, draws: int, chunk_entries: int = MM1_CHUNK_ENTRIES
) -> np.ndarray:
    """Objectives of ``draws`` random feasible schemes, each checked for feasibility.

    Schemes are drawn in chunks of at most ``chunk_entries`` weights.
    """
    per_scheme = max(1, f.size * f.n)
    chunk = max(1, chunk_entries // per_scheme)
    objectives = []
    remaining = draws
    while remaining > 0:
        count = min(chunk, remaining)
        weights = random_feasible_weights(f, rng, count)
        check_feasible_batch(f, weights)
        objectives.append(weights.sum(axis=2).max(axis=1) if f.n else np.zeros(count))
        remaining -= count
    return np.concatenate(objectives) if objectives else np.zeros(0)


def compose_minimax_schemes(
    f: TruthTable, wf: MinimaxWeightScheme, g: TruthTable, wg: MinimaxWeightScheme
) -> MinimaxWeightScheme:
    """w(x, (i, j)) = w_f(g(x), i) * w_g(x^(i), j) on the n*m bits of f o g."""
    n, m = f.n, g.n
    total = n * m
    idx = np.arange(1 << total, dtype=np.int64)
    block_mask = (1 << m) - 1
    blocks = [(idx >> (i * m)) & block_mask for i in range(n)]
    outer = np.zeros(1 << total, dtype=np.int64)
    for i, block in enumerate(blocks):
        outer |= g.values[block].astype(np.int64) << i
    weights = np.empty((1 << total, total))
    for i, block in enumerate(blocks):
        for j in range(m):
            weights[:, i * m + j] = wf.weights[outer, i] * wg.weights[block, j]
    return MinimaxWeightScheme(total, weights)


def _balanced(vector: np.ndarray, ones: np.ndarray) -> np.ndarray:
    out = vector.astype(np.float64).copy()
    for part in (ones, ~ones):
        norm = np.linalg.norm(out[part])
        if norm > 0:
            out[part] *= np.sqrt(0.5) / norm
    return out


@dataclass(frozen=True)
class ComposedEigenvectorCheck:
    norm: float
    rayleigh: float
    lambda_f: float
    lambda_g: float
    lambda_composed: Optional[float]

    @property
    def holds(self) -> bool:
        product = self.lambda_f * self.lambda_g
        lower_ok = abs(self.norm - 1.0) <= 1e-9 and self.rayleigh >= product - 1e-6
        upper_ok = self.lambda_composed is None or self.rayleigh <= self.lambda_composed + 1e-6
        return lower_ok and upper_ok


def composed_eigenvector(f: TruthTable, g: TruthTable) -> ComposedEigenvectorCheck:
    """alpha[x] = 2^{n/2} v[g(x)] prod_i u[x^(i)], whose Rayleigh quotient on A_{f o g} is lambda(f) lambda(g).

    v and u are the principal vectors of A_f and A_g rescaled to put mass
    1/2 on each output class.
    """
    if f.is_constant or g.is_constant:
        raise PreconditionError("composed eigenvector needs non-constant f and g")
    n, m = f.n, g.n
    spec_f, spec_g = spectral_sensitivity(f), spectral_sensitivity(g)
    v = _balanced(spec_f.principal_vector, f.values.astype(bool))
    u = _balanced(spec_g.principal_vector, g.values.astype(bool))
    composed = compose(f, g)
    idx = np.arange(composed.size, dtype=np.int64)
    block_mask = (1 << m) - 1
    outer = np.zeros(composed.size, dtype=np.int64)
    alpha = np.full(composed.size, 2.0 ** (n / 2.0))
    for i in range(n):
        block = (idx >> (i * m)) & block_mask
        outer |= g.values[block].astype(np.int64) << i
        alpha *= u[block]
    alpha *= v[outer]
    graph = sensitivity_graph(composed)
    rayleigh = float(alpha @ graph.operator().matvec(alpha))
    lam_composed = spectral_sensitivity(composed, graph=graph).value if composed.n <= 12 else None
    return ComposedEigenvectorCheck(float(np.linalg.norm(alpha)), rayleigh, spec_f.value, spec_g.value, lam_composed)
