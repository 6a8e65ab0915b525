"""
Combinatorial measures: sensitivity, block sensitivity, certificate
complexity and deterministic query complexity.

Per-input quantities are computed for all x at once with numpy; the
exponential searches (block packing, certificates) are dynamic programs over
bit masks whose inner step is vectorised across inputs.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import logging
from typing import Optional, Union

import numpy as np

from ..core.config import settings
from ..core.errors import ArityCapError
from ..core.polynomial import degree
from ..core.truth_table import TruthTable, canonical_form, restrict
from ..utils.bits import hamming_weights

logger = logging.getLogger(__name__)

BS_MAX_ARITY = 6
CERT_MAX_ARITY = 6
# 3^6 restrictions bound the memo; graph properties on 4 vertices have 6 edge bits
DQ_MAX_ARITY = 6


def _check_cap(measure: str, f: TruthTable, cap: int) -> None:
    if f.n > cap:
        raise ArityCapError(measure, f.n, cap)


def _class_max(per_input: np.ndarray, mask: np.ndarray) -> int:
    return int(per_input[mask].max()) if mask.any() else 0


@dataclass
class PointMeasures:
    """Per-input counts and their aggregates; unset fields were not requested."""

    n: int
    s_x: Optional[np.ndarray] = None
    bs_x: Optional[np.ndarray] = None
    c_x: Optional[np.ndarray] = None
    s0: Optional[int] = None
    s1: Optional[int] = None
    s: Optional[int] = None
    avg_sensitivity: Optional[float] = None
    bs0: Optional[int] = None
    bs1: Optional[int] = None
    bs: Optional[int] = None
    c0: Optional[int] = None
    c1: Optional[int] = None
    c: Optional[int] = None

    def merge(self, other: "PointMeasures") -> "PointMeasures":
        for name in self.__dataclass_fields__:
            value = getattr(other, name)
            if value is not None and name != "n":
                setattr(self, name, value)
        return self


def sensitive_bits(f: TruthTable) -> np.ndarray:
    """Boolean matrix (2^n, n): entry [x, i] is True when flipping x_{i+1} changes f."""
    idx = np.arange(f.size)
    vals = f.values
    return np.stack([vals != vals[idx ^ (1 << i)] for i in range(f.n)], axis=1) if f.n else np.zeros((1, 0), bool)


def sensitivity(f: TruthTable) -> PointMeasures:
    s_x = sensitive_bits(f).sum(axis=1).astype(np.int64)
    ones = f.values.astype(bool)
    s0 = _class_max(s_x, ~ones)
    s1 = _class_max(s_x, ones)
    return PointMeasures(
        n=f.n,
        s_x=s_x,
        s0=s0,
        s1=s1,
        s=max(s0, s1),
        avg_sensitivity=float(s_x.mean()),
    )


def minimal_sensitive_blocks(f: TruthTable) -> np.ndarray:
    """Boolean matrix (2^n, 2^n): [x, B] is True when B is a minimal sensitive block at x."""
    size = f.size
    idx = np.arange(size)
    vals = f.values
    sens = vals[:, None] != vals[idx[:, None] ^ idx[None, :]]
    # closure[x, B]: some subset of B is sensitive at x
    closure = sens.copy()
    for i in range(f.n):
        view = closure.reshape(size, -1, 2, 1 << i)
        view[:, :, 1, :] |= view[:, :, 0, :]
    proper = np.zeros_like(sens)
    for i in range(f.n):
        bit = 1 << i
        has_bit = (idx & bit) != 0
        proper[:, has_bit] |= closure[:, idx[has_bit] ^ bit]
    return sens & ~proper


def _max_packing(minimal: np.ndarray, n: int) -> np.ndarray:
    """Maximum number of disjoint minimal blocks, for every x at once.

    best[:, U] is the optimum using only elements of U; the lowest element e
    of U is either left out or covered by a block B with e in B, B inside U.
    """
    size = 1 << n
    best = np.zeros((minimal.shape[0], size), dtype=np.int64)
    for universe in range(1, size):
        low = universe & -universe
        current = best[:, universe ^ low].copy()
        rest = universe ^ low
        sub = rest
        while True:
            block = sub | low
            candidate = np.where(minimal[:, block], 1 + best[:, universe ^ block], 0)
            np.maximum(current, candidate, out=current)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[:, universe] = current
    return best[:, size - 1]


def block_sensitivity(f: TruthTable) -> PointMeasures:
    _check_cap("bs", f, BS_MAX_ARITY)
    if f.n == 0:
        bs_x = np.zeros(1, dtype=np.int64)
    else:
        bs_x = _max_packing(minimal_sensitive_blocks(f), f.n)
    ones = f.values.astype(bool)
    bs0 = _class_max(bs_x, ~ones)
    bs1 = _class_max(bs_x, ones)
    return PointMeasures(n=f.n, bs_x=bs_x, bs0=bs0, bs1=bs1, bs=max(bs0, bs1))


def certificate_complexity(f: TruthTable) -> PointMeasures:
    _check_cap("C", f, CERT_MAX_ARITY)
    size = f.size
    idx = np.arange(size)
    vals = f.values
    c_x = np.full(size, f.n, dtype=np.int64)
    order = sorted(range(size), key=lambda s: (bin(s).count("1"), s))
    for fixed in order:
        hi = vals.copy()
        lo = vals.copy()
        for i in range(f.n):
            if fixed >> i & 1:
                continue
            partner = idx ^ (1 << i)
            hi = np.maximum(hi, hi[partner])
            lo = np.minimum(lo, lo[partner])
        weight = bin(fixed).count("1")
        monochromatic = hi == lo
        np.minimum(c_x, np.where(monochromatic, weight, f.n), out=c_x)
    ones = vals.astype(bool)
    c0 = _class_max(c_x, ~ones)
    c1 = _class_max(c_x, ones)
    return PointMeasures(n=f.n, c_x=c_x, c0=c0, c1=c1, c=max(c0, c1))


def point_measures(f: TruthTable) -> PointMeasures:
    return sensitivity(f).merge(block_sensitivity(f)).merge(certificate_complexity(f))


@lru_cache(maxsize=262_144)
def _dq(f: TruthTable) -> int:
    if f.is_constant:
        return 0
    best = f.n
    for var in range(1, f.n + 1):
        cost = max(_dq_key(restrict(f, {var: 0})), _dq_key(restrict(f, {var: 1})))
        if cost < best:
            best = cost
            if best == 0:
                break
    return 1 + best


def _dq_key(f: TruthTable) -> int:
    if settings.D_CANONICAL and f.n > 1:
        return _dq(canonical_form(f))
    return _dq(f)


def det_query_complexity(f: TruthTable) -> int:
    """D(f) by memoised minimax recursion over restrictions."""
    _check_cap("D", f, DQ_MAX_ARITY)
    return _dq_key(f)


@dataclass
class DecisionTree:
    """A leaf carries ``value``; an inner node queries ``var`` (1-based in the original function)."""

    value: Optional[int] = None
    var: Optional[int] = None
    zero: Optional["DecisionTree"] = None
    one: Optional["DecisionTree"] = None

    @property
    def depth(self) -> int:
        if self.var is None:
            return 0
        return 1 + max(self.zero.depth, self.one.depth)

    def evaluate(self, x: int) -> int:
        node = self
        while node.var is not None:
            node = node.one if x >> (node.var - 1) & 1 else node.zero
        return node.value

    def to_json(self) -> Union[int, dict]:
        if self.var is None:
            return self.value
        return {"query": self.var, "0": self.zero.to_json(), "1": self.one.to_json()}


def decision_tree(f: TruthTable) -> DecisionTree:
    """An optimal decision tree; ties go to the lowest variable index."""
    _check_cap("D", f, DQ_MAX_ARITY)
    return _build_tree(f, list(range(1, f.n + 1)))


def _build_tree(f: TruthTable, labels: list) -> DecisionTree:
    if f.is_constant:
        return DecisionTree(value=int(f.values[0]))
    target = _dq_key(f) - 1
    for pos in range(1, f.n + 1):
        low, high = restrict(f, {pos: 0}), restrict(f, {pos: 1})
        if max(_dq_key(low), _dq_key(high)) == target:
            rest = labels[: pos - 1] + labels[pos:]
            return DecisionTree(var=labels[pos - 1], zero=_build_tree(low, rest), one=_build_tree(high, rest))
    raise AssertionError("no variable attains the optimal depth")


@dataclass
class MidrijanisCheck:
    holds: bool
    d: int
    bs: int
    deg: int
    spec: str = field(default="")


def check_midrijanis(f: TruthTable) -> MidrijanisCheck:
    """D(f) <= bs(f) * deg(f)."""
    d = det_query_complexity(f)
    bs = block_sensitivity(f).bs
    deg = degree(f)
    result = MidrijanisCheck(holds=d <= bs * deg, d=d, bs=bs, deg=deg, spec=f.spec)
    if not result.holds:
        logger.error(f"Midrijanis bound violated for {f.spec}: D={d} > bs={bs} * deg={deg}")
    return result
