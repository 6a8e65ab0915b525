"""
Truth tables of total Boolean functions.

A ``TruthTable`` stores the 2^n output bits of f: {0,1}^n -> {0,1} packed
little-endian into bytes.  Input x is the integer sum of x_i * 2^(i-1), so
coordinate x_1 is the least significant bit.  Tables are immutable and
hashable; the unpacked ``values`` array is computed once per instance.

Text formats understood by ``load_function``:

* ``tt:<n>:<hex>``  the table string f(0) f(1) ... f(2^n - 1) read as one
  binary numeral (f(0) is the most significant digit) and written in hex.
  ``tt:2:7`` is 0111, i.e. OR on two bits.
* ``fam:<name>:<p1,p2,...>``  a registered family (see ``core.families``).
* ``formula:<text>``  a read-once De Morgan formula.
* ``graph:<property>:<vertices>``  a built-in graph property.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
import logging
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ArityCapError, PreconditionError, SpecParseError

logger = logging.getLogger(__name__)

MAX_ARITY = 24
CANONICAL_MAX_ARITY = 6


@dataclass(frozen=True)
class TruthTable:
    n: int
    bits: bytes

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_ARITY:
            raise ArityCapError("truth table", self.n, MAX_ARITY)
        expected = max(1, (1 << self.n) // 8)
        if len(self.bits) != expected:
            raise PreconditionError(
                f"packed table for n={self.n} needs {expected} bytes, got {len(self.bits)}"
            )

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    @classmethod
    def from_values(cls, values: Iterable[int]) -> "TruthTable":
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        size = arr.shape[0]
        n = size.bit_length() - 1
        if size < 1 or (1 << n) != size:
            raise PreconditionError(f"table length {size} is not a power of two")
        if np.any((arr != 0) & (arr != 1)):
            raise PreconditionError("table entries must be 0 or 1")
        packed = np.packbits(arr.astype(np.uint8), bitorder="little")
        return cls(n, packed.tobytes())

    @classmethod
    def from_function(cls, n: int, func: Callable[[int], int]) -> "TruthTable":
        """Tabulate ``func`` evaluated on every input index."""
        return cls.from_values(np.fromiter((1 if func(x) else 0 for x in range(1 << n)),
                                           dtype=np.uint8, count=1 << n))

    @classmethod
    def constant(cls, n: int, value: int) -> "TruthTable":
        return cls.from_values(np.full(1 << n, 1 if value else 0, dtype=np.uint8))

    @classmethod
    def from_hex(cls, n: int, text: str) -> "TruthTable":
        if not 0 <= n <= MAX_ARITY:
            raise ArityCapError("truth table", n, MAX_ARITY)
        try:
            number = int(text, 16)
        except ValueError:
            raise SpecParseError(f"invalid hex digits '{text}'") from None
        size = 1 << n
        if number >> size:
            raise SpecParseError(f"hex '{text}' has more than {size} bits")
        digits = format(number, f"0{size}b")
        return cls.from_values(np.frombuffer(digits.encode(), dtype=np.uint8) - ord("0"))

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------
    @cached_property
    def values(self) -> np.ndarray:
        """The 2^n outputs as a read-only uint8 array."""
        arr = np.unpackbits(np.frombuffer(self.bits, dtype=np.uint8), bitorder="little")
        arr = arr[: 1 << self.n].copy()
        arr.setflags(write=False)
        return arr

    @cached_property
    def signs(self) -> np.ndarray:
        """g = 1 - 2f as int64 (+1 on zeros, -1 on ones)."""
        out = 1 - 2 * self.values.astype(np.int64)
        out.setflags(write=False)
        return out

    @property
    def size(self) -> int:
        return 1 << self.n

    def __call__(self, x: int) -> int:
        return int(self.values[x])

    def to_hex(self) -> str:
        return format(int("".join("1" if b else "0" for b in self.values), 2), "x")

    @property
    def spec(self) -> str:
        return f"tt:{self.n}:{self.to_hex()}"

    def __repr__(self) -> str:
        return f"TruthTable('{self.spec}')"

    def ones(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def zeros(self) -> np.ndarray:
        return np.flatnonzero(self.values == 0)

    @property
    def is_constant(self) -> bool:
        return bool(self.values.min() == self.values.max())

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------
    def negate(self) -> "TruthTable":
        return TruthTable.from_values(1 - self.values)

    def permute(self, perm: Sequence[int]) -> "TruthTable":
        """Relabel variables: new variable j+1 reads old variable perm[j]+1 (0-based perm)."""
        if sorted(perm) != list(range(self.n)):
            raise PreconditionError(f"{list(perm)} is not a permutation of {self.n} variables")
        idx = np.arange(self.size, dtype=np.int64)
        source = np.zeros(self.size, dtype=np.int64)
        for j, p in enumerate(perm):
            source |= ((idx >> j) & 1) << p
        return TruthTable.from_values(self.values[source])


def restrict(f: TruthTable, assignment: Mapping[int, int]) -> TruthTable:
    """Fix the 1-based variables in ``assignment``; free variables keep their order."""
    for var, bit in assignment.items():
        if not 1 <= int(var) <= f.n:
            raise PreconditionError(f"variable index {var} outside 1..{f.n}")
        if bit not in (0, 1):
            raise PreconditionError(f"variable x{var} assigned {bit!r}, expected 0 or 1")
    if not assignment:
        return f
    # reshape puts x_n on axis 0 and x_1 on the last axis
    cube = f.values.reshape((2,) * f.n)
    index = [slice(None)] * f.n
    for var, bit in assignment.items():
        index[f.n - int(var)] = int(bit)
    sub = np.ascontiguousarray(cube[tuple(index)]).reshape(-1)
    return TruthTable.from_values(sub)


def compose(f: TruthTable, g: TruthTable) -> TruthTable:
    """Block composition f(g(x^(1)), ..., g(x^(n))); block i holds bits (i-1)m+1..im."""
    n, m = f.n, g.n
    total = n * m
    if total > MAX_ARITY:
        raise ArityCapError("compose", total, MAX_ARITY)
    idx = np.arange(1 << total, dtype=np.int64)
    block_mask = (1 << m) - 1
    gvals = g.values.astype(np.int64)
    outer = np.zeros(1 << total, dtype=np.int64)
    for i in range(n):
        outer |= gvals[(idx >> (i * m)) & block_mask] << i
    return TruthTable.from_values(f.values[outer])


def canonical_form(f: TruthTable) -> TruthTable:
    """Lexicographically least table among all variable relabelings of f."""
    if f.n > CANONICAL_MAX_ARITY:
        raise ArityCapError("canonical form", f.n, CANONICAL_MAX_ARITY)
    best = f
    best_key = f.values.tobytes()
    for perm in permutations(range(f.n)):
        candidate = f.permute(perm)
        key = candidate.values.tobytes()
        if key < best_key:
            best, best_key = candidate, key
    return best


def load_function(spec: str) -> TruthTable:
    """Parse any supported function spec into a truth table."""
    text = spec.strip()
    kind, _, rest = text.partition(":")
    kind = kind.lower()
    if kind == "tt":
        n_text, sep, hex_text = rest.partition(":")
        if not sep or not hex_text:
            raise SpecParseError(f"expected tt:<n>:<hex>, got '{spec}'")
        try:
            n = int(n_text)
        except ValueError:
            raise SpecParseError(f"invalid arity '{n_text}' in '{spec}'") from None
        if n < 1:
            raise SpecParseError(f"arity must be at least 1 in '{spec}'")
        return TruthTable.from_hex(n, hex_text)
    if kind == "fam":
        from .families import FamilyRegistry

        name, _, params = rest.partition(":")
        try:
            values = [int(p) for p in params.split(",") if p.strip()]
        except ValueError:
            raise SpecParseError(f"family parameters must be integers in '{spec}'") from None
        return FamilyRegistry.build(name, values)
    if kind == "formula":
        from ..services.formulas import formula_to_table, parse_formula

        return formula_to_table(parse_formula(rest))
    if kind == "graph":
        from ..services.graph_properties import graph_property

        name, _, vertices = rest.partition(":")
        try:
            n_vertices = int(vertices)
        except ValueError:
            raise SpecParseError(f"expected graph:<property>:<vertices>, got '{spec}'") from None
        return graph_property(name, n_vertices).table
    raise SpecParseError(f"unrecognised function spec '{spec}' (use tt:, fam:, formula: or graph:)")
