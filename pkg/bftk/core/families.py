"""
Function families - named constructors for the truth tables used throughout
the measure suite (OR, AND, PARITY, AND-of-ORs, NAND trees, ...).
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List

import numpy as np

from .errors import ArityCapError, PreconditionError, UnknownFamilyError
from .truth_table import MAX_ARITY, TruthTable, compose
from ..utils.bits import hamming_weights

logger = logging.getLogger(__name__)


@dataclass
class FamilySpec:
    name: str
    params: str
    description: str
    builder: Callable[[List[int]], TruthTable]
    arity: Callable[[List[int]], int]


def _weights(n: int) -> np.ndarray:
    return hamming_weights(n)


def _or(p):
    return TruthTable.from_values(_weights(p[0]) > 0)


def _and(p):
    return TruthTable.from_values(_weights(p[0]) == p[0])


def _parity(p):
    return TruthTable.from_values(_weights(p[0]) & 1)


def _hw1(p):
    return TruthTable.from_values(_weights(p[0]) == 1)


def _majority(p):
    n = p[0]
    return TruthTable.from_values(2 * _weights(n) > n)


def _threshold(p):
    n, k = p
    return TruthTable.from_values(_weights(n) >= k)


def _xor_or(p):
    # x_1 XOR OR(x_2, ..., x_n)
    n = p[0]
    idx = np.arange(1 << n)
    return TruthTable.from_values((idx & 1) ^ ((idx >> 1) > 0))


def _and_or(p):
    k, l = p
    return compose(_and([k]), _or([l]))


def _nand_tree(p):
    # complete binary NAND tree of height h on 2^h leaves
    table = TruthTable.from_values(np.array([0, 1], dtype=np.uint8))
    nand = TruthTable.from_values(np.array([1, 1, 1, 0], dtype=np.uint8))
    for _ in range(p[0]):
        table = compose(nand, table)
    return table


def _const(p):
    return TruthTable.constant(p[0], p[1])


def _dictator(p):
    n, i = p
    return TruthTable.from_values((np.arange(1 << n) >> (i - 1)) & 1)


class FamilyRegistry:
    FAMILIES: Dict[str, Dict[str, Any]] = {
        "or": {"params": "n", "description": "OR_n", "builder": _or, "arity": lambda p: p[0]},
        "and": {"params": "n", "description": "AND_n", "builder": _and, "arity": lambda p: p[0]},
        "parity": {"params": "n", "description": "PARITY_n", "builder": _parity, "arity": lambda p: p[0]},
        "hw1": {
            "params": "n",
            "description": "1 iff the input has Hamming weight exactly 1",
            "builder": _hw1,
            "arity": lambda p: p[0],
        },
        "xor_or": {
            "params": "n",
            "description": "x1 XOR OR(x2..xn); s0 = s1 = n",
            "builder": _xor_or,
            "arity": lambda p: p[0],
        },
        "and_or": {
            "params": "k,l",
            "description": "AND_k composed with OR_l",
            "builder": _and_or,
            "arity": lambda p: p[0] * p[1],
        },
        "nand_tree": {
            "params": "h",
            "description": "balanced NAND tree of height h on 2^h leaves",
            "builder": _nand_tree,
            "arity": lambda p: 1 << p[0],
        },
        "majority": {"params": "n", "description": "MAJ_n (strict)", "builder": _majority, "arity": lambda p: p[0]},
        "threshold": {
            "params": "n,k",
            "description": "1 iff at least k of n bits are set",
            "builder": _threshold,
            "arity": lambda p: p[0],
        },
        "const": {
            "params": "n,b",
            "description": "constant b on n bits",
            "builder": _const,
            "arity": lambda p: p[0],
        },
        "id": {"params": "", "description": "identity on one bit", "builder": lambda p: _dictator([1, 1]),
               "arity": lambda p: 1},
        "dictator": {
            "params": "n,i",
            "description": "x_i on n bits",
            "builder": _dictator,
            "arity": lambda p: p[0],
        },
    }

    @classmethod
    def get(cls, name: str) -> FamilySpec:
        key = name.strip().lower()
        meta = cls.FAMILIES.get(key)
        if meta is None:
            raise UnknownFamilyError(name)
        return FamilySpec(name=key, **meta)

    @classmethod
    def build(cls, name: str, params: List[int]) -> TruthTable:
        family = cls.get(name)
        expected = len(family.params.split(",")) if family.params else 0
        if len(params) != expected:
            raise PreconditionError(
                f"family '{family.name}' takes parameters ({family.params}), got {params}"
            )
        if any(p < 0 for p in params):
            raise PreconditionError(f"family '{family.name}' parameters must be nonnegative, got {params}")
        cls._validate(family.name, params)
        n = family.arity(params)
        if not 1 <= n <= MAX_ARITY:
            raise ArityCapError(f"family {family.name}", n, MAX_ARITY)
        logger.debug(f"Building family {family.name}{params} on {n} bits")
        return family.builder(params)

    @staticmethod
    def _validate(name: str, params: List[int]) -> None:
        if name == "and_or" and min(params) < 1:
            raise PreconditionError("and_or needs k >= 1 and l >= 1")
        if name == "threshold" and params[1] > params[0]:
            raise PreconditionError("threshold needs k <= n")
        if name == "const" and params[1] not in (0, 1):
            raise PreconditionError("const needs b in {0, 1}")
        if name == "dictator" and not 1 <= params[1] <= params[0]:
            raise PreconditionError("dictator needs 1 <= i <= n")

    @classmethod
    def list_families(cls) -> Dict[str, Dict[str, str]]:
        return {
            name: {"params": meta["params"], "description": meta["description"]}
            for name, meta in cls.FAMILIES.items()
        }


def from_family(name: str, params: List[int]) -> TruthTable:
    return FamilyRegistry.build(name, params)
