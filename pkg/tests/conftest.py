import numpy as np
import pytest

from bftk.core.families import FamilyRegistry
from bftk.core.truth_table import TruthTable


def all_tables(n):
    """Every function of arity n, in truth-table order."""
    size = 1 << n
    for k in range(1 << size):
        yield TruthTable.from_values([(k >> (size - 1 - x)) & 1 for x in range(size)])


def fam(name, *params):
    return FamilyRegistry.build(name, list(params))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def or2():
    return fam("or", 2)


@pytest.fixture
def and2():
    return fam("and", 2)


@pytest.fixture
def and_or22():
    return fam("and_or", 2, 2)
