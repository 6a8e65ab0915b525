"""
Graph properties as Boolean functions of the C(n, 2) edge variables.

Edge {i, j} (1-based vertices, i < j) is variable number
sum_{k < i} (n - k) + (j - i), i.e. bit position one less than that.  A
property is isomorphism-invariant when permuting vertices, acting on edge
variables, leaves the function unchanged.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..core.errors import ArityCapError, UnknownPropertyError
from ..core.polynomial import degree, degree_gf2
from ..core.truth_table import TruthTable
from .combinatorial import (
    BS_MAX_ARITY,
    CERT_MAX_ARITY,
    DQ_MAX_ARITY,
    block_sensitivity,
    certificate_complexity,
    det_query_complexity,
    sensitivity,
)
from .spectral import spectral_sensitivity

logger = logging.getLogger(__name__)

GRAPH_MAX_VERTICES = 6
CHECK_MAX_VERTICES = 5


def edge_position(i: int, j: int, n: int) -> int:
    """1-based variable number of edge {i, j}."""
    if i > j:
        i, j = j, i
    return sum(n - k for k in range(1, i)) + (j - i)


@lru_cache(maxsize=16)
def edge_list(n: int) -> Tuple[Tuple[int, int], ...]:
    """Edges in variable order."""
    return tuple(sorted(combinations(range(1, n + 1), 2), key=lambda e: edge_position(e[0], e[1], n)))


def graph_from_input(x: int, n: int) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(1, n + 1))
    graph.add_edges_from(e for b, e in enumerate(edge_list(n)) if x >> b & 1)
    return graph


def _spanning_star(g: nx.Graph) -> bool:
    n = g.number_of_nodes()
    return n == 1 or any(deg == n - 1 for _, deg in g.degree())


PROPERTIES: Dict[str, Tuple[str, Callable[[nx.Graph], bool]]] = {
    "contains-edge": ("at least one edge", lambda g: g.number_of_edges() > 0),
    "contains-triangle": ("a 3-cycle", lambda g: any(t > 0 for t in nx.triangles(g).values())),
    "connected": ("connected", lambda g: nx.is_connected(g)),
    "min-degree-1": ("no isolated vertex", lambda g: min(d for _, d in g.degree()) >= 1),
    "spanning-star": ("a vertex adjacent to all others", _spanning_star),
    "edge-parity": ("odd number of edges (not monotone)", lambda g: g.number_of_edges() % 2 == 1),
    "empty": ("never (constant 0)", lambda g: False),
}


@dataclass(frozen=True)
class GraphProperty:
    name: str
    n_vertices: int
    table: TruthTable

    @property
    def edge_count(self) -> int:
        return self.n_vertices * (self.n_vertices - 1) // 2


@lru_cache(maxsize=64)
def graph_property(name: str, n_vertices: int) -> GraphProperty:
    key = name.strip().lower()
    if key not in PROPERTIES:
        raise UnknownPropertyError(name)
    if not 2 <= n_vertices <= GRAPH_MAX_VERTICES:
        raise ArityCapError("graph property vertices", n_vertices, GRAPH_MAX_VERTICES)
    predicate = PROPERTIES[key][1]
    m = n_vertices * (n_vertices - 1) // 2
    values = np.fromiter((predicate(graph_from_input(x, n_vertices)) for x in range(1 << m)),
                         dtype=np.uint8, count=1 << m)
    logger.debug(f"Tabulated {key} on {n_vertices} vertices ({m} edge variables)")
    return GraphProperty(key, n_vertices, TruthTable.from_values(values))


def edge_permutation(perm: Sequence[int], n: int) -> np.ndarray:
    """Bit b moves to bit out[b] when vertex v+1 is relabelled perm[v]+1."""
    out = np.empty(n * (n - 1) // 2, dtype=np.int64)
    for b, (i, j) in enumerate(edge_list(n)):
        out[b] = edge_position(perm[i - 1] + 1, perm[j - 1] + 1, n) - 1
    return out


def invariant_under(p: GraphProperty, perm: Sequence[int]) -> bool:
    n = p.n_vertices
    moved = edge_permutation(perm, n)
    idx = np.arange(p.table.size, dtype=np.int64)
    image = np.zeros_like(idx)
    for b, target in enumerate(moved):
        image |= ((idx >> b) & 1) << target
    return bool(np.array_equal(p.table.values[image], p.table.values))


def is_monotone(f: TruthTable) -> bool:
    idx = np.arange(f.size)
    vals = f.values
    for i in range(f.n):
        low = idx[(idx >> i & 1) == 0]
        if np.any(vals[low] > vals[low | (1 << i)]):
            return False
    return True


@dataclass(frozen=True)
class GraphPropertyFlags:
    name: str
    n_vertices: int
    invariant: bool
    monotone: bool
    nontrivial: bool


def check_graph_property(p: GraphProperty) -> GraphPropertyFlags:
    """Invariance under the generators (1 2) and (1 2 ... n) of S_n, monotonicity, nontriviality."""
    n = p.n_vertices
    if n > CHECK_MAX_VERTICES:
        raise ArityCapError("graph property check", n, CHECK_MAX_VERTICES)
    transposition = [1, 0] + list(range(2, n))
    cycle = [(v + 1) % n for v in range(n)]
    invariant = invariant_under(p, transposition) and invariant_under(p, cycle)
    return GraphPropertyFlags(p.name, n, invariant, is_monotone(p.table), not p.table.is_constant)


@dataclass(frozen=True)
class GraphPropertyMeasures:
    name: str
    n_vertices: int
    deg2: int
    deg: int
    lambda_value: float
    s: int
    bs: Optional[int]
    c: Optional[int]
    d: Optional[int]

    @property
    def query_lower_bound(self) -> float:
        """sqrt(deg2), below lambda >= sqrt(deg) >= sqrt(deg2)."""
        return math.sqrt(self.deg2)


def graph_property_report(p: GraphProperty) -> GraphPropertyMeasures:
    f = p.table
    bs = block_sensitivity(f).bs if f.n <= BS_MAX_ARITY else None
    c = certificate_complexity(f).c if f.n <= CERT_MAX_ARITY else None
    d = det_query_complexity(f) if f.n <= DQ_MAX_ARITY else None
    return GraphPropertyMeasures(
        name=p.name,
        n_vertices=p.n_vertices,
        deg2=degree_gf2(f),
        deg=degree(f),
        lambda_value=spectral_sensitivity(f).value,
        s=sensitivity(f).s,
        bs=bs,
        c=c,
        d=d,
    )


def list_properties() -> List[Tuple[str, str]]:
    return [(name, meta[0]) for name, meta in PROPERTIES.items()]
