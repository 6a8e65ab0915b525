import numpy as np
import pytest

from bftk.core.errors import ArityCapError, UnknownPropertyError
from bftk.core.truth_table import load_function
from bftk.services.graph_properties import (
    check_graph_property,
    edge_list,
    edge_position,
    graph_from_input,
    graph_property,
    graph_property_report,
    invariant_under,
    list_properties,
)

from .conftest import fam

MONOTONE = ["contains-edge", "contains-triangle", "connected", "min-degree-1", "spanning-star"]


class TestEdgeIndexing:
    def test_positions_for_four_vertices(self):
        assert [edge_position(i, j, 4) for i, j in edge_list(4)] == [1, 2, 3, 4, 5, 6]
        assert edge_list(4)[:3] == ((1, 2), (1, 3), (1, 4))
        assert edge_position(3, 4, 4) == 6
        assert edge_position(4, 3, 4) == 6

    def test_graph_from_input(self):
        graph = graph_from_input(0b100001, 4)
        assert sorted(graph.edges()) == [(1, 2), (3, 4)]


class TestProperties:
    def test_triangle_on_three_vertices_is_and(self):
        assert graph_property("contains-triangle", 3).table == fam("and", 3)

    def test_connected_on_three_vertices(self):
        assert graph_property("connected", 3).table == fam("threshold", 3, 2)

    def test_loader_prefix(self):
        assert load_function("graph:contains-edge:4") == fam("or", 6)

    @pytest.mark.parametrize("name", MONOTONE)
    @pytest.mark.parametrize("vertices", [3, 4])
    def test_flags_and_measures(self, name, vertices, rng):
        prop = graph_property(name, vertices)
        flags = check_graph_property(prop)
        assert flags.invariant and flags.monotone and flags.nontrivial
        for _ in range(50):
            assert invariant_under(prop, [int(v) for v in rng.permutation(vertices)])
        report = graph_property_report(prop)
        assert report.lambda_value ** 2 >= report.deg - 1e-6
        assert report.deg >= report.deg2
        assert report.query_lower_bound == pytest.approx(np.sqrt(report.deg2))

    def test_edge_parity_is_not_monotone(self):
        flags = check_graph_property(graph_property("edge-parity", 4))
        assert flags.invariant and not flags.monotone

    def test_empty_is_trivial(self):
        assert not check_graph_property(graph_property("empty", 3)).nontrivial

    def test_unknown_property(self):
        with pytest.raises(UnknownPropertyError):
            graph_property("planar", 4)

    def test_vertex_cap(self):
        with pytest.raises(ArityCapError):
            graph_property("connected", 7)

    def test_listing(self):
        names = [name for name, _ in list_properties()]
        assert set(MONOTONE) <= set(names)
