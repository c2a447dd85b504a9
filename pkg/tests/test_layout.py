"""Rack-floor grammar: parsing, enumeration, coordinates, id round trips."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telemodes import (
    AISLE,
    IndexRange,
    LayoutError,
    enumerate_nodes,
    layout_bounds,
    parse_layout,
    parse_node_id,
    render_layout_string,
)

REFERENCE = "xc40 1 2 row0-1:0-10 2 c:0-7 1 s:0-7 1 b:0 n:0"


class TestReferenceLayout:
    def test_parses_with_expected_tiers(self):
        lay = parse_layout(REFERENCE)
        assert lay.system_name == "xc40"
        assert (lay.rows.lo, lay.rows.hi) == (0, 1)
        assert (lay.racks.lo, lay.racks.hi) == (0, 10)
        assert (lay.cabinets.lo, lay.cabinets.hi) == (0, 7)
        assert (lay.slots.lo, lay.slots.hi) == (0, 7)
        assert lay.blades.size == 1
        assert lay.nodes.size == 1

    def test_node_count_is_product_of_ranges(self):
        lay = parse_layout(REFERENCE)
        assert lay.n_nodes == 2 * 11 * 8 * 8 * 1 * 1 == 1408

    def test_enumeration_unique_ids_and_coordinates(self):
        nodes = enumerate_nodes(parse_layout(REFERENCE))
        assert len(nodes) == 1408
        assert len({n.address.id for n in nodes}) == 1408
        assert len({(n.x, n.y) for n in nodes}) == 1408

    def test_grid_bounds(self):
        lay = parse_layout(REFERENCE)
        assert layout_bounds(lay) == (98, 17)
        nodes = enumerate_nodes(lay)
        assert max(n.x for n in nodes) == 97
        assert max(n.y for n in nodes) == 16
        assert min(n.x for n in nodes) == 0
        assert min(n.y for n in nodes) == 0

    def test_id_round_trip_all_nodes(self):
        lay = parse_layout(REFERENCE)
        for placed in enumerate_nodes(lay):
            assert parse_node_id(placed.address.id, lay) == placed.address

    def test_racks_separated_by_aisle(self):
        """Adjacent racks in a row never touch: at least one empty column."""
        nodes = enumerate_nodes(parse_layout(REFERENCE))
        by_rack_x = {}
        for n in nodes:
            key = (n.address.row, n.address.rack)
            xs = by_rack_x.setdefault(key, set())
            xs.add(n.x)
        row0 = sorted(
            (min(xs), max(xs)) for (row, _), xs in by_rack_x.items() if row == 0
        )
        for (_, right_edge), (next_left, _) in zip(row0, row0[1:]):
            assert next_left - right_edge > AISLE


class TestGrammarErrors:
    def test_illegal_alignment_rejected(self):
        with pytest.raises(LayoutError, match="alignment"):
            parse_layout("sys 3 1 row0-0:0-0 1 c:0-0 1 s:0-0 1 b:0 n:0")
        with pytest.raises(LayoutError, match="alignment"):
            parse_layout("sys 1 0 row0-0:0-0 1 c:0-0 1 s:0-0 1 b:0 n:0")

    def test_reversed_range_rejected(self):
        with pytest.raises(LayoutError, match="reversed"):
            parse_layout("sys 1 1 row0-0:5-3 1 c:0-0 1 s:0-0 1 b:0 n:0")
        with pytest.raises(LayoutError, match="reversed"):
            parse_layout("sys 1 1 row0-0:0-0 1 c:2-1 1 s:0-0 1 b:0 n:0")

    def test_wrong_token_count(self):
        with pytest.raises(LayoutError, match="11 tokens"):
            parse_layout("sys 1 1 row0-0:0-0")

    def test_malformed_tier_token(self):
        with pytest.raises(LayoutError):
            parse_layout("sys 1 1 row0-0:0-0 1 q:0-0 1 s:0-0 1 b:0 n:0")

    def test_singleton_layout(self):
        lay = parse_layout("sys 1 1 row0-0:0-0 1 c:0-0 1 s:0-0 1 b:0 n:0")
        nodes = enumerate_nodes(lay)
        assert len(nodes) == 1
        assert nodes[0].address.id == "r0-0c0s0b0n0"
        assert (nodes[0].x, nodes[0].y) == (0, 0)


class TestNodeIds:
    def test_malformed_id(self):
        with pytest.raises(LayoutError, match="malformed"):
            parse_node_id("rack0c0")

    def test_out_of_range_with_layout(self):
        lay = parse_layout(REFERENCE)
        with pytest.raises(LayoutError, match="out of range"):
            parse_node_id("r0-11c0s0b0n0", lay)
        with pytest.raises(LayoutError, match="out of range"):
            parse_node_id("r2-0c0s0b0n0", lay)

    def test_unchecked_without_layout(self):
        addr = parse_node_id("r9-9c9s9b9n9")
        assert addr.id == "r9-9c9s9b9n9"


class TestRenderRoundTrip:
    def test_reference_round_trips(self):
        lay = parse_layout(REFERENCE)
        again = parse_layout(render_layout_string(lay))
        assert again == lay

    @settings(max_examples=25, deadline=None)
    @given(
        n_rows=st.integers(1, 3),
        n_racks=st.integers(1, 4),
        n_cab=st.integers(1, 3),
        n_slots=st.integers(1, 3),
        n_blades=st.integers(1, 2),
        n_nodes=st.integers(1, 2),
        aligns=st.tuples(*([st.sampled_from([-1, 1, 2])] * 5)),
    )
    def test_random_layouts_consistent(
        self, n_rows, n_racks, n_cab, n_slots, n_blades, n_nodes, aligns
    ):
        a1, a2, a3, a4, a5 = aligns
        spec = (
            f"sys {a1} {a2} row0-{n_rows - 1}:0-{n_racks - 1} "
            f"{a3} c:0-{n_cab - 1} {a4} s:0-{n_slots - 1} "
            f"{a5} b:0-{n_blades - 1} n:0-{n_nodes - 1}"
        )
        lay = parse_layout(spec)
        nodes = enumerate_nodes(lay)
        assert len(nodes) == lay.n_nodes
        assert len({(n.x, n.y) for n in nodes}) == lay.n_nodes
        assert len({n.address.id for n in nodes}) == lay.n_nodes
        w, h = layout_bounds(lay)
        assert all(0 <= n.x < w and 0 <= n.y < h for n in nodes)
        assert parse_layout(render_layout_string(lay)) == lay


def test_index_range():
    r = IndexRange(2, 5)
    assert r.size == 4
    assert list(r) == [2, 3, 4, 5]
    assert 3 in r and 6 not in r
    with pytest.raises(LayoutError):
        IndexRange(5, 2)
    with pytest.raises(LayoutError):
        IndexRange(-1, 2)
