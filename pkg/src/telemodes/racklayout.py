"""Rack-floor layout: a compact string grammar to addressable grid cells.

A machine-room layout is written as one whitespace-separated string, e.g.::

    xc40 1 2 row0-1:0-10 2 c:0-7 1 s:0-7 1 b:0 n:0

read as: system name; two alignment codes for the rack tier (racks within a
row, rows within the floor); rows 0-1 each holding racks 0-10; then per inner
tier an alignment code and an index range — cabinets within a rack, slots
within a cabinet, blades within a slot — and finally nodes within a blade,
which take no code. A bare value like ``b:0`` is the one-element range.

Alignment codes describe their own axis and direction: ``1`` runs left to
right, ``-1`` right to left, ``2`` bottom to top; an axis with no code runs
top to bottom (the screen-natural default, which is why the node tier needs
none). Tiers stack on fixed axes — racks side by side, rows stacked, cabinets
stacked within a rack, slots and blades side by side, nodes stacked within a
blade — and a code only mirrors its own tier's arrangement; it never reaches
into child interiors and never changes the set of addresses.

One grid cell is one node. Adjacent racks and rows are separated by a
one-cell aisle so renderings read as a floor plan.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

LEGAL_ALIGNMENTS = (-1, 1, 2)

#: Gap (in cells) between adjacent racks and between rows.
AISLE = 1

_RANGE = r"(\d+)(?:-(\d+))?"
_ROW_TOKEN = re.compile(rf"^rows?{_RANGE}:{_RANGE}$")
_TIER_TOKEN = {
    "cabinets": re.compile(rf"^(?:c|cabinets|cages):{_RANGE}$"),
    "slots": re.compile(rf"^(?:s|slots):{_RANGE}$"),
    "blades": re.compile(rf"^(?:b|blades):{_RANGE}$"),
    "nodes": re.compile(rf"^(?:n|nodes):{_RANGE}$"),
}

NODE_ID_PATTERN = re.compile(r"^r(\d+)-(\d+)c(\d+)s(\d+)b(\d+)n(\d+)$")


class LayoutError(ValueError):
    """A layout string or node id that does not follow the grammar."""


@dataclass(frozen=True)
class IndexRange:
    """Inclusive integer range of hardware indices."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo < 0:
            raise LayoutError("indices must be non-negative")
        if self.hi < self.lo:
            raise LayoutError(f"reversed range: {self.lo}-{self.hi}")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, value: int) -> bool:
        return self.lo <= value <= self.hi


def _check_alignment(code: int) -> int:
    if code not in LEGAL_ALIGNMENTS:
        raise LayoutError(
            f"illegal alignment code {code}; legal codes are -1, 1, 2"
        )
    return code


@dataclass(frozen=True)
class LayoutSpec:
    """Parsed layout: per-tier index ranges and alignment codes."""

    system_name: str
    row_align: int
    col_align: int
    rows: IndexRange
    racks: IndexRange
    cabinet_align: int
    cabinets: IndexRange
    slot_align: int
    slots: IndexRange
    blade_align: int
    blades: IndexRange
    nodes: IndexRange

    def __post_init__(self) -> None:
        if not self.system_name:
            raise LayoutError("system name must be non-empty")
        for code in (
            self.row_align,
            self.col_align,
            self.cabinet_align,
            self.slot_align,
            self.blade_align,
        ):
            _check_alignment(code)

    @property
    def n_nodes(self) -> int:
        return (
            self.rows.size
            * self.racks.size
            * self.cabinets.size
            * self.slots.size
            * self.blades.size
            * self.nodes.size
        )


@dataclass(frozen=True)
class NodeAddress:
    """One compute node's position in the hardware hierarchy."""

    row: int
    rack: int
    cabinet: int
    slot: int
    blade: int
    node: int

    @property
    def id(self) -> str:
        return (
            f"r{self.row}-{self.rack}c{self.cabinet}"
            f"s{self.slot}b{self.blade}n{self.node}"
        )


@dataclass(frozen=True)
class PlacedNode:
    """A node address pinned to its grid cell."""

    address: NodeAddress
    x: int
    y: int


def _parse_alignment(token: str, position: int) -> int:
    try:
        code = int(token)
    except ValueError:
        raise LayoutError(
            f"token {position}: expected an alignment code, got {token!r}"
        ) from None
    return _check_alignment(code)


def _parse_range(lo: str, hi: str | None) -> IndexRange:
    return IndexRange(int(lo), int(hi) if hi is not None else int(lo))


def parse_layout(spec: str) -> LayoutSpec:
    """Parse a layout string; errors name the offending token position."""
    tokens = spec.split()
    if len(tokens) != 11:
        raise LayoutError(
            f"expected 11 tokens (name, 2 rack codes, row spec, then "
            f"4 aligned tiers), got {len(tokens)}"
        )
    name = tokens[0]
    row_align = _parse_alignment(tokens[1], 1)
    col_align = _parse_alignment(tokens[2], 2)

    row_match = _ROW_TOKEN.match(tokens[3].lower())
    if not row_match:
        raise LayoutError(
            f"token 3: expected row<lo>-<hi>:<lo>-<hi>, got {tokens[3]!r}"
        )
    rows = _parse_range(row_match.group(1), row_match.group(2))
    racks = _parse_range(row_match.group(3), row_match.group(4))

    def tier(position: int, tier_name: str) -> IndexRange:
        match = _TIER_TOKEN[tier_name].match(tokens[position].lower())
        if not match:
            raise LayoutError(
                f"token {position}: expected {tier_name} range like "
                f"'{tier_name[0]}:<lo>-<hi>', got {tokens[position]!r}"
            )
        return _parse_range(match.group(1), match.group(2))

    cabinet_align = _parse_alignment(tokens[4], 4)
    cabinets = tier(5, "cabinets")
    slot_align = _parse_alignment(tokens[6], 6)
    slots = tier(7, "slots")
    blade_align = _parse_alignment(tokens[8], 8)
    blades = tier(9, "blades")
    nodes = tier(10, "nodes")

    return LayoutSpec(
        system_name=name,
        row_align=row_align,
        col_align=col_align,
        rows=rows,
        racks=racks,
        cabinet_align=cabinet_align,
        cabinets=cabinets,
        slot_align=slot_align,
        slots=slots,
        blade_align=blade_align,
        blades=blades,
        nodes=nodes,
    )


def _render_range(r: IndexRange) -> str:
    return str(r.lo) if r.lo == r.hi else f"{r.lo}-{r.hi}"


def render_layout_string(layout: LayoutSpec) -> str:
    """Canonical string form; parse_layout inverts it exactly."""
    return " ".join(
        [
            layout.system_name,
            str(layout.row_align),
            str(layout.col_align),
            f"row{_render_range(layout.rows)}:{_render_range(layout.racks)}",
            str(layout.cabinet_align),
            f"c:{_render_range(layout.cabinets)}",
            str(layout.slot_align),
            f"s:{_render_range(layout.slots)}",
            str(layout.blade_align),
            f"b:{_render_range(layout.blades)}",
            f"n:{_render_range(layout.nodes)}",
        ]
    )


def _positions(size: int, reverse: bool) -> list[int]:
    order = list(range(size))
    return order[::-1] if reverse else order


def _block_dims(layout: LayoutSpec) -> dict[str, tuple[int, int]]:
    """Width/height in cells of each assembly, bottom of the hierarchy up."""
    blade = (1, layout.nodes.size)
    slot = (layout.blades.size * blade[0], blade[1])
    cabinet = (layout.slots.size * slot[0], slot[1])
    rack = (cabinet[0], layout.cabinets.size * cabinet[1])
    return {"blade": blade, "slot": slot, "cabinet": cabinet, "rack": rack}


def layout_bounds(layout: LayoutSpec) -> tuple[int, int]:
    """Total (width, height) of the floor grid including aisles."""
    rack_w, rack_h = _block_dims(layout)["rack"]
    width = layout.racks.size * (rack_w + AISLE) - AISLE
    height = layout.rows.size * (rack_h + AISLE) - AISLE
    return width, height


def enumerate_nodes(layout: LayoutSpec) -> list[PlacedNode]:
    """Every node address with its grid cell, in lexicographic address order.

    Mirrors requested by alignment codes are applied per tier: a code ``-1``
    anywhere in a tier's codes reverses that tier's left-to-right order, a
    ``2`` reverses its top-to-bottom order into bottom-to-top.
    """
    dims = _block_dims(layout)
    blade_w, _ = dims["blade"]
    slot_w, _ = dims["slot"]
    _, cabinet_h = dims["cabinet"]
    rack_w, rack_h = dims["rack"]

    rack_codes = (layout.row_align, layout.col_align)
    rack_x = _positions(layout.racks.size, reverse=-1 in rack_codes)
    row_y = _positions(layout.rows.size, reverse=2 in rack_codes)
    cab_y = _positions(layout.cabinets.size, reverse=layout.cabinet_align == 2)
    slot_x = _positions(layout.slots.size, reverse=layout.slot_align == -1)
    blade_x = _positions(layout.blades.size, reverse=layout.blade_align == -1)

    placed: list[PlacedNode] = []
    for ri, row in enumerate(layout.rows):
        y_row = row_y[ri] * (rack_h + AISLE)
        for ki, rack in enumerate(layout.racks):
            x_rack = rack_x[ki] * (rack_w + AISLE)
            for ci, cabinet in enumerate(layout.cabinets):
                y_cab = y_row + cab_y[ci] * cabinet_h
                for si, slot in enumerate(layout.slots):
                    x_slot = x_rack + slot_x[si] * slot_w
                    for bi, blade in enumerate(layout.blades):
                        x_blade = x_slot + blade_x[bi] * blade_w
                        for ni, node in enumerate(layout.nodes):
                            placed.append(
                                PlacedNode(
                                    address=NodeAddress(
                                        row, rack, cabinet, slot, blade, node
                                    ),
                                    x=x_blade,
                                    y=y_cab + ni,
                                )
                            )
    return placed


def parse_node_id(node_id: str, layout: LayoutSpec | None = None) -> NodeAddress:
    """Inverse of NodeAddress.id; with a layout, indices are bounds-checked."""
    match = NODE_ID_PATTERN.match(node_id)
    if not match:
        raise LayoutError(f"malformed node id: {node_id!r}")
    address = NodeAddress(*(int(g) for g in match.groups()))
    if layout is not None:
        checks = (
            ("row", address.row, layout.rows),
            ("rack", address.rack, layout.racks),
            ("cabinet", address.cabinet, layout.cabinets),
            ("slot", address.slot, layout.slots),
            ("blade", address.blade, layout.blades),
            ("node", address.node, layout.nodes),
        )
        for tier_name, value, valid in checks:
            if value not in valid:
                raise LayoutError(
                    f"{node_id!r}: {tier_name} {value} out of range "
                    f"{valid.lo}-{valid.hi}"
                )
    return address
