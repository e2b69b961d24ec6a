"""Slice-grid placement of partitions and their MACs.

Partitions are laid out as equal-width vertical bands across the slice grid,
ordered left to right by partition index. MACs occupy fixed-size rectangular
footprints packed row-major inside their band. The constraint text uses one
PBLOCK line per partition and one LOC line per MAC.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CapacityError, ParameterError
from .report_ingest import MacId

_PBLOCK_RE = re.compile(r"^PBLOCK p(\d+) SLICE_X(\d+)Y(\d+):SLICE_X(\d+)Y(\d+)$")
_LOC_RE = re.compile(r"^LOC (GEN_REG_I\[(\d+)\]\.GEN_REG_J\[(\d+)\]) SLICE_X(\d+)Y(\d+)$")


@dataclass(frozen=True)
class PartitionLayout:
    """Island rectangles (inclusive corners) plus per-MAC anchor slices."""

    grid: tuple
    islands: tuple
    mac_loc: dict
    mac_footprint: tuple
    partition_of: dict


def plan_layout(assignment, grid, mac_footprint=(1, 1)) -> PartitionLayout:
    """Vertical-band floorplan for a cluster assignment.

    grid is (x_extent, y_extent) in slices; each MAC claims a
    mac_footprint = (width, height) block anchored at its LOC corner.
    Raises CapacityError when a band cannot hold its cluster.
    """
    grid_x, grid_y = int(grid[0]), int(grid[1])
    foot_w, foot_h = int(mac_footprint[0]), int(mac_footprint[1])
    if grid_x < 1 or grid_y < 1:
        raise ParameterError(f"slice grid must be at least 1x1, got {grid_x}x{grid_y}")
    if foot_w < 1 or foot_h < 1:
        raise ParameterError(f"MAC footprint must be at least 1x1, got {foot_w}x{foot_h}")

    p = assignment.P
    band_w = grid_x // p
    if band_w < foot_w:
        raise CapacityError(
            f"{p} bands of width {band_w} cannot hold a {foot_w}-slice-wide MAC "
            f"on a {grid_x}x{grid_y} grid"
        )
    slots_x = band_w // foot_w
    slots_y = grid_y // foot_h
    capacity = slots_x * slots_y

    members = {c: [] for c in range(p)}
    for mac in sorted(assignment.cluster_of):
        members[assignment.cluster_of[mac]].append(mac)

    islands = []
    mac_loc = {}
    for part in range(p):
        need = len(members[part])
        if need > capacity:
            raise CapacityError(
                f"partition {part} needs {need} MAC blocks "
                f"({need * foot_w * foot_h} slices) but its band offers {capacity} "
                f"blocks ({capacity * foot_w * foot_h} of {band_w * grid_y} slices)"
            )
        x_lo = part * band_w
        islands.append((x_lo, 0, x_lo + band_w - 1, grid_y - 1))
        for slot, mac in enumerate(members[part]):
            x = x_lo + (slot % slots_x) * foot_w
            y = (slot // slots_x) * foot_h
            mac_loc[mac] = (x, y)

    layout = PartitionLayout(
        grid=(grid_x, grid_y),
        islands=tuple(islands),
        mac_loc=mac_loc,
        mac_footprint=(foot_w, foot_h),
        partition_of=dict(sorted(assignment.cluster_of.items())),
    )
    validate_layout(layout)
    return layout


def validate_layout(layout: PartitionLayout) -> None:
    """Check containment, disjointness, and grid bounds; raise on violation."""
    grid_x, grid_y = layout.grid
    foot_w, foot_h = layout.mac_footprint
    for i, (x_lo, y_lo, x_hi, y_hi) in enumerate(layout.islands):
        if not (0 <= x_lo <= x_hi < grid_x and 0 <= y_lo <= y_hi < grid_y):
            raise ParameterError(f"island {i} {layout.islands[i]} leaves the {grid_x}x{grid_y} grid")
        for j in range(i):
            ox_lo, oy_lo, ox_hi, oy_hi = layout.islands[j]
            if x_lo <= ox_hi and ox_lo <= x_hi and y_lo <= oy_hi and oy_lo <= y_hi:
                raise ParameterError(f"islands {j} and {i} overlap")
    for mac, (x, y) in layout.mac_loc.items():
        part = layout.partition_of[mac]
        x_lo, y_lo, x_hi, y_hi = layout.islands[part]
        if not (x_lo <= x and x + foot_w - 1 <= x_hi and y_lo <= y and y + foot_h - 1 <= y_hi):
            raise ParameterError(
                f"{mac.instance_name()} block at ({x},{y}) leaves island {part}"
            )
    seen = {}
    for mac, (x, y) in layout.mac_loc.items():
        if (x, y) in seen:
            raise ParameterError(
                f"{mac.instance_name()} and {seen[(x, y)].instance_name()} share anchor ({x},{y})"
            )
        seen[(x, y)] = mac


def emit_constraints(layout: PartitionLayout) -> str:
    """Constraint text: PBLOCK lines by partition, LOC lines by MAC order."""
    lines = []
    for part, (x_lo, y_lo, x_hi, y_hi) in enumerate(layout.islands):
        lines.append(f"PBLOCK p{part} SLICE_X{x_lo}Y{y_lo}:SLICE_X{x_hi}Y{y_hi}")
    for mac in sorted(layout.mac_loc):
        x, y = layout.mac_loc[mac]
        lines.append(f"LOC {mac.instance_name()} SLICE_X{x}Y{y}")
    return "\n".join(lines) + "\n"


def parse_constraints(text: str, grid=None, mac_footprint=None) -> PartitionLayout:
    """Rebuild a layout from constraint text.

    The text does not carry the grid extents or the MAC footprint; pass them
    to reproduce the emitting layout exactly, otherwise the grid is inferred
    from the island bounding box and the footprint defaults to 1x1. Partition
    membership is recovered by locating each MAC inside an island.
    """
    islands = {}
    mac_loc = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        pblock = _PBLOCK_RE.match(stripped)
        if pblock:
            part = int(pblock.group(1))
            if part in islands:
                raise ParameterError(f"line {line_no}: duplicate PBLOCK p{part}")
            islands[part] = tuple(int(g) for g in pblock.groups()[1:])
            continue
        loc = _LOC_RE.match(stripped)
        if loc:
            mac = MacId(int(loc.group(2)), int(loc.group(3)))
            if mac in mac_loc:
                raise ParameterError(f"line {line_no}: duplicate LOC for {mac.instance_name()}")
            mac_loc[mac] = (int(loc.group(4)), int(loc.group(5)))
            continue
        raise ParameterError(f"line {line_no}: unrecognized constraint {stripped!r}")
    if not islands:
        raise ParameterError("constraint text has no PBLOCK lines")
    if sorted(islands) != list(range(len(islands))):
        raise ParameterError("PBLOCK partition indices must be 0..P-1")

    island_list = tuple(islands[i] for i in range(len(islands)))
    if grid is None:
        grid = (
            max(x_hi for _, _, x_hi, _ in island_list) + 1,
            max(y_hi for _, _, _, y_hi in island_list) + 1,
        )
    if mac_footprint is None:
        mac_footprint = (1, 1)

    partition_of = {}
    for mac, (x, y) in mac_loc.items():
        for part, (x_lo, y_lo, x_hi, y_hi) in enumerate(island_list):
            if x_lo <= x <= x_hi and y_lo <= y <= y_hi:
                partition_of[mac] = part
                break
        else:
            raise ParameterError(f"{mac.instance_name()} at ({x},{y}) lies in no island")

    layout = PartitionLayout(
        grid=(int(grid[0]), int(grid[1])),
        islands=island_list,
        mac_loc=dict(sorted(mac_loc.items())),
        mac_footprint=(int(mac_footprint[0]), int(mac_footprint[1])),
        partition_of=dict(sorted(partition_of.items())),
    )
    validate_layout(layout)
    return layout
