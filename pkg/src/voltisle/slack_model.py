"""Per-MAC minimum-slack tables.

Aggregates parsed timing paths into the minimum slack seen at each MAC and
synthesizes full tables for arrays where only a report fragment (or nothing)
is available. The per-MAC minimum is what the voltage planner keys on: the
smaller the slack, the less a MAC's supply can be lowered.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .report_ingest import MacId, attribute_paths

PROFILES = ("row_gradient", "uniform", "noisy_gradient")


@dataclass(frozen=True)
class MacSlackTable:
    rows: int
    cols: int
    min_slack: dict
    path_count: dict
    no_path_macs: tuple = ()
    unattributed: tuple = ()

    def macs(self):
        for row in range(self.rows):
            for col in range(self.cols):
                yield MacId(row, col)

    def slack_vector(self) -> np.ndarray:
        """Row-major vector of per-MAC minimum slack."""
        return np.array([self.min_slack[mac] for mac in self.macs()], dtype=float)

    def slack_grid(self) -> np.ndarray:
        return self.slack_vector().reshape(self.rows, self.cols)


def _check_dims(rows: int, cols: int) -> None:
    if rows < 1 or cols < 1:
        raise ParameterError(f"array dimensions must be at least 1x1, got {rows}x{cols}")


def min_slack_per_mac(paths, rows: int, cols: int) -> MacSlackTable:
    """Minimum slack over all attributed paths ending in each MAC.

    MACs with no attributed path inherit the global minimum slack for safety
    and are listed in no_path_macs. Paths whose endpoint maps to no MAC are
    kept in the unattributed list (by name), never silently dropped. Raises
    ParameterError when nothing at all can be attributed.
    """
    _check_dims(rows, cols)
    by_mac, unattributed = attribute_paths(paths)
    if not by_mac:
        raise ParameterError("no MAC coverage: no path endpoint matches the MAC pattern")
    for mac in by_mac:
        if mac.row >= rows or mac.col >= cols:
            raise ParameterError(
                f"path endpoint maps to {mac.instance_name()} outside the {rows}x{cols} array"
            )

    global_min = min(min(p.slack for p in plist) for plist in by_mac.values())
    min_slack = {}
    path_count = {}
    missing = []
    for row in range(rows):
        for col in range(cols):
            mac = MacId(row, col)
            plist = by_mac.get(mac)
            if plist:
                min_slack[mac] = min(p.slack for p in plist)
                path_count[mac] = len(plist)
            else:
                min_slack[mac] = global_min
                path_count[mac] = 0
                missing.append(mac)
    return MacSlackTable(
        rows=rows,
        cols=cols,
        min_slack=min_slack,
        path_count=path_count,
        no_path_macs=tuple(missing),
        unattributed=tuple(p.name for p in unattributed),
    )


def _profile_values(rows, cols, profile, rng, lo, hi, noise_sd):
    if profile == "uniform":
        return lo + (hi - lo) * rng.random((rows, cols))
    band = (hi - lo) / rows
    row_top = hi - band * np.arange(rows, dtype=float)
    if profile == "row_gradient":
        # keep each row inside the middle of its band so row ordering is strict
        jitter = rng.random((rows, cols))
        return row_top[:, None] - band * (0.1 + 0.8 * jitter)
    if profile == "noisy_gradient":
        sd = band / 2.0 if noise_sd is None else noise_sd
        mid = row_top - band / 2.0
        values = mid[:, None] + rng.normal(0.0, sd, (rows, cols))
        return np.clip(values, lo, hi)
    raise ParameterError(f"unknown profile {profile!r}; valid: {', '.join(PROFILES)}")


def synthesize_slack_table(
    rows: int,
    cols: int,
    profile: str = "row_gradient",
    seed: int = 0,
    lo: float = 4.0,
    hi: float = 6.0,
    noise_sd: float | None = None,
) -> MacSlackTable:
    """Deterministic synthetic slack table in the [lo, hi] band.

    row_gradient places row i strictly above row i+1, uniform draws iid
    values, noisy_gradient is a ramp plus clipped Gaussian noise. The same
    arguments always produce the same table.
    """
    _check_dims(rows, cols)
    if profile not in PROFILES:
        raise ParameterError(f"unknown profile {profile!r}; valid: {', '.join(PROFILES)}")
    if lo > hi:
        raise ParameterError(f"slack band is empty: lo {lo} > hi {hi}")
    rng = np.random.default_rng(seed)
    grid = _profile_values(rows, cols, profile, rng, float(lo), float(hi), noise_sd)
    min_slack = {}
    path_count = {}
    for row in range(rows):
        for col in range(cols):
            min_slack[MacId(row, col)] = float(grid[row, col])
            path_count[MacId(row, col)] = 0
    return MacSlackTable(rows=rows, cols=cols, min_slack=min_slack, path_count=path_count)


def complete_table(
    table: MacSlackTable,
    profile: str = "row_gradient",
    seed: int = 0,
    lo: float = 4.0,
    hi: float = 6.0,
    noise_sd: float | None = None,
) -> MacSlackTable:
    """Fill every no-path MAC with a synthetic profile value.

    Report-backed entries are untouched; the no_path list is retained so the
    provenance of each value stays visible (path_count 0 means synthetic).
    """
    if not table.no_path_macs:
        return table
    synth = synthesize_slack_table(table.rows, table.cols, profile, seed, lo, hi, noise_sd)
    min_slack = dict(table.min_slack)
    for mac in table.no_path_macs:
        min_slack[mac] = synth.min_slack[mac]
    return replace(table, min_slack=min_slack)


def write_slack_table(table: MacSlackTable, path) -> None:
    lines = ["row,col,min_slack_ns,path_count"]
    for mac in table.macs():
        lines.append(f"{mac.row},{mac.col},{table.min_slack[mac]!r},{table.path_count[mac]}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def read_slack_table(path) -> MacSlackTable:
    min_slack = {}
    path_count = {}
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        if header != "row,col,min_slack_ns,path_count":
            raise ParameterError(f"unexpected slack table header {header!r}")
        for line in handle:
            line = line.strip()
            if not line:
                continue
            row, col, slack, count = line.split(",")
            mac = MacId(int(row), int(col))
            min_slack[mac] = float(slack)
            path_count[mac] = int(count)
    if not min_slack:
        raise ParameterError("slack table file has no rows")
    rows = max(mac.row for mac in min_slack) + 1
    cols = max(mac.col for mac in min_slack) + 1
    if len(min_slack) != rows * cols:
        raise ParameterError(f"slack table is not a full {rows}x{cols} grid")
    return MacSlackTable(rows=rows, cols=cols, min_slack=min_slack, path_count=path_count)
