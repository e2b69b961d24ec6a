"""Synthesis timing report ingestion.

Parses the path table of a post-synthesis timing report into structured
records and maps register endpoints onto MAC grid coordinates. Two layouts
are accepted: whitespace-tabular (columns separated by two or more spaces,
the way report pretty-printers align them) and comma-delimited. Both carry
the same twelve column names.

Every path records both endpoints, the delay split, and the requirement.
Only the "To" endpoint is used to attribute a path to a MAC; "From" is kept
for reporting.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

from .errors import ReportParseError, SchemaError, UnmappedEndpointError

REPORT_COLUMNS = (
    "Name",
    "Slack",
    "Levels",
    "High Fanout",
    "From",
    "To",
    "Total Delay",
    "Logic Delay",
    "Net Delay",
    "Requirement",
    "Source Clock",
    "Destination Clock",
)

# generate-loop instance prefix carrying the MAC's grid indices
MAC_PATTERN = re.compile(r"GEN_REG_I\[(\d+)\]\.GEN_REG_J\[(\d+)\]")

# slack + data delay may undershoot the requirement by analysis margins
# (clock skew, uncertainty); it must never overshoot by more than this
SLACK_BUDGET_TOL = 0.5
# logic + net may miss the printed total by a rounding crumb
DELAY_SPLIT_TOL = 0.05

_TABULAR_SPLIT = re.compile(r"\t+| {2,}")


@dataclass(frozen=True, order=True)
class MacId:
    """Position of one multiply-accumulate unit in the array."""

    row: int
    col: int

    def __post_init__(self):
        if self.row < 0 or self.col < 0:
            raise ValueError(f"MAC indices must be non-negative, got {self}")

    def instance_name(self) -> str:
        return f"GEN_REG_I[{self.row}].GEN_REG_J[{self.col}]"


@dataclass(frozen=True)
class TimingPath:
    """One row of the report's path table."""

    name: str
    slack: float
    levels: int
    high_fanout: int
    from_endpoint: str
    to_endpoint: str
    total_delay: float
    logic_delay: float
    net_delay: float
    requirement: float
    source_clock: str
    destination_clock: str


_FLOAT_FIELDS = {"Slack", "Total Delay", "Logic Delay", "Net Delay", "Requirement"}
_INT_FIELDS = {"Levels", "High Fanout"}

_COLUMN_TO_FIELD = {
    "Name": "name",
    "Slack": "slack",
    "Levels": "levels",
    "High Fanout": "high_fanout",
    "From": "from_endpoint",
    "To": "to_endpoint",
    "Total Delay": "total_delay",
    "Logic Delay": "logic_delay",
    "Net Delay": "net_delay",
    "Requirement": "requirement",
    "Source Clock": "source_clock",
    "Destination Clock": "destination_clock",
}


def _check_path(path: TimingPath, line_no: int) -> None:
    """Reject rows that violate basic timing-report consistency."""
    if path.requirement <= 0:
        raise ReportParseError(f"line {line_no}: requirement must be positive, got {path.requirement}")
    if path.slack + path.total_delay > path.requirement + SLACK_BUDGET_TOL:
        raise ReportParseError(
            f"line {line_no}: slack {path.slack} + total delay {path.total_delay} "
            f"exceeds requirement {path.requirement} by more than {SLACK_BUDGET_TOL} ns"
        )
    if path.total_delay < path.logic_delay - DELAY_SPLIT_TOL or path.total_delay < path.net_delay - DELAY_SPLIT_TOL:
        raise ReportParseError(f"line {line_no}: component delay exceeds total delay")
    if abs(path.logic_delay + path.net_delay - path.total_delay) > DELAY_SPLIT_TOL:
        raise ReportParseError(
            f"line {line_no}: logic {path.logic_delay} + net {path.net_delay} "
            f"differs from total {path.total_delay} by more than {DELAY_SPLIT_TOL} ns"
        )


def _convert(column: str, raw: str, line_no: int):
    raw = raw.strip()
    try:
        if column in _FLOAT_FIELDS:
            return float(raw)
        if column in _INT_FIELDS:
            return int(raw)
    except ValueError:
        raise ReportParseError(f"line {line_no}: non-numeric {column} value {raw!r}") from None
    return raw


def _header_index(cells: list[str]) -> dict[str, int]:
    index = {}
    for pos, cell in enumerate(cells):
        index[cell.strip()] = pos
    for column in REPORT_COLUMNS:
        if column not in index:
            raise SchemaError(f"missing required column: {column}")
    return {column: index[column] for column in REPORT_COLUMNS}


def _rows_from_text(text: str, format: str):
    """Yield (line_no, cells) pairs, header first. Blank and # lines skipped."""
    if format == "delimited":
        reader = csv.reader(io.StringIO(text))
        for line_no, cells in enumerate(reader, start=1):
            if not cells or not any(cell.strip() for cell in cells):
                continue
            if cells[0].lstrip().startswith("#"):
                continue
            yield line_no, [cell.strip() for cell in cells]
    else:
        for line_no, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield line_no, [cell.strip() for cell in _TABULAR_SPLIT.split(stripped)]


def sniff_format(text: str) -> str:
    """Guess the layout from the first non-comment line."""
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        return "delimited" if "," in stripped else "tabular"
    return "tabular"


def parse_timing_report(source, format: str | None = None) -> list[TimingPath]:
    """Parse a timing report from a string or readable text stream.

    format is "tabular", "delimited", or None to sniff from the header line.
    Raises SchemaError for a missing column, ReportParseError for a bad row
    (citing the physical line number) or for an empty report.
    """
    text = source if isinstance(source, str) else source.read()
    if format is None:
        format = sniff_format(text)
    if format not in ("tabular", "delimited"):
        raise ReportParseError(f"unknown report format {format!r}; use 'tabular' or 'delimited'")

    rows = _rows_from_text(text, format)
    try:
        _, header_cells = next(rows)
    except StopIteration:
        raise ReportParseError("no paths: report is empty") from None
    column_index = _header_index(header_cells)

    paths = []
    for line_no, cells in rows:
        if len(cells) < len(REPORT_COLUMNS):
            raise ReportParseError(
                f"line {line_no}: expected {len(REPORT_COLUMNS)} columns, found {len(cells)}"
            )
        values = {}
        for column, field_name in _COLUMN_TO_FIELD.items():
            values[field_name] = _convert(column, cells[column_index[column]], line_no)
        path = TimingPath(**values)
        _check_path(path, line_no)
        paths.append(path)
    if not paths:
        raise ReportParseError("no paths: report has a header but no data rows")
    return paths


def load_timing_report(path) -> list[TimingPath]:
    """Read a report file; .csv means delimited, anything else is sniffed."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    format = "delimited" if str(path).endswith(".csv") else None
    return parse_timing_report(text, format=format)


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_timing_report(paths, format: str = "delimited") -> str:
    """Render paths back to report text; parse(serialize(p)) == p field for field."""
    header = list(REPORT_COLUMNS)
    table = [header]
    for path in paths:
        table.append([_format_value(getattr(path, _COLUMN_TO_FIELD[c])) for c in REPORT_COLUMNS])

    if format == "delimited":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerows(table)
        return out.getvalue()
    if format == "tabular":
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = []
        for row in table:
            lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"
    raise ReportParseError(f"unknown report format {format!r}; use 'tabular' or 'delimited'")


def mac_of_endpoint(endpoint: str) -> MacId:
    """Extract the MAC coordinates from an endpoint's instance path."""
    match = MAC_PATTERN.search(endpoint)
    if match is None:
        raise UnmappedEndpointError(endpoint)
    return MacId(int(match.group(1)), int(match.group(2)))


def attribute_paths(paths):
    """Split paths by destination MAC.

    Returns (by_mac, unattributed): a dict MacId -> list of paths whose "To"
    endpoint lands in that MAC, and the list of paths mapping to no MAC.
    Nothing is dropped.
    """
    by_mac: dict[MacId, list[TimingPath]] = {}
    unattributed: list[TimingPath] = []
    for path in paths:
        try:
            mac = mac_of_endpoint(path.to_endpoint)
        except UnmappedEndpointError:
            unattributed.append(path)
            continue
        by_mac.setdefault(mac, []).append(path)
    return by_mac, unattributed
