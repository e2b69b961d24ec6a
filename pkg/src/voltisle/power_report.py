"""Quadratic dynamic-power model over voltage islands.

Dynamic power scales with the square of the supply, so a partition holding
fraction f of the array at voltage v contributes baseline * f * (v/v_nom)^2.
Reports print the model's numbers next to the bundled published reference
measurements and flag the gap; the reference flow's vendor power engines
account for effects this model does not, so the gap is expected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import refdata
from .errors import ParameterError
from .voltage_plan import regions_for

_FRACTION_TOL = 1e-9

_VARIANT_RE = re.compile(
    r"^\s*(\d+)\s*[x×]\s*\(\s*(\d+)\s*[x×]\s*(\d+)\s*\)\s*\{([^}]*)\}\s*$"
)


@dataclass(frozen=True)
class PowerReport:
    baseline_mw: float
    per_partition_mw: tuple
    scaled_total_mw: float
    reduction_pct: float
    variant_label: str


def format_variant(partitions: int, island_dims, voltages) -> str:
    """Canonical label: P x (n x m) { voltages }, in ASCII."""
    vs = ",".join(f"{v:g}" for v in voltages)
    return f"{partitions}x({island_dims[0]}x{island_dims[1]}){{{vs}}}"


def parse_variant(text: str):
    """Inverse of format_variant; also accepts the multiplication sign."""
    match = _VARIANT_RE.match(text)
    if match is None:
        raise ParameterError(f"cannot parse variant {text!r}; expected like 2x(32x64){{0.5,0.6}}")
    partitions = int(match.group(1))
    dims = (int(match.group(2)), int(match.group(3)))
    voltages = tuple(float(v) for v in match.group(4).split(",") if v.strip())
    if len(voltages) != partitions:
        raise ParameterError(
            f"variant {text!r} lists {len(voltages)} voltages for {partitions} partitions"
        )
    return partitions, dims, voltages


def dynamic_power(
    baseline_mw: float,
    partition_fractions,
    voltages,
    v_nom: float,
    label: str | None = None,
) -> PowerReport:
    """Scaled power when partition i holding fraction f_i runs at v_i."""
    if baseline_mw <= 0:
        raise ParameterError(f"baseline power must be positive, got {baseline_mw}")
    if v_nom <= 0:
        raise ParameterError(f"v_nom must be positive, got {v_nom}")
    fractions = [float(f) for f in partition_fractions]
    volts = [float(v) for v in voltages]
    if len(fractions) != len(volts):
        raise ParameterError(
            f"{len(fractions)} fractions but {len(volts)} voltages"
        )
    if any(f < 0 for f in fractions):
        raise ParameterError("partition fractions must be non-negative")
    if abs(sum(fractions) - 1.0) > _FRACTION_TOL:
        raise ParameterError(f"partition fractions sum to {sum(fractions)!r}, expected 1")
    if any(v <= 0 for v in volts):
        raise ParameterError("partition voltages must be positive")

    per = tuple(baseline_mw * f * (v / v_nom) ** 2 for f, v in zip(fractions, volts))
    scaled = sum(per)
    reduction = 100.0 * (1.0 - scaled / baseline_mw)
    if label is None:
        label = f"{len(volts)}x{{{','.join(f'{v:g}' for v in volts)}}}"
    return PowerReport(
        baseline_mw=float(baseline_mw),
        per_partition_mw=per,
        scaled_total_mw=float(scaled),
        reduction_pct=float(reduction),
        variant_label=label,
    )


def sweep_variants(variants, baselines, array_dims=(64, 64)):
    """Evaluate equal-island variants against per-technology baselines.

    variants is a list of (partitions, island_dims, voltages); each must
    tile the array exactly (partitions * n * m == rows * cols). baselines
    maps technology name -> baseline mW at that technology's nominal
    voltage. Returns (technology, PowerReport) rows sorted by technology
    and then by reduction, best first.
    """
    rows, cols = int(array_dims[0]), int(array_dims[1])
    total = rows * cols
    checked = []
    for partitions, dims, voltages in variants:
        n, m = int(dims[0]), int(dims[1])
        if partitions * n * m != total:
            raise ParameterError(
                f"variant {format_variant(partitions, dims, voltages)} covers "
                f"{partitions * n * m} MACs; the {rows}x{cols} array has {total}"
            )
        if len(voltages) != partitions:
            raise ParameterError(
                f"variant {format_variant(partitions, dims, voltages)} needs "
                f"{partitions} voltages, got {len(voltages)}"
            )
        checked.append((partitions, (n, m), tuple(float(v) for v in voltages)))

    out = []
    for technology in sorted(baselines):
        v_nom = regions_for(technology).v_nom
        for partitions, dims, voltages in checked:
            fractions = [1.0 / partitions] * partitions
            report = dynamic_power(
                baselines[technology],
                fractions,
                voltages,
                v_nom,
                label=format_variant(partitions, dims, voltages),
            )
            out.append((technology, report))
    out.sort(key=lambda row: (row[0], -row[1].reduction_pct, row[1].variant_label))
    return out


def render_power_table(rows) -> str:
    """Aligned text table from (technology, PowerReport) rows."""
    header = ("variant", "technology", "baseline_mw", "scaled_mw", "reduction_pct")
    cells = [header]
    for technology, report in rows:
        cells.append(
            (
                report.variant_label,
                technology,
                f"{report.baseline_mw:.2f}",
                f"{report.scaled_total_mw:.2f}",
                f"{report.reduction_pct:.3f}",
            )
        )
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = []
    for row in cells:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def write_power_csv(rows, path) -> None:
    lines = ["variant,technology,baseline_mw,scaled_mw,reduction_pct"]
    for technology, report in rows:
        lines.append(
            f"{report.variant_label},{technology},{report.baseline_mw!r},"
            f"{report.scaled_total_mw!r},{report.reduction_pct!r}"
        )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def comparison_report(array_label: str, technology: str, model_report: PowerReport,
                      baseline_v: float = 1.0) -> str:
    """Model numbers next to the bundled published reference, gap flagged."""
    lines = [
        f"{array_label} {technology}  baseline {model_report.baseline_mw:.1f} mW",
        f"  model:     scaled {model_report.scaled_total_mw:.1f} mW  "
        f"reduction {model_report.reduction_pct:.3f}%",
    ]
    reference = refdata.reference_power_row(array_label, technology, baseline_v)
    if reference is None:
        lines.append("  reference: none bundled for this configuration")
    else:
        gap = reference["reduction_pct"] - model_report.reduction_pct
        lines.append(
            f"  reference: scaled {reference['scaled_mw']:.1f} mW  "
            f"reduction {reference['reduction_pct']:.2f}%  (published measurement)"
        )
        lines.append(
            f"  gap:       {gap:+.3f} percentage points; the published flow's power "
            f"engine models effects (clocking, IO, measured activity) this "
            f"quadratic model does not"
        )
    return "\n".join(lines) + "\n"
