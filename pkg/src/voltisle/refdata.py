"""Bundled published reference measurements.

These numbers come from published hardware runs of the equivalent flow and
are shipped as data, not truth: reports print the model's value next to the
reference and flag the gap. The bundled files live in voltisle/data/.
"""
from __future__ import annotations

import csv
from importlib import resources


def _read_csv(name: str):
    text = resources.files("voltisle.data").joinpath(name).read_text(encoding="utf-8")
    return list(csv.DictReader(text.splitlines()))


def reference_power_rows() -> list[dict]:
    """Published power rows: array, technology, voltages, mW, reduction."""
    rows = []
    for raw in _read_csv("reference_power.csv"):
        rows.append(
            {
                "array": raw["array"],
                "technology": raw["technology"],
                "partitions": int(raw["partitions"]),
                "baseline_v": float(raw["baseline_v"]),
                "voltages": tuple(float(v) for v in raw["voltages"].split("|")),
                "baseline_mw": float(raw["baseline_mw"]),
                "scaled_mw": float(raw["scaled_mw"]),
                "reduction_pct": float(raw["reduction_pct"]),
            }
        )
    return rows


def reference_power_row(array: str, technology: str, baseline_v: float = 1.0):
    for row in reference_power_rows():
        if (
            row["array"] == array
            and row["technology"] == technology
            and abs(row["baseline_v"] - baseline_v) < 1e-9
        ):
            return row
    return None


def reference_voltages(technology: str, n: int):
    """Published per-partition bias voltages, or None if not covered."""
    values = {}
    for raw in _read_csv("reference_voltages.csv"):
        if raw["technology"] == technology and int(raw["n"]) == n:
            values[int(raw["partition"])] = float(raw["v_published"])
    if len(values) != n:
        return None
    return tuple(values[i] for i in range(n))
