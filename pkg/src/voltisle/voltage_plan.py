"""Voltage regions and the static per-partition bias schedule.

The usable band between the crash voltage (below which the device stops
computing) and the minimum vendor-supported supply is split into n equal
sub-intervals; each partition is biased at its sub-interval midpoint.
Partition 0 carries the largest-slack cluster and therefore the lowest
voltage.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from . import refdata
from .errors import ParameterError


@dataclass(frozen=True)
class VoltageRegions:
    """Operating-region boundaries for one technology."""

    v_crash: float
    v_min: float
    v_nom: float
    v_threshold: float
    technology: str = "custom"

    def __post_init__(self):
        if not (self.v_threshold < self.v_crash <= self.v_min <= self.v_nom):
            raise ParameterError(
                "voltage regions must satisfy v_threshold < v_crash <= v_min <= v_nom, got "
                f"threshold {self.v_threshold}, crash {self.v_crash}, "
                f"min {self.v_min}, nom {self.v_nom}"
            )


TECHNOLOGIES = {
    # commercial 28 nm part: vendor guardband between the lowest supported
    # supply and nominal; threshold is a process-class default
    "28nm-commercial": VoltageRegions(0.95, 1.00, 1.00, 0.50, "28nm-commercial"),
    "22nm": VoltageRegions(0.50, 1.20, 1.20, 0.45, "22nm"),
    "45nm": VoltageRegions(0.55, 1.20, 1.20, 0.50, "45nm"),
    "130nm": VoltageRegions(0.75, 1.30, 1.30, 0.70, "130nm"),
}


def regions_for(technology: str) -> VoltageRegions:
    try:
        return TECHNOLOGIES[technology]
    except KeyError:
        raise ParameterError(
            f"unknown technology {technology!r}; valid: {', '.join(sorted(TECHNOLOGIES))}"
        ) from None


@dataclass(frozen=True)
class VoltagePlan:
    """Static schedule: n ascending bias voltages plus the cluster mapping."""

    n: int
    v_step: float
    v: tuple
    cluster_to_partition: dict


def static_voltage_scaling(regions: VoltageRegions, n: int) -> VoltagePlan:
    """Midpoint bias per partition across [v_crash, v_min].

    The step is (v_min - v_crash) / n and partition i sits at
    v_crash + (i + 0.5) * step. Cluster i (i-th largest mean slack) maps to
    partition i, so more slack always means less voltage.
    """
    if n < 1:
        raise ParameterError(f"partition count must be at least 1, got {n}")
    if regions.v_min <= regions.v_crash:
        raise ParameterError(
            f"cannot scale: v_min {regions.v_min} must exceed v_crash {regions.v_crash}"
        )
    v_step = (regions.v_min - regions.v_crash) / n
    v_low = regions.v_crash
    voltages = []
    for _ in range(n):
        voltages.append((2.0 * v_low + v_step) / 2.0)
        v_low += v_step
    return VoltagePlan(
        n=n,
        v_step=v_step,
        v=tuple(voltages),
        cluster_to_partition={i: i for i in range(n)},
    )


def assign_voltages(assignment, plan: VoltagePlan) -> dict:
    """Per-MAC bias voltage from its cluster's partition."""
    if assignment.P != plan.n:
        raise ParameterError(
            f"cluster count {assignment.P} does not match plan partition count {plan.n}"
        )
    return {
        mac: plan.v[plan.cluster_to_partition[cluster]]
        for mac, cluster in assignment.cluster_of.items()
    }


def partition_of_macs(assignment, plan: VoltagePlan) -> dict:
    if assignment.P != plan.n:
        raise ParameterError(
            f"cluster count {assignment.P} does not match plan partition count {plan.n}"
        )
    return {
        mac: plan.cluster_to_partition[cluster]
        for mac, cluster in assignment.cluster_of.items()
    }


def round_voltage(v: float, decimals: int = 2) -> float:
    """Round half up, the way supply rails are quoted."""
    scale = 10**decimals
    return math.floor(v * scale + 0.5) / scale


def plan_report(plan: VoltagePlan, assignment=None, regions: VoltageRegions | None = None) -> str:
    """Human-readable schedule, with published reference values when bundled.

    For technologies covered by the bundled reference sheet the computed
    voltages are printed next to the published set and any disagreement
    beyond quoting noise (0.002 V, roughly re-rounding error on a 3-decimal
    figure) is flagged as a real difference.
    """
    lines = ["partition  v_ccint_volts  rounded  cluster  mean_slack_ns  size"]
    for i, v in enumerate(plan.v):
        cluster = _partition_to_cluster(plan)[i]
        if assignment is not None:
            mean = f"{assignment.mean_slack[cluster]:.4f}"
            size = str(assignment.size[cluster])
        else:
            mean = "-"
            size = "-"
        lines.append(
            f"{i:<9}  {v:<13.6f}  {round_voltage(v):<7.2f}  {cluster:<7}  {mean:<13}  {size}"
        )
    if regions is not None:
        reference = refdata.reference_voltages(regions.technology, plan.n)
        if reference is not None:
            lines.append("")
            lines.append(f"published reference voltages ({regions.technology}, n={plan.n}):")
            for i, (computed, published) in enumerate(zip(plan.v, reference)):
                gap = computed - published
                flag = "matches" if abs(gap) <= 0.002 else f"differs by {gap:+.5f} V"
                lines.append(
                    f"  partition {i}: computed {computed:.5f}  published {published:.3f}  [{flag}]"
                )
    return "\n".join(lines) + "\n"


def _partition_to_cluster(plan: VoltagePlan) -> dict:
    return {p: c for c, p in plan.cluster_to_partition.items()}


def write_plan_csv(plan: VoltagePlan, assignment, path) -> None:
    inverse = _partition_to_cluster(plan)
    lines = ["partition,v_ccint_volts,cluster,mean_slack_ns,size"]
    for i, v in enumerate(plan.v):
        cluster = inverse[i]
        lines.append(
            f"{i},{v!r},{cluster},{assignment.mean_slack[cluster]!r},{assignment.size[cluster]}"
        )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def write_plan_json(plan: VoltagePlan, regions: VoltageRegions, path) -> None:
    """Full-fidelity handoff for downstream stages."""
    payload = {
        "n": plan.n,
        "v_step": plan.v_step,
        "v": list(plan.v),
        "cluster_to_partition": {str(k): v for k, v in plan.cluster_to_partition.items()},
        "regions": {
            "v_crash": regions.v_crash,
            "v_min": regions.v_min,
            "v_nom": regions.v_nom,
            "v_threshold": regions.v_threshold,
            "technology": regions.technology,
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_plan_json(path):
    """Returns (plan, regions)."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    regions = VoltageRegions(**payload["regions"])
    plan = VoltagePlan(
        n=payload["n"],
        v_step=payload["v_step"],
        v=tuple(payload["v"]),
        cluster_to_partition={int(k): v for k, v in payload["cluster_to_partition"].items()},
    )
    return plan, regions
