"""Runtime voltage calibration.

Each epoch runs one workload pass per partition voltage vector, reads the
per-partition error flags (any MAC error, detected or not), and moves every
flagged partition up one step and every quiet one down one step, clamped to
[v_floor, v_ceil]. A partition settles either pinned at a clamp bound or in
a two-level oscillation around its minimum safe voltage; the reported final
value is the upper (passing) oscillation level.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .slack_model import MacSlackTable
from .systolic_sim import DelayModel, simulate_matmul
from .voltage_plan import VoltagePlan, partition_of_macs

_V_TOL = 1e-9


@dataclass(frozen=True)
class CalibrationResult:
    """Final voltages plus the full per-epoch history."""

    final_v: tuple
    step_counts: tuple
    epochs: int
    trajectory: tuple  # ((voltages, flags) per epoch)
    converged: bool


def runtime_step(v, flags, v_s: float, v_floor: float, v_ceil: float):
    """One adjustment: flagged partitions rise by v_s, quiet ones drop."""
    if v_s <= 0:
        raise ParameterError(f"voltage step must be positive, got {v_s}")
    if v_floor >= v_ceil:
        raise ParameterError(f"clamp range is empty: [{v_floor}, {v_ceil}]")
    out = []
    for vi, flag in zip(v, flags):
        if not (v_floor - _V_TOL <= vi <= v_ceil + _V_TOL):
            raise ParameterError(f"voltage {vi} outside clamp range [{v_floor}, {v_ceil}]")
        nv = vi + v_s if flag else vi - v_s
        out.append(min(max(nv, v_floor), v_ceil))
    return tuple(out)


def max_activity_workload(rows: int, cols: int, stream_rows: int | None = None):
    """Worst-case switching stream for an rows x cols array.

    Activations alternate 0x00 / 0xFF every cycle, and a single row of
    weight 1 at the top makes every downstream partial sum alternate
    0 / 0xFFFFFFFF, so every MAC below row 0 sees all 40 input bits toggle
    (h = 1) and row 0 sees its architectural maximum (8 of 40 bits).
    """
    m = max(2, rows if stream_rows is None else stream_rows)
    A = np.zeros((m, rows), dtype=np.int64)
    A[1::2, :] = -1
    B = np.zeros((rows, cols), dtype=np.int64)
    B[0, :] = 1
    return A, B


def _partition_flags_from(result, partition_index, n):
    errors = result.detected_by_mac + result.undetected_by_mac
    flags = [False] * n
    for (row, col), part in partition_index.items():
        if errors[row, col]:
            flags[part] = True
    return tuple(flags)


def calibrate(
    plan: VoltagePlan,
    assignment,
    table: MacSlackTable,
    model: DelayModel,
    workload=None,
    max_epochs: int = 200,
    seed: int = 0,
    v_floor: float | None = None,
    v_ceil: float | None = None,
    supply_step: float | None = None,
) -> CalibrationResult:
    """Run the per-partition step controller until every partition settles.

    workload is one (A, B) pair or a sequence of pairs cycled per epoch;
    the default is the max-activity synthetic stream, so deployment inputs
    are no harsher than the calibration trial. A partition is settled when
    pinned at a clamp bound or when two consecutive epochs alternate flag
    values one step apart. Hitting max_epochs first returns converged=False
    rather than raising. supply_step, when given, coarsens the step to the
    next multiple the power supply can actually deliver.
    """
    if max_epochs < 1:
        raise ParameterError(f"max_epochs must be at least 1, got {max_epochs}")
    v_floor = model.v_threshold + 0.05 if v_floor is None else v_floor
    v_ceil = model.v_nom if v_ceil is None else v_ceil
    if v_floor >= v_ceil:
        raise ParameterError(f"clamp range is empty: [{v_floor}, {v_ceil}]")
    if v_floor <= model.v_threshold:
        raise ParameterError(
            f"v_floor {v_floor} must stay above the threshold {model.v_threshold}"
        )
    v_s = plan.v_step
    if supply_step is not None:
        if supply_step <= 0:
            raise ParameterError(f"supply_step must be positive, got {supply_step}")
        v_s = math.ceil(v_s / supply_step - 1e-12) * supply_step

    if workload is None:
        workload = [max_activity_workload(table.rows, table.cols)]
    elif isinstance(workload, tuple) and len(workload) == 2 and not isinstance(workload[0], tuple):
        workload = [workload]
    else:
        workload = list(workload)

    partition_map = partition_of_macs(assignment, plan)
    partition_index = {(mac.row, mac.col): part for mac, part in partition_map.items()}
    n = plan.n

    v = [min(max(vi, v_floor), v_ceil) for vi in plan.v]
    steps = [0] * n
    prev: list[tuple | None] = [None] * n
    trajectory = []
    converged = False
    final = None
    epochs = 0

    for epoch in range(max_epochs):
        epochs = epoch + 1
        A, B = workload[epoch % len(workload)]
        v_grid = np.empty((table.rows, table.cols))
        for (row, col), part in partition_index.items():
            v_grid[row, col] = v[part]
        result = simulate_matmul(A, B, table, v_grid, model)
        flags = _partition_flags_from(result, partition_index, n)
        trajectory.append((tuple(v), flags))

        settled = []
        candidate = []
        for part in range(n):
            vp, fp = v[part], flags[part]
            if not fp and abs(vp - v_floor) <= _V_TOL:
                settled.append(True)
                candidate.append(v_floor)
            elif fp and abs(vp - v_ceil) <= _V_TOL:
                settled.append(True)
                candidate.append(v_ceil)
            elif prev[part] is not None:
                pv, pf = prev[part]
                two_level = pf != fp and abs(abs(pv - vp) - v_s) <= _V_TOL
                passing = vp if not fp else pv
                if two_level and passing == max(pv, vp):
                    # flags alternate one step apart and the quiet epoch sits
                    # on the upper level: a stable oscillation
                    settled.append(True)
                    candidate.append(passing)
                else:
                    settled.append(False)
                    candidate.append(vp)
            else:
                settled.append(False)
                candidate.append(vp)
        if all(settled):
            converged = True
            final = candidate
            break

        for part in range(n):
            prev[part] = (v[part], flags[part])
            steps[part] += 1 if flags[part] else -1
        v = list(runtime_step(v, flags, v_s, v_floor, v_ceil))

    if final is None:
        final = list(v)

    step_counts = []
    for part in range(n):
        init = min(max(plan.v[part], v_floor), v_ceil)
        if abs(final[part] - v_floor) <= _V_TOL:
            count = math.floor((v_floor - init) / v_s + _V_TOL)
        elif abs(final[part] - v_ceil) <= _V_TOL:
            count = math.ceil((v_ceil - init) / v_s - _V_TOL)
        else:
            count = round((final[part] - init) / v_s)
        step_counts.append(int(count))

    return CalibrationResult(
        final_v=tuple(final),
        step_counts=tuple(step_counts),
        epochs=epochs,
        trajectory=tuple(trajectory),
        converged=converged,
    )


def write_trajectory(result: CalibrationResult, path) -> None:
    lines = ["epoch,partition,v_volts,flag"]
    for epoch, (voltages, flags) in enumerate(result.trajectory):
        for part, (vi, flag) in enumerate(zip(voltages, flags)):
            lines.append(f"{epoch},{part},{vi!r},{int(flag)}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def write_calibration_json(result: CalibrationResult, path) -> None:
    payload = {
        "final_v": list(result.final_v),
        "step_counts": list(result.step_counts),
        "epochs": result.epochs,
        "converged": result.converged,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
