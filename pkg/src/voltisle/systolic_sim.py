"""Cycle-level weight-stationary systolic multiply with per-MAC timing checks.

Each MAC's combinational path gets a data arrival time

    arrival = base_delay * voltage_delay_factor(v) * (1 + kappa * h)

where base_delay is requirement minus the MAC's minimum slack (the clock
period stands in for the requirement in this single-clock design), the
voltage factor is a normalized alpha-power law, and h is the normalized
Hamming distance between consecutive (activation, partial-sum) input pairs.
A shadow register samples t_del after the main one: arrivals inside
(t_clk, t_clk + t_del] are caught and repaired at the cost of one stall
cycle; later arrivals leave the stale main-register value in place and
corrupt the product silently.

The array simulator evaluates the activity term on the nominal dataflow
(the partial sums the array would carry with no corruption). This keeps
timing outcomes independent across partitions and monotone in voltage; it
coincides with the received-input definition whenever no undetected error
occurs. Register values themselves do carry corruption forward: a stale
partial sum keeps flowing down its column.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BelowThresholdError, ParameterError
from .report_ingest import MacId
from .slack_model import MacSlackTable

OUTCOME_CLEAN = "clean"
OUTCOME_DETECTED = "detected"
OUTCOME_UNDETECTED = "undetected"

_INPUT_BITS = 40  # 8 activation bits + 32 partial-sum bits
_CODE_DETECTED = 1
_CODE_UNDETECTED = 2


@dataclass(frozen=True)
class DelayModel:
    """Alpha-power delay law plus the clocking that judges arrivals."""

    alpha: float = 1.3
    v_threshold: float = 0.5
    v_nom: float = 1.0
    kappa: float = 0.1
    t_clk: float = 10.0
    t_del: float | None = None  # shadow-clock lag; None means t_clk / 2

    def __post_init__(self):
        if self.alpha <= 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not (0 < self.v_threshold < self.v_nom):
            raise ParameterError(
                f"need 0 < v_threshold < v_nom, got {self.v_threshold} and {self.v_nom}"
            )
        if self.t_clk <= 0:
            raise ParameterError(f"t_clk must be positive, got {self.t_clk}")
        if self.t_del is not None and not (0 < self.t_del < self.t_clk):
            raise ParameterError(f"t_del must lie in (0, t_clk), got {self.t_del}")
        if self.kappa < 0:
            raise ParameterError(f"kappa must be non-negative, got {self.kappa}")

    @property
    def shadow_lag(self) -> float:
        return self.t_clk / 2.0 if self.t_del is None else self.t_del


def voltage_delay_factor(v: float, model: DelayModel) -> float:
    """Delay multiplier at supply v, normalized to 1 at v_nom.

    Strictly decreasing in v for alpha >= 1; raises BelowThresholdError in
    the crash region v <= v_threshold.
    """
    if v <= model.v_threshold:
        raise BelowThresholdError(
            f"supply {v:.4f} V is below threshold {model.v_threshold:.4f} V (crash region)"
        )
    return (v / model.v_nom) * (
        (model.v_nom - model.v_threshold) / (v - model.v_threshold)
    ) ** model.alpha


def _factor_grid(v_grid: np.ndarray, model: DelayModel) -> np.ndarray:
    if (v_grid <= model.v_threshold).any():
        worst = float(v_grid.min())
        raise BelowThresholdError(
            f"supply {worst:.4f} V is below threshold {model.v_threshold:.4f} V (crash region)"
        )
    return (v_grid / model.v_nom) * (
        (model.v_nom - model.v_threshold) / (v_grid - model.v_threshold)
    ) ** model.alpha


def _wrap8(x: int) -> int:
    return ((int(x) + 128) & 0xFF) - 128


def _wrap32(x: int) -> int:
    return ((int(x) + 2**31) & 0xFFFFFFFF) - 2**31


@dataclass(frozen=True)
class MacState:
    """One MAC's registers. prev inputs live in activation_in/psum_in."""

    weight: int
    activation_in: int = 0
    psum_in: int = 0
    main_reg: int = 0
    shadow_reg: int = 0
    error_flag: bool = False


def mac_cycle(state: MacState, activation: int, psum: int, v: float, base_delay: float, model: DelayModel):
    """Advance one MAC by one clock; returns (new state, outcome string).

    The product weight * activation + psum is exact 32-bit two's complement.
    Outcome is "clean", "detected" (shadow caught it, main repaired, one
    stall), or "undetected" (both registers sampled stale data).
    """
    a = _wrap8(activation)
    p = _wrap32(psum)
    toggled = ((a ^ state.activation_in) & 0xFF).bit_count() + (
        (p ^ state.psum_in) & 0xFFFFFFFF
    ).bit_count()
    h = toggled / _INPUT_BITS
    arrival = base_delay * voltage_delay_factor(v, model) * (1.0 + model.kappa * h)
    value = _wrap32(state.weight * a + p)
    if arrival <= model.t_clk:
        new = replace(
            state, activation_in=a, psum_in=p, main_reg=value, shadow_reg=value, error_flag=False
        )
        return new, OUTCOME_CLEAN
    if arrival <= model.t_clk + model.shadow_lag:
        new = replace(
            state, activation_in=a, psum_in=p, main_reg=value, shadow_reg=value, error_flag=True
        )
        return new, OUTCOME_DETECTED
    # arrived after both sampling edges; registers keep the old value
    new = replace(
        state,
        activation_in=a,
        psum_in=p,
        main_reg=state.main_reg,
        shadow_reg=state.main_reg,
        error_flag=False,
    )
    return new, OUTCOME_UNDETECTED


@dataclass(frozen=True)
class SimRunResult:
    """Outputs and error accounting for one matrix product."""

    output: np.ndarray
    detected_by_mac: np.ndarray
    undetected_by_mac: np.ndarray
    stall_cycles: int
    cycles: int
    detected_by_partition: dict | None = None
    undetected_by_partition: dict | None = None
    trace: tuple | None = None

    @property
    def detected_errors(self) -> int:
        return int(self.detected_by_mac.sum())

    @property
    def undetected_errors(self) -> int:
        return int(self.undetected_by_mac.sum())


def _check_int8(name: str, matrix: np.ndarray) -> np.ndarray:
    if matrix.ndim != 2:
        raise ParameterError(f"{name} must be 2-D, got shape {matrix.shape}")
    if not np.issubdtype(matrix.dtype, np.integer):
        raise ParameterError(f"{name} must be an integer matrix, got dtype {matrix.dtype}")
    if matrix.size and (matrix.min() < -128 or matrix.max() > 127):
        raise ParameterError(f"{name} entries must fit signed 8 bits")
    return matrix.astype(np.int32)


def _popcount8(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x.astype(np.int8).view(np.uint8)).astype(np.int64)


def _popcount32(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x.view(np.uint32)).astype(np.int64)


def nominal_activity(A32: np.ndarray, W32: np.ndarray):
    """Per-MAC-cycle activity from the uncorrupted dataflow.

    Returns (h, psum_in) with shape (M, rows, cols): h[m, i, j] is the
    normalized toggle count between output row m-1's and m's input pair at
    MAC (i, j); psum_in is the nominal partial sum entering that MAC.
    """
    products = W32[None, :, :] * A32[:, :, None]
    prefix = np.cumsum(products, axis=1, dtype=np.int32)
    psum_in = np.zeros_like(prefix)
    psum_in[:, 1:, :] = prefix[:, :-1, :]

    a_prev = np.zeros_like(A32)
    a_prev[1:] = A32[:-1]
    p_prev = np.zeros_like(psum_in)
    p_prev[1:] = psum_in[:-1]

    a_bits = _popcount8(A32 ^ a_prev)  # (M, rows)
    p_bits = _popcount32(psum_in ^ p_prev)  # (M, rows, cols)
    h = (a_bits[:, :, None] + p_bits) / float(_INPUT_BITS)
    return h, psum_in


def _voltage_grid(voltages, rows: int, cols: int) -> np.ndarray:
    if isinstance(voltages, (int, float)):
        return np.full((rows, cols), float(voltages))
    grid = np.asarray(voltages, dtype=float) if not isinstance(voltages, dict) else None
    if grid is not None:
        if grid.shape != (rows, cols):
            raise ParameterError(f"voltage grid shape {grid.shape} does not match {rows}x{cols}")
        return grid
    grid = np.empty((rows, cols))
    for row in range(rows):
        for col in range(cols):
            mac = MacId(row, col)
            if mac not in voltages:
                raise ParameterError(f"no voltage for {mac.instance_name()}")
            grid[row, col] = voltages[mac]
    return grid


def simulate_matmul(
    A,
    B,
    table: MacSlackTable,
    voltages,
    model: DelayModel,
    partition_of=None,
    collect_trace: bool = False,
) -> SimRunResult:
    """Stream A through the array holding B as weights; returns the product
    with full error accounting.

    A is (M, rows), B is (rows, cols) matching the slack table's array.
    voltages is a scalar, a (rows, cols) array, or a MacId -> volts map.
    With every arrival clean the output equals A @ B exactly in 32-bit
    two's-complement arithmetic. Detected errors are repaired (one stall
    each); undetected ones leave stale values that flow downward.
    """
    A32 = _check_int8("A", np.asarray(A))
    B32 = _check_int8("B", np.asarray(B))
    rows, cols = table.rows, table.cols
    if B32.shape != (rows, cols):
        raise ParameterError(
            f"weight matrix shape {B32.shape} does not match the {rows}x{cols} slack table"
        )
    if A32.shape[1] != rows:
        raise ParameterError(
            f"activation matrix has {A32.shape[1]} columns; the array needs {rows}"
        )
    m = A32.shape[0]

    slack_grid = table.slack_grid()
    base = model.t_clk - slack_grid
    if (base <= 0).any():
        raise ParameterError(
            "slack of at least t_clk leaves a MAC with no path delay; check table and t_clk"
        )
    v_grid = _voltage_grid(voltages, rows, cols)
    factor = _factor_grid(v_grid, model)

    h, _ = nominal_activity(A32, B32)
    arrival = base[None, :, :] * factor[None, :, :] * (1.0 + model.kappa * h)
    outcome = np.zeros((m, rows, cols), dtype=np.int8)
    outcome[arrival > model.t_clk] = _CODE_DETECTED
    outcome[arrival > model.t_clk + model.shadow_lag] = _CODE_UNDETECTED

    # value plane: row by row, with stale main registers holding their last
    # good value across undetected cycles
    psum = np.zeros((m, cols), dtype=np.int32)
    m_index = np.arange(m)
    for i in range(rows):
        clean_vals = B32[i][None, :] * A32[:, i][:, None] + psum
        stale = outcome[:, i, :] == _CODE_UNDETECTED
        if stale.any():
            idx = np.where(~stale, m_index[:, None], -1)
            idx = np.maximum.accumulate(idx, axis=0)
            latched = np.take_along_axis(clean_vals, np.maximum(idx, 0), axis=0)
            latched = np.where(idx >= 0, latched, np.int32(0))
        else:
            latched = clean_vals
        psum = latched

    detected_by_mac = (outcome == _CODE_DETECTED).sum(axis=0)
    undetected_by_mac = (outcome == _CODE_UNDETECTED).sum(axis=0)
    stall_cycles = int(detected_by_mac.sum())
    cycles = m + rows + cols - 2 + stall_cycles

    detected_by_partition = None
    undetected_by_partition = None
    if partition_of is not None:
        detected_by_partition = {}
        undetected_by_partition = {}
        for mac, part in partition_of.items():
            detected_by_partition[part] = detected_by_partition.get(part, 0) + int(
                detected_by_mac[mac.row, mac.col]
            )
            undetected_by_partition[part] = undetected_by_partition.get(part, 0) + int(
                undetected_by_mac[mac.row, mac.col]
            )
        detected_by_partition = dict(sorted(detected_by_partition.items()))
        undetected_by_partition = dict(sorted(undetected_by_partition.items()))

    trace = None
    if collect_trace:
        events = []
        for mi, i, j in zip(*np.nonzero(outcome)):
            kind = OUTCOME_DETECTED if outcome[mi, i, j] == _CODE_DETECTED else OUTCOME_UNDETECTED
            events.append((int(mi) + int(i) + int(j), int(i), int(j), kind))
        events.sort()
        trace = tuple(events)

    return SimRunResult(
        output=psum,
        detected_by_mac=detected_by_mac,
        undetected_by_mac=undetected_by_mac,
        stall_cycles=stall_cycles,
        cycles=cycles,
        detected_by_partition=detected_by_partition,
        undetected_by_partition=undetected_by_partition,
        trace=trace,
    )


def partition_flags(result: SimRunResult, layout) -> dict:
    """Per-partition OR of all MAC error events in the run.

    layout is anything with a partition_of mapping (a PartitionLayout) or a
    plain MacId -> partition dict.
    """
    partition_map = getattr(layout, "partition_of", layout)
    errors = result.detected_by_mac + result.undetected_by_mac
    flags = {}
    for mac, part in partition_map.items():
        flags[part] = flags.get(part, False) or bool(errors[mac.row, mac.col])
    return dict(sorted(flags.items()))


def write_matrix(matrix: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in np.asarray(matrix):
            handle.write(" ".join(str(int(x)) for x in row) + "\n")


def read_matrix(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(cell) for cell in line.replace(",", " ").split()])
    if not rows:
        raise ParameterError(f"matrix file {path} is empty")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ParameterError(f"matrix file {path} has ragged rows")
    return np.array(rows, dtype=np.int64)


def write_trace(trace, path) -> None:
    lines = ["cycle,row,col,outcome"]
    for cycle, row, col, kind in trace:
        lines.append(f"{cycle},{row},{col},{kind}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
