"""Slack-driven voltage-island planning for FPGA systolic arrays.

The toolkit turns post-synthesis timing reports into per-MAC slack tables,
groups MACs into voltage islands, assigns each island a scaled bias voltage,
emits placement constraints, simulates the array under those voltages with
shadow-register error detection, refines the voltages at run time, and
reports the resulting dynamic-power savings.
"""
from .errors import (
    BelowThresholdError,
    CapacityError,
    ConfigError,
    ParameterError,
    ReportParseError,
    SchemaError,
    StageDependencyError,
    UnmappedEndpointError,
)
from .report_ingest import (
    MacId,
    TimingPath,
    attribute_paths,
    load_timing_report,
    mac_of_endpoint,
    parse_timing_report,
    serialize_timing_report,
)
from .slack_model import (
    MacSlackTable,
    complete_table,
    min_slack_per_mac,
    read_slack_table,
    synthesize_slack_table,
    write_slack_table,
)
from .clustering import (
    ALGORITHMS,
    ClusterAssignment,
    ClusterParams,
    Dendrogram,
    cluster_dbscan,
    cluster_hierarchical,
    cluster_kmeans,
    cluster_meanshift,
    cluster_quality,
    read_assignment,
    run_clustering,
    write_assignment,
    write_dendrogram,
)
from .voltage_plan import (
    TECHNOLOGIES,
    VoltagePlan,
    VoltageRegions,
    assign_voltages,
    partition_of_macs,
    plan_report,
    read_plan_json,
    regions_for,
    round_voltage,
    static_voltage_scaling,
    write_plan_csv,
    write_plan_json,
)
from .floorplan import (
    PartitionLayout,
    emit_constraints,
    parse_constraints,
    plan_layout,
    validate_layout,
)
from .systolic_sim import (
    DelayModel,
    MacState,
    SimRunResult,
    mac_cycle,
    nominal_activity,
    partition_flags,
    read_matrix,
    simulate_matmul,
    voltage_delay_factor,
    write_matrix,
    write_trace,
)
from .calibrate import (
    CalibrationResult,
    calibrate,
    max_activity_workload,
    runtime_step,
    write_calibration_json,
    write_trajectory,
)
from .power_report import (
    PowerReport,
    comparison_report,
    dynamic_power,
    format_variant,
    parse_variant,
    render_power_table,
    sweep_variants,
    write_power_csv,
)
from . import refdata

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BelowThresholdError",
    "CalibrationResult",
    "CapacityError",
    "ClusterAssignment",
    "ClusterParams",
    "ConfigError",
    "Dendrogram",
    "DelayModel",
    "MacId",
    "MacSlackTable",
    "MacState",
    "ParameterError",
    "PartitionLayout",
    "PowerReport",
    "ReportParseError",
    "SchemaError",
    "SimRunResult",
    "StageDependencyError",
    "TECHNOLOGIES",
    "TimingPath",
    "UnmappedEndpointError",
    "VoltagePlan",
    "VoltageRegions",
    "assign_voltages",
    "attribute_paths",
    "calibrate",
    "cluster_dbscan",
    "cluster_hierarchical",
    "cluster_kmeans",
    "cluster_meanshift",
    "cluster_quality",
    "comparison_report",
    "complete_table",
    "dynamic_power",
    "emit_constraints",
    "format_variant",
    "load_timing_report",
    "mac_cycle",
    "mac_of_endpoint",
    "max_activity_workload",
    "min_slack_per_mac",
    "nominal_activity",
    "parse_constraints",
    "parse_timing_report",
    "parse_variant",
    "partition_flags",
    "partition_of_macs",
    "plan_layout",
    "plan_report",
    "read_assignment",
    "read_matrix",
    "read_plan_json",
    "read_slack_table",
    "refdata",
    "regions_for",
    "render_power_table",
    "round_voltage",
    "run_clustering",
    "runtime_step",
    "serialize_timing_report",
    "simulate_matmul",
    "static_voltage_scaling",
    "sweep_variants",
    "synthesize_slack_table",
    "validate_layout",
    "voltage_delay_factor",
    "write_assignment",
    "write_calibration_json",
    "write_dendrogram",
    "write_matrix",
    "write_plan_csv",
    "write_plan_json",
    "write_power_csv",
    "write_slack_table",
    "write_trace",
    "write_trajectory",
]
