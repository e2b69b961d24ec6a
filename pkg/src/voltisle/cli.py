"""Pipeline driver.

Each subcommand runs one stage against a shared output directory, reading
the artifacts earlier stages wrote and recording a manifest (parameters,
input hashes, output hashes) so any stage can be re-run byte-identically.
Configuration is a flat key = value file with dotted section prefixes, and
every key can be overridden by a command-line flag of the same name.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import refdata
from .calibrate import (
    calibrate,
    max_activity_workload,
    write_calibration_json,
    write_trajectory,
)
from .clustering import (
    ALGORITHMS,
    ClusterParams,
    cluster_hierarchical,
    read_assignment,
    run_clustering,
    write_assignment,
    write_dendrogram,
)
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
from .floorplan import emit_constraints, plan_layout
from .power_report import (
    comparison_report,
    dynamic_power,
    format_variant,
    parse_variant,
    render_power_table,
    sweep_variants,
    write_power_csv,
)
from .report_ingest import load_timing_report, parse_timing_report, serialize_timing_report
from .slack_model import (
    complete_table,
    min_slack_per_mac,
    read_slack_table,
    synthesize_slack_table,
    write_slack_table,
)
from .systolic_sim import (
    DelayModel,
    read_matrix,
    simulate_matmul,
    write_matrix,
    write_trace,
)
from .voltage_plan import (
    assign_voltages,
    partition_of_macs,
    plan_report,
    read_plan_json,
    regions_for,
    static_voltage_scaling,
    write_plan_csv,
    write_plan_json,
)

ENV_OUTPUT_ROOT = "VOLTISLE_OUTPUT_ROOT"

# key -> (type, default, help); bool values accept true/false/1/0/yes/no
CONFIG_SCHEMA = {
    "seed": (int, 1, "master RNG seed for every stage"),
    "array.rows": (int, 16, "MAC array rows"),
    "array.cols": (int, 16, "MAC array columns"),
    "ingest.report": (str, "", "timing report to parse; empty means synthesize"),
    "ingest.format": (str, "", "report layout: tabular, delimited, or empty to sniff"),
    "slack.profile": (str, "row_gradient", "synthetic slack profile"),
    "slack.lo": (float, 4.0, "synthetic slack band low edge, ns"),
    "slack.hi": (float, 6.0, "synthetic slack band high edge, ns"),
    "slack.complete": (bool, True, "fill report gaps from the synthetic profile"),
    "cluster.algorithm": (str, "kmeans", "hierarchical, kmeans, meanshift, or dbscan"),
    "cluster.k": (int, 4, "cluster count for hierarchical/kmeans"),
    "cluster.linkage": (str, "average", "hierarchical linkage"),
    "cluster.radius": (float, 0.4, "meanshift window radius, ns"),
    "cluster.epsilon": (float, 0.2, "dbscan neighborhood radius, ns"),
    "cluster.minpoints": (int, 4, "dbscan core threshold"),
    "voltage.technology": (str, "28nm-commercial", "voltage-region preset"),
    "floorplan.grid_x": (int, 0, "slice grid width; 0 sizes it automatically"),
    "floorplan.grid_y": (int, 0, "slice grid height; 0 sizes it automatically"),
    "floorplan.footprint_w": (int, 1, "MAC footprint width in slices"),
    "floorplan.footprint_h": (int, 1, "MAC footprint height in slices"),
    "sim.alpha": (float, 1.3, "alpha-power exponent"),
    "sim.kappa": (float, 0.1, "activity sensitivity of delay"),
    "sim.t_clk": (float, 10.0, "clock period, ns"),
    "sim.t_del": (float, 0.0, "shadow-clock lag, ns; 0 means t_clk/2"),
    "sim.stream_rows": (int, 0, "activation rows to stream; 0 means array.rows"),
    "sim.a_file": (str, "", "activation matrix file; empty means random int8"),
    "sim.b_file": (str, "", "weight matrix file; empty means random int8"),
    "sim.trace": (bool, False, "write the per-cycle error trace"),
    "calibrate.max_epochs": (int, 200, "epoch budget"),
    "calibrate.v_floor": (float, 0.0, "clamp floor; 0 means v_threshold + 0.05"),
    "calibrate.v_ceil": (float, 0.0, "clamp ceiling; 0 means v_nom"),
    "calibrate.supply_step": (float, 0.0, "supply granularity; 0 means none"),
    "report.baseline_mw": (float, 0.0, "baseline power; 0 means bundled reference"),
    "sweep.array": (str, "64x64", "array size for variant sweeps"),
    "sweep.variants": (str, "", "semicolon-separated variant labels"),
    "sweep.technologies": (str, "22nm,45nm", "comma-separated technology presets"),
    "sweep.baseline_mw": (float, 0.0, "fallback baseline for unreferenced technologies"),
    "output.dir": (str, "out", "output directory (under the env root if set)"),
}

STAGES = ("ingest", "cluster", "plan", "floorplan", "simulate", "calibrate", "report")

_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(key: str, raw):
    if key not in CONFIG_SCHEMA:
        raise ConfigError(f"{key}: unknown configuration key")
    kind = CONFIG_SCHEMA[key][0]
    if isinstance(raw, kind) and not isinstance(raw, str):
        return raw
    text = str(raw).strip()
    try:
        if kind is bool:
            if text.lower() not in _BOOL_WORDS:
                raise ValueError
            return _BOOL_WORDS[text.lower()]
        return kind(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None


def parse_config_text(text: str) -> dict:
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {line_no}: expected key = value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        values[key] = _coerce(key, raw.strip())
    return values


def load_config(config_path, overrides) -> dict:
    cfg = {key: default for key, (_, default, _) in CONFIG_SCHEMA.items()}
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        cfg.update(parse_config_text(path.read_text(encoding="utf-8")))
    for key, raw in overrides.items():
        if raw is not None:
            cfg[key] = _coerce(key, raw)
    return cfg


def resolve_outdir(cfg: dict) -> Path:
    root = os.environ.get(ENV_OUTPUT_ROOT)
    out = Path(root) / cfg["output.dir"] if root else Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def _write_manifest(out: Path, stage: str, cfg: dict, prefixes, inputs, outputs) -> None:
    params = {"seed": cfg["seed"]}
    for key in sorted(cfg):
        if any(key.startswith(prefix) for prefix in prefixes):
            params[key] = cfg[key]
    manifest = {
        "stage": stage,
        "parameters": params,
        "inputs": {name: _sha256(path) for name, path in sorted(inputs.items())},
        "outputs": {name: _sha256(path) for name, path in sorted(outputs.items())},
    }
    manifest_dir = out / "manifests"
    manifest_dir.mkdir(exist_ok=True)
    with open(manifest_dir / f"{stage}.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _require(out: Path, name: str, producer: str) -> Path:
    path = out / name
    if not path.exists():
        raise StageDependencyError(
            f"{name} not found under {out}; run the {producer} command first"
        )
    return path


def _delay_model(cfg: dict) -> DelayModel:
    regions = regions_for(cfg["voltage.technology"])
    t_del = cfg["sim.t_del"] if cfg["sim.t_del"] > 0 else None
    return DelayModel(
        alpha=cfg["sim.alpha"],
        v_threshold=regions.v_threshold,
        v_nom=regions.v_nom,
        kappa=cfg["sim.kappa"],
        t_clk=cfg["sim.t_clk"],
        t_del=t_del,
    )


def cmd_ingest(cfg: dict, out: Path) -> None:
    rows, cols = cfg["array.rows"], cfg["array.cols"]
    inputs = {}
    if cfg["ingest.report"]:
        report_path = Path(cfg["ingest.report"])
        if not report_path.exists():
            raise ConfigError(f"ingest.report: file {report_path} does not exist")
        inputs["report"] = report_path
        if cfg["ingest.format"]:
            paths = parse_timing_report(
                report_path.read_text(encoding="utf-8"), cfg["ingest.format"]
            )
        else:
            paths = load_timing_report(report_path)
        (out / "paths.csv").write_text(serialize_timing_report(paths), encoding="utf-8")
        table = min_slack_per_mac(paths, rows, cols)
        unattributed_lines = ["name"] + [name for name in table.unattributed]
        (out / "unattributed.csv").write_text(
            "\n".join(unattributed_lines) + "\n", encoding="utf-8"
        )
        if cfg["slack.complete"] and table.no_path_macs:
            table = complete_table(
                table, cfg["slack.profile"], cfg["seed"], cfg["slack.lo"], cfg["slack.hi"]
            )
    else:
        table = synthesize_slack_table(
            rows, cols, cfg["slack.profile"], cfg["seed"], cfg["slack.lo"], cfg["slack.hi"]
        )
    write_slack_table(table, out / "slack_table.csv")
    outputs = {"slack_table.csv": out / "slack_table.csv"}
    if cfg["ingest.report"]:
        outputs["paths.csv"] = out / "paths.csv"
        outputs["unattributed.csv"] = out / "unattributed.csv"
    _write_manifest(out, "ingest", cfg, ("array.", "ingest.", "slack."), inputs, outputs)


def _cluster_params(cfg: dict) -> ClusterParams:
    algorithm = cfg["cluster.algorithm"]
    if algorithm not in ALGORITHMS:
        raise ConfigError(
            f"cluster.algorithm: unknown algorithm {algorithm!r}; "
            f"valid: {', '.join(ALGORITHMS)}"
        )
    return ClusterParams(
        algorithm=algorithm,
        k=cfg["cluster.k"],
        radius=cfg["cluster.radius"],
        epsilon=cfg["cluster.epsilon"],
        minpoints=cfg["cluster.minpoints"],
        linkage=cfg["cluster.linkage"],
        seed=cfg["seed"],
    )


def cmd_cluster(cfg: dict, out: Path) -> None:
    table_path = _require(out, "slack_table.csv", "ingest")
    table = read_slack_table(table_path)
    params = _cluster_params(cfg)
    outputs = {}
    if params.algorithm == "hierarchical":
        assignment, dendrogram = cluster_hierarchical(table, params.k, params.linkage)
        write_dendrogram(dendrogram, out / "dendrogram.csv")
        outputs["dendrogram.csv"] = out / "dendrogram.csv"
    else:
        assignment = run_clustering(table, params)
    write_assignment(table, assignment, out / "assignment.csv")
    outputs["assignment.csv"] = out / "assignment.csv"
    _write_manifest(
        out, "cluster", cfg, ("cluster.",), {"slack_table.csv": table_path}, outputs
    )


def cmd_plan(cfg: dict, out: Path) -> None:
    assignment_path = _require(out, "assignment.csv", "cluster")
    assignment, _ = read_assignment(assignment_path)
    regions = regions_for(cfg["voltage.technology"])
    plan = static_voltage_scaling(regions, assignment.P)
    write_plan_csv(plan, assignment, out / "plan.csv")
    write_plan_json(plan, regions, out / "plan.json")
    (out / "plan.txt").write_text(plan_report(plan, assignment, regions), encoding="utf-8")
    _write_manifest(
        out,
        "plan",
        cfg,
        ("voltage.",),
        {"assignment.csv": assignment_path},
        {
            "plan.csv": out / "plan.csv",
            "plan.json": out / "plan.json",
            "plan.txt": out / "plan.txt",
        },
    )


def _auto_grid(cfg: dict, assignment) -> tuple:
    foot_w, foot_h = cfg["floorplan.footprint_w"], cfg["floorplan.footprint_h"]
    grid_x, grid_y = cfg["floorplan.grid_x"], cfg["floorplan.grid_y"]
    if grid_y < 1:
        grid_y = cfg["array.rows"] * foot_h
    if grid_x < 1:
        slots_y = grid_y // foot_h
        biggest = max(assignment.size)
        slots_x = (biggest + slots_y - 1) // slots_y
        grid_x = assignment.P * slots_x * foot_w
    return (grid_x, grid_y), (foot_w, foot_h)


def cmd_floorplan(cfg: dict, out: Path) -> None:
    assignment_path = _require(out, "assignment.csv", "cluster")
    assignment, _ = read_assignment(assignment_path)
    grid, footprint = _auto_grid(cfg, assignment)
    layout = plan_layout(assignment, grid, footprint)
    (out / "constraints.txt").write_text(emit_constraints(layout), encoding="utf-8")
    _write_manifest(
        out,
        "floorplan",
        cfg,
        ("floorplan.",),
        {"assignment.csv": assignment_path},
        {"constraints.txt": out / "constraints.txt"},
    )


def _sim_matrices(cfg: dict, table):
    rng = np.random.default_rng(cfg["seed"])
    stream_rows = cfg["sim.stream_rows"] if cfg["sim.stream_rows"] > 0 else cfg["array.rows"]
    if cfg["sim.a_file"]:
        A = read_matrix(cfg["sim.a_file"])
    else:
        A = rng.integers(-128, 128, size=(stream_rows, table.rows), dtype=np.int64)
    if cfg["sim.b_file"]:
        B = read_matrix(cfg["sim.b_file"])
    else:
        B = rng.integers(-128, 128, size=(table.rows, table.cols), dtype=np.int64)
    return A, B


def cmd_simulate(cfg: dict, out: Path) -> None:
    table_path = _require(out, "slack_table.csv", "ingest")
    assignment_path = _require(out, "assignment.csv", "cluster")
    plan_path = _require(out, "plan.json", "plan")
    table = read_slack_table(table_path)
    assignment, _ = read_assignment(assignment_path)
    plan, _ = read_plan_json(plan_path)
    model = _delay_model(cfg)
    voltages = assign_voltages(assignment, plan)
    partition_map = partition_of_macs(assignment, plan)
    A, B = _sim_matrices(cfg, table)
    result = simulate_matmul(
        A, B, table, voltages, model,
        partition_of=partition_map, collect_trace=cfg["sim.trace"],
    )
    write_matrix(result.output, out / "sim_output.txt")
    payload = {
        "cycles": result.cycles,
        "stall_cycles": result.stall_cycles,
        "detected_errors": result.detected_errors,
        "undetected_errors": result.undetected_errors,
        "detected_by_partition": {str(k): v for k, v in result.detected_by_partition.items()},
        "undetected_by_partition": {str(k): v for k, v in result.undetected_by_partition.items()},
    }
    with open(out / "sim_result.json", "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    outputs = {
        "sim_output.txt": out / "sim_output.txt",
        "sim_result.json": out / "sim_result.json",
    }
    if cfg["sim.trace"]:
        write_trace(result.trace, out / "sim_trace.csv")
        outputs["sim_trace.csv"] = out / "sim_trace.csv"
    _write_manifest(
        out,
        "simulate",
        cfg,
        ("sim.", "voltage."),
        {
            "slack_table.csv": table_path,
            "assignment.csv": assignment_path,
            "plan.json": plan_path,
        },
        outputs,
    )


def cmd_calibrate(cfg: dict, out: Path) -> None:
    table_path = _require(out, "slack_table.csv", "ingest")
    assignment_path = _require(out, "assignment.csv", "cluster")
    plan_path = _require(out, "plan.json", "plan")
    table = read_slack_table(table_path)
    assignment, _ = read_assignment(assignment_path)
    plan, _ = read_plan_json(plan_path)
    model = _delay_model(cfg)
    result = calibrate(
        plan,
        assignment,
        table,
        model,
        workload=[max_activity_workload(table.rows, table.cols)],
        max_epochs=cfg["calibrate.max_epochs"],
        seed=cfg["seed"],
        v_floor=cfg["calibrate.v_floor"] if cfg["calibrate.v_floor"] > 0 else None,
        v_ceil=cfg["calibrate.v_ceil"] if cfg["calibrate.v_ceil"] > 0 else None,
        supply_step=cfg["calibrate.supply_step"] if cfg["calibrate.supply_step"] > 0 else None,
    )
    write_calibration_json(result, out / "calibration.json")
    write_trajectory(result, out / "trajectory.csv")
    _write_manifest(
        out,
        "calibrate",
        cfg,
        ("calibrate.", "sim.", "voltage."),
        {
            "slack_table.csv": table_path,
            "assignment.csv": assignment_path,
            "plan.json": plan_path,
        },
        {
            "calibration.json": out / "calibration.json",
            "trajectory.csv": out / "trajectory.csv",
        },
    )


def _island_dims(P: int, rows: int, cols: int, sizes) -> tuple:
    equal = len(set(sizes)) == 1 and sizes[0] * P == rows * cols
    if equal:
        side = int(P**0.5)
        if side * side == P and rows % side == 0 and cols % side == 0:
            return (rows // side, cols // side)
        if cols % P == 0:
            return (rows, cols // P)
        if rows % P == 0:
            return (rows // P, cols)
    return (sizes[0], 1) if equal else (0, 0)


def cmd_report(cfg: dict, out: Path) -> None:
    assignment_path = _require(out, "assignment.csv", "cluster")
    plan_path = _require(out, "plan.json", "plan")
    assignment, _ = read_assignment(assignment_path)
    plan, regions = read_plan_json(plan_path)
    inputs = {"assignment.csv": assignment_path, "plan.json": plan_path}

    voltages = list(plan.v)
    source = "static plan"
    calibration_path = out / "calibration.json"
    if calibration_path.exists():
        with open(calibration_path, "r", encoding="utf-8") as handle:
            voltages = json.load(handle)["final_v"]
        source = "calibrated"
        inputs["calibration.json"] = calibration_path

    rows, cols = cfg["array.rows"], cfg["array.cols"]
    array_label = f"{rows}x{cols}"
    technology = cfg["voltage.technology"]
    baseline = cfg["report.baseline_mw"]
    if baseline <= 0:
        reference = refdata.reference_power_row(array_label, technology)
        if reference is None:
            raise ConfigError(
                "report.baseline_mw: no bundled reference for "
                f"{array_label} {technology}; set a baseline explicitly"
            )
        baseline = reference["baseline_mw"]

    total = sum(assignment.size)
    fractions = [s / total for s in assignment.size]
    dims = _island_dims(plan.n, rows, cols, assignment.size)
    label = (
        format_variant(plan.n, dims, voltages)
        if dims != (0, 0)
        else None
    )
    report = dynamic_power(baseline, fractions, voltages, regions.v_nom, label=label)

    text = [f"voltage source: {source}"]
    text.append(comparison_report(array_label, technology, report))
    text.append("per-partition breakdown:")
    for part, mw in enumerate(report.per_partition_mw):
        text.append(
            f"  partition {part}: {voltages[part]:.5f} V  "
            f"{fractions[part] * 100:.2f}% of MACs  {mw:.2f} mW"
        )
    (out / "power.txt").write_text("\n".join(text) + "\n", encoding="utf-8")
    write_power_csv([(technology, report)], out / "power.csv")
    _write_manifest(
        out,
        "report",
        cfg,
        ("report.", "voltage.", "array."),
        inputs,
        {"power.txt": out / "power.txt", "power.csv": out / "power.csv"},
    )


def _sweep_baselines(cfg: dict, array_label: str, technologies) -> dict:
    baselines = {}
    for technology in technologies:
        regions_for(technology)  # validate the name early
        reference = refdata.reference_power_row(array_label, technology)
        if reference is not None:
            baselines[technology] = reference["baseline_mw"]
        elif cfg["sweep.baseline_mw"] > 0:
            baselines[technology] = cfg["sweep.baseline_mw"]
        else:
            raise ConfigError(
                f"sweep.baseline_mw: no bundled reference for {array_label} "
                f"{technology}; set a fallback baseline"
            )
    return baselines


def _sanitize(label: str) -> str:
    return re.sub(r"[^0-9A-Za-z.]+", "_", label).strip("_")


def cmd_sweep(cfg: dict, out: Path) -> None:
    if not cfg["sweep.variants"]:
        raise ConfigError("sweep.variants: list at least one variant, like 2x(32x64){0.5,0.6}")
    try:
        rows_text, cols_text = cfg["sweep.array"].lower().split("x")
        array_dims = (int(rows_text), int(cols_text))
    except ValueError:
        raise ConfigError(f"sweep.array: cannot parse {cfg['sweep.array']!r} as ROWSxCOLS") from None
    variants = [
        parse_variant(piece)
        for piece in cfg["sweep.variants"].split(";")
        if piece.strip()
    ]
    technologies = [t.strip() for t in cfg["sweep.technologies"].split(",") if t.strip()]
    if not technologies:
        raise ConfigError("sweep.technologies: list at least one technology")
    array_label = f"{array_dims[0]}x{array_dims[1]}"
    baselines = _sweep_baselines(cfg, array_label, technologies)

    def run_variant(variant):
        partitions, dims, voltages = variant
        label = format_variant(partitions, dims, voltages)
        subdir = out / "sweep" / _sanitize(label)
        subdir.mkdir(parents=True, exist_ok=True)
        rows = sweep_variants([variant], baselines, array_dims)
        write_power_csv(rows, subdir / "power.csv")
        (subdir / "power.txt").write_text(render_power_table(rows), encoding="utf-8")
        return label, subdir

    with ThreadPoolExecutor(max_workers=min(8, len(variants))) as pool:
        finished = list(pool.map(run_variant, variants))

    summary = sweep_variants(variants, baselines, array_dims)
    (out / "sweep" / "summary.txt").write_text(render_power_table(summary), encoding="utf-8")
    write_power_csv(summary, out / "sweep" / "summary.csv")
    outputs = {
        "sweep/summary.txt": out / "sweep" / "summary.txt",
        "sweep/summary.csv": out / "sweep" / "summary.csv",
    }
    for label, subdir in finished:
        outputs[f"sweep/{subdir.name}/power.csv"] = subdir / "power.csv"
    _write_manifest(out, "sweep", cfg, ("sweep.",), {}, outputs)


def cmd_run_all(cfg: dict, out: Path) -> None:
    for stage in STAGES:
        COMMANDS[stage](cfg, out)


COMMANDS = {
    "ingest": cmd_ingest,
    "cluster": cmd_cluster,
    "plan": cmd_plan,
    "floorplan": cmd_floorplan,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "report": cmd_report,
    "sweep": cmd_sweep,
    "run-all": cmd_run_all,
}

_ERROR_CODES = {
    ConfigError: "config-error",
    StageDependencyError: "stage-dependency",
    SchemaError: "schema-error",
    ReportParseError: "parse-error",
    UnmappedEndpointError: "unmapped-endpoint",
    CapacityError: "capacity-error",
    BelowThresholdError: "below-threshold",
    ParameterError: "parameter-error",
}


def _error_code(exc: Exception) -> str:
    for kind, code in _ERROR_CODES.items():
        if isinstance(exc, kind):
            return code
    if isinstance(exc, FileNotFoundError):
        return "file-not-found"
    if isinstance(exc, OSError):
        return "io-error"
    return "internal-error"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key = value configuration file")
    for key, (_, default, help_text) in CONFIG_SCHEMA.items():
        common.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE",
                            help=f"{help_text} (default: {default})")
    parser = argparse.ArgumentParser(
        prog="voltisle",
        description="slack-driven voltage-island planning for systolic arrays",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "ingest": "parse or synthesize the per-MAC slack table",
        "cluster": "group MACs by minimum slack",
        "plan": "compute the static per-partition voltages",
        "floorplan": "emit PBLOCK/LOC placement constraints",
        "simulate": "run one matrix product at the planned voltages",
        "calibrate": "refine partition voltages against error flags",
        "report": "dynamic-power model vs published reference",
        "sweep": "evaluate island variants concurrently",
        "run-all": "every stage in order against one output directory",
    }
    for name, description in descriptions.items():
        subparsers.add_parser(name, parents=[common], help=description)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {key: value for key, value in vars(args).items() if key in CONFIG_SCHEMA}
    try:
        cfg = load_config(args.config, overrides)
        out = resolve_outdir(cfg)
        COMMANDS[args.command](cfg, out)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        line = json.dumps({"error": _error_code(exc), "message": str(exc)})
        print(line, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
