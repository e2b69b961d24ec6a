"""Voltage regions, the static bias schedule, and plan serialization."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voltisle.clustering import ClusterParams, run_clustering
from voltisle.errors import ParameterError
from voltisle.voltage_plan import (
    TECHNOLOGIES,
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
from . import oracles

GUARDBAND = TECHNOLOGIES["28nm-commercial"]


class TestRegions:
    def test_known_presets(self):
        assert set(TECHNOLOGIES) == {"28nm-commercial", "22nm", "45nm", "130nm"}
        assert regions_for("22nm").v_crash == 0.50
        assert regions_for("130nm").v_threshold == 0.70

    def test_unknown_preset(self):
        with pytest.raises(ParameterError, match="unknown technology '16nm'"):
            regions_for("16nm")

    def test_ordering_invariant(self):
        with pytest.raises(ParameterError, match="v_threshold < v_crash"):
            VoltageRegions(v_crash=0.4, v_min=1.0, v_nom=1.0, v_threshold=0.5)
        with pytest.raises(ParameterError):
            VoltageRegions(v_crash=0.9, v_min=0.8, v_nom=1.0, v_threshold=0.5)


class TestSchedule:
    def test_guardband_four_partitions(self):
        plan = static_voltage_scaling(GUARDBAND, 4)
        assert plan.v == pytest.approx((0.95625, 0.96875, 0.98125, 0.99375), abs=1e-12)
        assert plan.v_step == pytest.approx(0.0125)
        assert plan.cluster_to_partition == {0: 0, 1: 1, 2: 2, 3: 3}

    def test_single_partition_midpoint(self):
        plan = static_voltage_scaling(GUARDBAND, 1)
        assert plan.v == pytest.approx((0.975,))

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(min_value=1, max_value=12))
    def test_schedule_structure(self, n):
        regions = regions_for("45nm")
        plan = static_voltage_scaling(regions, n)
        assert len(plan.v) == n
        assert plan.v_step * n == pytest.approx(regions.v_min - regions.v_crash)
        assert all(a < b for a, b in zip(plan.v, plan.v[1:]))
        assert regions.v_crash < plan.v[0]
        assert plan.v[-1] < regions.v_min
        # each voltage sits mid-interval
        for i, v in enumerate(plan.v):
            assert v == pytest.approx(regions.v_crash + (i + 0.5) * plan.v_step)

    def test_empty_band_rejected(self):
        flat = VoltageRegions(v_crash=1.0, v_min=1.0, v_nom=1.0, v_threshold=0.5)
        with pytest.raises(ParameterError, match="cannot scale"):
            static_voltage_scaling(flat, 2)

    def test_bad_count(self):
        with pytest.raises(ParameterError, match="at least 1"):
            static_voltage_scaling(GUARDBAND, 0)


class TestRounding:
    def test_half_up(self):
        assert round_voltage(0.95625) == 0.96
        assert round_voltage(0.96875) == 0.97
        assert round_voltage(0.98125) == 0.98
        assert round_voltage(0.975) == 0.98
        assert round_voltage(0.7, 1) == 0.7


class TestAssignment:
    def make(self):
        table = oracles.table_from_values([5.9, 5.8, 4.2, 4.1], 2, 2)
        assignment = run_clustering(table, ClusterParams("kmeans", k=2))
        return table, assignment

    def test_largest_slack_gets_lowest_voltage(self):
        table, assignment = self.make()
        plan = static_voltage_scaling(GUARDBAND, 2)
        voltages = assign_voltages(assignment, plan)
        for mac in table.macs():
            if table.min_slack[mac] > 5.0:
                assert voltages[mac] == plan.v[0]
            else:
                assert voltages[mac] == plan.v[1]

    def test_partition_map(self):
        table, assignment = self.make()
        plan = static_voltage_scaling(GUARDBAND, 2)
        partition = partition_of_macs(assignment, plan)
        assert sorted(set(partition.values())) == [0, 1]

    def test_cardinality_mismatch(self):
        _, assignment = self.make()
        plan = static_voltage_scaling(GUARDBAND, 3)
        with pytest.raises(ParameterError, match="does not match plan partition count"):
            assign_voltages(assignment, plan)
        with pytest.raises(ParameterError):
            partition_of_macs(assignment, plan)


class TestReport:
    def test_reference_comparison_present(self):
        plan = static_voltage_scaling(GUARDBAND, 4)
        text = plan_report(plan, regions=GUARDBAND)
        assert "rounded" in text.splitlines()[0]
        assert "published reference voltages" in text
        assert text.count("[matches]") == 3
        assert "differs by" in text

    def test_no_reference_for_other_sizes(self):
        plan = static_voltage_scaling(GUARDBAND, 3)
        text = plan_report(plan, regions=GUARDBAND)
        assert "published" not in text

    def test_includes_cluster_stats(self):
        table = oracles.table_from_values([5.9, 5.8, 4.2, 4.1], 2, 2)
        assignment = run_clustering(table, ClusterParams("kmeans", k=2))
        plan = static_voltage_scaling(GUARDBAND, 2)
        text = plan_report(plan, assignment, GUARDBAND)
        assert "5.8500" in text
        assert text.splitlines()[1].endswith("2")


class TestSerialization:
    def test_json_round_trip(self, tmp_path):
        plan = static_voltage_scaling(GUARDBAND, 4)
        target = tmp_path / "plan.json"
        write_plan_json(plan, GUARDBAND, target)
        back, regions = read_plan_json(target)
        assert back == plan
        assert regions == GUARDBAND

    def test_csv_export(self, tmp_path):
        table = oracles.table_from_values([5.9, 5.8, 4.2, 4.1], 2, 2)
        assignment = run_clustering(table, ClusterParams("kmeans", k=2))
        plan = static_voltage_scaling(GUARDBAND, 2)
        target = tmp_path / "plan.csv"
        write_plan_csv(plan, assignment, target)
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "partition,v_ccint_volts,cluster,mean_slack_ns,size"
        assert len(lines) == 3
        assert float(lines[1].split(",")[1]) == plan.v[0]
