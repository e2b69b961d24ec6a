"""The four slack-clustering algorithms and their shared conventions."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voltisle.clustering import (
    ClusterParams,
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
from voltisle.errors import ParameterError
from . import oracles

TWO_BLOBS = [5.8, 5.9, 5.85, 5.95, 4.1, 4.2, 4.15, 4.05]


def blob_table():
    return oracles.table_from_values(TWO_BLOBS, 2, 4)


class TestConventions:
    @pytest.mark.parametrize(
        "params",
        [
            ClusterParams("kmeans", k=2),
            ClusterParams("hierarchical", k=2),
            ClusterParams("meanshift", radius=0.4),
            ClusterParams("dbscan", epsilon=0.2, minpoints=2),
        ],
        ids=lambda p: p.algorithm,
    )
    def test_index_zero_has_largest_mean(self, params):
        assignment = run_clustering(blob_table(), params)
        assert assignment.P == 2
        assert assignment.mean_slack[0] > assignment.mean_slack[1]
        assert assignment.size == (4, 4)
        # the high-slack blob is cluster 0
        table = blob_table()
        for mac in table.macs():
            expected = 0 if table.min_slack[mac] > 5.0 else 1
            assert assignment.cluster_of[mac] == expected

    def test_stats_match_members(self):
        assignment = run_clustering(blob_table(), ClusterParams("kmeans", k=2))
        values = np.array(TWO_BLOBS)
        assert assignment.mean_slack[0] == pytest.approx(values[values > 5].mean())
        assert assignment.min_slack[1] == pytest.approx(values[values < 5].min())

    def test_exact_tie_broken_by_first_occurrence(self):
        # two clusters with identical means; the one seen first keeps index 0
        table = oracles.table_from_values([5.0, 5.0, 3.0, 3.0], 1, 4)
        assignment = cluster_kmeans(table, 2, seed=0)
        assert assignment.mean_slack[0] == 5.0


class TestKmeans:
    def test_matches_dp_optimum_on_separated_data(self):
        rng = np.random.default_rng(8)
        values = np.concatenate([c + 0.05 * rng.random(10) for c in (4.0, 4.9, 5.8)])
        rng.shuffle(values)
        table = oracles.table_from_values(values, 5, 6)
        assignment = cluster_kmeans(table, 3, seed=8)
        assert oracles.assignment_partition(table, assignment) == oracles.as_partition(
            oracles.dp_kmeans_1d(values, 3)
        )

    def test_k_one(self):
        assignment = cluster_kmeans(blob_table(), 1)
        assert assignment.P == 1
        assert assignment.size == (8,)

    def test_k_equals_n(self):
        assignment = cluster_kmeans(blob_table(), 8)
        assert assignment.P == 8
        assert assignment.size == tuple([1] * 8)

    def test_k_beyond_distinct_values_warns(self):
        table = oracles.table_from_values([5.0, 5.0, 4.0, 4.0], 2, 2)
        with pytest.warns(UserWarning, match="distinct"):
            assignment = cluster_kmeans(table, 3)
        assert assignment.P == 2

    def test_k_out_of_range(self):
        with pytest.raises(ParameterError, match=r"k must be in \[1, 8\]"):
            cluster_kmeans(blob_table(), 9)
        with pytest.raises(ParameterError):
            cluster_kmeans(blob_table(), 0)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_deterministic_and_permutation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        values = 4.0 + 2.0 * rng.random(24)
        table = oracles.table_from_values(values, 4, 6)
        first = cluster_kmeans(table, 3, seed=1)
        assert cluster_kmeans(table, 3, seed=1).cluster_of == first.cluster_of

        perm = rng.permutation(24)
        shuffled = oracles.table_from_values(values[perm], 4, 6)
        second = cluster_kmeans(shuffled, 3, seed=1)
        # same partition of the underlying values, whatever the MAC order
        first_groups = {
            frozenset(values[i] for i in group)
            for group in oracles.assignment_partition(table, first)
        }
        second_groups = {
            frozenset(values[perm][i] for i in group)
            for group in oracles.assignment_partition(shuffled, second)
        }
        assert first_groups == second_groups


class TestHierarchical:
    def test_dendrogram_has_n_minus_1_merges(self):
        _, dendrogram = cluster_hierarchical(blob_table(), 2)
        assert len(dendrogram.merges) == 7
        distances = [d for _, _, d in dendrogram.merges]
        assert distances == sorted(distances)

    def test_cut_extremes(self):
        all_one, _ = cluster_hierarchical(blob_table(), 1)
        assert all_one.P == 1
        singletons, _ = cluster_hierarchical(blob_table(), 8)
        assert singletons.P == 8

    def test_single_point(self):
        table = oracles.table_from_values([5.0], 1, 1)
        assignment, dendrogram = cluster_hierarchical(table, 1)
        assert assignment.P == 1
        assert dendrogram.merges == ()

    @pytest.mark.parametrize("linkage", ["single", "complete", "average"])
    def test_matches_bruteforce(self, linkage):
        rng = np.random.default_rng(13)
        values = 4.0 + 2.0 * rng.random(20)
        table = oracles.table_from_values(values, 4, 5)
        assignment, _ = cluster_hierarchical(table, 3, linkage)
        assert oracles.assignment_partition(table, assignment) == oracles.agglomerate_bruteforce(
            values, 3, linkage
        )

    def test_scale_equivariant(self):
        rng = np.random.default_rng(21)
        values = 4.0 + 2.0 * rng.random(18)
        table = oracles.table_from_values(values, 3, 6)
        scaled = oracles.table_from_values(values * 3.0, 3, 6)
        one, _ = cluster_hierarchical(table, 4)
        two, _ = cluster_hierarchical(scaled, 4)
        assert one.cluster_of == two.cluster_of

    def test_bad_linkage(self):
        with pytest.raises(ParameterError, match="unknown linkage"):
            cluster_hierarchical(blob_table(), 2, "ward")


class TestMeanshift:
    def test_two_blobs(self):
        assignment = cluster_meanshift(blob_table(), radius=0.4)
        assert assignment.P == 2

    def test_huge_radius_single_cluster(self):
        assignment = cluster_meanshift(blob_table(), radius=10.0)
        assert assignment.P == 1

    def test_matches_direct_iteration(self):
        rng = np.random.default_rng(3)
        values = np.concatenate(
            [4.2 + 0.1 * rng.random(16), 5.1 + 0.1 * rng.random(16), 5.8 + 0.1 * rng.random(16)]
        )
        rng.shuffle(values)
        table = oracles.table_from_values(values, 6, 8)
        assignment = cluster_meanshift(table, radius=0.25)
        ref = oracles.meanshift_reference(values, radius=0.25)
        assert oracles.assignment_partition(table, assignment) == oracles.as_partition(ref)

    def test_bad_radius(self):
        with pytest.raises(ParameterError, match="radius must be positive"):
            cluster_meanshift(blob_table(), 0.0)


class TestDbscan:
    def test_noise_recorded_and_reassigned(self):
        values = [4.0, 4.02, 4.04, 4.06, 5.5, 5.52, 5.54, 5.56, 4.8]
        table = oracles.table_from_values(values, 3, 3)
        assignment = cluster_dbscan(table, epsilon=0.05, minpoints=3)
        assert assignment.P == 2
        assert len(assignment.noise) == 1
        lone = assignment.noise[0]
        assert table.min_slack[lone] == 4.8
        # reassigned to the lowest-mean (most critical) cluster
        assert assignment.cluster_of[lone] == int(np.argmin(assignment.mean_slack))

    def test_border_joins_nearest_core(self):
        # 4.065 reaches only one core (4.02), so it is a border point
        values = [4.0, 4.01, 4.02, 5.0, 5.01, 5.02, 4.065]
        table = oracles.table_from_values(values, 1, 7)
        assignment = cluster_dbscan(table, epsilon=0.05, minpoints=3)
        labels, core = oracles.dbscan_reference(values, 0.05, 3)
        assert not core[6] and labels[6] == labels[0]
        assert assignment.noise == ()
        macs = list(table.macs())
        assert assignment.cluster_of[macs[6]] == assignment.cluster_of[macs[0]]
        assert assignment.cluster_of[macs[6]] != assignment.cluster_of[macs[3]]

    def test_all_noise_rejected(self):
        table = oracles.table_from_values([4.0, 4.5, 5.0, 5.5], 2, 2)
        with pytest.raises(ParameterError, match="no core points"):
            cluster_dbscan(table, epsilon=0.1, minpoints=3)

    def test_scale_equivariant_with_epsilon(self):
        rng = np.random.default_rng(17)
        values = np.concatenate([4.0 + 0.1 * rng.random(10), 5.5 + 0.1 * rng.random(10)])
        table = oracles.table_from_values(values, 4, 5)
        scaled = oracles.table_from_values(values * 2.0, 4, 5)
        one = cluster_dbscan(table, epsilon=0.15, minpoints=4)
        two = cluster_dbscan(scaled, epsilon=0.30, minpoints=4)
        assert one.cluster_of == two.cluster_of
        assert one.noise == two.noise

    def test_bad_params(self):
        with pytest.raises(ParameterError, match="epsilon must be positive"):
            cluster_dbscan(blob_table(), 0.0, 2)
        with pytest.raises(ParameterError, match="minpoints must be at least 1"):
            cluster_dbscan(blob_table(), 0.2, 0)


class TestDispatchAndParams:
    def test_unknown_algorithm(self):
        with pytest.raises(ParameterError, match="unknown algorithm"):
            run_clustering(blob_table(), ClusterParams("spectral", k=2))

    def test_missing_k(self):
        with pytest.raises(ParameterError, match="needs k"):
            run_clustering(blob_table(), ClusterParams("kmeans"))

    def test_missing_radius(self):
        with pytest.raises(ParameterError, match="needs radius"):
            run_clustering(blob_table(), ClusterParams("meanshift"))

    def test_missing_dbscan_params(self):
        with pytest.raises(ParameterError, match="needs epsilon"):
            run_clustering(blob_table(), ClusterParams("dbscan", minpoints=2))
        with pytest.raises(ParameterError, match="needs minpoints"):
            run_clustering(blob_table(), ClusterParams("dbscan", epsilon=0.2))


class TestQuality:
    def test_separated_beats_mixed(self):
        table = blob_table()
        good = run_clustering(table, ClusterParams("kmeans", k=2))
        assert cluster_quality(table, good) > 0.8

    def test_single_cluster_zero(self):
        table = blob_table()
        single = cluster_kmeans(table, 1)
        assert cluster_quality(table, single) == 0.0


class TestSerialization:
    def test_assignment_round_trip(self, tmp_path):
        table = blob_table()
        assignment = run_clustering(table, ClusterParams("kmeans", k=2))
        target = tmp_path / "assignment.csv"
        write_assignment(table, assignment, target)
        back, back_table = read_assignment(target)
        assert back.cluster_of == assignment.cluster_of
        assert back.mean_slack == assignment.mean_slack
        assert back_table.min_slack == table.min_slack

    def test_read_rejects_misordered_labels(self, tmp_path):
        target = tmp_path / "assignment.csv"
        target.write_text(
            "row,col,min_slack_ns,cluster\n0,0,4.0,0\n0,1,6.0,1\n", encoding="utf-8"
        )
        with pytest.raises(ParameterError, match="descending-mean-slack"):
            read_assignment(target)

    def test_read_rejects_bad_header(self, tmp_path):
        target = tmp_path / "assignment.csv"
        target.write_text("a,b,c\n", encoding="utf-8")
        with pytest.raises(ParameterError, match="unexpected assignment header"):
            read_assignment(target)

    def test_dendrogram_export(self, tmp_path):
        _, dendrogram = cluster_hierarchical(blob_table(), 2)
        target = tmp_path / "dendrogram.csv"
        write_dendrogram(dendrogram, target)
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "left,right,distance_ns"
        assert len(lines) == 8
