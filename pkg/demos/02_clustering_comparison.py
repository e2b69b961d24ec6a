"""Run all four slack-clustering algorithms on the same banded array.

The table has four clear slack bands with gaps wider than the density
windows, so every algorithm should recover the same grouping.
"""
import numpy as np

from voltisle import ClusterParams, MacId, MacSlackTable, cluster_quality, run_clustering

PARAM_SETS = [
    ClusterParams("hierarchical", k=4, linkage="average"),
    ClusterParams("kmeans", k=4, seed=7),
    ClusterParams("meanshift", radius=0.4),
    ClusterParams("dbscan", epsilon=0.2, minpoints=6),
]


def banded_table(rows=8, cols=8, seed=7):
    # two array rows per band, +-0.05 ns jitter, 0.6 ns between band centers
    rng = np.random.default_rng(seed)
    centers = (5.8, 5.2, 4.6, 4.0)
    min_slack, path_count = {}, {}
    for row in range(rows):
        for col in range(cols):
            value = centers[row // 2] + rng.uniform(-0.05, 0.05)
            min_slack[MacId(row, col)] = float(value)
            path_count[MacId(row, col)] = 0
    return MacSlackTable(rows=rows, cols=cols, min_slack=min_slack, path_count=path_count)


def main():
    table = banded_table()
    values = table.slack_vector()
    print(f"8x8 banded slack table, range {values.min():.3f} .. {values.max():.3f} ns\n")

    for params in PARAM_SETS:
        assignment = run_clustering(table, params)
        quality = cluster_quality(table, assignment)
        print(f"{params.algorithm}: {assignment.P} clusters, silhouette {quality:.3f}")
        for label in range(assignment.P):
            print(
                f"    cluster {label}: {assignment.size[label]:3d} MACs, "
                f"mean slack {assignment.mean_slack[label]:.3f} ns, "
                f"min {assignment.min_slack[label]:.3f} ns"
            )
        if assignment.noise:
            print(f"    ({len(assignment.noise)} noise points reassigned)")
        print()

    print("cluster 0 always carries the largest mean slack; it will get the")
    print("lowest bias voltage when the plan stage maps clusters to islands.")
    print("On a smooth gradient the density methods merge neighboring bands;")
    print("only the count-driven methods (k-means, hierarchical) still split it.")


if __name__ == "__main__":
    main()
