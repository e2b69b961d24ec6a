"""Grouping MACs by minimum slack.

Four interchangeable 1-D algorithms over the per-MAC minimum slack values:
agglomerative hierarchical (single/complete/average linkage), k-means
(Lloyd with quantile initialization), mean shift (flat kernel), and DBSCAN.
Whatever the algorithm, cluster indices are relabeled so index 0 holds the
largest mean slack; downstream that cluster maps to the lowest-voltage
partition.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.cluster import hierarchy

from .errors import ParameterError
from .report_ingest import MacId
from .slack_model import MacSlackTable

ALGORITHMS = ("hierarchical", "kmeans", "meanshift", "dbscan")
LINKAGES = ("single", "complete", "average")

KMEANS_TOL = 1e-9
KMEANS_MAX_ITER = 300
MEANSHIFT_TOL = 1e-6
MEANSHIFT_MAX_ITER = 500


@dataclass(frozen=True)
class ClusterParams:
    """Algorithm selection plus the knobs the chosen algorithm needs."""

    algorithm: str
    k: int | None = None
    radius: float | None = None
    epsilon: float | None = None
    minpoints: int | None = None
    linkage: str = "average"
    seed: int = 0

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(
                f"unknown algorithm {self.algorithm!r}; valid: {', '.join(ALGORITHMS)}"
            )
        if self.algorithm in ("hierarchical", "kmeans") and (self.k is None or self.k < 1):
            raise ParameterError(f"{self.algorithm} needs k >= 1, got {self.k}")
        if self.algorithm == "hierarchical" and self.linkage not in LINKAGES:
            raise ParameterError(f"unknown linkage {self.linkage!r}; valid: {', '.join(LINKAGES)}")
        if self.algorithm == "meanshift" and (self.radius is None or self.radius <= 0):
            raise ParameterError(f"meanshift needs radius > 0, got {self.radius}")
        if self.algorithm == "dbscan":
            if self.epsilon is None or self.epsilon <= 0:
                raise ParameterError(f"dbscan needs epsilon > 0, got {self.epsilon}")
            if self.minpoints is None or self.minpoints < 1:
                raise ParameterError(f"dbscan needs minpoints >= 1, got {self.minpoints}")


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster labels plus per-cluster stats, index 0 = largest mean slack."""

    cluster_of: dict
    P: int
    mean_slack: tuple
    min_slack: tuple
    size: tuple
    noise: tuple = ()


@dataclass(frozen=True)
class Dendrogram:
    """Merge list (left node, right node, merge distance ns).

    Nodes 0..n-1 are MACs in row-major order; merge r creates node n+r.
    """

    merges: tuple


def _finalize(table: MacSlackTable, labels: np.ndarray, noise=()) -> ClusterAssignment:
    """Relabel clusters in descending-mean-slack order and compute stats."""
    values = table.slack_vector()
    macs = list(table.macs())
    distinct = []
    seen = {}
    for pos, label in enumerate(labels):
        if label not in seen:
            seen[label] = pos
            distinct.append(label)
    # order by mean slack, first-occurrence index breaks exact ties
    keyed = sorted(distinct, key=lambda l: (-float(values[labels == l].mean()), seen[l]))
    remap = {old: new for new, old in enumerate(keyed)}
    new_labels = np.array([remap[l] for l in labels])

    mean_slack = []
    min_slack = []
    size = []
    for c in range(len(keyed)):
        members = values[new_labels == c]
        mean_slack.append(float(members.mean()))
        min_slack.append(float(members.min()))
        size.append(int(members.size))
    cluster_of = {mac: int(new_labels[pos]) for pos, mac in enumerate(macs)}
    return ClusterAssignment(
        cluster_of=cluster_of,
        P=len(keyed),
        mean_slack=tuple(mean_slack),
        min_slack=tuple(min_slack),
        size=tuple(size),
        noise=tuple(noise),
    )


def _check_k(k: int, n: int) -> None:
    if k < 1 or k > n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")


def cluster_hierarchical(table: MacSlackTable, k: int, linkage: str = "average"):
    """Agglomerative clustering; returns (assignment, dendrogram)."""
    if linkage not in LINKAGES:
        raise ParameterError(f"unknown linkage {linkage!r}; valid: {', '.join(LINKAGES)}")
    values = table.slack_vector()
    n = values.size
    _check_k(k, n)
    if n == 1:
        return _finalize(table, np.zeros(1, dtype=int)), Dendrogram(())

    Z = hierarchy.linkage(values.reshape(-1, 1), method=linkage)
    merges = tuple((int(a), int(b), float(d)) for a, b, d, _ in Z)

    # cut: replay the first n-k merges through a union-find
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in range(n - k):
        left, right, _ = merges[r]
        parent[find(left)] = n + r
        parent[find(right)] = n + r
    labels = np.array([find(i) for i in range(n)])
    return _finalize(table, labels), Dendrogram(merges)


def cluster_kmeans(table: MacSlackTable, k: int, seed: int = 0) -> ClusterAssignment:
    """Lloyd iteration on 1-D slack, initialized at k distinct quantiles."""
    values = table.slack_vector()
    n = values.size
    _check_k(k, n)
    distinct = np.unique(values)
    if k > distinct.size:
        warnings.warn(
            f"k={k} exceeds the {distinct.size} distinct slack values; "
            f"clustering distinct values instead",
            stacklevel=2,
        )
        labels = np.searchsorted(distinct, values)
        return _finalize(table, labels)

    quantiles = (np.arange(k) + 0.5) / k
    centers = np.unique(np.quantile(values, quantiles))
    if centers.size < k:
        # quantiles collided on tied data; fill from other distinct values
        rng = np.random.default_rng(seed)
        pool = np.setdiff1d(distinct, centers)
        extra = rng.choice(pool, size=k - centers.size, replace=False)
        centers = np.sort(np.concatenate([centers, extra]))

    for _ in range(KMEANS_MAX_ITER):
        labels = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
        new_centers = centers.copy()
        for c in range(k):
            members = values[labels == c]
            if members.size:
                new_centers[c] = members.mean()
            else:
                # re-seat an empty center on the worst-fit point
                far = int(np.argmax(np.abs(values - centers[labels])))
                new_centers[c] = values[far]
        moved = float(np.max(np.abs(new_centers - centers)))
        centers = new_centers
        if moved < KMEANS_TOL:
            break
    labels = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
    return _finalize(table, labels)


def _window_means(sorted_vals, prefix, x, radius):
    lo = np.searchsorted(sorted_vals, x - radius, side="left")
    hi = np.searchsorted(sorted_vals, x + radius, side="right")
    return (prefix[hi] - prefix[lo]) / (hi - lo)


def cluster_meanshift(table: MacSlackTable, radius: float) -> ClusterAssignment:
    """Flat-kernel mean shift; modes closer than radius/2 are merged."""
    if radius <= 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    values = table.slack_vector()
    sorted_vals = np.sort(values)
    prefix = np.concatenate([[0.0], np.cumsum(sorted_vals)])

    x = values.astype(float).copy()
    for _ in range(MEANSHIFT_MAX_ITER):
        new_x = _window_means(sorted_vals, prefix, x, radius)
        if float(np.max(np.abs(new_x - x))) < MEANSHIFT_TOL:
            x = new_x
            break
        x = new_x

    # group modes whose sorted chain stays within radius/2
    order = np.argsort(x, kind="stable")
    labels = np.empty(values.size, dtype=int)
    group = 0
    prev_mode = None
    for idx in order:
        if prev_mode is not None and x[idx] - prev_mode > radius / 2.0:
            group += 1
        labels[idx] = group
        prev_mode = x[idx]
    return _finalize(table, labels)


def cluster_dbscan(table: MacSlackTable, epsilon: float, minpoints: int) -> ClusterAssignment:
    """Density clustering on 1-D slack.

    Core points need minpoints neighbors within epsilon (self included).
    Border points join their nearest core's cluster; remaining points are
    noise, which is then reassigned to the lowest-mean-slack cluster (the
    highest-voltage partition) for safety. The pre-reassignment noise list
    is kept on the result.
    """
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if minpoints < 1:
        raise ParameterError(f"minpoints must be at least 1, got {minpoints}")
    values = table.slack_vector()
    macs = list(table.macs())
    n = values.size
    order = np.argsort(values, kind="stable")
    sv = values[order]

    lo = np.searchsorted(sv, sv - epsilon, side="left")
    hi = np.searchsorted(sv, sv + epsilon, side="right")
    is_core_sorted = (hi - lo) >= minpoints
    if not is_core_sorted.any():
        raise ParameterError("no core points; widen epsilon")

    # chain consecutive cores whose gap is at most epsilon
    labels_sorted = np.full(n, -1, dtype=int)
    cluster = -1
    prev_core_val = None
    for pos in range(n):
        if not is_core_sorted[pos]:
            continue
        if prev_core_val is None or sv[pos] - prev_core_val > epsilon:
            cluster += 1
        labels_sorted[pos] = cluster
        prev_core_val = sv[pos]

    core_positions = np.flatnonzero(is_core_sorted)
    core_vals = sv[core_positions]
    for pos in range(n):
        if is_core_sorted[pos]:
            continue
        # nearest core, ties toward the lower value
        insert = np.searchsorted(core_vals, sv[pos])
        best = None
        for cand in (insert - 1, insert):
            if 0 <= cand < core_vals.size:
                dist = abs(sv[pos] - core_vals[cand])
                if best is None or dist < best[0] - 1e-15:
                    best = (dist, cand)
        dist, cand = best
        if dist <= epsilon:
            labels_sorted[pos] = labels_sorted[core_positions[cand]]

    labels = np.empty(n, dtype=int)
    labels[order] = labels_sorted
    noise_idx = np.flatnonzero(labels == -1)
    noise_macs = tuple(macs[i] for i in noise_idx)

    if noise_idx.size:
        cluster_ids = np.unique(labels[labels >= 0])
        means = [values[labels == c].mean() for c in cluster_ids]
        lowest = cluster_ids[int(np.argmin(means))]
        labels[noise_idx] = lowest
    return _finalize(table, labels, noise=noise_macs)


def run_clustering(table: MacSlackTable, params: ClusterParams) -> ClusterAssignment:
    """Dispatch on params.algorithm; hierarchical discards its dendrogram."""
    params.validate()
    if params.algorithm == "hierarchical":
        assignment, _ = cluster_hierarchical(table, params.k, params.linkage)
        return assignment
    if params.algorithm == "kmeans":
        return cluster_kmeans(table, params.k, params.seed)
    if params.algorithm == "meanshift":
        return cluster_meanshift(table, params.radius)
    return cluster_dbscan(table, params.epsilon, params.minpoints)


def cluster_quality(table: MacSlackTable, assignment: ClusterAssignment) -> float:
    """Mean silhouette score over MACs (0 when there is a single cluster).

    Gives a scale-free read on how cleanly the slack values separate, so the
    four algorithms can be compared on the same table.
    """
    values = table.slack_vector()
    labels = np.array([assignment.cluster_of[mac] for mac in table.macs()])
    if assignment.P < 2:
        return 0.0
    dist = np.abs(values[:, None] - values[None, :])
    scores = np.zeros(values.size)
    for i in range(values.size):
        own = labels == labels[i]
        own_size = int(own.sum())
        if own_size <= 1:
            continue
        a = dist[i, own].sum() / (own_size - 1)
        b = min(dist[i, labels == c].mean() for c in range(assignment.P) if c != labels[i])
        scores[i] = (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return float(scores.mean())


def write_assignment(table: MacSlackTable, assignment: ClusterAssignment, path) -> None:
    lines = ["row,col,min_slack_ns,cluster"]
    for mac in table.macs():
        lines.append(f"{mac.row},{mac.col},{table.min_slack[mac]!r},{assignment.cluster_of[mac]}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def read_assignment(path):
    """Reload an assignment export; returns (assignment, slack table).

    Stats are rebuilt from the file's own slack column. Noise provenance is
    not serialized, so the noise list comes back empty.
    """
    min_slack = {}
    labels = {}
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        if header != "row,col,min_slack_ns,cluster":
            raise ParameterError(f"unexpected assignment header {header!r}")
        for line in handle:
            line = line.strip()
            if not line:
                continue
            row, col, slack, cluster = line.split(",")
            mac = MacId(int(row), int(col))
            min_slack[mac] = float(slack)
            labels[mac] = int(cluster)
    if not labels:
        raise ParameterError("assignment file has no rows")
    rows = max(mac.row for mac in labels) + 1
    cols = max(mac.col for mac in labels) + 1
    table = MacSlackTable(
        rows=rows,
        cols=cols,
        min_slack=min_slack,
        path_count={mac: 0 for mac in labels},
    )
    label_vec = np.array([labels[mac] for mac in table.macs()])
    assignment = _finalize(table, label_vec)
    if any(assignment.cluster_of[mac] != labels[mac] for mac in labels):
        raise ParameterError("assignment file labels are not in descending-mean-slack order")
    return assignment, table


def write_dendrogram(dendrogram: Dendrogram, path) -> None:
    lines = ["left,right,distance_ns"]
    for left, right, distance in dendrogram.merges:
        lines.append(f"{left},{right},{distance!r}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
