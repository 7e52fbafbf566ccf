"""Cluster-quality scoring and the square-grid size scan.

Quality is scored from feature weight mass: a feature is "peculiar" to the
cluster(s) that concentrate the largest share of its total weight.  Recall
of a cluster averages those shares over its peculiar features; precision
averages the fraction of the cluster's own weight mass spent on them.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .som import Projection, SomMap, TrainingParams, project_data, train_som
from .viewpoints import ViewpointMatrix

__all__ = [
    "ClusterQuality",
    "QualityReport",
    "ScanResult",
    "cluster_feature_weights",
    "peculiar_features",
    "map_recall_precision",
    "f_measure",
    "scan_map_sizes",
    "scan_table",
]


@dataclass(frozen=True)
class ClusterQuality:
    peculiar: tuple[str, ...]
    recall: float
    precision: float


@dataclass(frozen=True)
class QualityReport:
    recall: float
    precision: float
    f_measure: float
    clusters: dict[int, ClusterQuality]


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a square-grid size scan.

    ``entries`` holds (side, non-empty cluster count, report) per size;
    ``chosen_size`` maximizes F-measure, ties going to the smallest side.
    """

    entries: tuple[tuple[int, int, QualityReport], ...]
    chosen_size: int

    def report_for(self, side: int) -> QualityReport:
        for s, _, report in self.entries:
            if s == side:
                return report
        raise KeyError(f"no scan entry for side {side}")


def cluster_feature_weights(
    matrix: ViewpointMatrix, proj: Projection
) -> tuple[list[int], np.ndarray]:
    """Summed member weight per (cluster, feature).

    Rows follow non-empty clusters in sorted node order; columns follow the
    viewpoint's features.  Dividing a column by its total gives each
    cluster's share of that feature.
    """
    members = proj.members_by_node()
    clusters = sorted(members)
    weights = np.zeros((len(clusters), matrix.dimension), dtype=np.float64)
    for r, node in enumerate(clusters):
        for item_id in members[node]:
            for idx, w in matrix.rows[item_id].entries:
                weights[r, idx] += w
    return clusters, weights


def peculiar_features(
    som: SomMap, matrix: ViewpointMatrix, proj: Projection
) -> dict[int, set[str]]:
    """Features each non-empty cluster holds the top weight share of.

    A feature with its maximal share tied across several clusters is
    peculiar to every one of them.
    """
    clusters, weights = cluster_feature_weights(matrix, proj)
    totals = weights.sum(axis=0)
    peculiar: dict[int, set[str]] = {node: set() for node in clusters}
    for f in range(matrix.dimension):
        if totals[f] <= 0:
            continue
        col = weights[:, f]
        top = col.max()
        for r in np.flatnonzero(col == top):
            peculiar[clusters[int(r)]].add(matrix.feature_names[f])
    return peculiar


def map_recall_precision(
    som: SomMap, matrix: ViewpointMatrix, proj: Projection
) -> QualityReport:
    """Average recall/precision over clusters that own peculiar features."""
    clusters, weights = cluster_feature_weights(matrix, proj)
    totals = weights.sum(axis=0)
    row_totals = weights.sum(axis=1)
    name_to_idx = {name: i for i, name in enumerate(matrix.feature_names)}
    peculiar = peculiar_features(som, matrix, proj)

    per_cluster: dict[int, ClusterQuality] = {}
    recalls: list[float] = []
    precisions: list[float] = []
    for r, node in enumerate(clusters):
        names = sorted(peculiar[node])
        if not names:
            continue
        idx = [name_to_idx[n] for n in names]
        rec = float(np.mean(weights[r, idx] / totals[idx]))
        prec = float(np.mean(weights[r, idx] / row_totals[r]))
        per_cluster[node] = ClusterQuality(tuple(names), rec, prec)
        recalls.append(rec)
        precisions.append(prec)

    if not recalls:
        raise ValueError("degenerate map")
    recall = float(np.mean(recalls))
    precision = float(np.mean(precisions))
    return QualityReport(recall, precision, f_measure(recall, precision), per_cluster)


def f_measure(r: float, p: float) -> float:
    """Harmonic mean of recall and precision (0 when both are 0)."""
    if not (0 <= r <= 1 and 0 <= p <= 1):
        raise ValueError(f"recall/precision must lie in [0, 1], got ({r}, {p})")
    if r == p:
        # harmonic mean of equal values, kept exact under floating point
        return r
    if r + p == 0:
        return 0.0
    return 2.0 * r * p / (r + p)


def scan_map_sizes(
    matrix: ViewpointMatrix,
    min_side: int,
    max_side: int,
    params: TrainingParams | None = None,
    seed: int = 0,
    unit_norm: bool = False,
) -> ScanResult:
    """Train one square map per side length and keep the best by F-measure.

    Every size trains with the same seed so size is the only varying
    factor.  ``params=None`` derives the default schedule per size.
    Degenerate sizes (no cluster owns a peculiar feature) are skipped.
    """
    if not 1 <= min_side <= max_side:
        raise ValueError("need 1 <= min_side <= max_side")
    entries: list[tuple[int, int, QualityReport]] = []
    for side in range(min_side, max_side + 1):
        som = train_som(matrix, side, side, params=params, seed=seed, unit_norm=unit_norm)
        proj = project_data(som, matrix)
        try:
            report = map_recall_precision(som, matrix, proj)
        except ValueError:
            continue
        entries.append((side, len(proj.non_empty_nodes()), report))
    if not entries:
        raise ValueError("all sizes degenerate")
    chosen = max(entries, key=lambda e: (e[2].f_measure, -e[0]))[0]
    return ScanResult(tuple(entries), chosen)


def scan_table(result: ScanResult, delimiter: str = ",") -> str:
    """Render a scan as a delimited table (size, clusters, R, P, F)."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["size", "clusters", "recall", "precision", "f_measure"])
    for side, n_clusters, report in result.entries:
        writer.writerow(
            [side, n_clusters, repr(report.recall), repr(report.precision), repr(report.f_measure)]
        )
    return buf.getvalue()
