"""Dataset and viewpoint data model plus the shared cosine primitive.

A viewpoint is one slice of the description space of a dataset: the same
items described by one family of features (towns, thematic codes, link
targets, ...).  Each viewpoint is held as a sparse item x feature weight
matrix; items may be absent from a viewpoint entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DataItem",
    "SparseVector",
    "ViewpointMatrix",
    "Dataset",
    "ValidationReport",
    "cosine_similarity",
    "build_viewpoint_matrix",
    "validate_dataset",
]


@dataclass(frozen=True)
class DataItem:
    """One clustered item (a website, a document, ...)."""

    id: str
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("item id must be non-empty")


@dataclass(frozen=True)
class SparseVector:
    """Sparse non-negative feature vector.

    ``entries`` holds (feature index, weight) pairs with strictly increasing
    indices and strictly positive weights.  An empty vector is representable
    but rejected by any norm-based operation.
    """

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        prev = -1
        for idx, weight in self.entries:
            if idx <= prev:
                raise ValueError("feature indices must be strictly increasing")
            if idx < 0:
                raise ValueError("feature indices must be non-negative")
            if not weight > 0:
                raise ValueError(f"weights must be > 0, got {weight!r} at index {idx}")
            prev = idx

    @classmethod
    def from_pairs(cls, pairs) -> "SparseVector":
        """Build from unordered (index, weight) pairs, summing duplicates."""
        acc: dict[int, float] = {}
        for idx, weight in pairs:
            acc[idx] = acc.get(idx, 0.0) + float(weight)
        entries = tuple((i, w) for i, w in sorted(acc.items()) if w > 0)
        return cls(entries)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=np.float64)
        for idx, weight in self.entries:
            if idx >= dim:
                raise ValueError(f"feature index {idx} out of range for dimension {dim}")
            out[idx] = weight
        return out

    def scaled(self, factor: float) -> "SparseVector":
        if not factor > 0:
            raise ValueError("scale factor must be > 0")
        return SparseVector(tuple((i, w * factor) for i, w in self.entries))

    def __len__(self) -> int:
        return len(self.entries)


def cosine_similarity(a: SparseVector, b: SparseVector) -> float:
    """Cosine of the angle between two sparse vectors, in [0, 1].

    Both inputs must have a non-zero norm; weights are non-negative by
    construction, so the result never goes below zero.
    """
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise ValueError("degenerate vector")
    da = dict(a.entries)
    dot = sum(w * da[i] for i, w in b.entries if i in da)
    return min(dot / (na * nb), 1.0)


@dataclass(frozen=True)
class ViewpointMatrix:
    """One viewpoint's sparse item x feature weight matrix.

    Feature names are ordered (lexicographically when built through
    :func:`build_viewpoint_matrix`) and frozen; every entry index in every
    row must address a valid feature.
    """

    viewpoint_id: str
    feature_names: tuple[str, ...]
    rows: dict[str, SparseVector]

    def __post_init__(self) -> None:
        if not self.viewpoint_id:
            raise ValueError("viewpoint id must be non-empty")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if not self.rows:
            raise ValueError("empty viewpoint")
        dim = len(self.feature_names)
        for item_id, vec in self.rows.items():
            for idx, _ in vec.entries:
                if idx >= dim:
                    raise ValueError(
                        f"row {item_id!r} references feature index {idx} "
                        f"but viewpoint has {dim} features"
                    )

    @property
    def dimension(self) -> int:
        return len(self.feature_names)

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(self.rows)

    def to_dense(self) -> np.ndarray:
        """Densify all rows, in row (insertion) order."""
        out = np.zeros((len(self.rows), self.dimension), dtype=np.float64)
        for r, vec in enumerate(self.rows.values()):
            for idx, weight in vec.entries:
                out[r, idx] = weight
        return out

    def unit_rows(self) -> "ViewpointMatrix":
        """Copy with every row scaled to unit Euclidean norm."""
        rows = {}
        for item_id, vec in self.rows.items():
            n = vec.norm()
            rows[item_id] = vec.scaled(1.0 / n) if n > 0 else vec
        return ViewpointMatrix(self.viewpoint_id, self.feature_names, rows)

    def total_weight(self) -> float:
        return sum(w for vec in self.rows.values() for _, w in vec.entries)


def build_viewpoint_matrix(
    raw: list[tuple[str, str, float]], viewpoint_id: str
) -> ViewpointMatrix:
    """Assemble a viewpoint matrix from (item, feature, weight) triples.

    Duplicate (item, feature) pairs are summed, zero-weight entries dropped,
    and features frozen in lexicographic order.  The result is independent
    of the order of the triples; rows are keyed in sorted item-id order.
    """
    if not raw:
        raise ValueError("empty viewpoint")
    sums: dict[str, dict[str, float]] = {}
    for item_id, feature, weight in raw:
        if weight < 0:
            raise ValueError(
                f"negative weight {weight!r} for ({item_id!r}, {feature!r})"
            )
        sums.setdefault(item_id, {}).setdefault(feature, 0.0)
        sums[item_id][feature] += float(weight)

    features = sorted({f for fs in sums.values() for f, w in fs.items() if w > 0})
    index = {name: i for i, name in enumerate(features)}
    rows: dict[str, SparseVector] = {}
    for item_id in sorted(sums):
        entries = tuple(
            (index[f], w) for f, w in sorted(sums[item_id].items()) if w > 0
        )
        if entries:
            rows[item_id] = SparseVector(entries)
    if not rows:
        raise ValueError("empty viewpoint")
    return ViewpointMatrix(viewpoint_id, tuple(features), rows)


@dataclass(frozen=True)
class Dataset:
    """Items plus any number of viewpoint matrices over them."""

    items: tuple[DataItem, ...]
    viewpoints: tuple[ViewpointMatrix, ...]

    def viewpoint(self, viewpoint_id: str) -> ViewpointMatrix:
        for vp in self.viewpoints:
            if vp.viewpoint_id == viewpoint_id:
                return vp
        raise KeyError(f"unknown viewpoint {viewpoint_id!r}")

    @property
    def viewpoint_ids(self) -> tuple[str, ...]:
        return tuple(vp.viewpoint_id for vp in self.viewpoints)

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(item.id for item in self.items)


@dataclass(frozen=True)
class ValidationReport:
    """Report-only result of :func:`validate_dataset`."""

    issues: tuple[str, ...]
    coverage: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_dataset(ds: Dataset) -> ValidationReport:
    """Check a dataset for structural problems without mutating it.

    Reports duplicate item ids, duplicate viewpoint ids, rows referencing
    unknown items, empty rows, and per-viewpoint item coverage counts.
    """
    issues: list[str] = []
    seen: set[str] = set()
    for item in ds.items:
        if item.id in seen:
            issues.append(f"duplicate item id {item.id!r}")
        seen.add(item.id)

    vp_seen: set[str] = set()
    coverage: dict[str, int] = {}
    known = {item.id for item in ds.items}
    for vp in ds.viewpoints:
        if vp.viewpoint_id in vp_seen:
            issues.append(f"duplicate viewpoint id {vp.viewpoint_id!r}")
        vp_seen.add(vp.viewpoint_id)
        coverage[vp.viewpoint_id] = len(vp.rows)
        for item_id, vec in vp.rows.items():
            if item_id not in known:
                issues.append(
                    f"unknown row id {item_id!r} in viewpoint {vp.viewpoint_id!r}"
                )
            if len(vec) == 0:
                issues.append(
                    f"empty row {item_id!r} in viewpoint {vp.viewpoint_id!r}"
                )
    return ValidationReport(tuple(issues), coverage)
