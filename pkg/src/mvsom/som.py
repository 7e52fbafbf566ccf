"""Square self-organizing maps: training, winner lookup, projection.

Training is a classic two-phase online schedule: a coarse ordering phase
with a wide Gaussian neighborhood followed by a fine-tuning phase that
shrinks the neighborhood down to the winner alone.  Everything is
deterministic for a fixed (matrix, grid, params, seed) tuple.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .viewpoints import SparseVector, ViewpointMatrix

__all__ = [
    "TrainingParams",
    "SomMap",
    "Projection",
    "default_training_params",
    "train_som",
    "best_matching_unit",
    "project_data",
    "quantization_error",
    "save_model",
    "load_model",
]

MODEL_FORMAT_VERSION = 1

# Grids larger than this many codebook cells are refused outright.
_MAX_CELLS = 1 << 28


@dataclass(frozen=True)
class TrainingParams:
    """Two-phase training schedule.

    The ordering phase decays the learning rate from ``alpha_start`` to
    ``alpha_tuning`` and the neighborhood radius from ``radius_start`` to
    ``radius_tuning``; the tuning phase continues both decays down to
    ``alpha_end`` / ``radius_end``.  Decay is linear within each phase.
    """

    ordering_iterations: int
    tuning_iterations: int
    alpha_start: float = 0.5
    alpha_end: float = 0.01
    radius_start: float = 1.0
    radius_end: float = 0.0
    alpha_tuning: float = 0.05
    radius_tuning: float = 1.0

    def __post_init__(self) -> None:
        if self.ordering_iterations < 1 or self.tuning_iterations < 1:
            raise ValueError("iteration counts must be positive")
        if not (0 < self.alpha_end < self.alpha_start < 1):
            raise ValueError("need 0 < alpha_end < alpha_start < 1")
        if not (self.alpha_end <= self.alpha_tuning <= self.alpha_start):
            raise ValueError("alpha_tuning must lie between alpha_end and alpha_start")
        if self.radius_start < self.radius_end or self.radius_end < 0:
            raise ValueError("need radius_start >= radius_end >= 0")
        if not (self.radius_end <= self.radius_tuning <= max(self.radius_start, self.radius_tuning)):
            raise ValueError("radius_tuning must not undershoot radius_end")


def default_training_params(width: int, height: int) -> TrainingParams:
    """SOM_PAK-style defaults scaled to the grid size.

    Ordering runs 20x node count iterations with alpha 0.5 -> 0.05 and
    radius max(w, h)/2 -> 1; tuning runs 50x node count with alpha
    0.05 -> 0.01 and radius 1 -> 0.
    """
    nodes = width * height
    return TrainingParams(
        ordering_iterations=20 * nodes,
        tuning_iterations=50 * nodes,
        radius_start=max(max(width, height) / 2.0, 1.0),
    )


@dataclass(frozen=True)
class SomMap:
    """A trained grid of codebook vectors.

    Node ``k`` sits at grid coordinates ``(k % width, k // width)``.
    ``codebooks`` has shape (width*height, dimension) and is read-only.
    """

    width: int
    height: int
    codebooks: np.ndarray
    viewpoint_id: str
    params: TrainingParams
    seed: int
    unit_norm: bool = False

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")
        if self.codebooks.shape[0] != self.width * self.height:
            raise ValueError("codebook count must equal width * height")
        if not np.all(np.isfinite(self.codebooks)):
            raise ValueError("codebooks must be finite")
        self.codebooks.setflags(write=False)

    @property
    def node_count(self) -> int:
        return self.width * self.height

    @property
    def dimension(self) -> int:
        return int(self.codebooks.shape[1])

    def node_coords(self, node: int) -> tuple[int, int]:
        if not 0 <= node < self.node_count:
            raise ValueError(f"node index {node} out of range")
        return node % self.width, node // self.width

    def node_index(self, a: int, b: int) -> int:
        if not (0 <= a < self.width and 0 <= b < self.height):
            raise ValueError(f"coordinates ({a}, {b}) out of range")
        return b * self.width + a

    def grid_coordinates(self) -> np.ndarray:
        """(node_count, 2) array of (a, b) coordinates, float64."""
        k = np.arange(self.node_count)
        return np.stack([k % self.width, k // self.width], axis=1).astype(np.float64)


@dataclass(frozen=True)
class Projection:
    """Per-item map assignment: item id -> (node index, cosine similarity)."""

    viewpoint_id: str
    assignments: dict[str, tuple[int, float]]

    def node_of(self, item_id: str) -> int:
        return self.assignments[item_id][0]

    def similarity_of(self, item_id: str) -> float:
        return self.assignments[item_id][1]

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(self.assignments)

    def members_by_node(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for item_id, (node, _) in self.assignments.items():
            out.setdefault(node, []).append(item_id)
        return out

    def non_empty_nodes(self) -> tuple[int, ...]:
        return tuple(sorted({node for node, _ in self.assignments.values()}))

    def scaled(self, factor: float) -> "Projection":
        """Copy with every similarity multiplied by ``factor`` (> 0)."""
        if not factor > 0:
            raise ValueError("scale factor must be > 0")
        return Projection(
            self.viewpoint_id,
            {i: (n, s * factor) for i, (n, s) in self.assignments.items()},
        )


def _phase_schedule(iters: int, start: float, end: float) -> np.ndarray:
    if iters == 1:
        return np.array([start])
    return np.linspace(start, end, iters)


def train_som(
    matrix: ViewpointMatrix,
    width: int,
    height: int,
    params: TrainingParams | None = None,
    seed: int = 0,
    unit_norm: bool = False,
) -> SomMap:
    """Train a width x height map on one viewpoint.

    Codebooks are initialized by seeded sampling of data rows, then updated
    online: at each step one row is drawn, its best-matching unit found by
    Euclidean distance, and all codebooks pulled toward the row with a
    Gaussian neighborhood factor exp(-grid_dist^2 / (2 sigma^2)).

    Set ``unit_norm`` to train on rows scaled to unit length; projection and
    quantization reapply the same scaling.
    """
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be >= 1")
    nodes = width * height
    if nodes > _MAX_CELLS or nodes * matrix.dimension > _MAX_CELLS:
        raise ValueError("grid too large")
    if params is None:
        params = default_training_params(width, height)

    data = (matrix.unit_rows() if unit_norm else matrix).to_dense()
    n = data.shape[0]
    rng = np.random.default_rng(seed)

    weights = data[rng.integers(0, n, size=nodes)].copy()
    coords = np.stack(
        [np.arange(nodes) % width, np.arange(nodes) // width], axis=1
    ).astype(np.float64)

    phases = (
        (params.ordering_iterations, params.alpha_start, params.alpha_tuning,
         params.radius_start, params.radius_tuning),
        (params.tuning_iterations, params.alpha_tuning, params.alpha_end,
         params.radius_tuning, params.radius_end),
    )
    for iters, a0, a1, r0, r1 in phases:
        alphas = _phase_schedule(iters, a0, a1)
        radii = _phase_schedule(iters, r0, r1)
        picks = rng.integers(0, n, size=iters)
        for t in range(iters):
            x = data[picks[t]]
            diff = x - weights
            bmu = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
            sigma = radii[t]
            if sigma > 1e-9:
                gd2 = np.sum((coords - coords[bmu]) ** 2, axis=1)
                h = np.exp(-gd2 / (2.0 * sigma * sigma))
                weights += (alphas[t] * h)[:, None] * diff
            else:
                weights[bmu] += alphas[t] * diff[bmu]

    return SomMap(
        width=width,
        height=height,
        codebooks=weights,
        viewpoint_id=matrix.viewpoint_id,
        params=params,
        seed=seed,
        unit_norm=unit_norm,
    )


def best_matching_unit(som: SomMap, v: SparseVector) -> int:
    """Index of the codebook nearest to ``v`` in Euclidean distance.

    Ties break to the lowest node index.
    """
    x = v.to_dense(som.dimension)
    diff = som.codebooks - x
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def _dense_bmus(som: SomMap, data: np.ndarray) -> np.ndarray:
    # ||w - x||^2 = ||w||^2 - 2 w.x + ||x||^2; the ||x||^2 term is constant
    # per row and argmin ties must break to the lowest node index, which
    # argmin already guarantees.
    d2 = (
        np.sum(som.codebooks**2, axis=1)[None, :]
        - 2.0 * data @ som.codebooks.T
        + np.sum(data**2, axis=1)[:, None]
    )
    return np.argmin(d2, axis=1)


def project_data(som: SomMap, matrix: ViewpointMatrix) -> Projection:
    """Assign every row of ``matrix`` to its best-matching unit.

    The stored similarity is the cosine between the (un-normalized) row and
    the winning codebook; a zero-norm codebook yields similarity 0.
    """
    if matrix.dimension != som.dimension:
        raise ValueError(
            f"feature-space mismatch: matrix has {matrix.dimension} features, "
            f"map expects {som.dimension}"
        )
    work = matrix.unit_rows() if som.unit_norm else matrix
    data = work.to_dense()
    bmus = _dense_bmus(som, data)

    assignments: dict[str, tuple[int, float]] = {}
    for item_id, vec, node in zip(matrix.rows.keys(), matrix.rows.values(), bmus):
        cb = som.codebooks[node]
        cb_norm = float(np.linalg.norm(cb))
        if cb_norm == 0.0:
            sim = 0.0
        else:
            dot = float(sum(w * cb[i] for i, w in vec.entries))
            sim = min(max(dot / (vec.norm() * cb_norm), 0.0), 1.0)
        assignments[item_id] = (int(node), sim)
    return Projection(matrix.viewpoint_id, assignments)


def quantization_error(som: SomMap, matrix: ViewpointMatrix) -> float:
    """Mean Euclidean distance from each row to its winning codebook."""
    if matrix.dimension != som.dimension:
        raise ValueError("feature-space mismatch")
    work = matrix.unit_rows() if som.unit_norm else matrix
    data = work.to_dense()
    if data.shape[0] == 0:
        raise ValueError("empty matrix")
    bmus = _dense_bmus(som, data)
    return float(np.mean(np.linalg.norm(data - som.codebooks[bmus], axis=1)))


def _params_to_dict(params: TrainingParams) -> dict:
    return {
        "ordering_iterations": params.ordering_iterations,
        "tuning_iterations": params.tuning_iterations,
        "alpha_start": params.alpha_start,
        "alpha_end": params.alpha_end,
        "radius_start": params.radius_start,
        "radius_end": params.radius_end,
        "alpha_tuning": params.alpha_tuning,
        "radius_tuning": params.radius_tuning,
    }


def model_to_dict(som: SomMap) -> dict:
    """JSON-ready model document (full float precision)."""
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": "som-model",
        "width": som.width,
        "height": som.height,
        "viewpoint_id": som.viewpoint_id,
        "seed": som.seed,
        "unit_norm": som.unit_norm,
        "params": _params_to_dict(som.params),
        "codebooks": [[float(x) for x in row] for row in som.codebooks],
    }


def model_from_dict(doc: dict) -> SomMap:
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('format_version')!r}")
    params = TrainingParams(**doc["params"])
    codebooks = np.asarray(doc["codebooks"], dtype=np.float64)
    if codebooks.ndim == 1:
        codebooks = codebooks.reshape(doc["width"] * doc["height"], -1)
    return SomMap(
        width=doc["width"],
        height=doc["height"],
        codebooks=codebooks,
        viewpoint_id=doc["viewpoint_id"],
        params=params,
        seed=doc["seed"],
        unit_norm=doc.get("unit_norm", False),
    )


def save_model(som: SomMap, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(model_to_dict(som), sort_keys=True, indent=2) + "\n"
    )


def load_model(path: str | Path) -> SomMap:
    return model_from_dict(json.loads(Path(path).read_text()))
