"""Shared fixture builders and independent oracles for the test suite."""

from __future__ import annotations

import math

import numpy as np

from mvsom import SparseVector, TrainingParams
from mvsom.som import Projection, SomMap


def light_params(radius_start: float = 1.5) -> TrainingParams:
    """Short two-phase schedule for tests that train many maps."""
    return TrainingParams(
        ordering_iterations=60,
        tuning_iterations=120,
        radius_start=radius_start,
    )


def sv(*weights: float) -> SparseVector:
    """Dense-style shorthand: sv(1, 0, 2) -> entries ((0,1.0),(2,2.0))."""
    return SparseVector(
        tuple((i, float(w)) for i, w in enumerate(weights) if w != 0)
    )


def toy_map(width: int, height: int, dim: int = 2, viewpoint_id: str = "vp") -> SomMap:
    """Placeholder map used where only grid geometry matters."""
    return SomMap(
        width=width,
        height=height,
        codebooks=np.zeros((width * height, dim)),
        viewpoint_id=viewpoint_id,
        params=TrainingParams(1, 1),
        seed=0,
    )


def planted_projection(viewpoint_id: str, assignments: dict[str, tuple[int, float]]) -> Projection:
    return Projection(viewpoint_id, dict(assignments))


# ---------------------------------------------------------------------------
# independent oracles (plain-python reimplementations, no library calls)


def brute_force_bmu(codebooks: np.ndarray, vector: dict[int, float]) -> int:
    """Nearest codebook by Euclidean distance, lowest index on ties."""
    best, best_d = 0, math.inf
    for k in range(codebooks.shape[0]):
        d = 0.0
        for dim in range(codebooks.shape[1]):
            diff = vector.get(dim, 0.0) - codebooks[k, dim]
            d += diff * diff
        if d < best_d:
            best, best_d = k, d
    return best


def brute_force_dispersion(coords: list[tuple[float, float]]) -> float:
    if len(coords) <= 1:
        return 0.0
    total = 0.0
    pairs = 0
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            total += math.dist(coords[i], coords[j])
            pairs += 1
    return total / pairs


def flood_fill_zones(
    width: int, height: int, labels: dict[int, str | None]
) -> set[tuple[str, frozenset[int]]]:
    """Connected same-label components via an explicit BFS queue."""
    out: set[tuple[str, frozenset[int]]] = set()
    visited: set[int] = set()
    for start in range(width * height):
        if start in visited or labels.get(start) is None:
            continue
        lab = labels[start]
        queue = [start]
        visited.add(start)
        comp = set()
        while queue:
            node = queue.pop(0)
            comp.add(node)
            a, b = node % width, node // width
            for na, nb in ((a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)):
                if 0 <= na < width and 0 <= nb < height:
                    n = nb * width + na
                    if n not in visited and labels.get(n) == lab:
                        visited.add(n)
                        queue.append(n)
        out.add((lab, frozenset(comp)))
    return out


def oracle_posterior(
    target_node: int,
    activated: set[int],
    source_assign: dict[str, tuple[int, float]],
    target_assign: dict[str, tuple[int, float]],
) -> float:
    """Exhaustive enumeration of the per-node evidence fraction."""
    numer = denom = 0.0
    for item in sorted(target_assign, reverse=True):
        node, _ = target_assign[item]
        if node != target_node or item not in source_assign:
            continue
        src_node, sim = source_assign[item]
        denom += sim
        if src_node in activated:
            numer += sim
    return numer / denom if denom > 0 else 0.0


def oracle_consistency(
    source_assign: dict[str, tuple[int, float]],
    target_assign: dict[str, tuple[int, float]],
    target_width: int,
) -> float:
    """Plain-loop propagation-consistency value for planted projections."""
    source_nodes = sorted({n for n, _ in source_assign.values()})
    terms = []
    for src in source_nodes:
        carriers = [
            item
            for item, (node, _) in source_assign.items()
            if node == src and item in target_assign
        ]
        total = sum(source_assign[item][1] for item in carriers)
        if not carriers or total <= 0:
            continue
        landed = sorted(
            {target_assign[item][0] for item in carriers
             if source_assign[item][1] > 0}
        )
        coords = [(n % target_width, n // target_width) for n in landed]
        terms.append(1.0 / (brute_force_dispersion(coords) + 1.0))
    assert terms, "oracle: nothing propagates"
    return sum(terms) / len(terms)
