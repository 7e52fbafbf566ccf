"""Node labeling and map zoning.

Each node is labeled by the feature carrying the most member weight; zones
("information areas") are the 4-connected components of equally labeled
nodes.  Labels come from member data, not codebooks, so empty nodes stay
unlabeled and belong to no area.
"""

from __future__ import annotations

from dataclasses import dataclass

from .som import Projection, SomMap
from .viewpoints import ViewpointMatrix

__all__ = [
    "InformationArea",
    "dominant_label",
    "label_nodes",
    "zone_map",
    "feature_ranking",
]


@dataclass(frozen=True)
class InformationArea:
    """A maximal 4-connected patch of nodes sharing one dominant label."""

    area_id: int
    node_indices: frozenset[int]
    dominant_label: str
    member_items: frozenset[str]


def _node_feature_weights(
    som: SomMap, proj: Projection, matrix: ViewpointMatrix, node: int
) -> dict[str, float]:
    if not 0 <= node < som.node_count:
        raise ValueError(f"node index {node} out of range")
    weights: dict[str, float] = {}
    for item_id, (n, _) in proj.assignments.items():
        if n != node:
            continue
        for idx, w in matrix.rows[item_id].entries:
            name = matrix.feature_names[idx]
            weights[name] = weights.get(name, 0.0) + w
    return weights


def dominant_label(
    som: SomMap, proj: Projection, matrix: ViewpointMatrix, node: int
) -> str | None:
    """Feature with the highest summed member weight on ``node``.

    Returns None for an empty node; ties go to the lexicographically
    smallest feature name.
    """
    weights = _node_feature_weights(som, proj, matrix, node)
    if not weights:
        return None
    return min(weights, key=lambda name: (-weights[name], name))


def feature_ranking(
    som: SomMap, proj: Projection, matrix: ViewpointMatrix, node: int
) -> list[tuple[str, float]]:
    """Full per-node feature ranking (weight-descending, name-ascending)."""
    weights = _node_feature_weights(som, proj, matrix, node)
    return sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))


def label_nodes(
    som: SomMap, proj: Projection, matrix: ViewpointMatrix
) -> dict[int, str | None]:
    """Dominant label per node, None where the node has no members."""
    return {
        node: dominant_label(som, proj, matrix, node)
        for node in range(som.node_count)
    }


def zone_map(
    som: SomMap,
    labels: dict[int, str | None],
    proj: Projection | None = None,
) -> list[InformationArea]:
    """Partition labeled nodes into connected same-label areas.

    Connectivity is 4-neighborhood (no diagonals).  Areas are ordered, and
    ids assigned, by their smallest contained node index.  Passing the
    projection fills each area's member item set.
    """
    members = proj.members_by_node() if proj is not None else {}
    seen: set[int] = set()
    areas: list[InformationArea] = []
    for start in range(som.node_count):
        if start in seen or labels.get(start) is None:
            continue
        label = labels[start]
        component: set[int] = set()
        stack = [start]
        seen.add(start)
        while stack:
            node = stack.pop()
            component.add(node)
            a, b = som.node_coords(node)
            for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                na, nb = a + da, b + db
                if not (0 <= na < som.width and 0 <= nb < som.height):
                    continue
                neighbor = som.node_index(na, nb)
                if neighbor in seen or labels.get(neighbor) != label:
                    continue
                seen.add(neighbor)
                stack.append(neighbor)
        items = frozenset(
            item for node in component for item in members.get(node, ())
        )
        areas.append(
            InformationArea(
                area_id=len(areas),
                node_indices=frozenset(component),
                dominant_label=label,
                member_items=items,
            )
        )
    return areas
