#!/usr/bin/env python3
"""Label map nodes by their dominant feature and zone the grid.

A zone ("information area") is a 4-connected patch of nodes sharing one
dominant label; empty nodes stay unlabeled and belong to no area.
"""

from mvsom import (
    SyntheticSpec,
    generate_synthetic,
    label_nodes,
    project_data,
    train_som,
    zone_map,
)

dataset = generate_synthetic(
    SyntheticSpec(
        item_count=120,
        features={"topics": 12},
        group_count=4,
        coupling=1.0,
        seed=5,
    )
)
matrix = dataset.viewpoint("topics")
som = train_som(matrix, 4, 4, seed=5)
proj = project_data(som, matrix)

labels = label_nodes(som, proj, matrix)
areas = zone_map(som, labels, proj)

print("grid labels (row b=0 first, '.' = empty node):")
for b in range(som.height):
    row = []
    for a in range(som.width):
        label = labels[som.node_index(a, b)]
        row.append((label.rsplit("_", 1)[-1] if label else ".").rjust(5))
    print("  " + " ".join(row))

print(f"\n{len(areas)} information areas:")
for area in areas:
    coords = sorted(som.node_coords(n) for n in area.node_indices)
    print(f"  area {area.area_id}: label={area.dominant_label!r} "
          f"nodes={coords} members={len(area.member_items)}")
