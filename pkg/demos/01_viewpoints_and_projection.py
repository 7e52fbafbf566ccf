#!/usr/bin/env python3
"""Build a tiny two-viewpoint dataset, train a map per viewpoint, project.

Items are websites described two ways at once: by the town they sit in and
by the sites they link to.  Each viewpoint becomes its own sparse matrix
and its own self-organizing map.
"""

from mvsom import (
    build_viewpoint_matrix,
    cosine_similarity,
    project_data,
    train_som,
)

# (item, feature, weight) triples; duplicates sum, features freeze sorted
towns = build_viewpoint_matrix(
    [
        ("siteA", "munich", 1), ("siteB", "munich", 1),
        ("siteC", "berlin", 1), ("siteD", "berlin", 1),
        ("siteE", "hamburg", 1), ("siteF", "hamburg", 1),
    ],
    "towns",
)
links = build_viewpoint_matrix(
    [
        ("siteA", "tu-munich.de", 3), ("siteB", "tu-munich.de", 2),
        ("siteC", "hu-berlin.de", 4), ("siteD", "hu-berlin.de", 1),
        ("siteD", "tu-munich.de", 1), ("siteE", "uni-hamburg.de", 2),
        ("siteF", "uni-hamburg.de", 5),
    ],
    "outlinks",
)

print("towns matrix:", len(towns.rows), "x", towns.dimension)
print("links matrix:", len(links.rows), "x", links.dimension)

sim = cosine_similarity(links.rows["siteA"], links.rows["siteD"])
print(f"cosine(siteA, siteD) in link space: {sim:.4f}")

# one small square map per viewpoint; same seed keeps runs reproducible
town_map = train_som(towns, 2, 2, seed=0)
link_map = train_som(links, 2, 2, seed=0)

for name, som, matrix in (("towns", town_map, towns), ("outlinks", link_map, links)):
    proj = project_data(som, matrix)
    print(f"\n{name} projection (item -> node (a,b), similarity):")
    for item, (node, similarity) in proj.assignments.items():
        a, b = som.node_coords(node)
        print(f"  {item}: ({a},{b})  sim={similarity:.3f}")
