import numpy as np
import pytest

from mvsom import build_viewpoint_matrix, dominant_label, label_nodes, zone_map
from mvsom.som import Projection
from mvsom.topology import feature_ranking

from helpers import flood_fill_zones, toy_map


def _planted(matrix, assignments):
    return Projection(
        matrix.viewpoint_id, {item: (node, 1.0) for item, node in assignments.items()}
    )


class TestDominantLabel:
    def test_single_feature_node(self):
        matrix = build_viewpoint_matrix(
            [("w1", "munich", 1), ("w2", "munich", 2), ("w3", "berlin", 1)], "towns"
        )
        som = toy_map(2, 1, dim=2)
        proj = _planted(matrix, {"w1": 0, "w2": 0, "w3": 1})
        assert dominant_label(som, proj, matrix, 0) == "munich"

    def test_empty_node(self):
        matrix = build_viewpoint_matrix([("w1", "munich", 1)], "towns")
        som = toy_map(2, 1, dim=1)
        proj = _planted(matrix, {"w1": 0})
        assert dominant_label(som, proj, matrix, 1) is None

    def test_weighted_argmax(self):
        matrix = build_viewpoint_matrix(
            [("w1", "a", 3), ("w1", "b", 2)], "vp"
        )
        som = toy_map(1, 1, dim=2)
        proj = _planted(matrix, {"w1": 0})
        assert dominant_label(som, proj, matrix, 0) == "a"

    def test_tie_takes_lexicographically_smallest(self):
        matrix = build_viewpoint_matrix(
            [("w1", "zeta", 2), ("w1", "alpha", 2)], "vp"
        )
        som = toy_map(1, 1, dim=2)
        proj = _planted(matrix, {"w1": 0})
        assert dominant_label(som, proj, matrix, 0) == "alpha"

    def test_out_of_range_node(self):
        matrix = build_viewpoint_matrix([("w1", "a", 1)], "vp")
        som = toy_map(1, 1, dim=1)
        proj = _planted(matrix, {"w1": 0})
        with pytest.raises(ValueError):
            dominant_label(som, proj, matrix, 5)

    def test_full_ranking_exported(self):
        matrix = build_viewpoint_matrix(
            [("w1", "a", 1), ("w1", "b", 3), ("w2", "c", 2)], "vp"
        )
        som = toy_map(1, 1, dim=3)
        proj = _planted(matrix, {"w1": 0, "w2": 0})
        assert feature_ranking(som, proj, matrix, 0) == [
            ("b", 3.0), ("c", 2.0), ("a", 1.0)
        ]


class TestZoneMap:
    def test_uniform_label_single_area(self):
        som = toy_map(3, 3)
        labels = {n: "x" for n in range(9)}
        areas = zone_map(som, labels)
        assert len(areas) == 1
        assert areas[0].node_indices == frozenset(range(9))
        assert areas[0].dominant_label == "x"

    def test_checkerboard_all_singletons(self):
        som = toy_map(4, 4)
        labels = {n: ("a" if (n % 4 + n // 4) % 2 == 0 else "b") for n in range(16)}
        areas = zone_map(som, labels)
        assert len(areas) == 16
        assert all(len(a.node_indices) == 1 for a in areas)

    def test_unlabeled_nodes_excluded(self):
        som = toy_map(2, 2)
        labels = {0: "a", 1: None, 2: "a", 3: "a"}
        areas = zone_map(som, labels)
        covered = set().union(*(a.node_indices for a in areas))
        assert 1 not in covered
        assert covered == {0, 2, 3}

    def test_area_ids_ordered_by_smallest_node(self):
        som = toy_map(3, 1)
        labels = {0: "b", 1: "a", 2: "b"}
        areas = zone_map(som, labels)
        assert [a.area_id for a in areas] == [0, 1, 2]
        assert [min(a.node_indices) for a in areas] == [0, 1, 2]

    def test_matches_flood_fill_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            w, h = int(rng.integers(2, 7)), int(rng.integers(2, 7))
            som = toy_map(w, h)
            labels = {
                n: (None if rng.random() < 0.2 else f"L{rng.integers(3)}")
                for n in range(w * h)
            }
            areas = zone_map(som, labels)
            got = {(a.dominant_label, a.node_indices) for a in areas}
            assert got == flood_fill_zones(w, h, labels)

    def test_partition_and_connectivity(self):
        rng = np.random.default_rng(9)
        som = toy_map(6, 6)
        labels = {n: f"L{rng.integers(4)}" for n in range(36)}
        areas = zone_map(som, labels)
        seen: set[int] = set()
        for area in areas:
            assert not (area.node_indices & seen), "areas overlap"
            seen |= area.node_indices
            # connectivity: BFS inside the area reaches every node
            nodes = set(area.node_indices)
            frontier = {next(iter(nodes))}
            reached = set(frontier)
            while frontier:
                nxt = set()
                for node in frontier:
                    a, b = som.node_coords(node)
                    for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        if 0 <= a + da < 6 and 0 <= b + db < 6:
                            n = (b + db) * 6 + (a + da)
                            if n in nodes and n not in reached:
                                reached.add(n)
                                nxt.add(n)
                frontier = nxt
            assert reached == nodes
        assert seen == set(range(36))

    def test_member_items_unioned(self):
        matrix = build_viewpoint_matrix(
            [("w1", "a", 1), ("w2", "a", 1), ("w3", "b", 1)], "vp"
        )
        som = toy_map(3, 1, dim=2)
        proj = _planted(matrix, {"w1": 0, "w2": 1, "w3": 2})
        labels = label_nodes(som, proj, matrix)
        areas = zone_map(som, labels, proj)
        by_label = {a.dominant_label: a for a in areas}
        assert by_label["a"].member_items == {"w1", "w2"}
        assert by_label["b"].member_items == {"w3"}
