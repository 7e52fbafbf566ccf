import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvsom import (
    Activation,
    ChainStep,
    activate,
    chain_propagation,
    consistency_matrix,
    dispersion,
    node_posterior,
    propagate,
    propagation_consistency,
    project_data,
    refinement_dataset,
    train_som,
)
from mvsom.som import Projection
from mvsom.topology import InformationArea

from helpers import (
    brute_force_dispersion,
    light_params,
    oracle_consistency,
    oracle_posterior,
    planted_projection,
    toy_map,
)

# Hand-laid two-map instance used across several tests:
#   source map 3x1, target map 2x2
#   source: a->0(.8) b->0(.6) c->1(.5) d->1(1.0) e->2(.9)
#   target: a->0(.7) b->1(.9) c->3(.4) d->3(.8) e->2(1.0)
SOURCE = {"a": (0, 0.8), "b": (0, 0.6), "c": (1, 0.5), "d": (1, 1.0), "e": (2, 0.9)}
TARGET = {"a": (0, 0.7), "b": (1, 0.9), "c": (3, 0.4), "d": (3, 0.8), "e": (2, 1.0)}


def _toy_projections():
    return planted_projection("src", SOURCE), planted_projection("tgt", TARGET)


class TestActivate:
    def test_single_node(self):
        som = toy_map(3, 3, viewpoint_id="src")
        act = activate(som, 5)
        assert act.activated_nodes == frozenset({5})
        assert act.source_map_id == "src"

    def test_area_selection_expands(self):
        som = toy_map(3, 3, viewpoint_id="src")
        area = InformationArea(0, frozenset({1, 2, 5}), "x", frozenset())
        act = activate(som, area)
        assert act.activated_nodes == frozenset({1, 2, 5})

    def test_out_of_range_node(self):
        som = toy_map(2, 2, viewpoint_id="src")
        with pytest.raises(ValueError, match="out of range"):
            activate(som, {4})

    def test_empty_selection(self):
        som = toy_map(2, 2, viewpoint_id="src")
        with pytest.raises(ValueError, match="empty selection"):
            activate(som, set())


class TestPropagate:
    def test_all_carriers_on_one_target(self):
        src, tgt = _toy_projections()
        act = Activation("src", frozenset({1}))
        result = propagate(act, src, tgt)
        assert result.activity == {3: pytest.approx(1.0)}
        assert result.targets == frozenset({3})
        assert result.carriers == ("c", "d")

    def test_two_carriers_split_by_similarity(self):
        src = planted_projection("src", {"a": (0, 0.8), "b": (0, 0.2)})
        tgt = planted_projection("tgt", {"a": (0, 1.0), "b": (1, 1.0)})
        result = propagate(Activation("src", frozenset({0})), src, tgt)
        assert result.activity[0] == pytest.approx(0.8)
        assert result.activity[1] == pytest.approx(0.2)

    def test_self_propagation_stays_on_activated_nodes(self):
        src, _ = _toy_projections()
        act = Activation("src", frozenset({0, 2}))
        result = propagate(act, src, src)
        assert result.targets == frozenset({0, 2})
        assert result.activity_total == pytest.approx(1.0, abs=1e-12)

    def test_no_carriers_flagged(self):
        src = planted_projection("src", {"a": (0, 0.5), "b": (1, 0.5)})
        tgt = planted_projection("tgt", {"a": (0, 1.0)})
        result = propagate(Activation("src", frozenset({1})), src, tgt)
        assert not result.has_carriers
        assert result.activity == {}
        assert result.targets == frozenset()

    def test_disjoint_universes_rejected(self):
        src = planted_projection("src", {"a": (0, 0.5)})
        tgt = planted_projection("tgt", {"z": (0, 1.0)})
        with pytest.raises(ValueError, match="universe mismatch"):
            propagate(Activation("src", frozenset({0})), src, tgt)

    def test_normalization_sums_to_one(self):
        rng = np.random.default_rng(2)
        for trial in range(20):
            items = [f"i{k}" for k in range(int(rng.integers(3, 25)))]
            src = planted_projection(
                "src",
                {i: (int(rng.integers(4)), float(rng.uniform(0.05, 1))) for i in items},
            )
            tgt = planted_projection(
                "tgt",
                {i: (int(rng.integers(6)), float(rng.uniform(0.05, 1))) for i in items},
            )
            nodes = frozenset({int(rng.integers(4))})
            result = propagate(Activation("src", nodes), src, tgt)
            if result.has_carriers:
                assert result.activity_total == pytest.approx(1.0, abs=1e-9)

    def test_similarity_scaling_cancels(self):
        src, tgt = _toy_projections()
        act = Activation("src", frozenset({0}))
        base = propagate(act, src, tgt).activity
        for c in (0.5, 2.0, 10.0):
            scaled = propagate(act, src.scaled(c), tgt).activity
            assert set(scaled) == set(base)
            for node, value in base.items():
                assert scaled[node] == pytest.approx(value, abs=1e-12)


class TestNodePosterior:
    def test_fully_activated_node(self):
        src, tgt = _toy_projections()
        act = Activation("src", frozenset({1}))
        assert node_posterior(3, act, src, tgt) == pytest.approx(1.0)

    def test_partial_activation(self):
        src = planted_projection("src", {"a": (0, 0.8), "b": (1, 0.2)})
        tgt = planted_projection("tgt", {"a": (0, 1.0), "b": (0, 1.0)})
        act = Activation("src", frozenset({0}))
        assert node_posterior(0, act, src, tgt) == pytest.approx(0.8)

    def test_inactive_node_is_zero(self):
        src, tgt = _toy_projections()
        act = Activation("src", frozenset({1}))
        assert node_posterior(0, act, src, tgt) == 0.0

    def test_empty_node_defined_as_zero(self):
        src, tgt = _toy_projections()
        act = Activation("src", frozenset({0}))
        # target node 1 on a 2x2 grid has members, node index 9 has none
        assert node_posterior(9, act, src, tgt) == 0.0

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(13)
        for trial in range(60):
            n_items = int(rng.integers(1, 21))
            src_nodes = int(rng.integers(1, 10))
            tgt_nodes = int(rng.integers(1, 10))
            items = [f"i{k}" for k in range(n_items)]
            src_assign = {
                i: (int(rng.integers(src_nodes)), float(rng.uniform(0, 1)))
                for i in items
            }
            tgt_assign = {
                i: (int(rng.integers(tgt_nodes)), float(rng.uniform(0, 1)))
                for i in items
                if rng.random() > 0.15
            }
            if not set(src_assign) & set(tgt_assign):
                continue
            activated = {
                int(k) for k in rng.choice(src_nodes, size=max(1, src_nodes // 2),
                                            replace=False)
            }
            act = Activation("src", frozenset(activated))
            src = planted_projection("src", src_assign)
            tgt = planted_projection("tgt", tgt_assign)
            for node in range(tgt_nodes):
                got = node_posterior(node, act, src, tgt)
                want = oracle_posterior(node, activated, src_assign, tgt_assign)
                assert got == pytest.approx(want, abs=1e-12)


class TestDispersion:
    def test_singleton_is_zero(self):
        assert dispersion([(2.0, 3.0)]) == 0.0

    def test_two_points(self):
        assert dispersion([(0.0, 0.0), (3.0, 4.0)]) == pytest.approx(5.0, abs=1e-12)

    def test_unit_right_triangle(self):
        value = dispersion([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
        assert value == pytest.approx((2 + math.sqrt(2)) / 3, abs=1e-12)
        assert value == pytest.approx(1.13807, abs=1e-5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dispersion([])

    def test_matches_brute_force_on_random_sets(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            count = int(rng.integers(1, 12))
            coords = [
                (float(rng.integers(0, 20)), float(rng.integers(0, 20)))
                for _ in range(count)
            ]
            coords = list(dict.fromkeys(coords))
            assert dispersion(coords) == pytest.approx(
                brute_force_dispersion(coords), abs=1e-12
            )

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=-50, max_value=50),
                st.floats(min_value=-50, max_value=50),
            ),
            min_size=1,
            max_size=8,
            unique=True,
        ),
        st.floats(min_value=-20, max_value=20),
        st.floats(min_value=-20, max_value=20),
    )
    @settings(max_examples=60)
    def test_permutation_and_translation_invariance(self, coords, dx, dy):
        base = dispersion(coords)
        assert dispersion(list(reversed(coords))) == pytest.approx(base, abs=1e-9)
        shifted = [(x + dx, y + dy) for x, y in coords]
        assert dispersion(shifted) == pytest.approx(base, abs=1e-7)


class TestPropagationConsistency:
    def test_hand_computed_toy(self):
        # node 0: carriers a,b land on targets 0 and 1 -> spread 1, term 1/2
        # node 1: carriers c,d both land on 3        -> term 1
        # node 2: carrier e lands on 2               -> term 1
        # value = (1/2 + 1 + 1) / 3 = 5/6
        src, tgt = _toy_projections()
        report = propagation_consistency(
            toy_map(3, 1, viewpoint_id="src"),
            toy_map(2, 2, viewpoint_id="tgt"),
            src,
            tgt,
        )
        assert report.value == pytest.approx(5 / 6, abs=1e-12)
        assert report.counted_sources == (0, 1, 2)
        assert report.per_source[0].dispersion == pytest.approx(1.0)
        assert report.per_source[0].term == pytest.approx(0.5)
        assert report.per_source[1].targets == (((1, 1)),)
        assert report.value == pytest.approx(
            oracle_consistency(SOURCE, TARGET, target_width=2), abs=1e-12
        )

    def test_self_consistency_is_unity(self):
        src, _ = _toy_projections()
        report = propagation_consistency(
            toy_map(3, 1, viewpoint_id="src"),
            toy_map(3, 1, viewpoint_id="src"),
            src,
            src,
        )
        assert report.value == pytest.approx(1.0, abs=1e-12)

    def test_single_target_per_source_is_unity(self):
        src = planted_projection("src", {"a": (0, 0.9), "b": (1, 0.4)})
        tgt = planted_projection("tgt", {"a": (2, 1.0), "b": (2, 1.0)})
        report = propagation_consistency(
            toy_map(2, 1, viewpoint_id="src"),
            toy_map(2, 2, viewpoint_id="tgt"),
            src,
            tgt,
        )
        assert report.value == pytest.approx(1.0)

    def test_unreached_sources_excluded_and_reported(self):
        src = planted_projection("src", {"a": (0, 0.9), "b": (1, 0.4)})
        tgt = planted_projection("tgt", {"a": (0, 1.0)})
        report = propagation_consistency(
            toy_map(2, 1, viewpoint_id="src"),
            toy_map(1, 1, viewpoint_id="tgt"),
            src,
            tgt,
        )
        assert report.counted_sources == (0,)
        assert report.excluded_sources == (1,)

    def test_disjoint_universes(self):
        # the only shared item transmits zero mass, so nothing propagates
        src = planted_projection("src", {"a": (0, 0.0)})
        tgt = planted_projection("tgt", {"a": (0, 1.0)})
        with pytest.raises(ValueError, match="disjoint universes"):
            propagation_consistency(
                toy_map(1, 1, viewpoint_id="src"),
                toy_map(1, 1, viewpoint_id="tgt"),
                src,
                tgt,
            )

    def test_value_in_unit_interval_on_random_instances(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            items = [f"i{k}" for k in range(20)]
            src = planted_projection(
                "src", {i: (int(rng.integers(4)), float(rng.uniform(0.1, 1))) for i in items}
            )
            tgt = planted_projection(
                "tgt", {i: (int(rng.integers(9)), float(rng.uniform(0.1, 1))) for i in items}
            )
            report = propagation_consistency(
                toy_map(2, 2, viewpoint_id="src"),
                toy_map(3, 3, viewpoint_id="tgt"),
                src,
                tgt,
            )
            assert 0 < report.value <= 1
            assert report.value == pytest.approx(
                oracle_consistency(src.assignments, tgt.assignments, 3), abs=1e-12
            )


class TestConsistencyMatrix:
    def test_identical_maps_give_all_ones(self):
        src, _ = _toy_projections()
        soms = {
            "u": toy_map(3, 1, viewpoint_id="u"),
            "v": toy_map(3, 1, viewpoint_id="v"),
        }
        projections = {
            "u": planted_projection("u", SOURCE),
            "v": planted_projection("v", SOURCE),
        }
        cm = consistency_matrix(soms, projections)
        assert cm.viewpoint_ids == ("u", "v")
        for row in cm.values:
            for value in row:
                assert value == pytest.approx(1.0)

    def test_refinement_fixture_is_asymmetric(self):
        ds = refinement_dataset(seed=5)
        fine_m, coarse_m = ds.viewpoint("fine"), ds.viewpoint("coarse")
        fine = train_som(fine_m, 4, 4, params=light_params(2.0), seed=1)
        coarse = train_som(coarse_m, 2, 2, params=light_params(1.0), seed=1)
        soms = {"fine": fine, "coarse": coarse}
        projections = {
            "fine": project_data(fine, fine_m),
            "coarse": project_data(coarse, coarse_m),
        }
        cm = consistency_matrix(soms, projections)
        assert cm.value("fine", "coarse") > cm.value("coarse", "fine")
        assert cm.value("fine", "fine") == pytest.approx(1.0, abs=1e-9)
        assert cm.value("coarse", "coarse") == pytest.approx(1.0, abs=1e-9)

    def test_four_viewpoints_make_four_by_four(self, desk_dataset):
        # reuse one trained projection per viewpoint plus two planted aliases
        src, _ = _toy_projections()
        ids = ["a", "b", "c", "d"]
        soms = {i: toy_map(3, 1, viewpoint_id=i) for i in ids}
        projections = {i: planted_projection(i, SOURCE) for i in ids}
        cm = consistency_matrix(soms, projections)
        assert len(cm.values) == 4
        assert all(len(row) == 4 for row in cm.values)
        csv_text = cm.to_csv()
        assert csv_text.splitlines()[0] == "source\\target,a,b,c,d"

    def test_requires_two_maps(self):
        with pytest.raises(ValueError):
            consistency_matrix(
                {"a": toy_map(1, 1, viewpoint_id="a")},
                {"a": planted_projection("a", {"x": (0, 1.0)})},
            )


class TestChain:
    def test_single_step_equals_propagate(self):
        src, tgt = _toy_projections()
        soms = {
            "src": toy_map(3, 1, viewpoint_id="src"),
            "tgt": toy_map(2, 2, viewpoint_id="tgt"),
        }
        projections = {"src": src, "tgt": tgt}
        results = chain_propagation(
            soms, projections, [ChainStep("src", "tgt", frozenset({1}))]
        )
        direct = propagate(Activation("src", frozenset({1})), src, tgt)
        assert results[0].activity == direct.activity
        assert results[0].carriers == direct.carriers

    def test_two_step_round_trip_on_coupled_fixture(self, coupled_dataset):
        am, bm = coupled_dataset.viewpoint("alpha"), coupled_dataset.viewpoint("beta")
        a = train_som(am, 2, 2, params=light_params(1.0), seed=2)
        b = train_som(bm, 2, 2, params=light_params(1.0), seed=2)
        soms = {"alpha": a, "beta": b}
        projections = {"alpha": project_data(a, am), "beta": project_data(b, bm)}
        start = projections["alpha"].non_empty_nodes()[0]
        results = chain_propagation(
            soms,
            projections,
            [
                ChainStep("alpha", "beta", frozenset({start})),
                ChainStep("beta", "alpha", None),
            ],
            threshold=0.1,
        )
        assert len(results) == 2
        back = results[1]
        assert start in back.targets
        assert back.activity[start] >= 0.5

    def test_high_threshold_empties_focus(self):
        src, tgt = _toy_projections()
        soms = {
            "src": toy_map(3, 1, viewpoint_id="src"),
            "tgt": toy_map(2, 2, viewpoint_id="tgt"),
        }
        projections = {"src": src, "tgt": tgt}
        with pytest.raises(ValueError, match="step 2: empty focus"):
            chain_propagation(
                soms,
                projections,
                [
                    ChainStep("src", "tgt", frozenset({0})),
                    ChainStep("tgt", "src", None),
                ],
                threshold=1.0,
            )

    def test_first_step_needs_selection(self):
        src, tgt = _toy_projections()
        soms = {
            "src": toy_map(3, 1, viewpoint_id="src"),
            "tgt": toy_map(2, 2, viewpoint_id="tgt"),
        }
        with pytest.raises(ValueError, match="step 1"):
            chain_propagation(
                soms, {"src": src, "tgt": tgt}, [ChainStep("src", "tgt", None)]
            )
