"""Tests for agglomerative clustering, cuts, and dendrogram serialization."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptscope.clustering import (
    Dendrogram,
    Linkage,
    agglomerate,
    cut,
    cut_nodes,
    from_json,
    path_to_root,
    structure_hash,
    to_json,
    to_newick,
    with_names,
)
from conceptscope.metric import DistanceMatrix

from oracles import minimum_spanning_heights, reference_agglomerate

PROPERTY_SETTINGS = settings(max_examples=80, deadline=None)


def metric_from(d: np.ndarray) -> DistanceMatrix:
    return DistanceMatrix(
        d=d.astype(np.float64),
        cap_value=float(d.max()) if d.size else 0.0,
        components=[list(range(d.shape[0]))],
    )


def random_metric(rng: np.random.Generator, n: int) -> DistanceMatrix:
    # Euclidean distances of random points: a true metric, ties measure-zero
    points = rng.uniform(0.0, 1.0, size=(n, 4))
    diff = points[:, None, :] - points[None, :, :]
    return metric_from(np.sqrt((diff**2).sum(axis=2)))


def grid_metric(coords: list[int]) -> DistanceMatrix:
    # 1-d integer points: plenty of exact distance ties
    pts = np.array(coords, dtype=np.float64)
    return metric_from(np.abs(pts[:, None] - pts[None, :]))


names = ("a", "b", "c", "d", "e", "f", "g", "h")


class TestAgglomerate:
    def test_two_points(self):
        dm = metric_from(np.array([[0.0, 0.4], [0.4, 0.0]]))
        dg = agglomerate(dm, ("a", "b"))
        assert dg.merges == ((0, 1, 0.4, 2),)
        assert dg.root == 2

    def test_single_point_yields_leaf_only_tree(self):
        dg = agglomerate(metric_from(np.zeros((1, 1))), ("solo",))
        assert dg.merges == ()
        assert dg.root == 0

    def test_empty_metric_is_an_error(self):
        with pytest.raises(ValueError, match="empty"):
            agglomerate(metric_from(np.zeros((0, 0))), ())

    def test_label_count_mismatch_is_an_error(self):
        with pytest.raises(ValueError, match="labels"):
            agglomerate(metric_from(np.zeros((2, 2))), ("a",))

    def test_all_equal_distances_merge_in_id_order(self):
        d = np.ones((4, 4)) - np.eye(4)
        for linkage in Linkage:
            dg = agglomerate(metric_from(d), names[:4], linkage)
            assert [(m[0], m[1]) for m in dg.merges] == [(0, 1), (2, 3), (4, 5)]
            assert [m[2] for m in dg.merges] == [1.0, 1.0, 1.0]

    def test_average_linkage_hand_example(self):
        # clusters {a,b} then c: average of d(a,c)=0.8 and d(b,c)=0.6
        d = np.array([[0.0, 0.2, 0.8], [0.2, 0.0, 0.6], [0.8, 0.6, 0.0]])
        dg = agglomerate(metric_from(d), names[:3], Linkage.AVERAGE)
        assert dg.merges[0] == (0, 1, 0.2, 2)
        assert dg.merges[1] == (2, 3, pytest.approx(0.7), 3)

    def test_complete_and_single_hand_example(self):
        d = np.array([[0.0, 0.2, 0.8], [0.2, 0.0, 0.6], [0.8, 0.6, 0.0]])
        complete = agglomerate(metric_from(d), names[:3], Linkage.COMPLETE)
        single = agglomerate(metric_from(d), names[:3], Linkage.SINGLE)
        assert complete.merges[1][2] == pytest.approx(0.8)
        assert single.merges[1][2] == pytest.approx(0.6)

    def test_heights_are_monotone(self):
        rng = np.random.default_rng(7)
        for linkage in Linkage:
            dm = random_metric(rng, 24)
            dg = agglomerate(dm, tuple(f"p{i}" for i in range(24)), linkage)
            merge_heights = [m[2] for m in dg.merges]
            assert merge_heights == sorted(merge_heights)

    def test_matches_reference_on_random_metrics(self):
        rng = np.random.default_rng(11)
        for trial in range(20):
            n = int(rng.integers(2, 20))
            dm = random_metric(rng, n)
            labels = tuple(f"p{i}" for i in range(n))
            for linkage in Linkage:
                dg = agglomerate(dm, labels, linkage)
                expected = reference_agglomerate(dm.d, linkage.value)
                assert [(m[0], m[1], m[3]) for m in dg.merges] == [
                    (m[0], m[1], m[3]) for m in expected
                ]
                for got, want in zip(dg.merges, expected):
                    assert got[2] == pytest.approx(want[2], abs=1e-9)

    @PROPERTY_SETTINGS
    @given(
        coords=st.lists(st.integers(0, 6), min_size=2, max_size=8),
        linkage=st.sampled_from([Linkage.SINGLE, Linkage.COMPLETE]),
    )
    def test_tie_break_matches_reference_exactly(self, coords, linkage):
        # min/max linkages involve no arithmetic, so tie-heavy integer grids
        # must agree with the reference bit for bit
        dm = grid_metric(coords)
        labels = tuple(f"p{i}" for i in range(len(coords)))
        dg = agglomerate(dm, labels, linkage)
        assert list(dg.merges) == reference_agglomerate(dm.d, linkage.value)

    def test_single_linkage_heights_match_mst(self):
        rng = np.random.default_rng(23)
        dm = random_metric(rng, 16)
        dg = agglomerate(dm, tuple(f"p{i}" for i in range(16)), Linkage.SINGLE)
        got = sorted(m[2] for m in dg.merges)
        assert got == pytest.approx(minimum_spanning_heights(dm.d), abs=1e-12)


class TestCut:
    @pytest.fixture
    def tree(self) -> Dendrogram:
        d = np.array([[0.0, 0.2, 0.8], [0.2, 0.0, 0.6], [0.8, 0.6, 0.0]])
        return agglomerate(metric_from(d), names[:3])

    def test_cut_below_first_merge_gives_singletons(self, tree):
        assert cut(tree, 0.0) == [[0], [1], [2]]

    def test_cut_at_merge_height_applies_the_merge(self, tree):
        assert cut(tree, 0.2) == [[0, 1], [2]]

    def test_cut_above_root_gives_one_cluster(self, tree):
        assert cut(tree, 100.0) == [[0, 1, 2]]

    def test_negative_cut_rejected(self, tree):
        with pytest.raises(ValueError, match=">= 0"):
            cut(tree, -0.1)

    def test_cut_nodes_name_the_top_clusters(self, tree):
        assert cut_nodes(tree, 0.2) == [3, 2]
        assert cut_nodes(tree, 100.0) == [4]

    def test_cuts_refine_each_other(self):
        rng = np.random.default_rng(3)
        dm = random_metric(rng, 12)
        dg = agglomerate(dm, tuple(f"p{i}" for i in range(12)))
        previous: list[list[int]] | None = None
        for h in [0.0] + [m[2] for m in dg.merges]:
            clusters = cut(dg, h)
            flat = sorted(x for c in clusters for x in c)
            assert flat == list(range(12))
            if previous is not None:
                for fine in previous:
                    assert any(set(fine) <= set(coarse) for coarse in clusters)
            previous = clusters


class TestSerialization:
    @pytest.fixture
    def tree(self) -> Dendrogram:
        return Dendrogram(
            labels=("a", "b", "c"),
            merges=((0, 1, 0.25, 2), (2, 3, 0.5, 3)),
            names={3: "pair", 4: "root"},
        )

    def test_json_layout_is_stable(self, tree):
        assert to_json(tree) == (
            '{"leaves": ["a", "b", "c"], '
            '"merges": [[0, 1, 0.25, 2], [2, 3, 0.5, 3]], '
            '"names": {"3": "pair", "4": "root"}}\n'
        )

    def test_json_round_trip(self, tree):
        assert from_json(to_json(tree)) == tree

    def test_heights_carry_12_significant_digits(self):
        dg = Dendrogram(labels=("a", "b"), merges=((0, 1, 1 / 3, 2),))
        assert '"merges": [[0, 1, 0.333333333333, 2]]' in to_json(dg)

    def test_structure_hash_survives_renames(self, tree):
        renamed = with_names(tree, {3: "fruit", 4: "entity"})
        assert structure_hash(renamed) == structure_hash(tree)

    def test_structure_hash_tracks_structure(self, tree):
        other = Dendrogram(labels=tree.labels, merges=((0, 2, 0.25, 2), (1, 3, 0.5, 3)))
        assert structure_hash(other) != structure_hash(tree)

    def test_newick_output(self, tree):
        # children render in (left, right) node-id order
        assert to_newick(tree) == "(c:0.5,(a:0.25,b:0.25)pair:0.25)root;\n"

    def test_newick_sanitizes_reserved_characters(self):
        dg = Dendrogram(
            labels=("great dane", "wolf (gray)"), merges=((0, 1, 0.5, 2),)
        )
        assert to_newick(dg) == "(great_dane:0.5,wolf__gray_:0.5);\n"

    def test_newick_handles_deep_chains(self):
        # a 1000-leaf caterpillar would blow the recursion limit if the
        # writer recursed
        n = 1000
        labels = tuple(f"x{i}" for i in range(n))
        merges = []
        prev = 0
        for step in range(n - 1):
            pair = sorted((prev, step + 1))
            merges.append((pair[0], pair[1], float(step + 1), step + 2))
            prev = n + step
        dg = Dendrogram(labels=labels, merges=tuple(merges))
        out = to_newick(dg)
        assert out.endswith(";\n")
        assert out.count(",") == n - 1


class TestDendrogramViews:
    def test_path_to_root(self, furniture):
        named, _tax = furniture
        assert path_to_root(named, 1) == [1, 4, 5, 6]
        assert path_to_root(named, 3) == [3, 6]

    def test_member_table(self, furniture):
        named, _tax = furniture
        assert named.member_table()[5] == (0, 1, 2)
        assert named.member_table()[6] == (0, 1, 2, 3)

    def test_name_of_falls_back_to_labels_for_leaves(self):
        dg = Dendrogram(labels=("a", "b"), merges=((0, 1, 1.0, 2),))
        assert dg.name_of(0) == "a"
        assert dg.name_of(2) is None
