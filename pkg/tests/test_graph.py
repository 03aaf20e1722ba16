"""Tests for connection-graph accumulation and finalization."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptscope.graph import (
    ConfusionAccumulator,
    accumulate,
    finalize,
    incoming_confusion,
    merge_accumulators,
    read_graph_dump,
    write_graph_dump,
)
from conceptscope.ingest import IngestError, LabelSet
from conceptscope.nma import NearMissSet

LABELS = LabelSet.from_iterable(["a", "b", "c"])


def filled_accumulator() -> ConfusionAccumulator:
    # two images of a (misses b@0.2 then b@0.1, c@0.3), one of b (a@0.4)
    acc = ConfusionAccumulator.empty(3)
    accumulate(acc, 0, NearMissSet(0, ((1, 0.2),)))
    accumulate(acc, 0, NearMissSet(0, ((1, 0.1), (2, 0.3))))
    accumulate(acc, 1, NearMissSet(1, ((0, 0.4),)))
    return acc


class TestAccumulate:
    def test_sums_and_counts(self):
        acc = filled_accumulator()
        assert acc.count.tolist() == [2, 1, 0]
        assert acc.sum[0].tolist() == [0.0, pytest.approx(0.3), 0.3]
        assert acc.sum[1].tolist() == [0.4, 0.0, 0.0]

    def test_source_mismatch_rejected(self):
        acc = ConfusionAccumulator.empty(3)
        with pytest.raises(ValueError, match="does not match"):
            accumulate(acc, 1, NearMissSet(0, ()))

    def test_empty_miss_set_still_counts_the_image(self):
        acc = ConfusionAccumulator.empty(3)
        accumulate(acc, 2, NearMissSet(2, ()))
        assert acc.count.tolist() == [0, 0, 1]
        assert not acc.sum.any()


class TestFinalize:
    def test_hand_computed_weights(self):
        graph = finalize(filled_accumulator(), t=1e-6)
        # p[a][b] = 0.15, p[b][a] = 0.4 -> p_sym = 0.275
        assert graph.weight[0, 1] == pytest.approx(1 - 0.275, abs=1e-15)
        # p[a][c] = 0.15, p[c][a] = 0 -> p_sym = 0.075
        assert graph.weight[0, 2] == pytest.approx(1 - 0.075, abs=1e-15)
        # b and c never co-missed
        assert np.isinf(graph.weight[1, 2])
        assert np.diagonal(graph.weight).tolist() == [0.0, 0.0, 0.0]

    def test_weight_matrix_is_symmetric(self):
        graph = finalize(filled_accumulator(), t=1e-6)
        assert np.array_equal(graph.weight, graph.weight.T)

    def test_cutoff_prunes_weak_edges(self):
        graph = finalize(filled_accumulator(), t=0.1)
        assert np.isfinite(graph.weight[0, 1])  # p_sym 0.275 >= 0.1
        assert np.isinf(graph.weight[0, 2])  # p_sym 0.075 < 0.1

    def test_label_with_no_images_stays_isolated(self):
        graph = finalize(filled_accumulator(), t=1e-6)
        assert graph.finite_edges() == [
            (0, 1, pytest.approx(0.725)),
            (0, 2, pytest.approx(0.925)),
        ]

    def test_incoming_confusion(self):
        inc = incoming_confusion(filled_accumulator())
        assert inc.tolist() == [
            pytest.approx(0.4),  # 0.4 / (3 - 2)
            pytest.approx(0.15),  # 0.3 / (3 - 1)
            pytest.approx(0.1),  # 0.3 / (3 - 0)
        ]


class TestMerge:
    @settings(max_examples=50, deadline=None)
    @given(
        events=st.lists(
            st.tuples(
                st.integers(0, 2),
                st.integers(0, 2),
                st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
            ),
            max_size=30,
        ),
        split=st.integers(0, 30),
    )
    def test_split_then_merge_matches_sequential(self, events, split):
        split = min(split, len(events))
        whole = ConfusionAccumulator.empty(3)
        parts = [ConfusionAccumulator.empty(3), ConfusionAccumulator.empty(3)]
        for idx, (source, target, p) in enumerate(events):
            misses = NearMissSet(source, ((target, p),) if target != source else ())
            accumulate(whole, source, misses)
            accumulate(parts[0 if idx < split else 1], source, misses)
        merged = merge_accumulators(parts)
        assert np.array_equal(merged.sum, whole.sum)
        assert np.array_equal(merged.count, whole.count)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError, match="disagree"):
            merge_accumulators(
                [ConfusionAccumulator.empty(2), ConfusionAccumulator.empty(3)]
            )


class TestGraphDump:
    def test_round_trip_is_exact(self, tmp_path):
        graph = finalize(filled_accumulator(), t=1e-6)
        path = tmp_path / "graph.tsv"
        write_graph_dump(graph, LABELS, path, t=1e-6, k=3, records_total=5, records_used=3)
        loaded, meta = read_graph_dump(path, LABELS)
        assert np.array_equal(loaded.weight, graph.weight)
        assert meta == {"n": 3, "t": 1e-6, "k": 3, "records_total": 5, "records_used": 3}

    def test_wrong_label_universe_rejected(self, tmp_path):
        graph = finalize(filled_accumulator(), t=1e-6)
        path = tmp_path / "graph.tsv"
        write_graph_dump(graph, LABELS, path, t=1e-6, k=3, records_total=5, records_used=3)
        other = LabelSet.from_iterable(["a", "b"])
        with pytest.raises(IngestError, match="n=3"):
            read_graph_dump(path, other)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "graph.tsv"
        path.write_text("a\tb\t0.5\n", encoding="utf-8")
        with pytest.raises(IngestError, match="header"):
            read_graph_dump(path, LABELS)
