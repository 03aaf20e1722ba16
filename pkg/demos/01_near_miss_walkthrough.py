"""Walkthrough: from a raw probability log to a distance metric.

A tiny three-label universe shows how near misses accumulate into the
connection graph and how shortest paths turn that graph into the metric the
clustering stage consumes. Run from anywhere:

    python3 demos/01_near_miss_walkthrough.py
"""

from __future__ import annotations

import numpy as np

from conceptscope.graph import ConfusionAccumulator, accumulate, finalize
from conceptscope.ingest import LabelSet, parse_record_obj
from conceptscope.metric import all_pairs_shortest_paths, shortest_path_metric
from conceptscope.nma import NmaConfig, extract_near_misses, filter_records

LABELS = ["tabby", "tiger", "lynx"]

# Four images: the model is confident but leaks probability onto relatives.
RAW_RECORDS = [
    {"image_id": "cat_001", "true_label": "tabby",
     "entries": [["tabby", 0.80], ["tiger", 0.15], ["lynx", 0.05]]},
    {"image_id": "cat_002", "true_label": "tabby",
     "entries": [["tabby", 0.70], ["tiger", 0.25], ["lynx", 0.05]]},
    {"image_id": "cat_003", "true_label": "tiger",
     "entries": [["tiger", 0.90], ["tabby", 0.10]]},
    # misclassified: the protocol drops this one by default
    {"image_id": "cat_004", "true_label": "lynx",
     "entries": [["tabby", 0.60], ["lynx", 0.40]]},
]


def main() -> None:
    labels = LabelSet.from_iterable(LABELS)
    cfg = NmaConfig(k=3, t=1e-6, correct_only=True)

    print("= Step 1: parse and filter =")
    records = [parse_record_obj(obj, labels) for obj in RAW_RECORDS]
    kept = filter_records(records, cfg)
    print(f"parsed {len(records)} records, kept {len(kept)} correctly classified")
    for record in records:
        verdict = "kept" if record in kept else "dropped (misclassified)"
        print(f"  {record.image_id}: argmax={record.entries[0][0]!r} -> {verdict}")

    print("\n= Step 2: extract near misses (top k, cutoff t, true label excluded) =")
    acc = ConfusionAccumulator.empty(len(labels))
    for record in kept:
        misses = extract_near_misses(record, labels, cfg)
        shown = [(labels.label_of(i), p) for i, p in misses.misses]
        print(f"  {record.image_id}: {shown}")
        accumulate(acc, misses.source_label, misses)

    print("\n= Step 3: finalize the connection graph =")
    graph = finalize(acc, cfg.t)
    print("edge weights are 1 - mean leaked probability (inf = no evidence):")
    with np.printoptions(precision=4, suppress=True):
        print(graph.weight)
    for i, j, w in graph.finite_edges():
        print(f"  {labels.label_of(i)} -- {labels.label_of(j)}: weight {w:.4f}")

    print("\n= Step 4: shortest-path metric =")
    pre = all_pairs_shortest_paths(graph.weight)
    dm = shortest_path_metric(graph)
    print("pre-cap distances (note tabby->lynx has no direct edge):")
    with np.printoptions(precision=4, suppress=True):
        print(pre)
    print(f"cap value = 1.5 x max finite distance = {dm.cap_value:.4f}")
    print("capped metric handed to clustering:")
    with np.printoptions(precision=4, suppress=True):
        print(dm.d)
    print(f"connected components before capping: {dm.components}")


if __name__ == "__main__":
    main()
