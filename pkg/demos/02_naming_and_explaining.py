"""Walkthrough: naming dendrogram nodes and explaining a label.

Builds the furniture example by hand: a four-leaf dendrogram, a hypernym
taxonomy, automatic naming via lowest common hypernyms, one manual override,
and the sentence-style explanation with its score. Run from anywhere:

    python3 demos/02_naming_and_explaining.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from conceptscope.clustering import Dendrogram
from conceptscope.explain import explain_label, load_reference, score_label
from conceptscope.ingest import LabelSet
from conceptscope.naming import (
    NameOverrides,
    load_taxonomy,
    lowest_common_hypernym,
    name_dendrogram,
    set_override,
)

LABELS = ("bed", "chair", "armchair", "monkey")

TAXONOMY = {
    "bed": [["bed", "furniture", "entity"]],
    "chair": [["chair", "furniture", "entity"]],
    "armchair": [["armchair", "furniture", "entity"]],
    "monkey": [["monkey", "primate", "mammal", "entity"]],
}

REFERENCE = {
    "bed": {"concepts": ["furniture"]},
    "chair": {"concepts": ["furniture"]},
    "armchair": {"concepts": ["furniture"]},
    "monkey": {"concepts": ["primate", "mammal"]},
}

# Merge order: (bed, chair), then + armchair, then + monkey at the root.
MERGES = ((0, 1, 0.3, 2), (2, 4, 0.5, 3), (3, 5, 0.9, 4))


def main() -> None:
    scratch = Path(tempfile.mkdtemp(prefix="conceptscope_demo_"))
    tax_path = scratch / "taxonomy.json"
    tax_path.write_text(json.dumps(TAXONOMY, indent=2), encoding="utf-8")
    ref_path = scratch / "reference.json"
    ref_path.write_text(json.dumps(REFERENCE, indent=2), encoding="utf-8")

    labels = LabelSet.from_iterable(LABELS)
    taxonomy = load_taxonomy(tax_path, labels)
    dg = Dendrogram(labels=LABELS, merges=MERGES)

    print("= Step 1: lowest common hypernyms =")
    for members in (["bed", "chair"], ["bed", "chair", "armchair"], list(LABELS)):
        print(f"  LCH({members}) = {lowest_common_hypernym(taxonomy, members)!r}")

    print("\n= Step 2: automatic naming =")
    named = name_dendrogram(dg, taxonomy)
    for node in range(2 * len(LABELS) - 1):
        print(f"  node {node}: {named.name_of(node)!r}")

    print("\n= Step 3: explanation for 'chair' =")
    explanation = explain_label(named, "chair")
    for sentence in explanation.sentences:
        print(f"  {sentence}")
    print(f"  display concepts: {explanation.display_concepts}")
    print(f"  scoring concepts (root and label excluded): {explanation.concepts}")

    print("\n= Step 4: score against the human reference =")
    reference = load_reference(ref_path)
    for label in LABELS:
        score = score_label(explain_label(named, label), reference, label)
        print(f"  {label}: {score:.4f}")

    print("\n= Step 5: a manual override =")
    overrides = NameOverrides.for_dendrogram(dg)
    set_override(overrides, 5, "seating and bedding")
    renamed = name_dendrogram(dg, taxonomy, overrides)
    for sentence in explain_label(renamed, "chair").sentences:
        print(f"  {sentence}")


if __name__ == "__main__":
    main()
