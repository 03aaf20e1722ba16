"""Convert hypernym paths for a label list into the taxonomy file format.

Synset lookup is pluggable: any provider mapping a term to hypernym paths
(leaf to root, first path = first sense) can back the export. The default is
a small bundled lexicon good enough for the demo corpora; a WordNet-backed
provider drops in through the same protocol when the corpus library is
available. Multiword labels resolve through a manual alias map first.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Protocol

ROOT = "entity"

# Leaf-to-root chains for the bundled lexicon; every chain ends at the root.
_MINI_LEXICON: dict[str, list[list[str]]] = {
    "bed": [["bed", "furniture", "artifact", "entity"]],
    "chair": [["chair", "seat", "furniture", "artifact", "entity"]],
    "armchair": [["armchair", "chair", "seat", "furniture", "artifact", "entity"]],
    "table": [["table", "furniture", "artifact", "entity"]],
    "sofa": [["sofa", "seat", "furniture", "artifact", "entity"]],
    "monkey": [["monkey", "primate", "mammal", "animal", "entity"]],
    "dog": [["dog", "canine", "carnivore", "mammal", "animal", "entity"]],
    "wolf": [["wolf", "canine", "carnivore", "mammal", "animal", "entity"]],
    "cat": [["cat", "feline", "carnivore", "mammal", "animal", "entity"]],
    "swan": [["swan", "aquatic_bird", "bird", "animal", "entity"]],
    "duck": [["duck", "aquatic_bird", "bird", "animal", "entity"]],
    "apple": [
        ["apple", "fruit", "food", "entity"],
        ["apple", "pome", "fruit", "plant_part", "entity"],
    ],
    "orange": [
        ["orange", "citrus", "fruit", "food", "entity"],
        ["orange", "color", "entity"],
    ],
    "grape": [["grape", "fruit", "food", "entity"]],
    "banana": [["banana", "fruit", "food", "entity"]],
}

# Multiword or display-form labels mapped onto lexicon terms.
DEFAULT_ALIASES: dict[str, str] = {
    "Granny Smith": "apple",
    "grey wolf": "wolf",
    "tabby cat": "cat",
    "black swan": "swan",
}


class SynsetProvider(Protocol):
    def hypernym_paths(self, term: str) -> list[list[str]]:
        """Leaf-to-root chains for the term, first-sense first; [] if unknown."""
        ...


class MiniLexiconProvider:
    """Bundled offline lexicon implementing the provider protocol."""

    def __init__(self, lexicon: dict[str, list[list[str]]] | None = None) -> None:
        self.lexicon = dict(_MINI_LEXICON if lexicon is None else lexicon)

    def hypernym_paths(self, term: str) -> list[list[str]]:
        return [list(chain) for chain in self.lexicon.get(term, [])]


class ResolveError(ValueError):
    """Raised when labels cannot be resolved; carries the full list."""

    def __init__(self, labels: list[str]) -> None:
        self.labels = labels
        listing = ", ".join(repr(label) for label in labels)
        super().__init__(f"unresolvable labels (add alias map entries): {listing}")


def load_alias_map(path: Path | None) -> dict[str, str]:
    if path is None:
        return dict(DEFAULT_ALIASES)
    obj = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(obj, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in obj.items()
    ):
        raise ValueError(f"alias map {path} must be a string-to-string object")
    return {**DEFAULT_ALIASES, **obj}


def chains_for_label(
    label: str, provider: SynsetProvider, aliases: dict[str, str]
) -> list[list[str]]:
    """Chains with the label itself restored as the leaf of every path."""
    term = aliases.get(label, label)
    chains = []
    for path in provider.hypernym_paths(term):
        if not path or path[-1] != ROOT:
            raise ValueError(
                f"provider chain for {term!r} does not end at {ROOT!r}: {path}"
            )
        # the taxonomy format requires chain[0] == the label as written
        rest = path[1:] if path[0] == term else path
        chains.append([label] + rest)
    return chains


def export_taxonomy(
    labels_path: Path,
    out_path: Path,
    provider: SynsetProvider | None = None,
    alias_path: Path | None = None,
) -> dict:
    provider = provider or MiniLexiconProvider()
    aliases = load_alias_map(alias_path)
    labels = [
        line.strip()
        for line in labels_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not labels:
        raise ValueError(f"labels file {labels_path} is empty")

    taxonomy: dict[str, list[list[str]]] = {}
    unresolved: list[str] = []
    for label in labels:
        chains = chains_for_label(label, provider, aliases)
        if chains:
            taxonomy[label] = chains
        else:
            unresolved.append(label)
    if unresolved:
        raise ResolveError(unresolved)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(
        json.dumps(taxonomy, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return {"labels": len(taxonomy), "out": str(out_path)}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--labels", required=True, help="label universe, one per line")
    parser.add_argument("--out", required=True, help="output taxonomy path (JSON)")
    parser.add_argument("--aliases", help="JSON alias map: label -> lexicon term")
    args = parser.parse_args(argv)
    try:
        stats = export_taxonomy(
            labels_path=Path(args.labels),
            out_path=Path(args.out),
            alias_path=Path(args.aliases) if args.aliases else None,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"export_taxonomy: {stats['labels']} labels -> {stats['out']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
