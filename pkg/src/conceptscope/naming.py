"""Automatic concept naming via lowest common hypernym, plus manual overrides.

Each label carries one hypernym chain (leaf first, root last). The name of a
cluster is the deepest chain element shared by all members, where depth is
counted from the root; the candidate maximizing the minimum depth across
members wins and ties fall to the lexicographically smallest name. Human
overrides sit on top and persist in a sidecar file keyed by the dendrogram's
structure hash, so they can never silently apply to a re-clustered tree.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from conceptscope.clustering import Dendrogram, structure_hash, with_names
from conceptscope.ingest import LabelSet


class TaxonomyError(ValueError):
    """Invalid taxonomy file or chain structure."""


class OverrideError(ValueError):
    """Invalid override operation or overrides file."""


@dataclass(frozen=True)
class Taxonomy:
    chains: dict[str, tuple[str, ...]]  # label -> (leaf, ..., root)
    root: str

    def chain_of(self, label: str) -> tuple[str, ...]:
        return self.chains[label]


def load_taxonomy(path: str | Path, labels: LabelSet) -> Taxonomy:
    """Load a taxonomy file: JSON map label -> array of chains, leaf to root.

    Only the first listed chain per label is retained (exporters put the
    intended sense first). Every label must be covered, every retained chain
    must start with its label and end at the shared root.
    """
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise TaxonomyError(f"cannot read taxonomy file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TaxonomyError(f"taxonomy file {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise TaxonomyError("taxonomy file must be an object mapping labels to chains")

    missing = [label for label in labels if label not in obj]
    if missing:
        raise TaxonomyError(
            "taxonomy is missing labels: " + ", ".join(repr(m) for m in missing)
        )

    chains: dict[str, tuple[str, ...]] = {}
    root: str | None = None
    for label in labels:
        chain_list = obj[label]
        if (
            not isinstance(chain_list, list)
            or not chain_list
            or not all(isinstance(c, list) and c for c in chain_list)
        ):
            raise TaxonomyError(f"label {label!r} must map to a non-empty array of chains")
        chain = tuple(chain_list[0])
        if not all(isinstance(e, str) and e for e in chain):
            raise TaxonomyError(f"chain for {label!r} contains non-string elements")
        if chain[0] != label:
            raise TaxonomyError(
                f"chain for {label!r} must start with the label, got {chain[0]!r}"
            )
        if root is None:
            root = chain[-1]
        elif chain[-1] != root:
            raise TaxonomyError(
                f"root mismatch: chain for {label!r} ends at {chain[-1]!r}, "
                f"expected {root!r}"
            )
        chains[label] = chain
    assert root is not None
    return Taxonomy(chains=chains, root=root)


def _depth_map(chain: tuple[str, ...]) -> dict[str, int]:
    """Element -> depth from the root (root = 0); deepest occurrence wins."""
    depths: dict[str, int] = {}
    last = len(chain) - 1
    for pos, element in enumerate(chain):
        depth = last - pos
        if element not in depths or depths[element] < depth:
            depths[element] = depth
    return depths


def lowest_common_hypernym(tax: Taxonomy, members: Iterable[str]) -> str:
    """Deepest chain element common to every member; the label itself for
    singletons. The root is always common, so a name always exists."""
    members = list(members)
    if not members:
        raise ValueError("members must be non-empty")
    common = _depth_map(tax.chain_of(members[0]))
    for label in members[1:]:
        depths = _depth_map(tax.chain_of(label))
        common = {
            element: min(depth, depths[element])
            for element, depth in common.items()
            if element in depths
        }
    best_depth = max(common.values())
    return min(name for name, depth in common.items() if depth == best_depth)


@dataclass
class NameOverrides:
    """User-supplied names per node, with an audit trail, bound to one tree."""

    dendrogram_hash: str
    n_nodes: int
    map: dict[int, str] = field(default_factory=dict)
    audit: list[tuple[int, str | None, str, str]] = field(default_factory=list)

    @classmethod
    def for_dendrogram(cls, dg: Dendrogram) -> "NameOverrides":
        return cls(dendrogram_hash=structure_hash(dg), n_nodes=dg.n_nodes)


def set_override(overrides: NameOverrides, node: int, name: str) -> NameOverrides:
    """Record a rename; last write wins and every change is audited."""
    if not 0 <= node < overrides.n_nodes:
        raise OverrideError(f"unknown node id {node}")
    cleaned = name.strip()
    if not cleaned:
        raise OverrideError("override name is empty")
    old = overrides.map.get(node)
    overrides.map[node] = cleaned
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    overrides.audit.append((node, old, cleaned, stamp))
    return overrides


def name_dendrogram(
    dg: Dendrogram, tax: Taxonomy, overrides: NameOverrides | None = None
) -> Dendrogram:
    """Fill every node's name: override if present, else the lowest common
    hypernym of its leaf members; leaves are named by their labels."""
    if overrides is not None and overrides.dendrogram_hash != structure_hash(dg):
        raise OverrideError("overrides were recorded against a different dendrogram")
    members = dg.member_table()
    names: dict[int, str] = {}
    for leaf in range(dg.n_leaves):
        names[leaf] = dg.labels[leaf]
    for node in range(dg.n_leaves, dg.n_nodes):
        names[node] = lowest_common_hypernym(
            tax, (dg.labels[m] for m in members[node])
        )
    if overrides is not None:
        names.update(overrides.map)
    return with_names(dg, names)


def save_overrides(overrides: NameOverrides, path: str | Path) -> None:
    """Persist atomically (write-temp-then-rename) next to the target path."""
    path = Path(path)
    payload = {
        "dendrogram_hash": overrides.dendrogram_hash,
        "overrides": {str(node): name for node, name in sorted(overrides.map.items())},
        "audit": [list(entry) for entry in overrides.audit],
    }
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_overrides(path: str | Path, dg: Dendrogram) -> NameOverrides:
    """Load an overrides file, rejecting it if the dendrogram hash differs."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OverrideError(f"cannot read overrides file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise OverrideError(f"overrides file {path} is not valid JSON: {exc}") from exc
    expected = structure_hash(dg)
    if obj.get("dendrogram_hash") != expected:
        raise OverrideError(
            "overrides file was recorded against a different dendrogram "
            f"(hash {obj.get('dendrogram_hash')!r}, expected {expected!r})"
        )
    overrides = NameOverrides(dendrogram_hash=expected, n_nodes=dg.n_nodes)
    for node_str, name in obj.get("overrides", {}).items():
        node = int(node_str)
        if not 0 <= node < dg.n_nodes:
            raise OverrideError(f"overrides file names unknown node {node}")
        overrides.map[node] = name
    for entry in obj.get("audit", []):
        node, old, new, stamp = entry
        overrides.audit.append((int(node), old, new, stamp))
    return overrides
