"""Agglomerative hierarchy construction over the label distance metric.

Node ids follow the usual convention: leaves are 0..n-1 in label order and
each merge creates node n+step. Ties in the minimum linkage distance are
broken by the lexicographically smallest (min node id, max node id) pair,
which makes the merge sequence fully deterministic and reproducible.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from conceptscope.metric import DistanceMatrix


class Linkage(str, Enum):
    AVERAGE = "average"
    COMPLETE = "complete"
    SINGLE = "single"


@dataclass(frozen=True)
class Dendrogram:
    """Ordered merge table over labels.

    merges[step] = (left, right, height, size) where left < right are node
    ids, height is the linkage distance at the merge, and size is the member
    count of the new node n+step. ``names`` carries concept names per node id
    once the naming stage has run.
    """

    labels: tuple[str, ...]
    merges: tuple[tuple[int, int, float, int], ...]
    names: dict[int, str] = field(default_factory=dict)

    @property
    def n_leaves(self) -> int:
        return len(self.labels)

    @property
    def n_nodes(self) -> int:
        return len(self.labels) + len(self.merges)

    @property
    def root(self) -> int:
        return self.n_nodes - 1

    def name_of(self, node: int) -> str | None:
        """Concept name of a node: explicit name, or the label for leaves."""
        if node in self.names:
            return self.names[node]
        if node < self.n_leaves:
            return self.labels[node]
        return None

    def parent_array(self) -> list[int]:
        """parent[node] = enclosing merge node id, -1 for the root."""
        cached = getattr(self, "_parent_cache", None)
        if cached is None:
            cached = [-1] * self.n_nodes
            for step, (left, right, _h, _s) in enumerate(self.merges):
                cached[left] = cached[right] = self.n_leaves + step
            object.__setattr__(self, "_parent_cache", cached)
        return cached

    def member_table(self) -> list[tuple[int, ...]]:
        """Leaf members per node id, ascending within each node. Cached: the
        dataclass is frozen and every name change builds a new instance."""
        cached = getattr(self, "_member_cache", None)
        if cached is None:
            cached = [(i,) for i in range(self.n_leaves)]
            for left, right, _h, _s in self.merges:
                cached.append(tuple(sorted(cached[left] + cached[right])))
            object.__setattr__(self, "_member_cache", cached)
        return cached

    def heights(self) -> list[float]:
        """Merge height per node id; leaves sit at height 0."""
        return [0.0] * self.n_leaves + [m[2] for m in self.merges]


def agglomerate(
    dm: DistanceMatrix,
    labels: Sequence[str],
    linkage: Linkage = Linkage.AVERAGE,
) -> Dendrogram:
    """Standard agglomerative clustering with Lance-Williams updates.

    Repeatedly merges the active pair at minimum linkage distance, breaking
    ties by the smallest (min id, max id) pair. Works on the capped metric,
    so all linkage values stay finite.
    """
    n = dm.n
    if n == 0:
        raise ValueError("cannot cluster an empty distance matrix")
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for a {n}-point metric")
    linkage = Linkage(linkage)
    if n == 1:
        return Dendrogram(labels=tuple(labels), merges=())

    total = 2 * n - 1
    # Dead slots and the diagonal stay at +inf so a flat row-major argmin
    # lands on the first (i, j) pair attaining the minimum, which is exactly
    # the (min id, max id) lexicographic tie-break.
    dist = np.full((total, total), np.inf)
    dist[:n, :n] = dm.d
    np.fill_diagonal(dist, np.inf)
    sizes = np.ones(total)

    merges: list[tuple[int, int, float, int]] = []
    for step in range(n - 1):
        m = n + step
        view = dist[:m, :m]
        flat = int(np.argmin(view))
        i, j = divmod(flat, m)
        height = float(view[i, j])
        size = int(sizes[i] + sizes[j])
        merges.append((i, j, height, size))

        row_i = dist[i, :m]
        row_j = dist[j, :m]
        if linkage is Linkage.AVERAGE:
            new_row = (sizes[i] * row_i + sizes[j] * row_j) / (sizes[i] + sizes[j])
        elif linkage is Linkage.COMPLETE:
            new_row = np.maximum(row_i, row_j)
        else:
            new_row = np.minimum(row_i, row_j)
        dist[m, :m] = new_row
        dist[:m, m] = new_row
        dist[m, m] = np.inf
        for dead in (i, j):
            dist[dead, :] = np.inf
            dist[:, dead] = np.inf
        sizes[m] = size

    return Dendrogram(labels=tuple(labels), merges=tuple(merges))


def cut_nodes(dg: Dendrogram, height: float) -> list[int]:
    """Top node ids forming the partition at the cut, by ascending min leaf id.

    Heights are non-decreasing, so the merges applied at the cut are a prefix
    of the merge sequence.
    """
    if height < 0:
        raise ValueError(f"cut height must be >= 0, got {height}")
    n = dg.n_leaves
    applied = sum(1 for m in dg.merges if m[2] <= height)
    boundary = n + applied  # node ids below this exist at the cut
    parent = dg.parent_array()
    members = dg.member_table()
    nodes = [
        node
        for node in range(boundary)
        if parent[node] == -1 or parent[node] >= boundary
    ]
    nodes.sort(key=lambda node: members[node][0])
    return nodes


def cut(dg: Dendrogram, height: float) -> list[list[int]]:
    """Partition induced by dropping every merge above the threshold.

    Returns clusters as sorted label-id lists, ordered by ascending minimum
    label id.
    """
    members = dg.member_table()
    return [list(members[node]) for node in cut_nodes(dg, height)]


def path_to_root(dg: Dendrogram, label_id: int) -> list[int]:
    """Node ids from a leaf up to the root, inclusive."""
    if not 0 <= label_id < dg.n_leaves:
        raise ValueError(f"unknown leaf id {label_id}")
    parent = dg.parent_array()
    path = [label_id]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    return path


def structure_hash(dg: Dendrogram) -> str:
    """Content hash of the tree shape (leaves + merges), independent of names.

    Name overrides are keyed by this hash so they survive renames but are
    rejected against a differently clustered dendrogram.
    """
    canonical = _render_json(dg, include_names=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _fmt_height(value: float) -> str:
    return format(value, ".12g")


def _render_json(dg: Dendrogram, include_names: bool) -> str:
    merges_txt = ", ".join(
        f"[{left}, {right}, {_fmt_height(height)}, {size}]"
        for left, right, height, size in dg.merges
    )
    parts = [
        '{"leaves": ',
        json.dumps(list(dg.labels)),
        ', "merges": [',
        merges_txt,
        "]",
    ]
    if include_names and dg.names:
        named = {str(node): dg.names[node] for node in sorted(dg.names)}
        parts.append(', "names": ')
        parts.append(json.dumps(named))
    parts.append("}")
    return "".join(parts)


def to_json(dg: Dendrogram) -> str:
    """Serialize with fixed field order; heights carry 12 significant digits."""
    return _render_json(dg, include_names=True) + "\n"


def from_json(text: str) -> Dendrogram:
    obj = json.loads(text)
    labels = tuple(obj["leaves"])
    merges = tuple(
        (int(l), int(r), float(h), int(s)) for l, r, h, s in obj["merges"]
    )
    names = {int(node): name for node, name in obj.get("names", {}).items()}
    return Dendrogram(labels=labels, merges=merges, names=names)


def with_names(dg: Dendrogram, names: dict[int, str]) -> Dendrogram:
    return replace(dg, names=dict(names))


_NEWICK_UNSAFE = re.compile(r"[\s(),:;\[\]'\"]")


def _newick_token(name: str) -> str:
    return _NEWICK_UNSAFE.sub("_", name)


def to_newick(dg: Dendrogram) -> str:
    """Newick export; branch length = parent height - child height.

    Built iteratively in node-id order (children always precede parents), so
    chain-shaped dendrograms cannot hit recursion limits.
    """
    heights = dg.heights()
    rendered: list[str] = [_newick_token(label) for label in dg.labels]
    for step, (left, right, height, _size) in enumerate(dg.merges):
        node = dg.n_leaves + step
        name = dg.names.get(node)
        token = _newick_token(name) if name else ""
        rendered.append(
            f"({rendered[left]}:{_fmt_height(height - heights[left])},"
            f"{rendered[right]}:{_fmt_height(height - heights[right])}){token}"
        )
    return rendered[dg.root] + ";\n"
