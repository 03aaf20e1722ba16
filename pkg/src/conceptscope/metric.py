"""All-pairs shortest-path metric over the connection graph.

Floyd-Warshall on the symmetric weight matrix yields a metric over the
labels. Downstream linkage needs finite arithmetic, so distances between
different connected components are replaced by a uniform cap strictly above
every finite distance: disconnected clusters then merge last, at a
well-defined height, without disturbing the merge order of the finite part.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from conceptscope.graph import ConnectionGraph

CAP_FACTOR = 1.5
FALLBACK_CAP = 1.0


@dataclass
class DistanceMatrix:
    d: np.ndarray  # (n, n) float64, symmetric, zero diagonal, all finite
    cap_value: float
    components: list[list[int]]  # connected components, pre-cap, by ascending min id

    @property
    def n(self) -> int:
        return self.d.shape[0]


def all_pairs_shortest_paths(weight: np.ndarray) -> np.ndarray:
    """Floyd-Warshall with the standard k-outer sweep; np.inf marks no path.

    The vectorized row/column update is bitwise identical to the classic
    in-place triple loop because row k and column k are fixed points of
    sweep k (the diagonal is zero).
    """
    d = weight.astype(np.float64, copy=True)
    n = d.shape[0]
    for k in range(n):
        np.minimum(d, np.add.outer(d[:, k], d[k, :]), out=d)
    return d


def shortest_path_metric(graph: ConnectionGraph) -> DistanceMatrix:
    """Compute the capped shortest-path metric and the component partition.

    cap_value = 1.5 x (max finite shortest-path distance); if no finite
    off-diagonal distance exists (or the finite maximum is 0, which only
    degenerate all-zero-weight graphs produce) the cap falls back to 1.0.
    Components are recorded before capping.
    """
    d = all_pairs_shortest_paths(graph.weight)
    n = d.shape[0]
    finite = np.isfinite(d)

    components: list[list[int]] = []
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        # post-FW, row i is finite exactly on i's component
        members = np.nonzero(finite[i])[0]
        seen[members] = True
        components.append([int(m) for m in members])

    off_diag = ~np.eye(n, dtype=bool)
    finite_off = d[finite & off_diag]
    if finite_off.size == 0 or float(finite_off.max()) <= 0.0:
        cap_value = FALLBACK_CAP
    else:
        cap_value = CAP_FACTOR * float(finite_off.max())
    d[~finite] = cap_value
    return DistanceMatrix(d=d, cap_value=cap_value, components=components)


def write_distance_dump(dm: DistanceMatrix, path: str | Path) -> None:
    """Optional artifact: header, then n rows of tab-separated 12-digit values."""
    lines = [f"# n={dm.n}\tcap_value={dm.cap_value!r}"]
    for row in dm.d:
        lines.append("\t".join(f"{v:.12f}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
