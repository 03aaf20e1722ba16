"""Connection graph construction from accumulated near-miss statistics.

For labels i, j the accumulator tracks the total probability that images of
true label i leaked onto label j, plus per-label image counts. Finalizing
turns those sums into directional means p[i][j] = sum[i][j] / count[i],
symmetrizes them by arithmetic mean, and maps similarity to dissimilarity:
weight = 1 - p_sym where p_sym clears the cutoff, infinity otherwise. Label
pairs that never co-occurred as near misses stay at infinite distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from conceptscope.ingest import IngestError, LabelSet
from conceptscope.nma import NearMissSet


@dataclass
class ConfusionAccumulator:
    """Mergeable accumulation state: probability sums and per-label counts."""

    sum: np.ndarray  # (n, n) float64; sum[i][j] = leaked probability i -> j
    count: np.ndarray  # (n,) int64; images processed per true label

    @classmethod
    def empty(cls, n: int) -> "ConfusionAccumulator":
        if n < 1:
            raise ValueError(f"label count must be >= 1, got {n}")
        return cls(sum=np.zeros((n, n), dtype=np.float64), count=np.zeros(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.count.shape[0]


@dataclass
class ConnectionGraph:
    """Symmetric dissimilarity matrix over labels; np.inf marks absent edges."""

    weight: np.ndarray  # (n, n) float64, zero diagonal

    @property
    def n(self) -> int:
        return self.weight.shape[0]

    def finite_edges(self) -> list[tuple[int, int, float]]:
        """Finite off-diagonal edges as (i, j, weight) with i < j, sorted by id."""
        iu, ju = np.triu_indices(self.n, k=1)
        mask = np.isfinite(self.weight[iu, ju])
        return [
            (int(i), int(j), float(self.weight[i, j]))
            for i, j in zip(iu[mask], ju[mask])
        ]


def accumulate(
    acc: ConfusionAccumulator, source: int, misses: NearMissSet
) -> ConfusionAccumulator:
    """Fold one record's near misses into the accumulator (in place).

    Addition is associative and commutative across records, so any record
    partitioning across workers converges to the same sums after a merge.
    """
    if source != misses.source_label:
        raise ValueError(
            f"source {source} does not match miss set source {misses.source_label}"
        )
    acc.count[source] += 1
    for label_id, prob in misses.misses:
        acc.sum[source, label_id] += prob
    return acc


def merge_accumulators(accs: Sequence[ConfusionAccumulator]) -> ConfusionAccumulator:
    """Elementwise-add private accumulators in the given (fixed) order."""
    if not accs:
        raise ValueError("no accumulators to merge")
    merged = ConfusionAccumulator.empty(accs[0].n)
    for acc in accs:
        if acc.n != merged.n:
            raise ValueError("accumulators disagree on label count")
        merged.sum += acc.sum
        merged.count += acc.count
    return merged


def finalize(acc: ConfusionAccumulator, t: float) -> ConnectionGraph:
    """Turn accumulated sums into the weighted connection graph.

    Labels with no surviving images get directional mean 0 and end up
    isolated (all-infinity edges) rather than erroring; they merge last in
    the downstream dendrogram.
    """
    counts = acc.count.astype(np.float64)[:, None]
    p = np.divide(acc.sum, counts, out=np.zeros_like(acc.sum), where=counts > 0)
    p_sym = (p + p.T) / 2.0
    weight = np.where(p_sym >= t, 1.0 - p_sym, np.inf)
    np.fill_diagonal(weight, 0.0)
    return ConnectionGraph(weight=weight)


def incoming_confusion(acc: ConfusionAccumulator) -> np.ndarray:
    """Diagnostic: expected probability that an image of any other label leaks
    onto label i, averaged over all images not belonging to i."""
    total = int(acc.count.sum())
    incoming = acc.sum.sum(axis=0)  # diagonal is structurally zero
    denom = np.maximum(total - acc.count, 1).astype(np.float64)
    out = incoming / denom
    out[total - acc.count == 0] = 0.0
    return out


def write_graph_dump(
    graph: ConnectionGraph,
    labels: LabelSet,
    path: str | Path,
    *,
    t: float,
    k: int,
    records_total: int,
    records_used: int,
) -> None:
    """Write the finite edges as `label_i<TAB>label_j<TAB>weight`, sorted by id.

    The header captures the parameters the graph was built under so the
    clustering stage can report provenance.
    """
    if len(labels) != graph.n:
        raise ValueError("label set size does not match graph size")
    lines = [
        f"# n={graph.n}\tt={t!r}\tk={k}\trecords_total={records_total}"
        f"\trecords_used={records_used}"
    ]
    for i, j, w in graph.finite_edges():
        lines.append(f"{labels.label_of(i)}\t{labels.label_of(j)}\t{w!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_graph_dump(path: str | Path, labels: LabelSet) -> tuple[ConnectionGraph, dict]:
    """Parse a graph dump back into a ConnectionGraph plus its header metadata."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read graph dump {path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line]
    if not lines or not lines[0].startswith("#"):
        raise IngestError(f"graph dump {path} is missing its header line")
    meta: dict[str, float | int] = {}
    for field in lines[0].lstrip("#").strip().split("\t"):
        key, _, value = field.partition("=")
        meta[key] = float(value) if key == "t" else int(value)
    if meta.get("n") != len(labels):
        raise IngestError(
            f"graph dump has n={meta.get('n')} but label set has {len(labels)} labels"
        )
    weight = np.full((len(labels), len(labels)), np.inf)
    np.fill_diagonal(weight, 0.0)
    for line in lines[1:]:
        parts = line.split("\t")
        if len(parts) != 3:
            raise IngestError(f"malformed edge line in {path}: {line!r}")
        a, b, w = parts
        if a not in labels or b not in labels:
            raise IngestError(f"edge references unknown label in {path}: {line!r}")
        i, j = labels.id_of(a), labels.id_of(b)
        weight[i, j] = weight[j, i] = float(w)
    return ConnectionGraph(weight=weight), meta
