"""Near-miss extraction from classification records.

A near miss is a non-chosen label that still received noticeable probability.
Extraction composes two policies: keep the top-k entries of the descending
vector, then drop anything below the cutoff t (the composition order does not
matter on a sorted vector). The true label anchors the record and is never a
miss, so a correctly classified record yields at most k-1 misses.
"""

from __future__ import annotations

from dataclasses import dataclass

from conceptscope.ingest import ClassificationRecord, LabelSet


@dataclass(frozen=True)
class NmaConfig:
    k: int = 3
    t: float = 1e-6
    correct_only: bool = True

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t must be in [0, 1], got {self.t}")


@dataclass(frozen=True)
class NearMissSet:
    """Top-k-above-cutoff misses for one record, keyed by label id."""

    source_label: int
    misses: tuple[tuple[int, float], ...]


def is_correct(record: ClassificationRecord) -> bool:
    """True iff the argmax entry (after the deterministic tie-break) is the truth."""
    return record.entries[0][0] == record.true_label


def extract_near_misses(
    record: ClassificationRecord, labels: LabelSet, cfg: NmaConfig
) -> NearMissSet:
    """Top-k entries with probability >= t, excluding the true label.

    An empty miss set is a valid result. Entries beyond rank k never
    contribute, whatever their probabilities.
    """
    true_label = record.true_label
    misses = tuple(
        (labels.id_of(label), prob)
        for label, prob in record.entries[: cfg.k]
        if prob >= cfg.t and label != true_label
    )
    return NearMissSet(source_label=labels.id_of(true_label), misses=misses)


def filter_records(
    records: list[ClassificationRecord], cfg: NmaConfig
) -> list[ClassificationRecord]:
    """Apply the experimental protocol: keep only correctly classified records
    unless the config opts into the all-records variant."""
    if not cfg.correct_only:
        return list(records)
    return [record for record in records if is_correct(record)]
