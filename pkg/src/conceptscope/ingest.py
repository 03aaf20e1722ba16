"""Parsing and validation of label lists and per-image probability logs.

A probability log is UTF-8, line-delimited JSON. Each line is an object with
an ``image_id`` string, a ``true_label`` string and ``entries``, an array of
``[label, probability]`` pairs. Extra fields are ignored. Logs are usually
sparse top-M slices of the full probability vector, so entries are not
required to sum to 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

REASON_MALFORMED = "malformed_line"
REASON_UNKNOWN_LABEL = "unknown_label"
REASON_EMPTY_ENTRIES = "empty_entries"
REASON_BAD_PROBABILITY = "invalid_probability"

REJECT_REASONS = (
    REASON_MALFORMED,
    REASON_UNKNOWN_LABEL,
    REASON_EMPTY_ENTRIES,
    REASON_BAD_PROBABILITY,
)


class IngestError(ValueError):
    """Hard failure while reading an input file."""


class RecordError(ValueError):
    """A single rejected log record, tagged with its rejection reason."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class LabelSet:
    """Label universe with contiguous 0-based ids in order of first appearance."""

    labels: tuple[str, ...]
    index: dict[str, int]

    @classmethod
    def from_iterable(cls, labels: Iterable[str]) -> "LabelSet":
        seq = tuple(labels)
        if not seq:
            raise IngestError("label set is empty")
        index: dict[str, int] = {}
        for i, label in enumerate(seq):
            if label in index:
                raise IngestError(f"duplicate label {label!r}")
            index[label] = i
        return cls(seq, index)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.index

    def __iter__(self):
        return iter(self.labels)

    def id_of(self, label: str) -> int:
        return self.index[label]

    def label_of(self, label_id: int) -> str:
        return self.labels[label_id]


@dataclass(frozen=True)
class ClassificationRecord:
    """One test image: identity, ground truth and its sparse probability slice.

    ``entries`` is sorted by descending probability, ties broken by ascending
    label id so the top-1 (and any top-k slice) is deterministic.
    """

    image_id: str
    true_label: str
    entries: tuple[tuple[str, float], ...]


@dataclass
class IngestReport:
    total_records: int = 0
    accepted: int = 0
    rejected: int = 0
    reasons: dict[str, int] = field(
        default_factory=lambda: {reason: 0 for reason in REJECT_REASONS}
    )

    def count_rejection(self, reason: str) -> None:
        self.total_records += 1
        self.rejected += 1
        self.reasons[reason] += 1

    def count_accepted(self) -> None:
        self.total_records += 1
        self.accepted += 1


def load_label_set(path: str | Path) -> LabelSet:
    """Read a labels file (one label per line); ids follow file order.

    Blank lines are skipped. Duplicates and empty files are hard errors.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read labels file {path}: {exc}") from exc
    labels: list[str] = []
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        label = raw.strip()
        if not label:
            continue
        if label in first_line:
            raise IngestError(
                f"duplicate label {label!r} at lines {first_line[label]} and {lineno}"
            )
        first_line[label] = lineno
        labels.append(label)
    if not labels:
        raise IngestError(f"labels file {path} contains no labels")
    return LabelSet.from_iterable(labels)


def parse_record_obj(obj: object, labels: LabelSet | None = None) -> ClassificationRecord:
    """Validate one decoded log object and normalize it into a record.

    With ``labels`` given, every label must belong to the set and probability
    ties are broken by label id; without it (service ingress, where only the
    argmax is consumed downstream) membership is not checked and ties fall
    back to label string order.
    """
    if not isinstance(obj, dict):
        raise RecordError(REASON_MALFORMED, "record is not an object")
    image_id = obj.get("image_id")
    true_label = obj.get("true_label")
    entries = obj.get("entries")
    if not isinstance(image_id, str) or not isinstance(true_label, str):
        raise RecordError(REASON_MALFORMED, "image_id and true_label must be strings")
    if not isinstance(entries, list):
        raise RecordError(REASON_MALFORMED, "entries must be an array")
    if not entries:
        raise RecordError(REASON_EMPTY_ENTRIES, "entries is empty")
    if labels is not None and true_label not in labels:
        raise RecordError(REASON_UNKNOWN_LABEL, f"unknown true label {true_label!r}")

    seen: set[str] = set()
    parsed: list[tuple[str, float]] = []
    for entry in entries:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise RecordError(REASON_MALFORMED, "entry is not a [label, probability] pair")
        label, prob = entry
        if not isinstance(label, str):
            raise RecordError(REASON_MALFORMED, "entry label is not a string")
        if isinstance(prob, bool) or not isinstance(prob, (int, float)):
            raise RecordError(REASON_MALFORMED, "entry probability is not a number")
        prob = float(prob)
        if math.isnan(prob) or prob < 0.0 or prob > 1.0:
            raise RecordError(
                REASON_BAD_PROBABILITY, f"probability {prob!r} outside [0, 1]"
            )
        if labels is not None and label not in labels:
            raise RecordError(REASON_UNKNOWN_LABEL, f"unknown entry label {label!r}")
        if label in seen:
            raise RecordError(REASON_MALFORMED, f"entry label {label!r} repeats")
        seen.add(label)
        parsed.append((label, prob))

    if labels is not None:
        parsed.sort(key=lambda e: (-e[1], labels.id_of(e[0])))
    else:
        parsed.sort(key=lambda e: (-e[1], e[0]))
    return ClassificationRecord(image_id=image_id, true_label=true_label, entries=tuple(parsed))


def parse_log(
    path: str | Path, labels: LabelSet
) -> tuple[list[ClassificationRecord], IngestReport]:
    """Parse a probability log, tallying rejections instead of failing on them.

    Only an unreadable file is fatal. Parsing is deterministic and preserves
    file order for accepted records.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read log file {path}: {exc}") from exc

    records: list[ClassificationRecord] = []
    report = IngestReport()
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            report.count_rejection(REASON_MALFORMED)
            continue
        try:
            record = parse_record_obj(obj, labels)
        except RecordError as exc:
            report.count_rejection(exc.reason)
            continue
        records.append(record)
        report.count_accepted()
    return records, report


def record_to_json_line(record: ClassificationRecord) -> str:
    obj = {
        "image_id": record.image_id,
        "true_label": record.true_label,
        "entries": [[label, prob] for label, prob in record.entries],
    }
    return json.dumps(obj, separators=(",", ":"))


def write_log(records: Iterable[ClassificationRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_json_line(record))
            fh.write("\n")
