"""Verbal query explanations and the explanatory score.

An explanation walks the dendrogram from the classified label up to the
root, reporting each encountered cluster's concept name while skipping
unnamed nodes and collapsing consecutive repeats, and renders one sentence
per retained cluster. Scoring compares the machine's concept set (root and
leaf excluded) against a human reference chain: the fraction of reference
concepts recovered, averaged over labels for a model-level score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from conceptscope.clustering import Dendrogram, path_to_root
from conceptscope.ingest import ClassificationRecord

SENTENCE_TEMPLATE = "A {child} is part of the concept {concept}"


class ExplainError(ValueError):
    """Unknown label, missing reference data, or an unscorable reference."""


@dataclass(frozen=True)
class Explanation:
    """Rendered explanation for one label.

    ``concepts`` is the scoring view (root name and the label itself
    excluded); ``display_concepts`` is what the sentences show, one per
    retained cluster, with that cluster's member labels alongside.
    """

    label: str
    concepts: tuple[str, ...]
    display_concepts: tuple[str, ...]
    sentences: tuple[str, ...]
    members: tuple[tuple[str, ...], ...]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "concepts": list(self.concepts),
            "display_concepts": list(self.display_concepts),
            "sentences": list(self.sentences),
            "members": [list(m) for m in self.members],
        }


@dataclass
class ReferenceAnnotation:
    """Human concept chains per label (root and leaf excluded), with optional
    group tags used for group-wise score breakdowns."""

    concepts: dict[str, tuple[str, ...]]
    groups: dict[str, str] = field(default_factory=dict)


def load_reference(path: str | Path) -> ReferenceAnnotation:
    """Reference file: JSON map label -> {concepts: [...], group: optional}."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ExplainError(f"cannot read reference file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ExplainError(f"reference file {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ExplainError("reference file must be an object keyed by label")
    concepts: dict[str, tuple[str, ...]] = {}
    groups: dict[str, str] = {}
    for label, entry in obj.items():
        if not isinstance(entry, dict) or "concepts" not in entry:
            raise ExplainError(f"reference entry for {label!r} must have a concepts array")
        chain = entry["concepts"]
        if not isinstance(chain, list) or not all(isinstance(c, str) and c for c in chain):
            raise ExplainError(f"reference concepts for {label!r} must be non-empty strings")
        concepts[label] = tuple(chain)
        group = entry.get("group")
        if group is not None:
            if not isinstance(group, str) or not group:
                raise ExplainError(f"reference group for {label!r} must be a non-empty string")
            groups[label] = group
    return ReferenceAnnotation(concepts=concepts, groups=groups)


def explain_label(dg: Dendrogram, label: str) -> Explanation:
    """Explanation for one leaf of a named dendrogram.

    Unnamed nodes are skipped and consecutive duplicate names collapse, so a
    concept never appears twice in a row in the rendered sentences.
    """
    try:
        leaf = dg.labels.index(label)
    except ValueError:
        raise ExplainError(f"label {label!r} is not a leaf of the dendrogram") from None
    path = path_to_root(dg, leaf)
    members = dg.member_table()

    previous = dg.name_of(leaf) or label
    retained: list[tuple[int, str]] = []
    for node in path[1:]:
        name = dg.name_of(node)
        if name is None or name == previous:
            continue
        retained.append((node, name))
        previous = name

    root_name = dg.name_of(dg.root)
    display = tuple(name for _node, name in retained)
    scoring = tuple(
        name for name in display if name != root_name and name != label
    )
    sentences = []
    member_lists = []
    child = dg.name_of(leaf) or label
    for node, name in retained:
        sentences.append(SENTENCE_TEMPLATE.format(child=child, concept=name))
        member_lists.append(tuple(dg.labels[m] for m in members[node]))
        child = name
    return Explanation(
        label=label,
        concepts=scoring,
        display_concepts=display,
        sentences=tuple(sentences),
        members=tuple(member_lists),
    )


def explain_record(dg: Dendrogram, record: ClassificationRecord) -> Explanation:
    """Explanation for the record's decided (argmax) label, whatever the truth."""
    decided = record.entries[0][0]
    return explain_label(dg, decided)


def score_label(
    machine: Explanation, reference: ReferenceAnnotation, label: str
) -> float:
    """|S intersect U| / |S| with set semantics; 0 when the machine found
    nothing, an error when the reference chain itself is empty."""
    if label not in reference.concepts:
        raise ExplainError(f"label {label!r} missing from the reference annotation")
    ref = set(reference.concepts[label])
    if not ref:
        raise ExplainError(f"reference chain empty for label {label!r}")
    machine_concepts = set(machine.concepts)
    return len(ref & machine_concepts) / len(ref)


@dataclass
class ScoreReport:
    total: float
    per_group: dict[str, float]
    per_label: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "per_group": dict(sorted(self.per_group.items())),
            "per_label": dict(sorted(self.per_label.items())),
        }


def score_model(dg: Dendrogram, reference: ReferenceAnnotation) -> ScoreReport:
    """Unweighted mean of per-label scores, plus group means where the
    reference tags labels with groups."""
    per_label: dict[str, float] = {}
    for label in dg.labels:
        if label not in reference.concepts:
            raise ExplainError(f"label {label!r} missing from the reference annotation")
        per_label[label] = score_label(explain_label(dg, label), reference, label)
    total = sum(per_label.values()) / len(per_label)
    group_values: dict[str, list[float]] = {}
    for label, score in per_label.items():
        group = reference.groups.get(label)
        if group is not None:
            group_values.setdefault(group, []).append(score)
    per_group = {g: sum(v) / len(v) for g, v in group_values.items()}
    return ScoreReport(total=total, per_group=per_group, per_label=per_label)


def render_score_table(report: ScoreReport, row_label: str = "model") -> str:
    """Fixed-format table: one row, Total first, then group columns."""
    headers = ["", "Total"] + sorted(report.per_group)
    values = [row_label, f"{report.total:.4f}"] + [
        f"{report.per_group[g]:.4f}" for g in sorted(report.per_group)
    ]
    widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
    header_row = "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()
    value_row = "  ".join(v.ljust(w) for v, w in zip(values, widths)).rstrip()
    return header_row + "\n" + value_row + "\n"
