"""Synthetic probability logs with a planted two-level concept hierarchy.

The generator builds G groups x S subgroups x L labels. Every image is
correctly classified: the true label keeps mass 1 - (eps_subgroup +
eps_group), one randomly chosen subgroup mate receives eps_subgroup and one
randomly chosen same-group-other-subgroup mate receives eps_group. Across a
label's images the leaked mass therefore spreads over all of its mates, at
clearly separated scales, while cross-group mass stays exactly zero. The
matching taxonomy and reference annotation make the planted structure the
unique correct answer for the whole pipeline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from conceptscope.ingest import ClassificationRecord, write_log

ROOT_CONCEPT = "entity"


@dataclass(frozen=True)
class SynthConfig:
    groups: int = 2
    subgroups: int = 2
    labels_per_subgroup: int = 3
    eps_subgroup: float = 0.05
    eps_group: float = 0.01
    images_per_label: int = 20
    seed: int = 42

    def __post_init__(self) -> None:
        if min(self.groups, self.subgroups, self.labels_per_subgroup) < 1:
            raise ValueError("groups, subgroups and labels_per_subgroup must be >= 1")
        if self.images_per_label < 1:
            raise ValueError("images_per_label must be >= 1")
        if self.eps_subgroup < 0 or self.eps_group < 0:
            raise ValueError("leak fractions must be >= 0")
        if self.eps_group > self.eps_subgroup:
            raise ValueError("eps_group must not exceed eps_subgroup")
        if self.eps_subgroup + self.eps_group >= 1.0:
            raise ValueError("leak fractions must leave the true label the argmax")


@dataclass(frozen=True)
class SynthData:
    labels: list[str]
    records: list[ClassificationRecord]
    taxonomy: dict[str, list[list[str]]]
    reference: dict[str, dict]
    subgroup_partition: list[list[int]]  # planted label-id clusters, fine level
    group_partition: list[list[int]]  # planted label-id clusters, coarse level


def _label_name(g: int, s: int, l: int) -> str:
    return f"label_{g}_{s}_{l}"


def _subgroup_name(g: int, s: int) -> str:
    return f"subgroup_{g}_{s}"


def _group_name(g: int) -> str:
    return f"group_{g}"


def generate(cfg: SynthConfig) -> SynthData:
    """Deterministic per seed: the same config always yields identical data."""
    rng = random.Random(cfg.seed)
    labels: list[str] = []
    coords: list[tuple[int, int, int]] = []
    for g in range(cfg.groups):
        for s in range(cfg.subgroups):
            for l in range(cfg.labels_per_subgroup):
                labels.append(_label_name(g, s, l))
                coords.append((g, s, l))

    index = {label: i for i, label in enumerate(labels)}
    subgroup_ids: dict[tuple[int, int], list[int]] = {}
    group_ids: dict[int, list[int]] = {}
    for i, (g, s, _l) in enumerate(coords):
        subgroup_ids.setdefault((g, s), []).append(i)
        group_ids.setdefault(g, []).append(i)

    true_mass = 1.0 - cfg.eps_subgroup - cfg.eps_group
    records: list[ClassificationRecord] = []
    for i, label in enumerate(labels):
        g, s, _l = coords[i]
        submates = [m for m in subgroup_ids[(g, s)] if m != i]
        groupmates = [m for m in group_ids[g] if coords[m][1] != s]
        for img in range(cfg.images_per_label):
            entries = [(label, true_mass)]
            if submates and cfg.eps_subgroup > 0:
                target = submates[rng.randrange(len(submates))]
                entries.append((labels[target], cfg.eps_subgroup))
            if groupmates and cfg.eps_group > 0:
                target = groupmates[rng.randrange(len(groupmates))]
                entries.append((labels[target], cfg.eps_group))
            entries.sort(key=lambda e: (-e[1], index[e[0]]))
            records.append(
                ClassificationRecord(
                    image_id=f"{label}_{img:04d}",
                    true_label=label,
                    entries=tuple(entries),
                )
            )

    taxonomy = {
        label: [[label, _subgroup_name(g, s), _group_name(g), ROOT_CONCEPT]]
        for label, (g, s, _l) in zip(labels, coords)
    }
    reference = {
        label: {
            "concepts": [_subgroup_name(g, s), _group_name(g)],
            "group": _group_name(g),
        }
        for label, (g, s, _l) in zip(labels, coords)
    }
    subgroup_partition = [sorted(ids) for ids in subgroup_ids.values()]
    subgroup_partition.sort(key=lambda c: c[0])
    group_partition = [sorted(ids) for ids in group_ids.values()]
    group_partition.sort(key=lambda c: c[0])
    return SynthData(
        labels=labels,
        records=records,
        taxonomy=taxonomy,
        reference=reference,
        subgroup_partition=subgroup_partition,
        group_partition=group_partition,
    )


def write_outputs(data: SynthData, out_dir: str | Path) -> dict[str, Path]:
    """Write labels, log, taxonomy and reference files; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "labels": out / "synthetic_labels.txt",
        "log": out / "synthetic_log.jsonl",
        "taxonomy": out / "synthetic_taxonomy.json",
        "reference": out / "synthetic_reference.json",
    }
    paths["labels"].write_text("\n".join(data.labels) + "\n", encoding="utf-8")
    write_log(data.records, paths["log"])
    paths["taxonomy"].write_text(
        json.dumps(data.taxonomy, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    paths["reference"].write_text(
        json.dumps(data.reference, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths
