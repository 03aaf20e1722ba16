"""Shared fixtures: the small worked examples exercised all over the suite."""

from __future__ import annotations

import pytest

from conceptscope.clustering import Dendrogram
from conceptscope.explain import ReferenceAnnotation, load_reference
from conceptscope.naming import Taxonomy

from worked_examples import (
    FRUIT_LABELS,
    FRUIT_MERGES,
    FRUIT_REFERENCE,
    FRUIT_TAXONOMY,
    FURNITURE_LABELS,
    FURNITURE_MERGES,
    FURNITURE_TAXONOMY,
    build_named,
    write_json,
)


@pytest.fixture
def furniture(tmp_path) -> tuple[Dendrogram, Taxonomy]:
    return build_named(FURNITURE_LABELS, FURNITURE_MERGES, FURNITURE_TAXONOMY, tmp_path)


@pytest.fixture
def fruit(tmp_path) -> tuple[Dendrogram, Taxonomy, ReferenceAnnotation]:
    named, tax = build_named(FRUIT_LABELS, FRUIT_MERGES, FRUIT_TAXONOMY, tmp_path)
    ref_path = write_json(tmp_path / "reference.json", FRUIT_REFERENCE)
    return named, tax, load_reference(ref_path)
