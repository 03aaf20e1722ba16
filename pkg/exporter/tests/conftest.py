"""Exporter test fixtures: a tiny class-per-subdirectory image corpus."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from sample_corpus import CLASSES, COLORS


@pytest.fixture(scope="module")
def image_corpus(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("images")
    for name in CLASSES:
        class_dir = root / name
        class_dir.mkdir()
        for i in range(2):
            shade = tuple(min(255, c + 30 * i) for c in COLORS[name])
            Image.new("RGB", (48, 48), shade).save(class_dir / f"{name}_{i}.png")
    return root


@pytest.fixture(scope="module")
def labels_file(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("labels") / "labels.txt"
    path.write_text("\n".join(CLASSES) + "\n", encoding="utf-8")
    return path
