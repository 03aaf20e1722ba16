"""Run a classifier over an image folder and emit the probability-log format.

The folder follows the class-per-subdirectory convention: the subdirectory
name is the record's true label. The model is built by name from the
torchvision registry with the output dimension matching the labels file, so
the emitted entries always index into the declared label universe.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger("export_log")

IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".webp"}


@dataclass(frozen=True)
class ExportJob:
    model_name: str
    image_dir: Path
    labels_path: Path
    out_path: Path
    top_m: int = 10  # generous headroom over the k used downstream
    seed: int = 0
    image_size: int = 64

    def __post_init__(self) -> None:
        if self.top_m < 1:
            raise ValueError(f"top_m must be >= 1, got {self.top_m}")
        if self.image_size < 32:
            raise ValueError(f"image size must be >= 32, got {self.image_size}")


def read_labels(path: Path) -> list[str]:
    labels = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
    labels = [label for label in labels if label]
    if not labels:
        raise ValueError(f"labels file {path} is empty")
    return labels


def list_images(image_dir: Path) -> list[tuple[str, Path]]:
    """(true_label, image path) pairs, sorted for a stable record order."""
    if not image_dir.is_dir():
        raise ValueError(f"image folder {image_dir} does not exist")
    pairs: list[tuple[str, Path]] = []
    for class_dir in sorted(p for p in image_dir.iterdir() if p.is_dir()):
        for image in sorted(class_dir.iterdir()):
            if image.suffix.lower() in IMAGE_SUFFIXES:
                pairs.append((class_dir.name, image))
    if not pairs:
        raise ValueError(f"image folder {image_dir} contains no images")
    return pairs


def build_model(name: str, n_classes: int, seed: int):
    import torch
    from torchvision import models

    torch.manual_seed(seed)  # reruns must produce the identical network
    model = models.get_model(name, weights=None, num_classes=n_classes)
    model.eval()
    return model


def build_transform(size: int):
    from torchvision import transforms

    return transforms.Compose(
        [
            transforms.Resize((size, size)),
            transforms.ToTensor(),
            transforms.Normalize(
                mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]
            ),
        ]
    )


def classify(model, transform, image_path: Path, labels: list[str], top_m: int):
    """Top-m (label, probability) pairs for one image, descending, ties by id."""
    import torch
    from PIL import Image

    with Image.open(image_path) as img:
        batch = transform(img.convert("RGB")).unsqueeze(0)
    with torch.no_grad():
        probs = torch.softmax(model(batch)[0], dim=0)
    ranked = sorted(
        ((i, float(p)) for i, p in enumerate(probs)),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return [(labels[i], p) for i, p in ranked[:top_m]]


def run_export(job: ExportJob) -> dict:
    """Write one log line per readable image; failures are logged and skipped."""
    from conceptscope.ingest import (
        ClassificationRecord,
        LabelSet,
        write_log,
    )

    labels = read_labels(job.labels_path)
    label_set = LabelSet.from_iterable(labels)
    model = build_model(job.model_name, len(labels), job.seed)
    transform = build_transform(job.image_size)

    records: list[ClassificationRecord] = []
    skipped = 0
    for true_label, image_path in list_images(job.image_dir):
        if true_label not in label_set:
            log.warning("skipping %s: class %r not in labels file", image_path, true_label)
            skipped += 1
            continue
        try:
            entries = classify(model, transform, image_path, labels, job.top_m)
        except Exception as exc:  # per-image failures must not kill the batch
            log.warning("skipping %s: %s", image_path, exc)
            skipped += 1
            continue
        records.append(
            ClassificationRecord(
                image_id=str(image_path.relative_to(job.image_dir)),
                true_label=true_label,
                entries=tuple(entries),
            )
        )
    if not records:
        raise ValueError("no image produced a record; nothing to write")
    job.out_path.parent.mkdir(parents=True, exist_ok=True)
    write_log(records, job.out_path)
    return {"written": len(records), "skipped": skipped, "out": str(job.out_path)}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", default="resnet18", help="torchvision model name")
    parser.add_argument("--images", required=True, help="class-per-subdirectory folder")
    parser.add_argument("--labels", required=True, help="label universe, one per line")
    parser.add_argument("--out", required=True, help="output log path (JSONL)")
    parser.add_argument("--top-m", type=int, default=10, help="entries kept per record")
    parser.add_argument("--seed", type=int, default=0, help="weight init seed")
    parser.add_argument("--image-size", type=int, default=64)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    job = ExportJob(
        model_name=args.model,
        image_dir=Path(args.images),
        labels_path=Path(args.labels),
        out_path=Path(args.out),
        top_m=args.top_m,
        seed=args.seed,
        image_size=args.image_size,
    )
    try:
        stats = run_export(job)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"export_log: {stats['written']} records -> {stats['out']} ({stats['skipped']} skipped)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
