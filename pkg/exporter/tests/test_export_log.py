"""Tests for the probability-log exporter."""

from __future__ import annotations

import json

import pytest

from conceptscope.ingest import load_label_set, parse_log

from export_log import ExportJob, main, run_export
from sample_corpus import CLASSES


def make_job(image_corpus, labels_file, out, **kwargs) -> ExportJob:
    defaults = dict(
        model_name="resnet18",
        image_dir=image_corpus,
        labels_path=labels_file,
        out_path=out,
        top_m=10,
        seed=0,
    )
    defaults.update(kwargs)
    return ExportJob(**defaults)


class TestJobValidation:
    def test_rejects_nonpositive_top_m(self, image_corpus, labels_file, tmp_path):
        with pytest.raises(ValueError, match="top_m"):
            make_job(image_corpus, labels_file, tmp_path / "log.jsonl", top_m=0)

    def test_rejects_tiny_image_size(self, image_corpus, labels_file, tmp_path):
        with pytest.raises(ValueError, match="image size"):
            make_job(image_corpus, labels_file, tmp_path / "log.jsonl", image_size=16)

    def test_missing_image_folder_errors(self, labels_file, tmp_path):
        job = make_job(tmp_path / "nowhere", labels_file, tmp_path / "log.jsonl")
        with pytest.raises(ValueError, match="does not exist"):
            run_export(job)


@pytest.fixture(scope="module")
def exported(image_corpus, labels_file, tmp_path_factory):
    out = tmp_path_factory.mktemp("out") / "log.jsonl"
    stats = run_export(make_job(image_corpus, labels_file, out))
    return out, stats


class TestExportedLog:
    def test_one_line_per_image(self, exported):
        out, stats = exported
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 6  # 3 classes x 2 images
        assert stats == {"written": 6, "skipped": 0, "out": str(out)}

    def test_entries_are_sorted_descending(self, exported):
        out, _ = exported
        for line in out.read_text(encoding="utf-8").splitlines():
            probs = [p for _, p in json.loads(line)["entries"]]
            assert probs == sorted(probs, reverse=True)

    def test_true_labels_come_from_subdirectories(self, exported):
        out, _ = exported
        seen = {json.loads(line)["true_label"] for line in out.read_text().splitlines()}
        assert seen == set(CLASSES)

    def test_primary_ingest_rejects_nothing(self, exported, labels_file):
        out, _ = exported
        labels = load_label_set(labels_file)
        records, report = parse_log(out, labels)
        assert report.rejected == 0
        assert len(records) == 6
        print("[criterion 11] PASS (log)", flush=True)

    def test_rerun_is_byte_identical(self, exported, image_corpus, labels_file, tmp_path):
        out, _ = exported
        again = tmp_path / "again.jsonl"
        run_export(make_job(image_corpus, labels_file, again))
        assert again.read_bytes() == out.read_bytes()

    def test_top_m_truncates(self, image_corpus, labels_file, tmp_path):
        out = tmp_path / "log.jsonl"
        run_export(make_job(image_corpus, labels_file, out, top_m=2))
        for line in out.read_text(encoding="utf-8").splitlines():
            assert len(json.loads(line)["entries"]) == 2


class TestFailureHandling:
    def test_unreadable_image_is_skipped(self, labels_file, tmp_path, caplog):
        images = tmp_path / "images"
        (images / "bed").mkdir(parents=True)
        from PIL import Image

        Image.new("RGB", (48, 48), (10, 10, 10)).save(images / "bed" / "ok.png")
        (images / "bed" / "broken.png").write_bytes(b"not an image")
        out = tmp_path / "log.jsonl"
        stats = run_export(make_job(images, labels_file, out))
        assert stats["written"] == 1
        assert stats["skipped"] == 1
        assert "broken.png" in caplog.text

    def test_unknown_class_folder_is_skipped(self, labels_file, tmp_path, caplog):
        images = tmp_path / "images"
        for name in ("bed", "spaceship"):
            (images / name).mkdir(parents=True)
            from PIL import Image

            Image.new("RGB", (48, 48), (9, 9, 9)).save(images / name / "x.png")
        stats = run_export(make_job(images, labels_file, tmp_path / "log.jsonl"))
        assert stats == {
            "written": 1,
            "skipped": 1,
            "out": str(tmp_path / "log.jsonl"),
        }
        assert "spaceship" in caplog.text

    def test_all_images_failing_errors(self, labels_file, tmp_path):
        images = tmp_path / "images"
        (images / "bed").mkdir(parents=True)
        (images / "bed" / "broken.png").write_bytes(b"junk")
        with pytest.raises(ValueError, match="nothing to write"):
            run_export(make_job(images, labels_file, tmp_path / "log.jsonl"))


class TestCli:
    def test_main_writes_log(self, image_corpus, labels_file, tmp_path, capsys):
        out = tmp_path / "log.jsonl"
        rc = main(
            [
                "--images", str(image_corpus),
                "--labels", str(labels_file),
                "--out", str(out),
                "--top-m", "3",
            ]
        )
        assert rc == 0
        assert "6 records" in capsys.readouterr().out
        assert out.exists()

    def test_main_reports_errors(self, labels_file, tmp_path, capsys):
        rc = main(
            [
                "--images", str(tmp_path / "missing"),
                "--labels", str(labels_file),
                "--out", str(tmp_path / "log.jsonl"),
            ]
        )
        assert rc == 1
        assert "error:" in capsys.readouterr().err
