import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from rehabvision.cli import main
from rehabvision.dataset import LabelSpan, TimelineAnnotation, save_annotation
from rehabvision.service import (
    PatientRow,
    SessionRow,
    StatusHistoryRow,
    create_db_engine,
    make_session_factory,
    migrate,
    utcnow,
)
from rehabvision.video import write_video


@pytest.fixture()
def runner():
    return CliRunner()


def make_video(path, label_color, frames=70, size=32):
    write_video(
        path,
        [np.full((size, size, 3), label_color, np.uint8) for _ in range(frames)],
        fps=30.0,
    )


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """Two one-window videos with full-span annotations, labels 3 and 5."""
    root = tmp_path_factory.mktemp("cli-corpus")
    videos = root / "videos"
    annotations = root / "annotations"
    videos.mkdir()
    annotations.mkdir()
    for video_id, label, color in (
        ("vid_a", 3, (16, 16, 200)),
        ("vid_b", 5, (16, 200, 16)),
    ):
        make_video(videos / f"{video_id}.mp4", color)
        save_annotation(
            TimelineAnnotation(
                video_id=video_id, spans=(LabelSpan(0, 69, label),)
            ),
            annotations / f"{video_id}.json",
        )
    return root


@pytest.fixture(scope="module")
def built_dataset(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-dataset")
    result = CliRunner().invoke(
        main,
        [
            "build-dataset",
            "--videos", str(corpus / "videos"),
            "--annotations", str(corpus / "annotations"),
            "--out", str(out),
            "--train", "vid_a",
            "--test", "vid_b",
        ],
    )
    assert result.exit_code == 0, result.output
    return out


class TestServiceCommands:
    def test_migrate_creates_schema(self, runner, tmp_path):
        result = runner.invoke(main, ["migrate", "--data-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "service.db").exists()
        assert "schema ready" in result.output

    def test_enqueue_reprocess_resets_failed(self, runner, tmp_path):
        runner.invoke(main, ["migrate", "--data-dir", str(tmp_path)])
        engine = create_db_engine(f"sqlite:///{tmp_path / 'service.db'}")
        factory = make_session_factory(engine)
        with factory() as db:
            db.add(
                PatientRow(
                    patient_id="p1",
                    enrollment_date=utcnow().date(),
                    exercise_plan_id="plan",
                    token="t",
                )
            )
            db.add(
                SessionRow(
                    session_id="bad",
                    patient_id="p1",
                    upload_time=utcnow(),
                    video_uri="/gone.mp4",
                    status="failed",
                )
            )
            db.add(StatusHistoryRow(session_id="bad", status="uploaded"))
            db.add(StatusHistoryRow(session_id="bad", status="failed"))
            db.commit()
        result = runner.invoke(
            main, ["enqueue-reprocess", "--data-dir", str(tmp_path), "--all-failed"]
        )
        assert result.exit_code == 0, result.output
        assert "bad: reset to uploaded, job queued" in result.output
        with factory() as db:
            assert db.get(SessionRow, "bad").status == "uploaded"

    def test_enqueue_reprocess_empty(self, runner, tmp_path):
        runner.invoke(main, ["migrate", "--data-dir", str(tmp_path)])
        result = runner.invoke(
            main, ["enqueue-reprocess", "--data-dir", str(tmp_path), "--all-failed"]
        )
        assert result.exit_code == 0
        assert "nothing to reprocess" in result.output


class TestDatasetAndTraining:
    def test_build_dataset_reports_counts(self, built_dataset):
        manifest = json.loads((built_dataset / "manifest.json").read_text())
        assert manifest["sample_counts"]["train"] == 1
        assert manifest["sample_counts"]["test"] == 1

    def test_train_evaluate_roundtrip(self, runner, corpus, built_dataset, tmp_path):
        checkpoint = tmp_path / "model.pt"
        result = runner.invoke(
            main,
            [
                "train",
                "--dataset", str(built_dataset),
                "--videos", str(corpus / "videos"),
                "--out", str(checkpoint),
                "--max-steps", "2",
                "--image-size", "32",
            ],
        )
        assert result.exit_code == 0, result.output
        assert checkpoint.exists()
        assert "trained full for 1 steps" in result.output  # 1 sample, 1 epoch

        csv_out = tmp_path / "per_class.csv"
        result = runner.invoke(
            main,
            [
                "evaluate",
                "--dataset", str(built_dataset),
                "--videos", str(corpus / "videos"),
                "--checkpoint", str(checkpoint),
                "--split", "test",
                "--csv", str(csv_out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "top1_accuracy" in result.output
        header, *rows = csv_out.read_text().strip().splitlines()
        assert header == "class_id,precision,recall,f1,support"
        assert len(rows) == 16

    def test_eval_model_is_an_alias(self, runner):
        result = runner.invoke(main, ["eval-model", "--help"])
        assert result.exit_code == 0
        assert "Evaluate a checkpoint" in result.output

    def test_ablate_prints_variant_table(self, runner, corpus, built_dataset, tmp_path):
        csv_out = tmp_path / "ablation.csv"
        result = runner.invoke(
            main,
            [
                "ablate",
                "--dataset", str(built_dataset),
                "--videos", str(corpus / "videos"),
                "--max-steps", "1",
                "--image-size", "32",
                "--csv", str(csv_out),
            ],
        )
        assert result.exit_code == 0, result.output
        for variant in ("full", "no_skeleton", "mlp_skeleton_encoder",
                        "mlp_guided_fuse"):
            assert variant in result.output
        rows = csv_out.read_text().strip().splitlines()
        assert len(rows) == 5  # header + 4 variants

    def test_eval_baseline_zero_shot(self, runner, corpus, built_dataset):
        result = runner.invoke(
            main,
            [
                "eval-baseline",
                "--dataset", str(built_dataset),
                "--videos", str(corpus / "videos"),
                "--mode", "zero_shot",
                "--split", "test",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "top1_accuracy" in result.output
        assert "unparseable" in result.output


class TestEvalReports:
    def test_table_and_comparisons(self, runner, tmp_path):
        scores = [
            {"model_id": "plain", "dimension": "accuracy",
             "scores": [2, 3, 2, 3, 2, 3, 2]},
            {"model_id": "enhanced", "dimension": "accuracy",
             "scores": [8, 9, 8, 9, 8, 9, 8]},
        ]
        scores_path = tmp_path / "scores.json"
        scores_path.write_text(json.dumps(scores))
        csv_out = tmp_path / "summary.csv"
        result = runner.invoke(
            main,
            [
                "eval-reports",
                "--scores", str(scores_path),
                "--pair", "enhanced:plain",
                "--csv", str(csv_out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "enhanced: accuracy=8.43" in result.output
        assert "enhanced vs plain [accuracy]" in result.output
        assert "*" in result.output  # the shifted pair is flagged significant
        content = csv_out.read_text()
        assert "model_id,dimension,mean,variance" in content
        assert "model_a,model_b,dimension,p_value,significant" in content

    def test_malformed_pair_rejected(self, runner, tmp_path):
        scores_path = tmp_path / "scores.json"
        scores_path.write_text(json.dumps(
            [{"model_id": "m", "dimension": "accuracy", "scores": [5]}]
        ))
        result = runner.invoke(
            main,
            ["eval-reports", "--scores", str(scores_path), "--pair", "broken"],
        )
        assert result.exit_code != 0
        assert "model_a:model_b" in result.output
