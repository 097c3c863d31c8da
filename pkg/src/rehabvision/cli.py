"""Command-line entry points: service operations and offline training/eval."""

import csv
import json
from pathlib import Path

import click

from .dataset import BuiltDataset, build_dataset, load_annotation
from .errors import RehabVisionError
from .evaluation import (
    BASELINE_MODES,
    BaselineSample,
    LikertDataset,
    likert_summary,
    run_ablation_suite,
    run_llm_baseline,
)
from .model import (
    VARIANTS,
    ModelConfig,
    TrainConfig,
    VideoDirClipSource,
    dataset_from_samples,
    evaluate_model,
    load_checkpoint,
    load_class_descriptions,
    save_checkpoint,
    train_from_manifest,
)
from .reports import MockLlmClient
from .service import (
    PROCESS_SESSION,
    JobQueue,
    ServiceConfig,
    SessionRow,
    create_app,
    create_db_engine,
    make_session_factory,
    migrate as migrate_schema,
    reset_for_reprocessing,
)
from .video import probe_video


@click.group()
def main():
    """Rehabilitation exercise video assessment toolkit."""


def _service_config(data_dir: str, nurse_tokens: tuple[str, ...]) -> ServiceConfig:
    tokens = {}
    for pair in nurse_tokens:
        token, _, nurse_id = pair.partition(":")
        if not token or not nurse_id:
            raise click.BadParameter(f"expected token:nurse_id, got {pair!r}")
        tokens[token] = nurse_id
    return ServiceConfig(data_dir=Path(data_dir), nurse_tokens=tokens)


# -- service operations ----------------------------------------------------


@main.command()
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--nurse-token",
    "nurse_tokens",
    multiple=True,
    help="token:nurse_id credential; repeatable.",
)
@click.option(
    "--static-dir",
    type=click.Path(file_okay=False, exists=True),
    default=None,
    help="Built dashboard assets to serve at /app.",
)
def serve(data_dir, host, port, nurse_tokens, static_dir):
    """Run the HTTP service with its processing worker."""
    import uvicorn

    config = _service_config(data_dir, nurse_tokens)
    if static_dir is not None:
        config.static_dir = Path(static_dir)
    uvicorn.run(create_app(config), host=host, port=port)


@main.command()
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
def migrate(data_dir):
    """Create or update the database schema."""
    config = _service_config(data_dir, ())
    config.data_dir.mkdir(parents=True, exist_ok=True)
    migrate_schema(create_db_engine(config.db_url))
    click.echo(f"schema ready at {config.db_url}")


@main.command("enqueue-reprocess")
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
@click.option("--session", "session_ids", multiple=True, help="Session id; repeatable.")
@click.option("--all-failed", is_flag=True, help="Requeue every failed session.")
def enqueue_reprocess(data_dir, session_ids, all_failed):
    """Rewind failed sessions to their last completed stage and requeue them."""
    from sqlalchemy import select

    config = _service_config(data_dir, ())
    engine = create_db_engine(config.db_url)
    factory = make_session_factory(engine)
    queue = JobQueue(factory)
    ids = list(session_ids)
    if all_failed:
        with factory() as db:
            ids += db.execute(
                select(SessionRow.session_id).where(SessionRow.status == "failed")
            ).scalars().all()
    if not ids:
        click.echo("nothing to reprocess")
        return
    for session_id in dict.fromkeys(ids):
        target = reset_for_reprocessing(factory, session_id)
        queue.enqueue(PROCESS_SESSION, {"session_id": session_id})
        click.echo(f"{session_id}: reset to {target}, job queued")


# -- offline dataset / model work -------------------------------------------


def _split_option(value: str | None) -> list[str]:
    return [v for v in (value or "").split(",") if v]


@main.command("build-dataset")
@click.option("--videos", required=True, type=click.Path(exists=True, file_okay=False))
@click.option(
    "--annotations",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Directory of {video_id}.json timeline annotations.",
)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--train", "train_ids", default="", help="Comma-separated video ids.")
@click.option("--val", "val_ids", default="", help="Comma-separated video ids.")
@click.option("--test", "test_ids", default="", help="Comma-separated video ids.")
def build_dataset_cmd(videos, annotations, out, train_ids, val_ids, test_ids):
    """Window the annotated videos into a persisted training dataset."""
    annotations_dir = Path(annotations)
    videos_dir = Path(videos)
    split_config = {
        "train": _split_option(train_ids),
        "val": _split_option(val_ids),
        "test": _split_option(test_ids),
    }
    wanted = [vid for ids in split_config.values() for vid in ids]
    anns = {vid: load_annotation(annotations_dir / f"{vid}.json") for vid in wanted}
    frame_counts = {
        vid: probe_video(videos_dir / f"{vid}.mp4").frame_count for vid in wanted
    }
    built = build_dataset(frame_counts, anns, split_config)
    built.save(out)
    click.echo(f"dataset written to {out}: {built.manifest.sample_counts}")


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--videos", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--variant", default="full", type=click.Choice(VARIANTS), show_default=True)
@click.option("--epochs", default=1, show_default=True, type=int)
@click.option("--max-steps", default=None, type=int)
@click.option("--batch-size", default=8, show_default=True, type=int)
@click.option("--learning-rate", default=1e-4, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--image-size", default=64, show_default=True, type=int)
def train(dataset, videos, out, variant, epochs, max_steps, batch_size,
          learning_rate, seed, image_size):
    """Train the recognizer on a built dataset and save a checkpoint."""
    built = BuiltDataset.load(dataset)
    source = VideoDirClipSource(videos, image_size=image_size)
    model_config = ModelConfig(variant=variant, image_size=image_size)
    train_config = TrainConfig(
        epochs=epochs,
        batch_size=batch_size,
        learning_rate=learning_rate,
        seed=seed,
        max_steps=max_steps,
    )
    model, result = train_from_manifest(built, source, model_config, train_config)
    save_checkpoint(out, model, history=result.history)
    click.echo(
        f"trained {variant} for {result.steps_run} steps; "
        f"best val weighted F1 {result.best_val_f1:.4f}; saved to {out}"
    )


def _metric_lines(report) -> list[str]:
    return [
        f"weighted_f1     {report.weighted_f1:.4f}",
        f"top1_accuracy   {report.top1_accuracy:.4f}",
        f"top3_accuracy   {report.top3_accuracy:.4f}",
        f"samples         {report.num_samples}",
    ]


def _write_per_class_csv(report, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class_id", "precision", "recall", "f1", "support"])
        for class_id in range(len(report.support)):
            writer.writerow(
                [
                    class_id,
                    f"{report.per_class_precision[class_id]:.6f}",
                    f"{report.per_class_recall[class_id]:.6f}",
                    f"{report.per_class_f1[class_id]:.6f}",
                    int(report.support[class_id]),
                ]
            )


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--videos", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--split", default="test", show_default=True)
@click.option("--csv", "csv_out", default=None, type=click.Path(dir_okay=False),
              help="Write per-class metrics as CSV.")
def evaluate(dataset, videos, checkpoint, split, csv_out):
    """Evaluate a checkpoint on one dataset split."""
    built = BuiltDataset.load(dataset)
    model, _ = load_checkpoint(checkpoint)
    source = VideoDirClipSource(videos, image_size=model.config.image_size)
    samples = built.samples.get(split)
    if not samples:
        raise click.ClickException(f"split {split!r} is empty")
    report = evaluate_model(model, dataset_from_samples(samples, source))
    for line in _metric_lines(report):
        click.echo(line)
    if csv_out:
        _write_per_class_csv(report, csv_out)
        click.echo(f"per-class metrics written to {csv_out}")


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--videos", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--max-steps", default=None, type=int)
@click.option("--epochs", default=1, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--image-size", default=64, show_default=True, type=int)
@click.option("--csv", "csv_out", default=None, type=click.Path(dir_okay=False))
def ablate(dataset, videos, max_steps, epochs, seed, image_size, csv_out):
    """Train and compare all architecture variants on one dataset."""
    built = BuiltDataset.load(dataset)
    source = VideoDirClipSource(videos, image_size=image_size)
    train_set = dataset_from_samples(built.samples["train"], source)
    eval_samples = built.samples.get("test") or built.samples["train"]
    eval_set = dataset_from_samples(eval_samples, source)
    suite = run_ablation_suite(
        train_set,
        eval_set,
        ModelConfig(image_size=image_size),
        TrainConfig(epochs=epochs, max_steps=max_steps, seed=seed),
    )
    header = f"{'variant':24} {'params':>10} {'skel params':>12} {'w-F1':>8} {'top1':>8} {'top3':>8}"
    click.echo(header)
    for name, result in suite.items():
        click.echo(
            f"{name:24} {result.total_parameters:>10} "
            f"{result.skeleton_parameters:>12} {result.report.weighted_f1:>8.4f} "
            f"{result.report.top1_accuracy:>8.4f} {result.report.top3_accuracy:>8.4f}"
        )
    if csv_out:
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["variant", "total_parameters", "skeleton_parameters",
                 "weighted_f1", "top1_accuracy", "top3_accuracy"]
            )
            for name, result in suite.items():
                writer.writerow(
                    [name, result.total_parameters, result.skeleton_parameters,
                     result.report.weighted_f1, result.report.top1_accuracy,
                     result.report.top3_accuracy]
                )
        click.echo(f"ablation table written to {csv_out}")


@main.command("eval-baseline")
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--videos", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--mode", default="zero_shot", type=click.Choice(BASELINE_MODES),
              show_default=True)
@click.option("--split", default="test", show_default=True)
@click.option("--max-samples", default=None, type=int)
@click.option("--image-size", default=64, show_default=True, type=int)
def eval_baseline(dataset, videos, mode, split, max_samples, image_size):
    """Run the prompted-LLM classification baseline with the mock provider."""
    built = BuiltDataset.load(dataset)
    source = VideoDirClipSource(videos, image_size=image_size)
    windows = [s for s in built.samples.get(split, []) if s.window_label != 0]
    if max_samples is not None:
        windows = windows[:max_samples]
    if not windows:
        raise click.ClickException(f"split {split!r} has no action windows")
    samples = [
        BaselineSample(
            frames=tuple(source.raw_frames(s.video_id, s.sampled_frame_indices)),
            label=s.window_label,
        )
        for s in windows
    ]
    exemplars = None
    if mode == "few_shot":
        exemplars = {}
        for s in built.samples["train"]:
            if s.window_label != 0 and s.window_label not in exemplars:
                exemplars[s.window_label] = source.raw_frames(
                    s.video_id, s.sampled_frame_indices[:1]
                )
    result = run_llm_baseline(
        mode, samples, MockLlmClient(), load_class_descriptions(), exemplars=exemplars
    )
    for line in _metric_lines(result.report):
        click.echo(line)
    click.echo(f"mean_latency_s  {result.mean_latency_s:.4f}")
    click.echo(f"unparseable     {result.unparseable}")


@main.command("eval-reports")
@click.option("--scores", required=True, type=click.Path(exists=True, dir_okay=False),
              help='JSON list of {"model_id", "dimension", "scores"} rows.')
@click.option("--pair", "pairs", multiple=True,
              help="model_a:model_b comparison; repeatable.")
@click.option("--alpha", default=0.05, show_default=True, type=float)
@click.option("--csv", "csv_out", default=None, type=click.Path(dir_okay=False))
def eval_reports(scores, pairs, alpha, csv_out):
    """Summarise nurse Likert ratings: mean (variance) cells plus pairwise tests."""
    rows = json.loads(Path(scores).read_text(encoding="utf-8"))
    datasets = [
        LikertDataset(row["model_id"], row["dimension"], tuple(row["scores"]))
        for row in rows
    ]
    parsed_pairs = []
    for pair in pairs:
        a, _, b = pair.partition(":")
        if not a or not b:
            raise click.BadParameter(f"expected model_a:model_b, got {pair!r}")
        parsed_pairs.append((a, b))
    summary = likert_summary(datasets, pairs=parsed_pairs, alpha=alpha)
    models = sorted({model for model, _ in summary.cells})
    dimensions = sorted({dim for _, dim in summary.cells})
    for model in models:
        cells = []
        for dim in dimensions:
            cell = summary.cells.get((model, dim))
            cells.append(
                f"{dim}={cell.mean:.2f} ({cell.variance:.2f})" if cell else f"{dim}=-"
            )
        click.echo(f"{model}: " + "  ".join(cells))
    for comparison in summary.comparisons:
        mark = "*" if comparison.significant else " "
        click.echo(
            f"{comparison.model_a} vs {comparison.model_b} "
            f"[{comparison.dimension}]: p={comparison.p_value:.4f}{mark}"
        )
    if csv_out:
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model_id", "dimension", "mean", "variance"])
            for (model, dim), cell in sorted(summary.cells.items()):
                writer.writerow([model, dim, cell.mean, cell.variance])
            writer.writerow([])
            writer.writerow(["model_a", "model_b", "dimension", "p_value", "significant"])
            for c in summary.comparisons:
                writer.writerow([c.model_a, c.model_b, c.dimension, c.p_value, c.significant])
        click.echo(f"summary written to {csv_out}")


main.add_command(evaluate, "eval-model")
main.add_command(ablate, "eval-ablation")


def _main():  # pragma: no cover - console-script shim
    try:
        main(standalone_mode=True)
    except RehabVisionError as error:
        raise click.ClickException(str(error)) from error


if __name__ == "__main__":
    _main()
