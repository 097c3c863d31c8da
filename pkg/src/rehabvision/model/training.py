"""Training loop, evaluation and checkpointing for the action recognizer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Protocol, Sequence

import numpy as np
import torch
from torch import nn

from ..dataset.builder import BuiltDataset, WindowSample
from ..errors import ConfigurationError, ValidationError

if TYPE_CHECKING:
    from ..evaluation.metrics import MetricReport
from .config import ModelConfig
from .network import ActionRecognizer, ClipBatch
from .text import ClassDescription, descriptions_fingerprint, load_class_descriptions

CHECKPOINT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1
    batch_size: int = 8
    learning_rate: float = 1e-4
    weight_decay: float = 0.0
    seed: int = 0
    cosine_schedule: bool = True
    max_steps: int | None = None

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigurationError("max_steps must be positive when set")


class TensorClipDataset:
    """In-memory clip dataset: frames (N, N_f, 3, H, W), skeleton, labels."""

    def __init__(
        self, frames: torch.Tensor, skeleton: torch.Tensor, labels: torch.Tensor
    ):
        if not len(frames) == len(skeleton) == len(labels):
            raise ValidationError("frames, skeleton and labels must align")
        if len(frames) == 0:
            raise ValidationError("dataset is empty")
        self.frames = frames.float()
        self.skeleton = skeleton.float()
        self.labels = labels.long()

    def __len__(self) -> int:
        return len(self.labels)

    def batch(self, indices: torch.Tensor) -> tuple[ClipBatch, torch.Tensor]:
        return (
            ClipBatch(frames=self.frames[indices], skeleton=self.skeleton[indices]),
            self.labels[indices],
        )


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)
    first_step_loss: float = float("nan")
    best_epoch: int = -1
    best_val_f1: float = -1.0
    best_state: dict | None = None
    steps_run: int = 0


def _batches(n: int, batch_size: int, generator: torch.Generator):
    perm = torch.randperm(n, generator=generator)
    for lo in range(0, n, batch_size):
        yield perm[lo : lo + batch_size]


def evaluate_model(
    model: ActionRecognizer, dataset: TensorClipDataset, batch_size: int = 16
) -> "MetricReport":
    # runtime import: evaluation.ablation imports this module back
    from ..evaluation.metrics import compute_metrics

    model.eval()
    scores, labels = [], []
    with torch.no_grad():
        for lo in range(0, len(dataset), batch_size):
            idx = torch.arange(lo, min(lo + batch_size, len(dataset)))
            batch, y = dataset.batch(idx)
            scores.append(model(batch).cpu().numpy())
            labels.append(y.numpy())
    return compute_metrics(
        np.concatenate(labels),
        np.concatenate(scores),
        num_classes=model.config.num_classes,
    )


def train_model(
    model: ActionRecognizer,
    train_set: TensorClipDataset,
    val_set: TensorClipDataset,
    config: TrainConfig,
) -> TrainResult:
    """Cross-entropy training with per-epoch validation.

    The best checkpoint is selected on validation weighted F1 (first epoch
    wins ties).  Fully deterministic for a fixed seed on CPU.
    """
    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    steps_per_epoch = math.ceil(len(train_set) / config.batch_size)
    total_steps = config.epochs * steps_per_epoch
    if config.max_steps is not None:
        total_steps = min(total_steps, config.max_steps)
    scheduler = (
        torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=max(total_steps, 1))
        if config.cosine_schedule
        else None
    )
    loss_fn = nn.CrossEntropyLoss()
    generator = torch.Generator().manual_seed(config.seed)

    result = TrainResult()
    step = 0
    for epoch in range(config.epochs):
        model.train()
        epoch_losses = []
        for indices in _batches(len(train_set), config.batch_size, generator):
            batch, labels = train_set.batch(indices)
            optimizer.zero_grad()
            loss = loss_fn(model(batch), labels)
            loss.backward()
            optimizer.step()
            if scheduler is not None:
                scheduler.step()
            if step == 0:
                result.first_step_loss = float(loss.detach())
            epoch_losses.append(float(loss.detach()))
            step += 1
            if config.max_steps is not None and step >= config.max_steps:
                break

        report = evaluate_model(model, val_set, batch_size=config.batch_size)
        result.history.append(
            {
                "epoch": epoch,
                "train_loss": float(np.mean(epoch_losses)) if epoch_losses else None,
                "val_weighted_f1": report.weighted_f1,
                "val_top1": report.top1_accuracy,
            }
        )
        if report.weighted_f1 > result.best_val_f1:
            result.best_val_f1 = report.weighted_f1
            result.best_epoch = epoch
            result.best_state = {
                k: v.detach().clone() for k, v in model.state_dict().items()
            }
        if config.max_steps is not None and step >= config.max_steps:
            break

    result.steps_run = step
    return result


# -- manifest-driven training ------------------------------------------------


class ClipSource(Protocol):
    """Provides pixel frames and skeleton features for a window sample."""

    def clip(
        self, video_id: str, frame_indices: Sequence[int]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Return (frames (N_f, 3, H, W), skeleton (N_f, feature_dim))."""
        ...


def dataset_from_samples(
    samples: Sequence[WindowSample], source: ClipSource
) -> TensorClipDataset:
    if not samples:
        raise ValidationError("no samples in split")
    frames, skeletons, labels = [], [], []
    for sample in samples:
        clip_frames, clip_skeleton = source.clip(
            sample.video_id, sample.sampled_frame_indices
        )
        frames.append(clip_frames)
        skeletons.append(clip_skeleton)
        labels.append(sample.window_label)
    return TensorClipDataset(
        torch.stack(frames), torch.stack(skeletons), torch.tensor(labels)
    )


def train_from_manifest(
    built: BuiltDataset,
    source: ClipSource,
    model_config: ModelConfig,
    train_config: TrainConfig,
    descriptions: tuple[ClassDescription, ...] | None = None,
) -> tuple[ActionRecognizer, TrainResult]:
    """Train on a built dataset's train split, validating on its val split.

    Falls back to validating on the train split when no val samples exist.
    Every label present in the dataset must have a class description.
    """
    descriptions = descriptions or load_class_descriptions()
    known = {d.label_id for d in descriptions}
    seen = {
        label
        for histogram in built.manifest.label_histograms.values()
        for label in histogram
    }
    missing = sorted(seen - known)
    if missing:
        raise ConfigurationError(f"no class description for labels {missing}")

    torch.manual_seed(train_config.seed)
    model = ActionRecognizer(model_config, descriptions=descriptions)
    train_set = dataset_from_samples(built.samples["train"], source)
    val_samples = built.samples.get("val") or built.samples["train"]
    val_set = dataset_from_samples(val_samples, source)
    result = train_model(model, train_set, val_set, train_config)
    return model, result


# -- checkpoints ---------------------------------------------------------------


def save_checkpoint(
    path: str | Path,
    model: ActionRecognizer,
    history: list[dict] | None = None,
) -> None:
    payload = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "model_config": model.config.to_dict(),
        "state_dict": model.state_dict(),
        "class_descriptions": [
            {"label_id": d.label_id, "name": d.name, "description": d.description}
            for d in model.descriptions
        ],
        "class_fingerprint": descriptions_fingerprint(model.descriptions),
        "history": history or [],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)


def load_checkpoint(path: str | Path) -> tuple[ActionRecognizer, dict]:
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    if payload.get("format_version") != CHECKPOINT_FORMAT_VERSION:
        raise ConfigurationError(
            f"unsupported checkpoint format {payload.get('format_version')!r}"
        )
    descriptions = tuple(
        ClassDescription(**row) for row in payload["class_descriptions"]
    )
    if descriptions_fingerprint(descriptions) != payload["class_fingerprint"]:
        raise ConfigurationError("checkpoint class descriptions fail fingerprint check")
    model = ActionRecognizer(
        ModelConfig.from_dict(payload["model_config"]), descriptions=descriptions
    )
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, payload
