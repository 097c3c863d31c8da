"""Ablation study runner: trains each architecture variant and compares."""

from __future__ import annotations

from dataclasses import dataclass, replace

import torch

from ..errors import ConfigurationError
from ..model.config import VARIANTS, ModelConfig
from ..model.network import ActionRecognizer
from ..model.text import ClassDescription
from ..model.training import TensorClipDataset, TrainConfig, evaluate_model, train_model
from .metrics import MetricReport


@dataclass(frozen=True)
class AblationResult:
    variant: str
    report: MetricReport
    total_parameters: int
    skeleton_parameters: int


def run_ablation(
    variant: str,
    train_set: TensorClipDataset,
    eval_set: TensorClipDataset,
    base_config: ModelConfig,
    train_config: TrainConfig,
    descriptions: tuple[ClassDescription, ...] | None = None,
) -> AblationResult:
    """Train one variant from scratch and evaluate it.

    Seeding happens before model construction so identical seeds give
    identical reports per variant.
    """
    if variant not in VARIANTS:
        raise ConfigurationError(
            f"unknown variant {variant!r}; expected one of {VARIANTS}"
        )
    torch.manual_seed(train_config.seed)
    config = replace(base_config, variant=variant)
    model = ActionRecognizer(config, descriptions=descriptions)
    train_model(model, train_set, eval_set, train_config)
    report = evaluate_model(model, eval_set, batch_size=train_config.batch_size)
    return AblationResult(
        variant=variant,
        report=report,
        total_parameters=sum(p.numel() for p in model.parameters()),
        skeleton_parameters=model.skeleton_parameter_count(),
    )


def run_ablation_suite(
    train_set: TensorClipDataset,
    eval_set: TensorClipDataset,
    base_config: ModelConfig,
    train_config: TrainConfig,
    descriptions: tuple[ClassDescription, ...] | None = None,
) -> dict[str, AblationResult]:
    """One :class:`AblationResult` per variant, in declaration order."""
    return {
        variant: run_ablation(
            variant, train_set, eval_set, base_config, train_config, descriptions
        )
        for variant in VARIANTS
    }
