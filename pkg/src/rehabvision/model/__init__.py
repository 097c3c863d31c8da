"""Dual-stream action recognition model, training loop and checkpoints."""

from .adapter import ModelWindowClassifier, VideoDirClipSource
from .config import VARIANTS, ModelConfig
from .network import (
    ActionRecognizer,
    ClipBatch,
    CrossModalEnhance,
    GuidedSpatialTransformer,
    PatchVisionEncoder,
    SkeletonBiLSTM,
    SkeletonMLP,
    cosine_logits,
)
from .stub import ColorStubClassifier
from .text import (
    ClassDescription,
    HashingTokenizer,
    descriptions_fingerprint,
    load_class_descriptions,
)
from .training import (
    ClipSource,
    TensorClipDataset,
    TrainConfig,
    TrainResult,
    dataset_from_samples,
    evaluate_model,
    load_checkpoint,
    save_checkpoint,
    train_from_manifest,
    train_model,
)

__all__ = [
    "VARIANTS",
    "ModelConfig",
    "ModelWindowClassifier",
    "VideoDirClipSource",
    "ActionRecognizer",
    "ClipBatch",
    "CrossModalEnhance",
    "GuidedSpatialTransformer",
    "PatchVisionEncoder",
    "SkeletonBiLSTM",
    "SkeletonMLP",
    "cosine_logits",
    "ColorStubClassifier",
    "ClassDescription",
    "HashingTokenizer",
    "descriptions_fingerprint",
    "load_class_descriptions",
    "ClipSource",
    "TensorClipDataset",
    "TrainConfig",
    "TrainResult",
    "dataset_from_samples",
    "evaluate_model",
    "load_checkpoint",
    "save_checkpoint",
    "train_from_manifest",
    "train_model",
]
