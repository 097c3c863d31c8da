"""Configuration for the dual-stream action recognizer."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ..errors import ConfigurationError
from ..pose.features import FEATURE_DIM

VARIANTS = ("full", "no_skeleton", "mlp_skeleton_encoder", "mlp_guided_fuse")


@dataclass(frozen=True)
class ModelConfig:
    """Hyperparameters and variant switches for :class:`ActionRecognizer`.

    ``variant`` selects the architecture:

    - ``full``: BiLSTM skeleton encoder + transformer-decoder guided fusion.
    - ``no_skeleton``: skeleton path removed entirely; the spatial stream is
      the raw frame features (the vision-language reference architecture).
    - ``mlp_skeleton_encoder``: BiLSTM replaced by a per-frame MLP whose
      hidden width matches the recurrent encoder's hidden size.
    - ``mlp_guided_fuse``: guided fusion replaced by concatenation + MLP
      whose hidden width matches the transformer feed-forward width.
    """

    num_classes: int = 16
    feature_dim: int = FEATURE_DIM
    frames_per_clip: int = 10
    image_size: int = 64
    patch_size: int = 16
    embed_dim: int = 64
    vision_layers: int = 2
    vision_heads: int = 4
    lstm_hidden: int = 64
    lstm_layers: int = 1
    fuse_layers: int = 1
    fuse_heads: int = 4
    motion_layers: int = 1
    motion_heads: int = 4
    text_layers: int = 2
    text_heads: int = 4
    transformer_ff: int = 128
    vocab_size: int = 4096
    max_text_tokens: int = 64
    prompt_tokens: int = 4
    variant: str = "full"
    # exp(tau) starts at ~14.29 and is capped at 100 during training
    tau_init: float = math.log(14.29)
    tau_max: float = 100.0
    eps: float = 1e-8

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        if self.image_size % self.patch_size != 0:
            raise ConfigurationError("image_size must be a multiple of patch_size")
        for name in ("vision_heads", "fuse_heads", "motion_heads", "text_heads"):
            if self.embed_dim % getattr(self, name) != 0:
                raise ConfigurationError(f"embed_dim must be divisible by {name}")
        for name in (
            "num_classes",
            "feature_dim",
            "frames_per_clip",
            "embed_dim",
            "lstm_hidden",
            "prompt_tokens",
            "max_text_tokens",
        ):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.vocab_size < 8:
            raise ConfigurationError("vocab_size too small for reserved tokens")
        if self.tau_max <= 0:
            raise ConfigurationError("tau_max must be positive")

    @property
    def patches_per_frame(self) -> int:
        return (self.image_size // self.patch_size) ** 2

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "ModelConfig":
        return cls(**payload)
