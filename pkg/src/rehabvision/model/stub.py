"""Deterministic stand-in window classifier for pipeline and service tests.

Scores a window from its mean frame color: windows whose brightest channel
mean stays under the floor map to "no action", brighter windows map to the
class configured for their dominant channel.  This
keeps end-to-end tests fast and their expected segmentations computable by
hand while exercising the exact interfaces the real model uses.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..dataset.windows import NO_ACTION, NUM_CLASSES
from ..errors import ValidationError

# channel index (R, G, B) -> class label
DEFAULT_CHANNEL_LABELS: Mapping[int, int] = {0: 4, 1: 5, 2: 8}


class ColorStubClassifier:
    """Window classifier keyed on mean frame color."""

    def __init__(
        self,
        channel_labels: Mapping[int, int] | None = None,
        brightness_floor: float = 32.0,
        confidence: float = 0.9,
        num_classes: int = NUM_CLASSES,
    ):
        self.channel_labels = dict(
            DEFAULT_CHANNEL_LABELS if channel_labels is None else channel_labels
        )
        for label in self.channel_labels.values():
            if not 0 <= label < num_classes:
                raise ValidationError(f"stub label {label} out of range")
        self.brightness_floor = brightness_floor
        self.confidence = confidence
        self.num_classes = num_classes

    def predict_window(self, frames: np.ndarray, skeleton: np.ndarray) -> np.ndarray:
        """Scores (num_classes,) for frames (N_f, H, W, 3) RGB."""
        frames = np.asarray(frames, dtype=np.float64)
        if frames.ndim != 4 or frames.shape[-1] != 3:
            raise ValidationError(
                f"expected frames (N_f, H, W, 3), got {frames.shape}"
            )
        channel_means = frames.mean(axis=(0, 1, 2))
        if channel_means.max() < self.brightness_floor:
            label = NO_ACTION
        else:
            label = self.channel_labels[int(np.argmax(channel_means))]
        rest = (1.0 - self.confidence) / (self.num_classes - 1)
        scores = np.full(self.num_classes, rest)
        scores[label] = self.confidence
        return scores
