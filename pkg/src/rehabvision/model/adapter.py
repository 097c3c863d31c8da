"""Adapters bridging stored media to the recognizer and the segmenter."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from ..errors import ValidationError
from ..pose.features import FEATURE_DIM
from ..video import read_frames
from .network import ActionRecognizer, ClipBatch


class ModelWindowClassifier:
    """Wraps :class:`ActionRecognizer` for the segmentation pipeline.

    Frames arrive as RGB uint8 (N_f, H, W, 3) already resized to the model's
    input size; skeleton as (N_f, 17) per-frame features.
    """

    requires_skeleton = True

    def __init__(self, model: ActionRecognizer):
        self.model = model.eval()

    @property
    def input_size(self) -> int:
        return self.model.config.image_size

    def predict_window(self, frames: np.ndarray, skeleton: np.ndarray) -> np.ndarray:
        pixels = torch.from_numpy(
            np.ascontiguousarray(frames, dtype=np.float32) / 255.0
        ).permute(0, 3, 1, 2)[None]
        features = torch.from_numpy(
            np.ascontiguousarray(skeleton, dtype=np.float32)
        )[None]
        with torch.no_grad():
            logits = self.model(ClipBatch(frames=pixels, skeleton=features))
            return torch.softmax(logits[0], dim=0).numpy()


class VideoDirClipSource:
    """ClipSource over a directory of ``{video_id}.mp4`` files.

    Skeleton features come from an optional ``{video_id}.skeleton.npy``
    array of shape (frame_count, feature_dim); videos without one get
    zero features, which keeps training runnable on pixel-only corpora.
    """

    def __init__(
        self,
        video_dir: str | Path,
        image_size: int = 64,
        feature_dim: int = FEATURE_DIM,
    ):
        self.video_dir = Path(video_dir)
        self.image_size = image_size
        self.feature_dim = feature_dim

    def video_path(self, video_id: str) -> Path:
        path = self.video_dir / f"{video_id}.mp4"
        if not path.exists():
            raise ValidationError(f"no video file for {video_id!r} at {path}")
        return path

    def raw_frames(
        self, video_id: str, frame_indices: Sequence[int]
    ) -> list[np.ndarray]:
        frames = read_frames(
            self.video_path(video_id), frame_indices, resize_to=self.image_size
        )
        return [frames[i] for i in frame_indices]

    def clip(
        self, video_id: str, frame_indices: Sequence[int]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        stacked = np.stack(self.raw_frames(video_id, frame_indices))
        pixels = torch.from_numpy(
            stacked.astype(np.float32) / 255.0
        ).permute(0, 3, 1, 2)
        skeleton_path = self.video_dir / f"{video_id}.skeleton.npy"
        if skeleton_path.exists():
            features = np.load(skeleton_path)
            if features.ndim != 2 or features.shape[1] != self.feature_dim:
                raise ValidationError(
                    f"{skeleton_path} has shape {features.shape}; expected "
                    f"(frames, {self.feature_dim})"
                )
            try:
                selected = features[list(frame_indices)]
            except IndexError as err:
                raise ValidationError(
                    f"{skeleton_path} covers {features.shape[0]} frames; "
                    f"window needs up to frame {max(frame_indices)}"
                ) from err
            skeleton = torch.from_numpy(selected.astype(np.float32))
        else:
            skeleton = torch.zeros(len(frame_indices), self.feature_dim)
        return pixels, skeleton
