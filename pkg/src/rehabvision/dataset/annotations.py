"""Timeline annotations: labeled spans over a video's frame axis.

Compatible with exports from timeline labeling tools: a JSON document per
video with inclusive frame spans. Frames outside every span are implicitly
"no action".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ValidationError
from .windows import NO_ACTION, NUM_CLASSES


@dataclass(frozen=True)
class LabelSpan:
    start_frame: int
    end_frame: int  # inclusive
    label_id: int


@dataclass(frozen=True)
class TimelineAnnotation:
    video_id: str
    spans: tuple[LabelSpan, ...]
    fps: float = 30.0

    def __post_init__(self):
        prev_end = -1
        offending = []
        for span in self.spans:
            if not 0 <= span.label_id < NUM_CLASSES:
                raise ValidationError(f"label_id {span.label_id} outside 0..{NUM_CLASSES - 1}")
            if span.start_frame > span.end_frame or span.start_frame < 0:
                raise ValidationError(f"invalid span {span}")
            if span.start_frame <= prev_end:
                offending.append(span)
            prev_end = max(prev_end, span.end_frame)
        if offending:
            raise ValidationError(
                f"annotation for {self.video_id!r} has overlapping or unsorted spans: {offending}"
            )

    def label_at(self, frame: int) -> int:
        for span in self.spans:
            if span.start_frame <= frame <= span.end_frame:
                return span.label_id
        return NO_ACTION

    def frame_labels(self, frame_count: int) -> list[int]:
        labels = [NO_ACTION] * frame_count
        for span in self.spans:
            for f in range(span.start_frame, min(span.end_frame, frame_count - 1) + 1):
                labels[f] = span.label_id
        return labels


def load_annotation(path: str | Path) -> TimelineAnnotation:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    spans = tuple(
        LabelSpan(int(s["start_frame"]), int(s["end_frame"]), int(s["label_id"]))
        for s in data["spans"]
    )
    return TimelineAnnotation(video_id=data["video_id"], spans=spans, fps=float(data.get("fps", 30.0)))


def save_annotation(ann: TimelineAnnotation, path: str | Path) -> None:
    data = {
        "video_id": ann.video_id,
        "fps": ann.fps,
        "spans": [
            {"start_frame": s.start_frame, "end_frame": s.end_frame, "label_id": s.label_id}
            for s in ann.spans
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
