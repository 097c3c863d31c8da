"""Windowed inference over session videos and conversion into action segments.

Per-window predictions are voted down to per-frame labels, despeckled with a
short median filter, and run-length encoded into contiguous segments; short
action runs are absorbed into their preceding run so brief mislabelled
flickers never split or pollute a segment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np
import scipy.signal

from .dataset.windows import (
    NO_ACTION,
    NUM_CLASSES,
    WINDOW_SIZE,
    extract_windows,
    sampled_indices,
)
from .errors import DependencyError, MediaError, ValidationError
from .video import copy_frame_range, probe_video, read_frames

DEFAULT_MIN_SEGMENT_FRAMES = 45  # 1.5 s at 30 fps
DEFAULT_MEDIAN_WIDTH = 5
LOW_CONFIDENCE_FLOOR = 0.4


@dataclass(frozen=True)
class WindowPrediction:
    start_frame: int
    label_id: int
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0, 1]")
        if not 0 <= self.label_id < NUM_CLASSES:
            raise ValidationError(f"label {self.label_id} out of range")

    @property
    def end_frame(self) -> int:
        return self.start_frame + WINDOW_SIZE - 1


@dataclass(frozen=True)
class ActionSegment:
    video_id: str
    label_id: int
    start_frame: int
    end_frame: int
    mean_confidence: float
    flagged_low_confidence: bool = False
    subclip_uri: str | None = None

    def __post_init__(self):
        if self.label_id == NO_ACTION or not 0 < self.label_id < NUM_CLASSES:
            raise ValidationError(
                f"segments carry action classes 1..{NUM_CLASSES - 1}, "
                f"got {self.label_id}"
            )
        if self.start_frame < 0 or self.end_frame < self.start_frame:
            raise ValidationError(
                f"invalid span [{self.start_frame}, {self.end_frame}]"
            )
        if not 0.0 <= self.mean_confidence <= 1.0:
            raise ValidationError("mean_confidence outside [0, 1]")

    @property
    def frame_count(self) -> int:
        return self.end_frame - self.start_frame + 1


class WindowClassifier(Protocol):
    """Scores one window; returns a probability distribution over classes."""

    def predict_window(self, frames: np.ndarray, skeleton: np.ndarray) -> np.ndarray:
        """frames (N_f, H, W, 3) RGB uint8, skeleton (N_f, 17) -> (16,)."""
        ...


def predict_windows(
    video_path: str | Path,
    classifier: WindowClassifier,
    skeleton_features: np.ndarray | None = None,
    frame_size: int = 64,
) -> list[WindowPrediction]:
    """One prediction per sliding window of the video, in start order.

    ``skeleton_features`` is the per-frame feature matrix (frame_count, 17);
    pass None only for classifiers that ignore the skeleton stream.
    """
    info = probe_video(video_path)
    starts = extract_windows(info.frame_count)
    if not starts:
        return []
    if skeleton_features is None and getattr(classifier, "requires_skeleton", False):
        raise DependencyError("classifier needs a pose stream but none was provided")
    if skeleton_features is not None:
        skeleton_features = np.asarray(skeleton_features, dtype=np.float64)
        if len(skeleton_features) < info.frame_count:
            raise DependencyError(
                f"pose stream covers {len(skeleton_features)} of "
                f"{info.frame_count} frames"
            )
    needed = sorted({i for start in starts for i in sampled_indices(start)})
    frames_by_index = read_frames(video_path, needed, resize_to=frame_size)

    predictions = []
    for start in starts:
        indices = sampled_indices(start)
        window_frames = np.stack([frames_by_index[i] for i in indices])
        window_skeleton = (
            skeleton_features[indices]
            if skeleton_features is not None
            else np.zeros((len(indices), 17))
        )
        scores = np.asarray(
            classifier.predict_window(window_frames, window_skeleton),
            dtype=np.float64,
        )
        if scores.shape != (NUM_CLASSES,):
            raise ValidationError(
                f"classifier returned shape {scores.shape}, expected ({NUM_CLASSES},)"
            )
        if not np.isclose(scores.sum(), 1.0, atol=1e-5):
            raise ValidationError("classifier scores must sum to 1")
        label = int(np.argmax(scores))
        predictions.append(
            WindowPrediction(
                start_frame=start, label_id=label, confidence=float(scores[label])
            )
        )
    return predictions


def frame_labels(
    predictions: Sequence[WindowPrediction], frame_count: int
) -> np.ndarray:
    """Majority vote per frame over covering windows.

    Ties prefer action classes over "no action", then the earliest window;
    uncovered frames inherit the nearest window's label.  No windows at all
    (video shorter than one window) yields all "no action".
    """
    if frame_count < 0:
        raise ValidationError("frame_count must be non-negative")
    labels = np.full(frame_count, NO_ACTION, dtype=np.int64)
    if not predictions or frame_count == 0:
        return labels

    # votes[frame] = {label: (count, first_window_order)}
    counts = np.zeros((frame_count, NUM_CLASSES), dtype=np.int64)
    first_window = np.full((frame_count, NUM_CLASSES), np.iinfo(np.int64).max)
    for order, pred in enumerate(predictions):
        lo = max(pred.start_frame, 0)
        hi = min(pred.end_frame, frame_count - 1)
        if lo > hi:
            continue
        counts[lo : hi + 1, pred.label_id] += 1
        column = first_window[lo : hi + 1, pred.label_id]
        np.minimum(column, order, out=column)

    covered = counts.sum(axis=1) > 0
    for frame in np.flatnonzero(covered):
        row = counts[frame]
        best = row.max()
        tied = np.flatnonzero(row == best)
        actions = tied[tied != NO_ACTION]
        if len(actions):
            tied = actions
        labels[frame] = tied[np.argmin(first_window[frame, tied])]

    uncovered = np.flatnonzero(~covered)
    if len(uncovered):
        spans = [(p.start_frame, p.end_frame, p.label_id) for p in predictions]
        for frame in uncovered:
            distance, chosen = min(
                (max(lo - frame, frame - hi, 0), label) for lo, hi, label in spans
            )
            labels[frame] = chosen
    return labels


def _run_length_encode(labels: np.ndarray) -> list[list[int]]:
    """[label, start, end] runs, merged over equal adjacent labels."""
    runs: list[list[int]] = []
    for index, label in enumerate(labels):
        if runs and runs[-1][0] == label:
            runs[-1][2] = index
        else:
            runs.append([int(label), index, index])
    return runs


def _absorb_short_action_runs(
    runs: list[list[int]], min_segment_frames: int
) -> list[list[int]]:
    """Relabel action runs shorter than the floor to their preceding run.

    The first run absorbs into the following one instead.  Iterates until
    stable so newly-merged runs are re-examined.
    """
    runs = [list(run) for run in runs]
    changed = True
    while changed:
        changed = False
        for i, (label, start, end) in enumerate(runs):
            if label == NO_ACTION or end - start + 1 >= min_segment_frames:
                continue
            neighbor = i - 1 if i > 0 else (i + 1 if len(runs) > 1 else None)
            if neighbor is None:
                # lone blip shorter than the floor: noise, nothing to merge into
                runs = []
                break
            runs[i][0] = runs[neighbor][0]
            merged = []
            for run in runs:
                if merged and merged[-1][0] == run[0]:
                    merged[-1][2] = run[2]
                else:
                    merged.append(run)
            runs = merged
            changed = True
            break
    return runs


def smooth_and_segment(
    labels: Sequence[int],
    min_segment_frames: int = DEFAULT_MIN_SEGMENT_FRAMES,
    *,
    video_id: str = "",
    predictions: Sequence[WindowPrediction] | None = None,
    median_width: int = DEFAULT_MEDIAN_WIDTH,
) -> list[ActionSegment]:
    """Median-despeckle, absorb short action runs, drop "no action" runs.

    Segment confidence is the mean top-class confidence of windows
    overlapping the segment (1.0 when no predictions are supplied).
    Segments under the low-confidence floor are kept but flagged.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise ValidationError("labels must be a flat sequence")
    if len(labels) == 0:
        return []
    if labels.min() < 0 or labels.max() >= NUM_CLASSES:
        raise ValidationError("labels out of range")
    if min_segment_frames < 1:
        raise ValidationError("min_segment_frames must be positive")

    width = min(median_width, len(labels) - (1 - len(labels) % 2))
    smoothed = scipy.signal.medfilt(labels.astype(np.float64), max(width, 1))
    runs = _run_length_encode(smoothed.astype(np.int64))
    runs = _absorb_short_action_runs(runs, min_segment_frames)

    segments = []
    for label, start, end in runs:
        if label == NO_ACTION:
            continue
        confidence = 1.0
        if predictions is not None:
            overlapping = [
                p.confidence
                for p in predictions
                if p.start_frame <= end and p.end_frame >= start
            ]
            confidence = float(np.mean(overlapping)) if overlapping else 0.0
        segments.append(
            ActionSegment(
                video_id=video_id,
                label_id=label,
                start_frame=start,
                end_frame=end,
                mean_confidence=confidence,
                flagged_low_confidence=confidence < LOW_CONFIDENCE_FLOOR,
            )
        )
    return segments


def segment_video(
    video_path: str | Path,
    classifier: WindowClassifier,
    video_id: str,
    skeleton_features: np.ndarray | None = None,
    min_segment_frames: int = DEFAULT_MIN_SEGMENT_FRAMES,
    frame_size: int = 64,
) -> tuple[list[ActionSegment], list[WindowPrediction]]:
    """predict_windows -> frame_labels -> smooth_and_segment, composed."""
    info = probe_video(video_path)
    predictions = predict_windows(
        video_path, classifier, skeleton_features, frame_size=frame_size
    )
    labels = frame_labels(predictions, info.frame_count)
    segments = smooth_and_segment(
        labels,
        min_segment_frames,
        video_id=video_id,
        predictions=predictions,
    )
    return segments, predictions


def extract_subclips(
    video_path: str | Path,
    segments: Sequence[ActionSegment],
    out_dir: str | Path,
) -> list[ActionSegment]:
    """Write one sub-clip per segment; returns segments with URIs set."""
    if not segments:
        return []
    info = probe_video(video_path)
    out_dir = Path(out_dir)
    results = []
    for segment in segments:
        name = (
            f"{segment.video_id}_action{segment.label_id:02d}"
            f"_{segment.start_frame}_{segment.end_frame}.mp4"
        )
        destination = out_dir / name
        try:
            copy_frame_range(
                video_path,
                destination,
                segment.start_frame,
                segment.end_frame,
                fps=info.fps,
            )
        except MediaError as err:
            raise MediaError(
                f"segment {segment.video_id}[{segment.start_frame}, "
                f"{segment.end_frame}]: {err}"
            ) from err
        results.append(replace(segment, subclip_uri=str(destination)))
    return results


def segments_to_json(segments: Sequence[ActionSegment]) -> str:
    return json.dumps(
        [
            {
                "video_id": s.video_id,
                "label_id": s.label_id,
                "start_frame": s.start_frame,
                "end_frame": s.end_frame,
                "mean_confidence": s.mean_confidence,
                "flagged_low_confidence": s.flagged_low_confidence,
                "subclip_uri": s.subclip_uri,
            }
            for s in segments
        ],
        indent=2,
    )


def segments_from_json(payload: str) -> list[ActionSegment]:
    return [ActionSegment(**row) for row in json.loads(payload)]
