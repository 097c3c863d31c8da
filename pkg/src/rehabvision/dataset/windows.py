"""Sliding-window extraction and window label resolution.

Windows are 60 frames with stride 21; within a window one frame is sampled
every 6 frames, giving 10 sampled frames per window. Label id 0 is the
"no action" class; 1..15 are exercise classes.
"""

from __future__ import annotations

from ..errors import ValidationError

WINDOW_SIZE = 60
WINDOW_STRIDE = 21
SAMPLE_STEP = 6
SAMPLES_PER_WINDOW = 10

NO_ACTION = 0
NUM_CLASSES = 16  # 15 exercises + no action


def extract_windows(frame_count: int) -> list[int]:
    """Start frames of all full windows fitting in ``frame_count`` frames.

    Starts are 0, 21, 42, ... with start + 59 <= frame_count - 1; empty when
    the video is shorter than one window.
    """
    if frame_count < 0:
        raise ValidationError(f"frame_count must be >= 0, got {frame_count}")
    if frame_count < WINDOW_SIZE:
        return []
    return list(range(0, frame_count - WINDOW_SIZE + 1, WINDOW_STRIDE))


def sampled_indices(start_frame: int) -> list[int]:
    """The 10 sampled frame indices of the window starting at ``start_frame``."""
    return [start_frame + SAMPLE_STEP * i for i in range(SAMPLES_PER_WINDOW)]


def resolve_window_label(per_frame_labels: list[int]) -> int:
    """Resolve a window's overall label from its 10 per-frame labels.

    The most frequent label wins. Ties prefer any action label over
    "no action"; a tie between two action labels goes to the one occurring
    earliest in the window.
    """
    if len(per_frame_labels) != SAMPLES_PER_WINDOW:
        raise ValidationError(
            f"expected {SAMPLES_PER_WINDOW} per-frame labels, got {len(per_frame_labels)}"
        )
    counts: dict[int, int] = {}
    first_seen: dict[int, int] = {}
    for pos, label in enumerate(per_frame_labels):
        counts[label] = counts.get(label, 0) + 1
        first_seen.setdefault(label, pos)
    top = max(counts.values())
    tied = [label for label, c in counts.items() if c == top]
    actions = [label for label in tied if label != NO_ACTION]
    if not actions:
        return NO_ACTION
    return min(actions, key=lambda lab: first_seen[lab])
