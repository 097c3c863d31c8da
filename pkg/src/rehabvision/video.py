"""Video decoding/encoding helpers shared by segmentation and reporting.

All frame arrays are RGB uint8 ``(H, W, 3)``; conversion to/from OpenCV's
BGR happens only inside this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import cv2
import numpy as np

from .errors import MediaError


@dataclass(frozen=True)
class VideoInfo:
    frame_count: int
    fps: float
    width: int
    height: int

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps


def _open_capture(path: str | Path) -> cv2.VideoCapture:
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise MediaError(f"cannot open video {path}")
    return capture


def probe_video(path: str | Path) -> VideoInfo:
    capture = _open_capture(path)
    try:
        info = VideoInfo(
            frame_count=int(capture.get(cv2.CAP_PROP_FRAME_COUNT)),
            fps=float(capture.get(cv2.CAP_PROP_FPS)),
            width=int(capture.get(cv2.CAP_PROP_FRAME_WIDTH)),
            height=int(capture.get(cv2.CAP_PROP_FRAME_HEIGHT)),
        )
    finally:
        capture.release()
    if info.frame_count <= 0 or info.fps <= 0:
        raise MediaError(f"video {path} has no decodable frames")
    return info


def iter_frames(path: str | Path) -> Iterator[np.ndarray]:
    """Sequential RGB frames."""
    capture = _open_capture(path)
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                return
            yield cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)
    finally:
        capture.release()


def read_frames(
    path: str | Path,
    indices: Sequence[int],
    resize_to: int | None = None,
) -> dict[int, np.ndarray]:
    """Read selected frames in one sequential pass.

    Returns index -> RGB frame, optionally resized to a square.  Missing
    indices (beyond the stream) raise a media error.
    """
    wanted = sorted(set(int(i) for i in indices))
    if wanted and wanted[0] < 0:
        raise MediaError(f"negative frame index {wanted[0]}")
    out: dict[int, np.ndarray] = {}
    if not wanted:
        return out
    remaining = set(wanted)
    for position, frame in enumerate(iter_frames(path)):
        if position in remaining:
            if resize_to is not None:
                frame = cv2.resize(
                    frame, (resize_to, resize_to), interpolation=cv2.INTER_AREA
                )
            out[position] = frame
            remaining.discard(position)
            if not remaining:
                break
    if remaining:
        raise MediaError(
            f"video {path} ended before frames {sorted(remaining)[:5]}"
        )
    return out


def write_video(path: str | Path, frames: Sequence[np.ndarray], fps: float) -> None:
    if not frames:
        raise MediaError("refusing to write an empty video")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width = frames[0].shape[:2]
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"mp4v"), fps, (width, height)
    )
    if not writer.isOpened():
        raise MediaError(f"cannot open encoder for {path}")
    try:
        for frame in frames:
            writer.write(cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
    finally:
        writer.release()


def copy_frame_range(
    src: str | Path, dst: str | Path, start_frame: int, end_frame: int, fps: float
) -> int:
    """Stream frames [start_frame, end_frame] from src into a new file.

    Returns the number of frames written; never buffers the whole clip.
    """
    if start_frame < 0 or end_frame < start_frame:
        raise MediaError(f"invalid frame range [{start_frame}, {end_frame}]")
    dst = Path(dst)
    dst.parent.mkdir(parents=True, exist_ok=True)
    writer = None
    written = 0
    try:
        for position, frame in enumerate(iter_frames(src)):
            if position < start_frame:
                continue
            if position > end_frame:
                break
            if writer is None:
                height, width = frame.shape[:2]
                writer = cv2.VideoWriter(
                    str(dst), cv2.VideoWriter_fourcc(*"mp4v"), fps, (width, height)
                )
                if not writer.isOpened():
                    raise MediaError(f"cannot open encoder for {dst}")
            writer.write(cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
            written += 1
    finally:
        if writer is not None:
            writer.release()
    expected = end_frame - start_frame + 1
    if written != expected:
        raise MediaError(
            f"clip {dst} truncated: wrote {written} of {expected} frames"
        )
    return written
