"""Line-delimited JSON keypoint stream format.

One record per frame::

    {"frame_index": 0, "image_size": [640, 480],
     "keypoints": [{"x": ..., "y": ..., "z": ..., "confidence": ..., "name": "..."}, ...]}

``name`` is optional when the layout mapping is index-based.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Iterator

from ..errors import ValidationError
from .features import RawKeypoint, RawPoseFrame


def frame_to_record(frame: RawPoseFrame) -> dict:
    return {
        "frame_index": frame.frame_index,
        "image_size": list(frame.image_size),
        "keypoints": [
            {k: v for k, v in
             (("x", kp.x), ("y", kp.y), ("z", kp.z), ("confidence", kp.confidence), ("name", kp.name))
             if v is not None}
            for kp in frame.keypoints
        ],
    }


def record_to_frame(record: dict) -> RawPoseFrame:
    try:
        kps = tuple(
            RawKeypoint(
                x=float(k["x"]), y=float(k["y"]), z=float(k.get("z", 0.0)),
                confidence=float(k["confidence"]), name=k.get("name"),
            )
            for k in record["keypoints"]
        )
        return RawPoseFrame(
            keypoints=kps,
            frame_index=int(record["frame_index"]),
            image_size=tuple(record["image_size"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed keypoint record: {exc}") from exc


def write_keypoint_stream(frames: Iterable[RawPoseFrame], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(json.dumps(frame_to_record(frame)) + "\n")


def read_keypoint_stream(source: str | Path | IO[str]) -> Iterator[RawPoseFrame]:
    def _iter(fh):
        for line in fh:
            line = line.strip()
            if line:
                yield record_to_frame(json.loads(line))

    if hasattr(source, "read"):
        yield from _iter(source)
    else:
        with open(source, "r", encoding="utf-8") as fh:
            yield from _iter(fh)
