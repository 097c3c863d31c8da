"""Canonical upper-body keypoint layout and estimator layout mappings.

The pipeline consumes 13 named upper-body points per frame. Which indices
(or names) of a pose estimator's output correspond to those 13 names is
configuration, not code: a layout mapping file maps each canonical name to
either an integer index or a source-specific name, so any provider emitting
(x, y, z, confidence) records can be adapted.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..errors import ConfigurationError

# Canonical order of the 13 upper-body keypoints. Feature vectors, masks and
# imputation all index by this order; do not reorder.
KEYPOINT_NAMES: tuple[str, ...] = (
    "nose",
    "neck",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "mid_hip",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
)

NUM_KEYPOINTS = len(KEYPOINT_NAMES)

KEYPOINT_INDEX = {name: i for i, name in enumerate(KEYPOINT_NAMES)}


class LayoutMapping:
    """Maps the 13 canonical keypoint names onto a source layout.

    ``mapping`` values are either integer indices into the source keypoint
    list or source keypoint names.
    """

    def __init__(self, name: str, mapping: dict[str, int | str]):
        missing = [k for k in KEYPOINT_NAMES if k not in mapping]
        if missing:
            raise ConfigurationError(f"layout mapping {name!r} lacks entries for: {missing}")
        self.name = name
        self.mapping = {k: mapping[k] for k in KEYPOINT_NAMES}

    @classmethod
    def from_file(cls, path: str | Path) -> "LayoutMapping":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(data.get("name", Path(path).stem), data["mapping"])

    @classmethod
    def builtin(cls, name: str) -> "LayoutMapping":
        """Load a mapping shipped with the package (e.g. ``body25``)."""
        ref = resources.files("rehabvision.assets.keypoint_layouts").joinpath(f"{name}.json")
        with ref.open("r", encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(data.get("name", name), data["mapping"])
