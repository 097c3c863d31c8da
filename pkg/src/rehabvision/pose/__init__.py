from .features import (
    ANGLE_TRIPLETS,
    DEFAULT_CONFIDENCE_FLOOR,
    DEFAULT_EPS,
    FEATURE_DIM,
    RawKeypoint,
    RawPoseFrame,
    UpperBodyKeypoints,
    frame_features,
    joint_angle,
    joint_angle_gradient,
    select_keypoints,
    sequence_features,
)
from .io import read_keypoint_stream, write_keypoint_stream
from .layout import KEYPOINT_INDEX, KEYPOINT_NAMES, NUM_KEYPOINTS, LayoutMapping

__all__ = [
    "ANGLE_TRIPLETS",
    "DEFAULT_CONFIDENCE_FLOOR",
    "DEFAULT_EPS",
    "FEATURE_DIM",
    "KEYPOINT_INDEX",
    "KEYPOINT_NAMES",
    "NUM_KEYPOINTS",
    "LayoutMapping",
    "RawKeypoint",
    "RawPoseFrame",
    "UpperBodyKeypoints",
    "frame_features",
    "joint_angle",
    "joint_angle_gradient",
    "select_keypoints",
    "sequence_features",
    "read_keypoint_stream",
    "write_keypoint_stream",
]
