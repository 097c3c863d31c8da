"""Per-frame skeleton feature engineering.

Each frame of 3D pose output is reduced to a 17-dimensional feature vector:
13 per-keypoint scalars (Euclidean distance from the mid-shoulder point,
normalized by shoulder width, which makes them scale- and rigid-motion
invariant) followed by 4 joint angles in radians, in the fixed order
left elbow, right elbow, left shoulder, right shoulder.

Angle triplets follow kinematic-tree adjacency:

* elbow angle: (shoulder, elbow, wrist)
* shoulder angle: (neck, shoulder, elbow)

All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import KeypointLayoutError, ValidationError
from .layout import KEYPOINT_INDEX, KEYPOINT_NAMES, NUM_KEYPOINTS, LayoutMapping

FEATURE_DIM = 17

DEFAULT_CONFIDENCE_FLOOR = 0.3
DEFAULT_EPS = 1e-8

# (angle name, (a, b, c)) where the angle sits at joint b.
ANGLE_TRIPLETS: tuple[tuple[str, tuple[str, str, str]], ...] = (
    ("left_elbow", ("left_shoulder", "left_elbow", "left_wrist")),
    ("right_elbow", ("right_shoulder", "right_elbow", "right_wrist")),
    ("left_shoulder", ("neck", "left_shoulder", "left_elbow")),
    ("right_shoulder", ("neck", "right_shoulder", "right_elbow")),
)


@dataclass(frozen=True)
class RawKeypoint:
    x: float
    y: float
    z: float
    confidence: float
    name: str | None = None


@dataclass(frozen=True)
class RawPoseFrame:
    """One frame of full-body estimator output."""

    keypoints: tuple[RawKeypoint, ...]
    frame_index: int
    image_size: tuple[int, int]  # (width, height) in pixels

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValidationError(f"frame_index must be >= 0, got {self.frame_index}")
        for kp in self.keypoints:
            if not 0.0 <= kp.confidence <= 1.0:
                raise ValidationError(f"keypoint confidence {kp.confidence} outside [0, 1]")


@dataclass(frozen=True)
class UpperBodyKeypoints:
    """The 13 canonical upper-body points of one frame, in fixed order."""

    points: np.ndarray  # (13, 3) float
    valid_mask: np.ndarray = field(default_factory=lambda: np.ones(NUM_KEYPOINTS, dtype=bool))

    def __post_init__(self):
        if self.points.shape != (NUM_KEYPOINTS, 3):
            raise ValidationError(f"expected ({NUM_KEYPOINTS}, 3) points, got {self.points.shape}")
        if self.valid_mask.shape != (NUM_KEYPOINTS,):
            raise ValidationError(f"expected ({NUM_KEYPOINTS},) mask, got {self.valid_mask.shape}")


def select_keypoints(
    frame: RawPoseFrame,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
    layout: LayoutMapping | None = None,
) -> UpperBodyKeypoints:
    """Extract the 13 canonical points from a full-body frame.

    ``layout`` maps canonical names to source indices or names; defaults to
    the builtin 25-point mapping. A point whose confidence falls below
    ``confidence_floor`` is kept positionally but marked invalid.

    Raises:
        KeypointLayoutError: the source layout lacks a required point.
    """
    if layout is None:
        layout = LayoutMapping.builtin("body25")
    by_name = {kp.name: kp for kp in frame.keypoints if kp.name is not None}

    points = np.zeros((NUM_KEYPOINTS, 3), dtype=float)
    mask = np.zeros(NUM_KEYPOINTS, dtype=bool)
    for i, canon in enumerate(KEYPOINT_NAMES):
        ref = layout.mapping[canon]
        if isinstance(ref, int):
            if ref >= len(frame.keypoints):
                raise KeypointLayoutError(canon)
            kp = frame.keypoints[ref]
        else:
            kp = by_name.get(ref)
            if kp is None:
                raise KeypointLayoutError(canon)
        points[i] = (kp.x, kp.y, kp.z)
        mask[i] = kp.confidence >= confidence_floor
    return UpperBodyKeypoints(points=points, valid_mask=mask)


def joint_angle(p_a, p_b, p_c, eps: float = DEFAULT_EPS) -> float:
    """Angle at joint b formed by limb vectors (a-b) and (c-b), in [0, pi].

    The denominator is floored at eps so degenerate (zero-length) limbs
    yield a defined value without perturbing non-degenerate inputs; the
    cosine is clamped to [-1, 1] before arccos as a floating-point guard.
    """
    if eps <= 0:
        raise ValidationError(f"eps must be > 0, got {eps}")
    u = np.asarray(p_a, dtype=float) - np.asarray(p_b, dtype=float)
    v = np.asarray(p_c, dtype=float) - np.asarray(p_b, dtype=float)
    if not (np.isfinite(u).all() and np.isfinite(v).all()):
        raise ValidationError("joint_angle requires finite coordinates")
    cos = np.dot(u, v) / max(np.linalg.norm(u) * np.linalg.norm(v), eps)
    return float(np.arccos(np.clip(cos, -1.0, 1.0)))


def joint_angle_gradient(p_a, p_b, p_c) -> np.ndarray:
    """Analytic gradient of :func:`joint_angle` w.r.t. (p_a, p_b, p_c).

    Returns a (3, 3) array whose rows are d(theta)/d(p_a), d(theta)/d(p_b),
    d(theta)/d(p_c). Valid away from the collinear singularity (|cos| = 1)
    and for non-degenerate limbs.
    """
    a = np.asarray(p_a, dtype=float)
    b = np.asarray(p_b, dtype=float)
    c = np.asarray(p_c, dtype=float)
    u = a - b
    v = c - b
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("gradient undefined for zero-length limb")
    g = np.dot(u, v) / (nu * nv)
    g = float(np.clip(g, -1.0, 1.0))
    denom = np.sqrt(max(1.0 - g * g, 0.0))
    if denom == 0.0:
        raise ValidationError("gradient undefined at the collinear singularity")
    scale = -1.0 / denom
    dg_du = (v - np.dot(u, v) * u / nu**2) / (nu * nv)
    dg_dv = (u - np.dot(u, v) * v / nv**2) / (nu * nv)
    grad_a = scale * dg_du
    grad_c = scale * dg_dv
    grad_b = -(grad_a + grad_c)
    return np.stack([grad_a, grad_b, grad_c])


def frame_features(kp: UpperBodyKeypoints, eps: float = DEFAULT_EPS) -> np.ndarray:
    """17-dim feature vector for one frame: 13 scalars then 4 angles.

    Scalar i is ||point_i - mid_shoulder|| / shoulder_width. Invalid points
    zero their scalar; an angle whose triplet touches an invalid point is
    zeroed. If either shoulder is invalid the normalization root is
    undefined and the whole vector is zeroed.
    """
    pts = kp.points
    if not np.isfinite(pts[kp.valid_mask]).all():
        raise ValidationError("frame_features requires finite coordinates for valid points")
    mask = kp.valid_mask
    out = np.zeros(FEATURE_DIM, dtype=float)

    ls, rs = KEYPOINT_INDEX["left_shoulder"], KEYPOINT_INDEX["right_shoulder"]
    if not (mask[ls] and mask[rs]):
        return out

    mid_shoulder = (pts[ls] + pts[rs]) / 2.0
    shoulder_width = np.linalg.norm(pts[ls] - pts[rs])
    dists = np.linalg.norm(pts - mid_shoulder, axis=1) / max(shoulder_width, eps)
    out[:NUM_KEYPOINTS] = np.where(mask, dists, 0.0)

    for j, (_, (na, nb, nc)) in enumerate(ANGLE_TRIPLETS):
        ia, ib, ic = KEYPOINT_INDEX[na], KEYPOINT_INDEX[nb], KEYPOINT_INDEX[nc]
        if mask[ia] and mask[ib] and mask[ic]:
            out[NUM_KEYPOINTS + j] = joint_angle(pts[ia], pts[ib], pts[ic], eps=eps)
    return out


def _impute_track(coords: np.ndarray, valid: np.ndarray) -> tuple[np.ndarray, bool]:
    """Fill invalid frames of one keypoint track.

    Interior gaps are linearly interpolated between the nearest valid frames
    on both sides; leading/trailing gaps hold the nearest valid value. A
    track with no valid frame stays zero. Returns the filled track and
    whether any valid frame existed.
    """
    n = coords.shape[0]
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return np.zeros_like(coords), False
    filled = coords.copy()
    t = np.arange(n)
    for d in range(coords.shape[1]):
        filled[:, d] = np.interp(t, idx, coords[idx, d])
    return filled, True


def sequence_features(
    frames: list[RawPoseFrame],
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
    layout: LayoutMapping | None = None,
    eps: float = DEFAULT_EPS,
) -> np.ndarray:
    """Feature matrix (n_frames, 17) for a frame sequence.

    Missing keypoints are imputed per track before feature extraction; a
    keypoint invalid across the whole sequence stays invalid (zero scalar,
    zeroed dependent angles). Never produces non-finite values.
    """
    if not frames:
        raise ValidationError("sequence_features requires a non-empty frame list")
    indices = [f.frame_index for f in frames]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValidationError("frames must be in ascending frame_index order")
    if layout is None:
        layout = LayoutMapping.builtin("body25")

    selected = [select_keypoints(f, confidence_floor, layout) for f in frames]
    coords = np.stack([s.points for s in selected])  # (N, 13, 3)
    valid = np.stack([s.valid_mask for s in selected])  # (N, 13)
    coords = np.where(np.isfinite(coords), coords, 0.0)

    filled = np.zeros_like(coords)
    track_ok = np.zeros(NUM_KEYPOINTS, dtype=bool)
    for k in range(NUM_KEYPOINTS):
        filled[:, k, :], track_ok[k] = _impute_track(coords[:, k, :], valid[:, k])

    out = np.zeros((len(frames), FEATURE_DIM), dtype=float)
    mask = np.broadcast_to(track_ok, (len(frames), NUM_KEYPOINTS)).copy()
    for i in range(len(frames)):
        out[i] = frame_features(UpperBodyKeypoints(points=filled[i], valid_mask=mask[i]), eps=eps)
    return out
