"""Pure framing-check decision shared by service tests and clients.

The recording client samples this at 1 Hz and pauses capture whenever the
result is out-of-frame; the rule lives here so every caller agrees on it.
"""

from dataclasses import dataclass

from ..errors import ValidationError

DEFAULT_CONFIDENCE_FLOOR = 0.3


@dataclass(frozen=True)
class ShoulderKeypoint:
    x: float
    y: float
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(
                f"confidence {self.confidence} outside [0, 1]"
            )


@dataclass(frozen=True)
class FramingResult:
    in_frame: bool
    reason: str


def _check_one(side: str, kp: ShoulderKeypoint, width: int, height: int,
               floor: float) -> str | None:
    if kp.confidence < floor:
        return f"{side} shoulder confidence {kp.confidence:.2f} below {floor:.2f}"
    if not (0 <= kp.x < width and 0 <= kp.y < height):
        return f"{side} shoulder at ({kp.x:.0f}, {kp.y:.0f}) outside {width}x{height}"
    return None


def framing_check(
    left_shoulder: ShoulderKeypoint,
    right_shoulder: ShoulderKeypoint,
    image_size: tuple[int, int],
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
) -> FramingResult:
    """In frame iff both shoulders are confident and inside the image.

    ``image_size`` is (width, height); coordinates are pixel positions with
    the usual top-left origin, so valid x is [0, width) and y is [0, height).
    """
    width, height = image_size
    if width < 1 or height < 1:
        raise ValidationError(f"image size {image_size} must be positive")
    for side, kp in (("left", left_shoulder), ("right", right_shoulder)):
        reason = _check_one(side, kp, width, height, confidence_floor)
        if reason is not None:
            return FramingResult(in_frame=False, reason=reason)
    return FramingResult(in_frame=True, reason="both shoulders visible")
