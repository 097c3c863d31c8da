/** Framing-check decision, mirroring the service's rule exactly.
 *
 * In frame iff both shoulders clear the confidence floor and sit inside the
 * image; coordinates use the top-left origin, so valid x is [0, width) and
 * y is [0, height). Reason strings match the service so prompts agree no
 * matter which side ran the check.
 */

export const DEFAULT_CONFIDENCE_FLOOR = 0.3;
export const DEFAULT_IMAGE_SIZE: readonly [number, number] = [640, 480];

export interface ShoulderKeypoint {
  x: number;
  y: number;
  confidence: number;
}

export interface FramingResult {
  inFrame: boolean;
  reason: string;
}

function checkOne(
  side: string,
  kp: ShoulderKeypoint,
  width: number,
  height: number,
  floor: number,
): string | null {
  if (!(kp.confidence >= 0 && kp.confidence <= 1)) {
    throw new RangeError(`confidence ${kp.confidence} outside [0, 1]`);
  }
  if (kp.confidence < floor) {
    return `${side} shoulder confidence ${kp.confidence.toFixed(2)} below ${floor.toFixed(2)}`;
  }
  if (!(kp.x >= 0 && kp.x < width && kp.y >= 0 && kp.y < height)) {
    return `${side} shoulder at (${Math.round(kp.x)}, ${Math.round(kp.y)}) outside ${width}x${height}`;
  }
  return null;
}

export function framingCheck(
  leftShoulder: ShoulderKeypoint,
  rightShoulder: ShoulderKeypoint,
  imageSize: readonly [number, number] = DEFAULT_IMAGE_SIZE,
  confidenceFloor: number = DEFAULT_CONFIDENCE_FLOOR,
): FramingResult {
  const [width, height] = imageSize;
  if (width < 1 || height < 1) {
    throw new RangeError(`image size ${width}x${height} must be positive`);
  }
  for (const [side, kp] of [
    ["left", leftShoulder],
    ["right", rightShoulder],
  ] as const) {
    const reason = checkOne(side, kp, width, height, confidenceFloor);
    if (reason !== null) {
      return { inFrame: false, reason };
    }
  }
  return { inFrame: true, reason: "both shoulders visible" };
}
