/** Recording loop: sample the pose at 1 Hz and gate capture on framing.
 *
 * Each tick runs the shared framing check; an out-of-frame result pauses
 * capture and raises the reposition prompt, and nothing is handed to the
 * uploader until a later check passes again. `paused` is set from the last
 * check result and nowhere else, so paused always means the most recent
 * check was out-of-frame.
 */

import {
  DEFAULT_CONFIDENCE_FLOOR,
  DEFAULT_IMAGE_SIZE,
  framingCheck,
  type FramingResult,
  type ShoulderKeypoint,
} from "./framing";

export const CHECK_INTERVAL_MS = 1000;
export const REPOSITION_PROMPT =
  "Recording paused — please reposition so both shoulders are visible.";
export const CAMERA_ERROR_PROMPT =
  "Camera unavailable. Check browser permissions and close other apps using it, then try again.";

export interface PoseSample {
  left: ShoulderKeypoint;
  right: ShoulderKeypoint;
}

/** Returns the current pose, or null when no person is detected. */
export type PoseProvider = () => PoseSample | null;

export type CameraStatus = "idle" | "recording" | "error";

export interface RecordingState {
  camera: CameraStatus;
  lastCheck: FramingResult | null;
  paused: boolean;
  prompt: string;
}

export interface RecordingLoopOptions {
  poseProvider: PoseProvider;
  /** Produces the chunk captured this second (e.g. a MediaRecorder slice). */
  captureChunk: () => unknown;
  /** Receives captured chunks; never invoked while paused. */
  onChunk: (chunk: unknown) => void;
  /** Acquires the camera; a rejection puts the loop in a guided error state. */
  camera?: () => Promise<unknown>;
  onState?: (state: RecordingState) => void;
  imageSize?: readonly [number, number];
  confidenceFloor?: number;
  intervalMs?: number;
}

export class RecordingLoop {
  private timer: ReturnType<typeof setInterval> | null = null;
  private state: RecordingState = {
    camera: "idle",
    lastCheck: null,
    paused: false,
    prompt: "",
  };

  constructor(private readonly options: RecordingLoopOptions) {}

  getState(): RecordingState {
    return { ...this.state };
  }

  async start(): Promise<void> {
    if (this.timer !== null) {
      return;
    }
    try {
      await (this.options.camera ?? (async () => undefined))();
    } catch {
      this.update({
        camera: "error",
        lastCheck: null,
        paused: false,
        prompt: CAMERA_ERROR_PROMPT,
      });
      return;
    }
    this.update({ ...this.state, camera: "recording", prompt: "" });
    this.timer = setInterval(
      () => this.tick(),
      this.options.intervalMs ?? CHECK_INTERVAL_MS,
    );
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.update({ ...this.state, camera: "idle" });
  }

  private tick(): void {
    const pose = this.options.poseProvider();
    const check: FramingResult =
      pose === null
        ? { inFrame: false, reason: "no pose detected" }
        : framingCheck(
            pose.left,
            pose.right,
            this.options.imageSize ?? DEFAULT_IMAGE_SIZE,
            this.options.confidenceFloor ?? DEFAULT_CONFIDENCE_FLOOR,
          );
    const paused = !check.inFrame;
    this.update({
      camera: "recording",
      lastCheck: check,
      paused,
      prompt: paused ? REPOSITION_PROMPT : "",
    });
    if (!paused) {
      this.options.onChunk(this.options.captureChunk());
    }
  }

  private update(next: RecordingState): void {
    this.state = next;
    this.options.onState?.(this.getState());
  }
}
