/** Patient recording page: live framing status at 1 Hz, pause prompt, and
 * upload of the captured session when the patient finishes.
 */

import type { Api } from "../api";
import { button, el } from "../dom";
import {
  RecordingLoop,
  type PoseProvider,
  type RecordingState,
} from "../recording";

export interface RecordPageOptions {
  patientId: string;
  poseProvider: PoseProvider;
  camera?: () => Promise<unknown>;
  /** Produces one second of captured video; a stub by default. */
  captureChunk?: () => unknown;
  imageSize?: readonly [number, number];
  confidenceFloor?: number;
}

export function renderRecordPage(api: Api, options: RecordPageOptions): HTMLElement {
  const root = el("section", "record-page");
  root.append(el("h2", "", "Record a session"));
  const statusLine = el("p", "recording-status", "Ready.");
  const prompt = el("p", "prompt");
  const chunks: unknown[] = [];

  const showState = (state: RecordingState): void => {
    if (state.camera === "error") {
      statusLine.textContent = "Camera error.";
    } else if (state.camera === "recording") {
      statusLine.textContent = state.paused ? "Paused." : "Recording…";
    } else {
      statusLine.textContent = "Ready.";
    }
    prompt.textContent = state.prompt;
  };

  const loop = new RecordingLoop({
    poseProvider: options.poseProvider,
    captureChunk: options.captureChunk ?? (() => new Uint8Array(1)),
    onChunk: (chunk) => chunks.push(chunk),
    camera: options.camera,
    onState: showState,
    imageSize: options.imageSize,
    confidenceFloor: options.confidenceFloor,
  });

  const start = button("Start recording", "start-recording", () => {
    chunks.length = 0;
    void loop.start();
  });
  const finish = button("Finish and upload", "finish-upload", () => {
    loop.stop();
    statusLine.textContent = "Uploading…";
    void api
      .uploadSession(options.patientId, new Blob(chunks as BlobPart[]))
      .then((accepted) => {
        statusLine.textContent = `Uploaded — session ${accepted.session_id} is processing.`;
      })
      .catch(() => {
        statusLine.textContent = "Upload failed — try again.";
      });
  });

  root.append(start, finish, statusLine, prompt);
  return root;
}
