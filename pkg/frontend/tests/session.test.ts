import { describe, expect, it } from "vitest";

import { renderSessionView } from "../src/views/session";
import { FixtureApi, makeReport, makeSession } from "./fixture_api";
import type { SegmentOut } from "../src/types";

function segment(overrides: Partial<SegmentOut>): SegmentOut {
  return {
    label_id: 4,
    label_name: "shoulder abduction",
    start_frame: 60,
    end_frame: 149,
    mean_confidence: 0.91,
    flagged_low_confidence: false,
    subclip_uri: "/clips/s1/seg0.mp4",
    ...overrides,
  };
}

function apiWithSession(segments: SegmentOut[]): FixtureApi {
  const api = new FixtureApi();
  api.sessions.set("s1", makeSession({ segments }));
  api.reports.set(
    "rpt-s1",
    makeReport({
      actions: [
        {
          segment_id: "v:60-149",
          action_id: 4,
          text: "Good range of motion throughout.",
          failed: false,
          failure_reason: "",
        },
        {
          segment_id: "v:200-280",
          action_id: 5,
          text: "",
          failed: true,
          failure_reason: "provider timeout",
        },
      ],
    }),
  );
  return api;
}

describe("renderSessionView", () => {
  it("renders every segment the API returns and flags low confidence", async () => {
    const segments = [
      segment({}),
      segment({
        label_id: 5,
        label_name: "fist clenching",
        start_frame: 200,
        end_frame: 280,
        mean_confidence: 0.41,
        flagged_low_confidence: true,
        subclip_uri: "/clips/s1/seg1.mp4",
      }),
      segment({ start_frame: 300, end_frame: 390, subclip_uri: null }),
    ];
    const view = await renderSessionView(apiWithSession(segments), "s1", {
      role: "nurse",
    });

    const cards = view.querySelectorAll("article.segment");
    expect(cards).toHaveLength(3);
    const flagged = view.querySelectorAll("article.segment.low-confidence");
    expect(flagged).toHaveLength(1);
    expect(flagged[0]?.querySelector(".flag")?.textContent).toBe(
      "Low confidence — review manually",
    );

    const videos = view.querySelectorAll("video.clip");
    expect(videos).toHaveLength(2); // the segment without a clip gets no player
    expect((videos[0] as HTMLVideoElement).src).toContain("/clips/s1/seg0.mp4");
    expect(cards[0]?.querySelector(".segment-meta")?.textContent).toContain(
      "frames 60–149",
    );
  });

  it("renders the report summary, per-action breakdown, and failures", async () => {
    const view = await renderSessionView(apiWithSession([segment({})]), "s1", {
      role: "nurse",
    });
    expect(view.querySelector(".final-summary")?.textContent).toContain(
      "steady across both exercises",
    );
    const actions = view.querySelectorAll("article.action-report");
    expect(actions).toHaveLength(2);
    expect(actions[1]?.querySelector(".failure")?.textContent).toContain(
      "provider timeout",
    );
  });

  it("shows the feedback form to nurses only", async () => {
    const nurseView = await renderSessionView(apiWithSession([]), "s1", {
      role: "nurse",
    });
    expect(nurseView.querySelector("form.feedback-form")).not.toBeNull();

    const patientView = await renderSessionView(apiWithSession([]), "s1", {
      role: "patient",
    });
    expect(patientView.querySelector("form.feedback-form")).toBeNull();
  });

  it("shows processing status while the report is pending", async () => {
    const api = new FixtureApi();
    api.sessions.set(
      "s2",
      makeSession({
        session_id: "s2",
        status: "segmented",
        report_id: null,
        status_history: [
          { status: "uploaded", at: "t0" },
          { status: "segmented", at: "t1" },
        ],
      }),
    );
    const view = await renderSessionView(api, "s2", { role: "patient" });
    expect(view.querySelector(".report-pending")?.textContent).toContain(
      "status: segmented",
    );
    expect(view.querySelectorAll(".status-event")).toHaveLength(2);
  });

  it("surfaces the processing error for failed sessions", async () => {
    const api = new FixtureApi();
    api.sessions.set(
      "s3",
      makeSession({
        session_id: "s3",
        status: "failed",
        report_id: null,
        error: "could not decode video",
        status_history: [
          { status: "uploaded", at: "t0" },
          { status: "failed", at: "t1" },
        ],
      }),
    );
    const view = await renderSessionView(api, "s3", { role: "nurse" });
    expect(view.querySelector(".session-error")?.textContent).toContain(
      "could not decode video",
    );
  });

  it("falls back to a banner when the session cannot be loaded", async () => {
    const view = await renderSessionView(new FixtureApi(), "missing", {
      role: "nurse",
    });
    expect(view.querySelector(".retry-banner")).not.toBeNull();
  });
});
