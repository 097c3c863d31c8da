/** Session detail: segment clips with confidence flags, the assessment
 * report, and (for nurses) the feedback form. Renders every segment the API
 * returns; low-confidence ones carry a visible flag.
 */

import type { Api } from "../api";
import { button, el } from "../dom";
import type { ReportOut, SessionOut } from "../types";
import { renderFeedbackForm } from "./feedback";

export interface SessionViewOptions {
  role: "nurse" | "patient";
  onBack?: () => void;
}

function renderSegments(session: SessionOut): HTMLElement {
  const section = el("section", "segments");
  section.append(el("h3", "", `Segments (${session.segments.length})`));
  if (session.segments.length === 0) {
    section.append(el("p", "empty-state", "No segments detected."));
    return section;
  }
  for (const segment of session.segments) {
    const card = el(
      "article",
      segment.flagged_low_confidence ? "segment low-confidence" : "segment",
    );
    card.append(
      el("h4", "", `${segment.label_name} (action ${segment.label_id})`),
    );
    if (segment.subclip_uri !== null) {
      const video = el("video", "clip");
      video.controls = true;
      video.src = segment.subclip_uri;
      card.append(video);
    }
    card.append(
      el(
        "p",
        "segment-meta",
        `frames ${segment.start_frame}–${segment.end_frame} · confidence ${segment.mean_confidence.toFixed(2)}`,
      ),
    );
    if (segment.flagged_low_confidence) {
      card.append(el("span", "flag", "Low confidence — review manually"));
    }
    section.append(card);
  }
  return section;
}

function renderReport(report: ReportOut): HTMLElement {
  const section = el("section", "report");
  section.append(el("h3", "", "Assessment report"));
  section.append(el("p", "final-summary", report.final_summary));
  for (const action of report.actions) {
    const card = el("article", "action-report");
    card.append(el("h4", "", `Action ${action.action_id} — ${action.segment_id}`));
    card.append(el("p", "action-text", action.text));
    if (action.failed) {
      card.append(el("p", "failure", `Evaluation failed: ${action.failure_reason}`));
    }
    section.append(card);
  }
  return section;
}

export async function renderSessionView(
  api: Api,
  sessionId: string,
  options: SessionViewOptions,
): Promise<HTMLElement> {
  const root = el("section", "session-view");
  if (options.onBack) {
    root.append(button("Back", "back", options.onBack));
  }

  let session: SessionOut;
  try {
    session = await api.session(sessionId);
  } catch {
    const banner = el("div", "retry-banner");
    banner.append(el("span", "", "Could not load the session."));
    root.append(banner);
    return root;
  }

  root.append(el("h2", "", `Session ${session.session_id}`));
  root.append(
    el(
      "p",
      "session-meta",
      `Patient ${session.patient_id} · status ${session.status} · uploaded ${session.upload_time}`,
    ),
  );
  if (session.error !== null) {
    root.append(el("p", "session-error", `Processing error: ${session.error}`));
  }

  const history = el("ol", "status-history");
  for (const event of session.status_history) {
    history.append(el("li", "status-event", `${event.status} at ${event.at}`));
  }
  root.append(history);

  root.append(renderSegments(session));

  if (session.report_id !== null) {
    const report = await api.report(session.report_id);
    root.append(renderReport(report));
    if (options.role === "nurse") {
      root.append(renderFeedbackForm(api, report.report_id));
    }
  } else {
    root.append(
      el("p", "report-pending", `Report not ready — status: ${session.status}`),
    );
  }

  return root;
}
