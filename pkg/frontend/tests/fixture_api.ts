/** In-memory Api double used by the view tests. */

import { ApiError, type Api } from "../src/api";
import type {
  AdherenceOut,
  FeedbackIn,
  FeedbackOut,
  PatientAdherenceOut,
  ReminderOptInOut,
  ReportOut,
  SessionOut,
  UploadAccepted,
} from "../src/types";

export function makeAdherence(patients: PatientAdherenceOut[]): AdherenceOut {
  return {
    as_of: "2026-08-15",
    avg_sessions: 3.8,
    avg_frequency: 0.59,
    per_patient: patients,
  };
}

export function makePatients(count: number): PatientAdherenceOut[] {
  return Array.from({ length: count }, (_, i) => ({
    patient_id: `p${String(i + 1).padStart(2, "0")}`,
    sessions: 4,
    enrolled_days: 10,
    frequency: 0.4,
  }));
}

export function makeSession(overrides: Partial<SessionOut> = {}): SessionOut {
  return {
    session_id: "s1",
    patient_id: "p01",
    upload_time: "2026-08-15T09:00:00",
    status: "reported",
    report_id: "rpt-s1",
    error: null,
    segments: [],
    status_history: [
      { status: "uploaded", at: "2026-08-15T09:00:00" },
      { status: "segmented", at: "2026-08-15T09:00:05" },
      { status: "reported", at: "2026-08-15T09:00:09" },
    ],
    ...overrides,
  };
}

export function makeReport(overrides: Partial<ReportOut> = {}): ReportOut {
  return {
    report_id: "rpt-s1",
    session_id: "s1",
    created_at: "2026-08-15T09:00:09",
    final_summary: "Overall performance was steady across both exercises.",
    actions: [],
    model_fingerprint: "stub",
    llm_calls: 2,
    prompt_tokens: 100,
    latency_s: 0.01,
    ...overrides,
  };
}

export class FixtureApi implements Api {
  adherenceData: AdherenceOut | null = makeAdherence([]);
  sessions = new Map<string, SessionOut>();
  sessionLists = new Map<string, SessionOut[]>();
  reports = new Map<string, ReportOut>();
  feedbackStore: FeedbackOut[] = [];
  uploads: { patientId: string; size: number; idempotencyKey?: string }[] = [];

  /** When set, the matching method throws this once, then auto-clears. */
  failNext: Partial<Record<"adherence" | "feedback" | "session", Error>> = {};
  adherenceCalls = 0;

  private takeFailure(key: "adherence" | "feedback" | "session"): void {
    const error = this.failNext[key];
    if (error) {
      delete this.failNext[key];
      throw error;
    }
  }

  async adherence(): Promise<AdherenceOut> {
    this.adherenceCalls += 1;
    this.takeFailure("adherence");
    if (this.adherenceData === null) {
      throw new ApiError(422, "validation_error", "no patients enrolled");
    }
    return this.adherenceData;
  }

  async patientSessions(patientId: string): Promise<SessionOut[]> {
    return this.sessionLists.get(patientId) ?? [];
  }

  async session(sessionId: string): Promise<SessionOut> {
    this.takeFailure("session");
    const found = this.sessions.get(sessionId);
    if (!found) {
      throw new ApiError(404, "unknown_session", `no session ${sessionId}`);
    }
    return found;
  }

  async report(reportId: string): Promise<ReportOut> {
    const found = this.reports.get(reportId);
    if (!found) {
      throw new ApiError(404, "unknown_report", `no report ${reportId}`);
    }
    return found;
  }

  async submitFeedback(reportId: string, body: FeedbackIn): Promise<FeedbackOut> {
    this.takeFailure("feedback");
    if (!this.reports.has(reportId)) {
      throw new ApiError(404, "unknown_report", `no report ${reportId}`);
    }
    const saved: FeedbackOut = {
      ...body,
      feedback_id: this.feedbackStore.length + 1,
      report_id: reportId,
      nurse_id: "n1",
      created_at: "2026-08-15T10:00:00",
    };
    this.feedbackStore.push(saved);
    return saved;
  }

  async uploadSession(
    patientId: string,
    video: Blob,
    _filename?: string,
    idempotencyKey?: string,
  ): Promise<UploadAccepted> {
    this.uploads.push({ patientId, size: video.size, idempotencyKey });
    return {
      session_id: `s${this.uploads.length}`,
      status: "uploaded",
      deduplicated: false,
    };
  }

  async reminderOptIn(patientId: string, optIn: boolean): Promise<ReminderOptInOut> {
    return { patient_id: patientId, reminder_opt_in: optIn };
  }
}

/** Lets queued promise callbacks (API responses) run to completion. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 4; i += 1) {
    await Promise.resolve();
  }
}
