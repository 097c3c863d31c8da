/** Typed HTTP client for the assessment service.
 *
 * The dashboard is a pure API client: every number it displays comes out of
 * one of these responses, so views never recompute analytics locally.
 */

import type {
  AdherenceOut,
  FeedbackIn,
  FeedbackOut,
  ReminderOptInOut,
  ReportOut,
  SessionOut,
  UploadAccepted,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface Api {
  adherence(asOf?: string): Promise<AdherenceOut>;
  patientSessions(patientId: string): Promise<SessionOut[]>;
  session(sessionId: string): Promise<SessionOut>;
  report(reportId: string): Promise<ReportOut>;
  submitFeedback(reportId: string, body: FeedbackIn): Promise<FeedbackOut>;
  uploadSession(
    patientId: string,
    video: Blob,
    filename?: string,
    idempotencyKey?: string,
  ): Promise<UploadAccepted>;
  reminderOptIn(patientId: string, optIn: boolean): Promise<ReminderOptInOut>;
}

export type FetchLike = (
  url: string,
  init: RequestInit,
) => Promise<Response>;

interface RequestOptions {
  json?: unknown;
  form?: FormData;
  headers?: Record<string, string>;
  query?: Record<string, string>;
}

export class HttpApi implements Api {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    options: RequestOptions = {},
  ): Promise<T> {
    let url = this.baseUrl.replace(/\/$/, "") + path;
    if (options.query) {
      url += `?${new URLSearchParams(options.query).toString()}`;
    }
    const headers: Record<string, string> = {
      Authorization: `Bearer ${this.token}`,
      ...options.headers,
    };
    let body: BodyInit | undefined;
    if (options.json !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(options.json);
    } else if (options.form !== undefined) {
      body = options.form; // fetch sets the multipart boundary itself
    }
    const response = await this.fetchFn(url, { method, headers, body });
    if (!response.ok) {
      let code = "http_error";
      let message = `HTTP ${response.status}`;
      try {
        const payload = (await response.json()) as {
          error?: { code?: string; message?: string };
        };
        if (payload.error) {
          code = payload.error.code ?? code;
          message = payload.error.message ?? message;
        }
      } catch {
        // non-JSON error body: keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  adherence(asOf?: string): Promise<AdherenceOut> {
    return this.request("GET", "/analytics/adherence", {
      query: asOf === undefined ? undefined : { as_of: asOf },
    });
  }

  patientSessions(patientId: string): Promise<SessionOut[]> {
    return this.request("GET", `/patients/${encodeURIComponent(patientId)}/sessions`);
  }

  session(sessionId: string): Promise<SessionOut> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  report(reportId: string): Promise<ReportOut> {
    return this.request("GET", `/reports/${encodeURIComponent(reportId)}`);
  }

  submitFeedback(reportId: string, body: FeedbackIn): Promise<FeedbackOut> {
    return this.request(
      "POST",
      `/reports/${encodeURIComponent(reportId)}/feedback`,
      { json: body },
    );
  }

  uploadSession(
    patientId: string,
    video: Blob,
    filename = "session.webm",
    idempotencyKey?: string,
  ): Promise<UploadAccepted> {
    const form = new FormData();
    form.set("patient_id", patientId);
    form.set("video", video, filename);
    return this.request("POST", "/sessions", {
      form,
      headers:
        idempotencyKey === undefined
          ? undefined
          : { "Idempotency-Key": idempotencyKey },
    });
  }

  reminderOptIn(patientId: string, optIn: boolean): Promise<ReminderOptInOut> {
    return this.request(
      "POST",
      `/patients/${encodeURIComponent(patientId)}/reminder-optin`,
      { json: { opt_in: optIn } },
    );
  }
}
