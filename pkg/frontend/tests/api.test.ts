import { describe, expect, it } from "vitest";

import { ApiError, HttpApi, type FetchLike } from "../src/api";

interface Recorded {
  url: string;
  init: RequestInit;
}

function stubFetch(
  status: number,
  body: unknown,
  recorded: Recorded[],
): FetchLike {
  return async (url, init) => {
    recorded.push({ url, init });
    return new Response(typeof body === "string" ? body : JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

describe("HttpApi", () => {
  it("sends the bearer token and parses JSON responses", async () => {
    const recorded: Recorded[] = [];
    const api = new HttpApi(
      "http://svc",
      "tok-1",
      stubFetch(200, { as_of: "2026-08-15", avg_sessions: 3.8, avg_frequency: 0.59, per_patient: [] }, recorded),
    );
    const out = await api.adherence();
    expect(out.avg_sessions).toBe(3.8);
    expect(recorded[0]?.url).toBe("http://svc/analytics/adherence");
    expect(
      (recorded[0]?.init.headers as Record<string, string>)["Authorization"],
    ).toBe("Bearer tok-1");
  });

  it("passes as_of through as a query parameter", async () => {
    const recorded: Recorded[] = [];
    const api = new HttpApi(
      "http://svc/",
      "tok",
      stubFetch(200, { per_patient: [] }, recorded),
    );
    await api.adherence("2026-08-01");
    expect(recorded[0]?.url).toBe(
      "http://svc/analytics/adherence?as_of=2026-08-01",
    );
  });

  it("raises ApiError with the machine-readable error envelope", async () => {
    const recorded: Recorded[] = [];
    const api = new HttpApi(
      "http://svc",
      "tok",
      stubFetch(404, { error: { code: "unknown_report", message: "no report 'x'" } }, recorded),
    );
    const error = await api.report("x").catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(404);
    expect((error as ApiError).code).toBe("unknown_report");
    expect((error as ApiError).message).toBe("no report 'x'");
  });

  it("falls back to a generic error for non-JSON failure bodies", async () => {
    const api = new HttpApi("http://svc", "tok", stubFetch(502, "bad gateway", []));
    const error = await api.session("s1").catch((e: unknown) => e);
    expect((error as ApiError).code).toBe("http_error");
    expect((error as ApiError).message).toBe("HTTP 502");
  });

  it("uploads sessions as multipart with an optional idempotency key", async () => {
    const recorded: Recorded[] = [];
    const api = new HttpApi(
      "http://svc",
      "tok",
      stubFetch(201, { session_id: "s1", status: "uploaded", deduplicated: false }, recorded),
    );
    await api.uploadSession("p01", new Blob([new Uint8Array(4)]), "v.mp4", "key-9");

    const { url, init } = recorded[0]!;
    expect(url).toBe("http://svc/sessions");
    expect(init.method).toBe("POST");
    const form = init.body as FormData;
    expect(form.get("patient_id")).toBe("p01");
    expect((form.get("video") as File).name).toBe("v.mp4");
    const headers = init.headers as Record<string, string>;
    expect(headers["Idempotency-Key"]).toBe("key-9");
    expect(headers["Content-Type"]).toBeUndefined(); // boundary set by fetch
  });

  it("serialises feedback as JSON with the content type set", async () => {
    const recorded: Recorded[] = [];
    const api = new HttpApi(
      "http://svc",
      "tok",
      stubFetch(201, { feedback_id: 1 }, recorded),
    );
    await api.submitFeedback("rpt-1", {
      accuracy: 8,
      completeness: 8,
      practicability: 8,
      safety: 8,
      language_quality: 8,
      free_text: "",
    });
    const { url, init } = recorded[0]!;
    expect(url).toBe("http://svc/reports/rpt-1/feedback");
    expect((init.headers as Record<string, string>)["Content-Type"]).toBe(
      "application/json",
    );
    expect(JSON.parse(init.body as string).safety).toBe(8);
  });
});
