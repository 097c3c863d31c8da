import { describe, expect, it } from "vitest";

import { mountApp } from "../src/app";
import {
  FixtureApi,
  flush,
  makeAdherence,
  makePatients,
  makeReport,
  makeSession,
} from "./fixture_api";

function fixture(): FixtureApi {
  const api = new FixtureApi();
  api.adherenceData = makeAdherence(makePatients(3));
  const session = makeSession();
  api.sessions.set("s1", session);
  api.sessionLists.set("p01", [session]);
  api.reports.set("rpt-s1", makeReport());
  return api;
}

describe("mountApp", () => {
  it("gives nurses the patient list and drills into a session view", async () => {
    const api = fixture();
    const root = document.createElement("main");
    await mountApp({ api, role: "nurse", root });
    expect(root.querySelector(".patient-list")).not.toBeNull();

    (root.querySelector("tr.patient-row") as HTMLElement).click();
    await flush();
    expect(root.querySelector(".session-list")).not.toBeNull();

    (root.querySelector("li.session-row") as HTMLElement).click();
    await flush();
    expect(root.querySelector(".session-view")).not.toBeNull();
    expect(root.querySelector("form.feedback-form")).not.toBeNull();

    (root.querySelector("button.back") as HTMLButtonElement).click();
    await flush();
    expect(root.querySelector(".session-list")).not.toBeNull();
  });

  it("gives patients the recording page and their own sessions", async () => {
    const api = fixture();
    const root = document.createElement("main");
    await mountApp({ api, role: "patient", patientId: "p01", root });

    expect(root.querySelector(".record-page")).not.toBeNull();
    expect(root.querySelector(".session-list")).not.toBeNull();
    expect(root.querySelector(".patient-list")).toBeNull();

    (root.querySelector("li.session-row") as HTMLElement).click();
    await flush();
    expect(root.querySelector(".session-view")).not.toBeNull();
    expect(root.querySelector("form.feedback-form")).toBeNull(); // patient role
  });

  it("reports a missing patient id instead of rendering a broken page", async () => {
    const root = document.createElement("main");
    await mountApp({ api: fixture(), role: "patient", root });
    expect(root.querySelector(".config-error")).not.toBeNull();
  });
});
