import { describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api";
import { PAGE_SIZE, renderPatientList } from "../src/views/patients";
import { FixtureApi, flush, makeAdherence, makePatients } from "./fixture_api";

describe("renderPatientList", () => {
  it("renders one row per patient for a 15-patient cohort", async () => {
    const api = new FixtureApi();
    api.adherenceData = makeAdherence(makePatients(15));
    const view = await renderPatientList(api);

    const rows = view.querySelectorAll("tr.patient-row");
    expect(rows).toHaveLength(15);
    expect(view.querySelector("h2")?.textContent).toBe("Patients (15)");
    const ids = [...rows].map((row) => row.querySelector(".patient-id")?.textContent);
    expect(ids).toContain("p01");
    expect(ids).toContain("p15");
  });

  it("shows only numbers served by the API", async () => {
    const api = new FixtureApi();
    const patients = makePatients(2);
    patients[0]!.sessions = 3;
    patients[0]!.enrolled_days = 3;
    patients[0]!.frequency = 1.0;
    patients[1]!.frequency = 0.25;
    api.adherenceData = { ...makeAdherence(patients), avg_frequency: 0.625 };

    const view = await renderPatientList(api);
    const first = view.querySelector("tr.patient-row");
    expect(first?.querySelector(".sessions")?.textContent).toBe("3");
    expect(first?.querySelector(".frequency")?.textContent).toBe("1");
    expect(view.querySelector(".adherence-summary")?.textContent).toContain(
      "Average sessions: 3.8",
    );
    expect(view.querySelector(".adherence-summary")?.textContent).toContain(
      "Average exercise frequency: 0.625",
    );
  });

  it("shows the empty state when the cohort is empty", async () => {
    const api = new FixtureApi();
    api.adherenceData = null; // service answers 422 for an empty cohort
    const view = await renderPatientList(api);
    expect(view.querySelector(".empty-state")?.textContent).toBe(
      "No patients enrolled yet.",
    );
    expect(view.querySelector("tr.patient-row")).toBeNull();
  });

  it("shows a retry banner on API failure and recovers on retry", async () => {
    const api = new FixtureApi();
    api.adherenceData = makeAdherence(makePatients(3));
    api.failNext.adherence = new ApiError(503, "unavailable", "backend down");

    const view = await renderPatientList(api);
    const banner = view.querySelector(".retry-banner");
    expect(banner).not.toBeNull();
    expect(view.querySelector("tr.patient-row")).toBeNull();

    (banner?.querySelector("button.retry") as HTMLButtonElement).click();
    await flush();
    expect(view.querySelectorAll("tr.patient-row")).toHaveLength(3);
  });

  it("redirects to login when the token is rejected", async () => {
    const api = new FixtureApi();
    api.failNext.adherence = new ApiError(401, "unauthenticated", "bad token");
    const onAuthRequired = vi.fn();

    const view = await renderPatientList(api, { onAuthRequired });
    expect(onAuthRequired).toHaveBeenCalledTimes(1);
    expect(view.querySelector(".auth-required")).not.toBeNull();
  });

  it("navigates on row selection", async () => {
    const api = new FixtureApi();
    api.adherenceData = makeAdherence(makePatients(2));
    const onSelect = vi.fn();
    const view = await renderPatientList(api, { onSelect });

    (view.querySelector("tr.patient-row") as HTMLElement).click();
    expect(onSelect).toHaveBeenCalledWith("p01");
  });

  it("paginates cohorts larger than one page", async () => {
    const api = new FixtureApi();
    api.adherenceData = makeAdherence(makePatients(PAGE_SIZE + 5));
    const view = await renderPatientList(api);

    expect(view.querySelectorAll("tr.patient-row")).toHaveLength(PAGE_SIZE);
    (view.querySelector("button.next-page") as HTMLButtonElement).click();
    expect(view.querySelectorAll("tr.patient-row")).toHaveLength(5);
    expect(view.querySelector(".page-label")?.textContent).toBe("Page 2 of 2");
  });
});
