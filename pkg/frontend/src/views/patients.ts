/** Nurse view: patient list with the service's adherence summary.
 *
 * Every figure shown (sessions, enrolled days, frequency, averages) is taken
 * verbatim from the adherence response — nothing is recomputed client-side.
 */

import { ApiError, type Api } from "../api";
import { button, el } from "../dom";
import type { AdherenceOut } from "../types";

export const PAGE_SIZE = 20;

export interface PatientListOptions {
  onSelect?: (patientId: string) => void;
  onAuthRequired?: () => void;
}

export async function renderPatientList(
  api: Api,
  options: PatientListOptions = {},
): Promise<HTMLElement> {
  const root = el("section", "patient-list");
  let page = 0;

  const render = (data: AdherenceOut): void => {
    root.replaceChildren();
    root.append(el("h2", "", `Patients (${data.per_patient.length})`));
    root.append(
      el(
        "p",
        "adherence-summary",
        `Average sessions: ${data.avg_sessions} · Average exercise frequency: ${data.avg_frequency} (as of ${data.as_of})`,
      ),
    );
    if (data.per_patient.length === 0) {
      root.append(el("p", "empty-state", "No patients enrolled yet."));
      return;
    }

    const table = el("table", "patients");
    const head = el("tr");
    for (const label of ["Patient", "Sessions", "Days enrolled", "Frequency"]) {
      head.append(el("th", "", label));
    }
    table.createTHead().append(head);
    const tbody = table.createTBody();
    const start = page * PAGE_SIZE;
    for (const row of data.per_patient.slice(start, start + PAGE_SIZE)) {
      const tr = el("tr", "patient-row");
      tr.dataset["patientId"] = row.patient_id;
      tr.append(el("td", "patient-id", row.patient_id));
      tr.append(el("td", "sessions", String(row.sessions)));
      tr.append(el("td", "enrolled-days", String(row.enrolled_days)));
      tr.append(el("td", "frequency", String(row.frequency)));
      tr.addEventListener("click", () => options.onSelect?.(row.patient_id));
      tbody.append(tr);
    }
    root.append(table);

    if (data.per_patient.length > PAGE_SIZE) {
      const pages = Math.ceil(data.per_patient.length / PAGE_SIZE);
      const nav = el("nav", "pagination");
      const prev = button("Previous", "prev-page", () => {
        page -= 1;
        render(data);
      });
      prev.disabled = page === 0;
      const next = button("Next", "next-page", () => {
        page += 1;
        render(data);
      });
      next.disabled = page >= pages - 1;
      nav.append(prev, el("span", "page-label", `Page ${page + 1} of ${pages}`), next);
      root.append(nav);
    }
  };

  const load = async (): Promise<void> => {
    root.replaceChildren(el("p", "loading", "Loading patients…"));
    try {
      render(await api.adherence());
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        options.onAuthRequired?.();
        root.replaceChildren(
          el("p", "auth-required", "Session expired — redirecting to login."),
        );
        return;
      }
      if (error instanceof ApiError && error.status === 422) {
        // the adherence endpoint rejects an empty cohort
        root.replaceChildren(el("p", "empty-state", "No patients enrolled yet."));
        return;
      }
      const banner = el("div", "retry-banner");
      banner.append(el("span", "", "Could not load patients."));
      banner.append(button("Retry", "retry", () => void load()));
      root.replaceChildren(banner);
    }
  };

  await load();
  return root;
}
