/** Per-patient session list: one row per recorded session. */

import type { Api } from "../api";
import { button, el } from "../dom";

export interface SessionListOptions {
  onSelect?: (sessionId: string) => void;
  onBack?: () => void;
}

export async function renderSessionList(
  api: Api,
  patientId: string,
  options: SessionListOptions = {},
): Promise<HTMLElement> {
  const root = el("section", "session-list");
  if (options.onBack) {
    root.append(button("Back", "back", options.onBack));
  }
  root.append(el("h2", "", `Sessions for ${patientId}`));

  let sessions;
  try {
    sessions = await api.patientSessions(patientId);
  } catch {
    root.append(el("div", "retry-banner", "Could not load sessions."));
    return root;
  }

  if (sessions.length === 0) {
    root.append(el("p", "empty-state", "No sessions recorded yet."));
    return root;
  }
  const list = el("ul", "sessions");
  for (const session of sessions) {
    const item = el(
      "li",
      "session-row",
      `${session.session_id} — ${session.status} (uploaded ${session.upload_time})`,
    );
    item.dataset["sessionId"] = session.session_id;
    item.addEventListener("click", () => options.onSelect?.(session.session_id));
    list.append(item);
  }
  root.append(list);
  return root;
}
