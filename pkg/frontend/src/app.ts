/** Single web app, two roles: nurses browse patients → sessions → report +
 * feedback; patients record/upload sessions and review their own history.
 */

import type { Api } from "./api";
import { el } from "./dom";
import type { PoseProvider } from "./recording";
import { renderPatientList } from "./views/patients";
import { renderRecordPage } from "./views/record";
import { renderSessionView } from "./views/session";
import { renderSessionList } from "./views/sessions";

export interface AppConfig {
  api: Api;
  role: "nurse" | "patient";
  root: HTMLElement;
  /** Required for the patient role: whose sessions to record and list. */
  patientId?: string;
  poseProvider?: PoseProvider;
  camera?: () => Promise<unknown>;
  onAuthRequired?: () => void;
}

export async function mountApp(config: AppConfig): Promise<void> {
  const { api, root } = config;

  const show = (view: HTMLElement): void => {
    root.replaceChildren(view);
  };

  const showSession = async (sessionId: string, onBack: () => void): Promise<void> => {
    show(await renderSessionView(api, sessionId, { role: config.role, onBack }));
  };

  const showSessions = async (patientId: string, onBack?: () => void): Promise<void> => {
    show(
      await renderSessionList(api, patientId, {
        onBack,
        onSelect: (sessionId) =>
          void showSession(sessionId, () => void showSessions(patientId, onBack)),
      }),
    );
  };

  if (config.role === "nurse") {
    const showPatients = async (): Promise<void> => {
      show(
        await renderPatientList(api, {
          onAuthRequired: config.onAuthRequired,
          onSelect: (patientId) =>
            void showSessions(patientId, () => void showPatients()),
        }),
      );
    };
    await showPatients();
    return;
  }

  const patientId = config.patientId;
  if (patientId === undefined) {
    show(el("p", "config-error", "No patient id configured."));
    return;
  }
  const home = el("div", "patient-home");
  home.append(
    renderRecordPage(api, {
      patientId,
      poseProvider: config.poseProvider ?? (() => null),
      camera: config.camera,
    }),
  );
  home.append(
    await renderSessionList(api, patientId, {
      onSelect: (sessionId) =>
        void showSession(sessionId, () => void mountApp(config)),
    }),
  );
  show(home);
}
