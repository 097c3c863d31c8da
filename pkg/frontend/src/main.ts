/** Browser entry: token login, then the role-appropriate app. */

import { HttpApi } from "./api";
import { mountApp } from "./app";
import { el } from "./dom";
import "./style.css";

function showLogin(root: HTMLElement): void {
  const form = el("form", "login");
  form.append(el("h2", "", "Sign in"));

  const token = el("input", "token");
  token.type = "password";
  token.placeholder = "Access token";
  const role = el("select", "role");
  for (const value of ["nurse", "patient"]) {
    const option = el("option", "", value);
    option.value = value;
    role.append(option);
  }
  const patientId = el("input", "patient-id");
  patientId.placeholder = "Patient id (patient role only)";
  const submit = el("button", "sign-in", "Sign in");
  submit.type = "submit";
  form.append(token, role, patientId, submit);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const api = new HttpApi(window.location.origin, token.value.trim());
    void mountApp({
      api,
      role: role.value === "patient" ? "patient" : "nurse",
      patientId: patientId.value.trim() || undefined,
      root,
      onAuthRequired: () => showLogin(root),
    });
  });

  root.replaceChildren(form);
}

const root = document.getElementById("app");
if (root) {
  showLogin(root);
}
