/** Likert feedback form: five 1-10 dimensions plus free text.
 *
 * Submit stays disabled until every dimension holds an integer in range;
 * validation problems render inline next to the dimension they concern. A
 * successful submit locks the form to the values the server stored.
 */

import { ApiError, type Api } from "../api";
import { el } from "../dom";
import type { FeedbackIn, FeedbackOut } from "../types";

export const FEEDBACK_DIMENSIONS = [
  ["accuracy", "Accuracy"],
  ["completeness", "Completeness"],
  ["practicability", "Practicability"],
  ["safety", "Safety"],
  ["language_quality", "Language quality"],
] as const;

export type FeedbackDimension = (typeof FEEDBACK_DIMENSIONS)[number][0];

export interface FeedbackFormOptions {
  onSubmitted?: (saved: FeedbackOut) => void;
}

function dimensionError(raw: string): string | null {
  if (raw.trim() === "") {
    return "required";
  }
  const value = Number(raw);
  if (!Number.isInteger(value) || value < 1 || value > 10) {
    return "must be an integer between 1 and 10";
  }
  return null;
}

export function renderFeedbackForm(
  api: Api,
  reportId: string,
  options: FeedbackFormOptions = {},
): HTMLFormElement {
  const form = el("form", "feedback-form");
  form.noValidate = true;
  form.append(el("h4", "", "Score this report"));

  const inputs = new Map<FeedbackDimension, HTMLInputElement>();
  const errors = new Map<FeedbackDimension, HTMLElement>();
  for (const [name, label] of FEEDBACK_DIMENSIONS) {
    const row = el("label", `dimension ${name}`);
    row.append(el("span", "dimension-label", label));
    const input = el("input");
    input.type = "number";
    input.name = name;
    input.min = "1";
    input.max = "10";
    input.step = "1";
    const error = el("span", "inline-error");
    row.append(input, error);
    form.append(row);
    inputs.set(name, input);
    errors.set(name, error);
  }

  const freeText = el("textarea", "free-text");
  freeText.name = "free_text";
  freeText.placeholder = "Optional comments";
  form.append(el("label", "free-text-label", "Comments"), freeText);

  const submit = el("button", "submit-feedback", "Submit feedback");
  submit.type = "submit";
  submit.disabled = true;
  const status = el("p", "form-status");
  form.append(submit, status);

  const validate = (): boolean => {
    let valid = true;
    for (const [name, input] of inputs) {
      const problem = dimensionError(input.value);
      const error = errors.get(name);
      if (error) {
        // only surface problems on fields the nurse has touched
        error.textContent =
          problem !== null && input.dataset["touched"] === "yes" ? problem : "";
      }
      valid &&= problem === null;
    }
    submit.disabled = !valid;
    return valid;
  };

  for (const input of inputs.values()) {
    input.addEventListener("input", () => {
      input.dataset["touched"] = "yes";
      validate();
    });
  }
  validate();

  const lock = (saved: FeedbackOut): void => {
    for (const [name, input] of inputs) {
      input.value = String(saved[name]);
      input.disabled = true;
    }
    freeText.value = saved.free_text;
    freeText.disabled = true;
    submit.disabled = true;
    submit.hidden = true;
    status.textContent = `Feedback saved by ${saved.nurse_id}.`;
    status.className = "form-status saved";
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!validate()) {
      return;
    }
    const body: FeedbackIn = {
      accuracy: Number(inputs.get("accuracy")!.value),
      completeness: Number(inputs.get("completeness")!.value),
      practicability: Number(inputs.get("practicability")!.value),
      safety: Number(inputs.get("safety")!.value),
      language_quality: Number(inputs.get("language_quality")!.value),
      free_text: freeText.value,
    };
    submit.disabled = true;
    void api
      .submitFeedback(reportId, body)
      .then((saved) => {
        lock(saved);
        options.onSubmitted?.(saved);
      })
      .catch((error: unknown) => {
        submit.disabled = false;
        if (error instanceof ApiError && error.status === 422) {
          // surface the server complaint on the dimension it names
          const named = FEEDBACK_DIMENSIONS.find(([name]) =>
            error.message.includes(name),
          );
          if (named) {
            errors.get(named[0])!.textContent = error.message;
          }
          status.textContent = "Fix the highlighted field and resubmit.";
          status.className = "form-status invalid";
          return;
        }
        status.textContent = "Could not save feedback — try again.";
        status.className = "form-status failed";
      });
  });

  return form;
}
