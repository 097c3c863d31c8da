"""Prompt templates: loading, placeholder validation and strict rendering."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from ..dataset.windows import NO_ACTION
from ..errors import ConfigurationError, ValidationError
from ..model.text import ClassDescription

TEMPLATE_IDS = (
    "single_action",
    "chunk_evaluation",
    "action_synthesis",
    "final_synthesis",
    "zero_shot",
    "few_shot",
)


def _fields(body: str) -> set[str]:
    fields = set()
    for _, field, spec, _ in string.Formatter().parse(body):
        if field is None:
            continue
        if field == "" or not field.isidentifier() or spec:
            raise ConfigurationError(f"malformed placeholder {{{field}}} in template")
        fields.add(field)
    return fields


@dataclass(frozen=True)
class PromptTemplate:
    """One prompt body with a declared, closed set of placeholders."""

    template_id: str
    body: str
    placeholders: frozenset[str]

    def __post_init__(self):
        found = _fields(self.body)
        if found != set(self.placeholders):
            raise ConfigurationError(
                f"template {self.template_id!r} declares {sorted(self.placeholders)} "
                f"but body uses {sorted(found)}"
            )

    def render(self, **bindings: str) -> str:
        """Substitute every placeholder; bindings must match exactly.

        Exact matching (no missing, no extras) is what guarantees the
        rendered prompt has no unresolved placeholder left behind.
        """
        missing = set(self.placeholders) - set(bindings)
        extra = set(bindings) - set(self.placeholders)
        if missing or extra:
            raise ValidationError(
                f"template {self.template_id!r}: missing={sorted(missing)} "
                f"unexpected={sorted(extra)}"
            )
        return self.body.format_map({k: str(v) for k, v in bindings.items()})


def load_prompt_templates(
    path: str | Path | None = None,
) -> Mapping[str, PromptTemplate]:
    """Load the template set from a directory with a ``manifest.json``.

    Defaults to the packaged assets.  The manifest must cover exactly the
    known template ids.
    """
    if path is None:
        root = resources.files("rehabvision.assets") / "prompt_templates"
    else:
        root = Path(path)
    manifest = json.loads((root / "manifest.json").read_text())
    entries = manifest.get("templates", {})
    if set(entries) != set(TEMPLATE_IDS):
        raise ConfigurationError(
            f"manifest templates {sorted(entries)} != expected {sorted(TEMPLATE_IDS)}"
        )
    templates = {}
    for template_id, entry in entries.items():
        body = (root / entry["file"]).read_text()
        templates[template_id] = PromptTemplate(
            template_id=template_id,
            body=body,
            placeholders=frozenset(entry["placeholders"]),
        )
    return templates


def class_list_string(descriptions: Sequence[ClassDescription]) -> str:
    """Numbered action list for the recognition prompts (skips "no action")."""
    actions = sorted(
        (d for d in descriptions if d.label_id != NO_ACTION),
        key=lambda d: d.label_id,
    )
    if not actions:
        raise ValidationError("no action classes to list")
    return "\n".join(f"{d.label_id}. {d.name}" for d in actions)
