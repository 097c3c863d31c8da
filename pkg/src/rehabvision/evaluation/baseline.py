"""Zero-shot / few-shot LLM action-recognition baselines.

Each sample's frames go to the LLM with a numbered class list; the reply is
parsed leniently (first integer token wins).  Top-3 accuracy does not apply
to direct-answer baselines and is marked inapplicable in the report extras.
"""

from __future__ import annotations

import logging
import re
import time
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from ..dataset.windows import NUM_CLASSES
from ..errors import ConfigurationError, ValidationError
from ..model.text import ClassDescription
from ..reports.generator import thin_frames
from ..reports.llm import LlmClient
from ..reports.templates import PromptTemplate, class_list_string, load_prompt_templates
from .metrics import MetricReport, compute_metrics

logger = logging.getLogger(__name__)

BASELINE_MODES = ("zero_shot", "few_shot")
_FIRST_INT = re.compile(r"-?\d+")


@dataclass(frozen=True)
class BaselineSample:
    frames: tuple[np.ndarray, ...]
    label: int

    def __post_init__(self):
        if not self.frames:
            raise ValidationError("baseline sample needs at least one frame")
        if not 1 <= self.label < NUM_CLASSES:
            raise ValidationError(f"label {self.label} is not an action class")


@dataclass(frozen=True)
class BaselineResult:
    mode: str
    report: MetricReport
    latencies_s: tuple[float, ...]
    mean_latency_s: float
    unparseable: int


def parse_class_number(text: str) -> int | None:
    """First integer token in the reply, or None when there is none."""
    match = _FIRST_INT.search(text)
    return int(match.group()) if match else None


def examples_block(exemplar_labels: Sequence[int]) -> str:
    """Text lines marking the in-context example clips, one per class."""
    return "\n".join(
        f"[example video for action {label}] Action: {label}"
        for label in exemplar_labels
    )


def run_llm_baseline(
    mode: str,
    samples: Sequence[BaselineSample],
    client: LlmClient,
    descriptions: Sequence[ClassDescription],
    exemplars: Mapping[int, Sequence[np.ndarray]] | None = None,
    templates: Mapping[str, PromptTemplate] | None = None,
) -> BaselineResult:
    """Ask the LLM to classify every sample and score the answers.

    Unparseable or out-of-range answers count as misses (scored as class 0,
    which is never a true action label) and are logged.
    """
    if mode not in BASELINE_MODES:
        raise ConfigurationError(f"unknown mode {mode!r}; expected {BASELINE_MODES}")
    if not samples:
        raise ValidationError("no samples to evaluate")
    templates = load_prompt_templates() if templates is None else templates
    class_list = class_list_string(descriptions)

    exemplar_frames: list[np.ndarray] = []
    if mode == "few_shot":
        if not exemplars:
            raise ConfigurationError("few_shot mode requires exemplars")
        labels = sorted(exemplars)
        prompt = templates["few_shot"].render(
            class_list_str=class_list, examples_block=examples_block(labels)
        )
        for label in labels:
            exemplar_frames.extend(exemplars[label])
    else:
        prompt = templates["zero_shot"].render(class_list_str=class_list)

    y_true, y_pred, latencies = [], [], []
    unparseable = 0
    cap = client.profile.max_frames_per_call
    for sample in samples:
        frames = thin_frames(list(exemplar_frames) + list(sample.frames), cap)
        started = time.monotonic()
        response = client.send(prompt, frames)
        latencies.append(time.monotonic() - started)
        parsed = parse_class_number(response)
        if parsed is None or not 1 <= parsed < NUM_CLASSES:
            logger.warning("unparseable baseline reply %r; counted as wrong", response)
            unparseable += 1
            parsed = 0  # never a true action label, so always a miss
        y_true.append(sample.label)
        y_pred.append(parsed)

    scores = np.zeros((len(samples), NUM_CLASSES))
    scores[np.arange(len(samples)), y_pred] = 1.0
    report = compute_metrics(y_true, scores, num_classes=NUM_CLASSES)
    report = replace(report, extras={"top3_applicable": False, "mode": mode})
    return BaselineResult(
        mode=mode,
        report=report,
        latencies_s=tuple(latencies),
        mean_latency_s=sum(latencies) / len(latencies),
        unparseable=unparseable,
    )
