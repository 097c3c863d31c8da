"""Hierarchical report generation over segmented action sub-videos.

Each action sub-video is sampled at one frame per second and split into
45-second chunks.  A single-chunk action is evaluated with one call; longer
actions get one call per chunk plus a synthesis call.  A final call merges
all per-action evaluations into the session summary.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import (
    ConfigurationError,
    MediaError,
    ProviderError,
    ValidationError,
)
from ..knowledge.consolidate import KnowledgeCache
from ..model.text import ClassDescription
from ..segmentation import ActionSegment
from ..video import probe_video, read_frames
from .llm import LlmClient
from .templates import PromptTemplate, load_prompt_templates

CHUNK_SECONDS = 45
NO_SEGMENTS_SUMMARY = (
    "No completed exercise actions were detected in this session's recording, "
    "so no per-action evaluation was performed. Please verify the recording "
    "captured the full exercise session and try again."
)


@dataclass(frozen=True)
class VideoChunkFrames:
    """Up to 45 seconds of one sub-video, sampled at one frame per second."""

    segment_id: str
    chunk_index: int
    frames: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not 1 <= len(self.frames) <= CHUNK_SECONDS:
            raise ValidationError(
                f"chunk must hold 1..{CHUNK_SECONDS} frames, got {len(self.frames)}"
            )


@dataclass(frozen=True)
class LlmCallRecord:
    template_id: str
    prompt: str
    frame_count: int
    response: str
    latency_s: float


@dataclass(frozen=True)
class ActionEvaluation:
    segment_id: str
    action_id: int
    text: str
    chunk_texts: tuple[str, ...] = ()
    failed: bool = False
    failure_reason: str = ""


@dataclass(frozen=True)
class AssessmentReport:
    session_id: str
    actions: tuple[ActionEvaluation, ...]
    final_summary: str
    model_fingerprint: str
    llm_calls: int
    prompt_tokens: int
    latency_s: float
    transcript: tuple[LlmCallRecord, ...]

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "actions": [
                {
                    "segment_id": a.segment_id,
                    "action_id": a.action_id,
                    "text": a.text,
                    "chunk_texts": list(a.chunk_texts),
                    "failed": a.failed,
                    "failure_reason": a.failure_reason,
                }
                for a in self.actions
            ],
            "final_summary": self.final_summary,
            "model_fingerprint": self.model_fingerprint,
            "llm_calls": self.llm_calls,
            "prompt_tokens": self.prompt_tokens,
            "latency_s": self.latency_s,
        }


def thin_frames(
    frames: Sequence[np.ndarray], cap: int
) -> list[np.ndarray]:
    """Uniformly subsample frames down to the provider cap."""
    if cap < 1:
        raise ValidationError("frame cap must be positive")
    if len(frames) <= cap:
        return list(frames)
    picks = np.unique(np.linspace(0, len(frames) - 1, cap).round().astype(int))
    return [frames[i] for i in picks]


def chunk_subvideo(clip_path: str | Path, segment_id: str) -> list[VideoChunkFrames]:
    """Sample one frame per second and group into 45-second chunks."""
    info = probe_video(clip_path)
    num_samples = math.ceil(info.duration_s)
    indices = [
        min(round(t * info.fps), info.frame_count - 1) for t in range(num_samples)
    ]
    by_index = read_frames(clip_path, indices)
    samples = [by_index[i] for i in indices]
    return [
        VideoChunkFrames(
            segment_id=segment_id,
            chunk_index=chunk_index,
            frames=tuple(samples[start : start + CHUNK_SECONDS]),
        )
        for chunk_index, start in enumerate(range(0, num_samples, CHUNK_SECONDS))
    ]


class _Recorder:
    """Runs LLM calls while accumulating the transcript and accounting."""

    def __init__(self, client: LlmClient):
        self.client = client
        self.records: list[LlmCallRecord] = []

    def call(
        self, template_id: str, prompt: str, frames: Sequence[np.ndarray]
    ) -> str:
        frames = thin_frames(frames, self.client.profile.max_frames_per_call)
        started = time.monotonic()
        response = self.client.send(prompt, frames)
        self.records.append(
            LlmCallRecord(
                template_id=template_id,
                prompt=prompt,
                frame_count=len(frames),
                response=response,
                latency_s=time.monotonic() - started,
            )
        )
        return response


def _evaluate_action(
    segment_id: str,
    action_id: int,
    chunks: Sequence[VideoChunkFrames],
    action_desc: str,
    knowledge: str,
    recorder: _Recorder,
    templates: Mapping[str, PromptTemplate],
) -> ActionEvaluation:
    if len(chunks) == 1:
        prompt = templates["single_action"].render(
            action_id=action_id, action_desc=action_desc, knowledge=knowledge
        )
        text = recorder.call("single_action", prompt, chunks[0].frames)
        return ActionEvaluation(segment_id=segment_id, action_id=action_id, text=text)

    chunk_texts = []
    for chunk in chunks:
        prompt = templates["chunk_evaluation"].render(
            action_id=action_id, action_desc=action_desc, knowledge=knowledge
        )
        chunk_texts.append(recorder.call("chunk_evaluation", prompt, chunk.frames))
    synthesis_prompt = templates["action_synthesis"].render(
        action_id=action_id,
        action_desc=action_desc,
        chunk_evaluations="\n\n".join(
            f"Segment {i} analysis:\n{text}" for i, text in enumerate(chunk_texts)
        ),
    )
    text = recorder.call("action_synthesis", synthesis_prompt, [])
    return ActionEvaluation(
        segment_id=segment_id,
        action_id=action_id,
        text=text,
        chunk_texts=tuple(chunk_texts),
    )


def _synthesize_final(
    evaluations: Sequence[ActionEvaluation],
    recorder: _Recorder,
    templates: Mapping[str, PromptTemplate],
) -> str:
    if not evaluations:
        raise ValidationError("cannot synthesize a summary from zero evaluations")
    prompt = templates["final_synthesis"].render(
        all_evaluations="\n\n".join(
            f"Action {e.action_id} evaluation:\n{e.text}" for e in evaluations
        )
    )
    return recorder.call("final_synthesis", prompt, [])


def segment_identifier(segment: ActionSegment) -> str:
    return f"{segment.video_id}:{segment.start_frame}-{segment.end_frame}"


def generate_report(
    session_id: str,
    segments: Sequence[ActionSegment],
    descriptions: Sequence[ClassDescription],
    knowledge: KnowledgeCache,
    client: LlmClient,
    templates: Mapping[str, PromptTemplate] | None = None,
) -> AssessmentReport:
    """Evaluate every segment, then synthesize the session summary.

    A per-action failure (decode or provider error after the client's own
    retry policy) flags that action and the report still completes; it is
    never silently dropped.
    """
    templates = load_prompt_templates() if templates is None else templates
    desc_by_label = {d.label_id: d for d in descriptions}
    missing = sorted(
        {s.label_id for s in segments}
        - {label for label in desc_by_label if label in knowledge.entries}
    )
    if missing:
        raise ConfigurationError(
            f"no description/knowledge for segment classes {missing}"
        )
    for segment in segments:
        if not segment.subclip_uri:
            raise ValidationError(
                f"segment {segment_identifier(segment)} has no extracted sub-clip"
            )

    recorder = _Recorder(client)
    if not segments:
        return AssessmentReport(
            session_id=session_id,
            actions=(),
            final_summary=NO_SEGMENTS_SUMMARY,
            model_fingerprint=client.profile.name,
            llm_calls=0,
            prompt_tokens=0,
            latency_s=0.0,
            transcript=(),
        )

    evaluations = []
    for segment in segments:
        segment_id = segment_identifier(segment)
        try:
            chunks = chunk_subvideo(segment.subclip_uri, segment_id)
            evaluations.append(
                _evaluate_action(
                    segment_id,
                    segment.label_id,
                    chunks,
                    desc_by_label[segment.label_id].description,
                    knowledge.entry(segment.label_id).concatenated_text,
                    recorder,
                    templates,
                )
            )
        except (MediaError, ProviderError) as error:
            evaluations.append(
                ActionEvaluation(
                    segment_id=segment_id,
                    action_id=segment.label_id,
                    text=f"Evaluation failed: {error}",
                    failed=True,
                    failure_reason=str(error),
                )
            )
    final_summary = _synthesize_final(evaluations, recorder, templates)

    return AssessmentReport(
        session_id=session_id,
        actions=tuple(evaluations),
        final_summary=final_summary,
        model_fingerprint=client.profile.name,
        llm_calls=len(recorder.records),
        prompt_tokens=sum(len(r.prompt.split()) for r in recorder.records),
        latency_s=sum(r.latency_s for r in recorder.records),
        transcript=tuple(recorder.records),
    )
