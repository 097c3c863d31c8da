"""Report generation: prompt templates, LLM clients and the orchestrator."""

from .generator import (
    CHUNK_SECONDS,
    NO_SEGMENTS_SUMMARY,
    ActionEvaluation,
    AssessmentReport,
    LlmCallRecord,
    VideoChunkFrames,
    chunk_subvideo,
    generate_report,
    segment_identifier,
    thin_frames,
)
from .llm import (
    FlakyLlmClient,
    LlmClient,
    MockLlmClient,
    ProviderProfile,
    RetryingLlmClient,
    check_frame_limit,
)
from .templates import (
    TEMPLATE_IDS,
    PromptTemplate,
    class_list_string,
    load_prompt_templates,
)

__all__ = [
    "ActionEvaluation",
    "AssessmentReport",
    "CHUNK_SECONDS",
    "FlakyLlmClient",
    "LlmCallRecord",
    "LlmClient",
    "MockLlmClient",
    "NO_SEGMENTS_SUMMARY",
    "PromptTemplate",
    "ProviderProfile",
    "RetryingLlmClient",
    "TEMPLATE_IDS",
    "VideoChunkFrames",
    "check_frame_limit",
    "chunk_subvideo",
    "class_list_string",
    "generate_report",
    "load_prompt_templates",
    "segment_identifier",
    "thin_frames",
]
