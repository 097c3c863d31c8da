"""Processing wiring: uploaded video -> segments -> assessment report.

The job handler is idempotent and stage-resumable: each stage commits
before the next starts, and a redelivered job skips stages whose outputs
already exist, which is what at-least-once delivery requires.
"""

import json
import logging
from dataclasses import dataclass
from typing import Mapping

from sqlalchemy import select
from sqlalchemy.orm import sessionmaker

from ..knowledge import (
    HashingEmbedder,
    KnowledgeCache,
    build_index,
    chunk_corpus,
    load_or_consolidate,
)
from ..model import ClassDescription, load_class_descriptions
from ..model.stub import ColorStubClassifier
from ..reports import LlmClient, MockLlmClient, PromptTemplate, load_prompt_templates
from ..reports.generator import generate_report
from ..segmentation import (
    WindowClassifier,
    extract_subclips,
    segment_video,
    segments_from_json,
    segments_to_json,
)
from .blobs import BlobStore
from .config import ServiceConfig
from .db import ReportRow, SessionRow, advance_status

logger = logging.getLogger(__name__)

PROCESS_SESSION = "process_session"


@dataclass
class ProcessingContext:
    classifier: WindowClassifier
    llm_client: LlmClient
    descriptions: tuple[ClassDescription, ...]
    knowledge: KnowledgeCache
    templates: Mapping[str, PromptTemplate]
    min_segment_frames: int = 30


def knowledge_corpus(descriptions) -> dict[str, str]:
    """One guidance document per action class, derived from the catalog.

    Deterministic and self-contained, so a fresh deployment can build its
    retrieval index without any external corpus mounted.
    """
    docs = {}
    for item in descriptions:
        if item.label_id == 0:
            continue
        doc_id = f"exercise_{item.label_id:02d}"
        docs[doc_id] = (
            f"{item.name}. {item.description} "
            "Perform the movement slowly and stop at the first sign of sharp "
            "pain or pulling at the surgical site. Keep the shoulders relaxed, "
            "breathe normally, and repeat within the range your care team "
            "prescribed for this stage of recovery."
        )
    return docs


def build_processing_context(config: ServiceConfig) -> ProcessingContext:
    descriptions = load_class_descriptions()
    embedder = HashingEmbedder()
    index = build_index(chunk_corpus(knowledge_corpus(descriptions)), embedder)
    knowledge = load_or_consolidate(
        config.knowledge_cache_path,
        descriptions,
        index,
        embedder,
        k=config.retrieval_k,
    )
    return ProcessingContext(
        classifier=ColorStubClassifier(brightness_floor=config.brightness_floor),
        llm_client=MockLlmClient(),
        descriptions=descriptions,
        knowledge=knowledge,
        templates=load_prompt_templates(),
        min_segment_frames=config.min_segment_frames,
    )


class SessionProcessor:
    """Job handler for PROCESS_SESSION payloads {"session_id": ...}."""

    def __init__(
        self,
        session_factory: sessionmaker,
        blobs: BlobStore,
        context: ProcessingContext,
    ):
        self._session_factory = session_factory
        self._blobs = blobs
        self._context = context

    def __call__(self, payload: dict) -> None:
        session_id = payload["session_id"]
        with self._session_factory() as db:
            row = db.get(SessionRow, session_id)
        if row is None:
            logger.warning("job for unknown session %s dropped", session_id)
            return
        if row.status in ("reported", "failed"):
            return
        if row.status == "uploaded":
            self._segment(session_id)
        self._report(session_id)

    def _segment(self, session_id: str) -> None:
        context = self._context
        with self._session_factory() as db:
            row = db.get(SessionRow, session_id)
            segments, _ = segment_video(
                row.video_uri,
                context.classifier,
                video_id=session_id,
                min_segment_frames=context.min_segment_frames,
            )
            clips_dir = self._blobs.open_dir(f"clips/{session_id}")
            segments = extract_subclips(row.video_uri, segments, clips_dir)
            row.segments_json = segments_to_json(segments)
            advance_status(db, row, "segmented")
            db.commit()

    def _report(self, session_id: str) -> None:
        context = self._context
        with self._session_factory() as db:
            row = db.get(SessionRow, session_id)
            existing = db.execute(
                select(ReportRow).where(ReportRow.session_id == session_id)
            ).scalar_one_or_none()
            if existing is None:
                report = generate_report(
                    session_id=session_id,
                    segments=segments_from_json(row.segments_json),
                    descriptions=context.descriptions,
                    knowledge=context.knowledge,
                    client=context.llm_client,
                    templates=context.templates,
                )
                existing = ReportRow(
                    report_id=f"rpt-{session_id}",
                    session_id=session_id,
                    payload_json=json.dumps(report.to_dict()),
                )
                db.add(existing)
            row.report_id = existing.report_id
            advance_status(db, row, "reported")
            db.commit()

    def on_final_failure(self, payload: dict, error: str) -> None:
        """Mark the session failed; partial artifacts stay for debugging."""
        session_id = payload["session_id"]
        with self._session_factory() as db:
            row = db.get(SessionRow, session_id)
            if row is None or row.status in ("reported", "failed"):
                return
            row.error = error
            advance_status(db, row, "failed")
            db.commit()


def reset_for_reprocessing(session_factory: sessionmaker, session_id: str) -> str:
    """Admin recovery: rewind a failed session to its last completed stage.

    Returns the status the session was reset to.  Not part of the forward
    status machine; only failed sessions are eligible.
    """
    from ..errors import ValidationError
    from .db import StatusHistoryRow, utcnow

    with session_factory() as db:
        row = db.get(SessionRow, session_id)
        if row is None:
            raise ValidationError(f"unknown session {session_id!r}")
        if row.status != "failed":
            raise ValidationError(
                f"session {session_id!r} is {row.status!r}, not failed"
            )
        target = "segmented" if row.segments_json else "uploaded"
        row.status = target
        row.error = None
        db.add(
            StatusHistoryRow(session_id=session_id, status=target, at=utcnow())
        )
        db.commit()
        return target
