from .analytics import AdherenceStats, PatientAdherence, adherence_stats, enrolled_days
from .app import create_app
from .auth import ApiError, Principal, require_nurse, require_patient_access, resolve_token
from .blobs import BlobStore
from .config import ServiceConfig
from .db import (
    SESSION_STATUSES,
    Base,
    FeedbackRow,
    JobRow,
    PatientRow,
    ReminderRow,
    ReportRow,
    SessionRow,
    StatusHistoryRow,
    advance_status,
    create_db_engine,
    make_session_factory,
    migrate,
    utcnow,
)
from .framing import (
    DEFAULT_CONFIDENCE_FLOOR,
    FramingResult,
    ShoulderKeypoint,
    framing_check,
)
from .pipeline import (
    PROCESS_SESSION,
    ProcessingContext,
    SessionProcessor,
    build_processing_context,
    knowledge_corpus,
    reset_for_reprocessing,
)
from .queue import ClaimedJob, JobHandler, JobQueue, Worker
from .reminders import (
    REMINDER_HOUR,
    REMINDER_MESSAGE,
    LoggingReminderSender,
    ReminderSender,
    next_reminder_time,
    run_reminder_cycle,
)

__all__ = [
    "AdherenceStats",
    "ApiError",
    "Base",
    "BlobStore",
    "ClaimedJob",
    "DEFAULT_CONFIDENCE_FLOOR",
    "FeedbackRow",
    "FramingResult",
    "JobHandler",
    "JobQueue",
    "JobRow",
    "LoggingReminderSender",
    "PROCESS_SESSION",
    "PatientAdherence",
    "PatientRow",
    "Principal",
    "ProcessingContext",
    "REMINDER_HOUR",
    "REMINDER_MESSAGE",
    "ReminderRow",
    "ReminderSender",
    "ReportRow",
    "SESSION_STATUSES",
    "ServiceConfig",
    "SessionProcessor",
    "SessionRow",
    "ShoulderKeypoint",
    "StatusHistoryRow",
    "Worker",
    "adherence_stats",
    "advance_status",
    "build_processing_context",
    "create_app",
    "create_db_engine",
    "enrolled_days",
    "framing_check",
    "knowledge_corpus",
    "make_session_factory",
    "migrate",
    "next_reminder_time",
    "require_nurse",
    "require_patient_access",
    "reset_for_reprocessing",
    "resolve_token",
    "run_reminder_cycle",
    "utcnow",
]
