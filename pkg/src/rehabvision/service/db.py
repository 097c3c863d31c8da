"""SQLAlchemy schema, engine helpers, and the session status machine.

All stored datetimes are naive UTC (SQLite drops tzinfo); callers convert
at the edges.
"""

from datetime import date, datetime, timezone

from sqlalchemy import (
    DateTime,
    ForeignKey,
    String,
    Text,
    UniqueConstraint,
    create_engine,
)
from sqlalchemy.engine import Engine
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, sessionmaker

from ..errors import ValidationError

SESSION_STATUSES = ("uploaded", "segmented", "reported", "failed")
# forward-only: no transition may skip segmentation before reporting
_NEXT_STATUS = {"uploaded": "segmented", "segmented": "reported"}

JOB_STATES = ("pending", "running", "done", "failed")


def utcnow() -> datetime:
    return datetime.now(timezone.utc).replace(tzinfo=None)


class Base(DeclarativeBase):
    pass


class PatientRow(Base):
    __tablename__ = "patients"

    patient_id: Mapped[str] = mapped_column(String(64), primary_key=True)
    enrollment_date: Mapped[date]
    exercise_plan_id: Mapped[str] = mapped_column(String(64))
    reminder_opt_in: Mapped[bool] = mapped_column(default=False)
    timezone: Mapped[str] = mapped_column(String(64), default="UTC")
    token: Mapped[str] = mapped_column(String(64), unique=True, index=True)


class SessionRow(Base):
    __tablename__ = "sessions"

    session_id: Mapped[str] = mapped_column(String(64), primary_key=True)
    patient_id: Mapped[str] = mapped_column(
        ForeignKey("patients.patient_id"), index=True
    )
    upload_time: Mapped[datetime] = mapped_column(DateTime, default=utcnow)
    video_uri: Mapped[str] = mapped_column(Text)
    status: Mapped[str] = mapped_column(String(16), default="uploaded")
    report_id: Mapped[str | None] = mapped_column(String(64), default=None)
    error: Mapped[str | None] = mapped_column(Text, default=None)
    idempotency_key: Mapped[str | None] = mapped_column(String(128), default=None)
    segments_json: Mapped[str | None] = mapped_column(Text, default=None)

    __table_args__ = (
        UniqueConstraint("patient_id", "idempotency_key", name="uq_upload_idem"),
    )


class StatusHistoryRow(Base):
    __tablename__ = "status_history"

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    session_id: Mapped[str] = mapped_column(
        ForeignKey("sessions.session_id"), index=True
    )
    status: Mapped[str] = mapped_column(String(16))
    at: Mapped[datetime] = mapped_column(DateTime, default=utcnow)


class ReportRow(Base):
    __tablename__ = "reports"

    report_id: Mapped[str] = mapped_column(String(64), primary_key=True)
    session_id: Mapped[str] = mapped_column(
        ForeignKey("sessions.session_id"), unique=True, index=True
    )
    created_at: Mapped[datetime] = mapped_column(DateTime, default=utcnow)
    payload_json: Mapped[str] = mapped_column(Text)


class FeedbackRow(Base):
    __tablename__ = "feedback"

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    report_id: Mapped[str] = mapped_column(
        ForeignKey("reports.report_id"), index=True
    )
    nurse_id: Mapped[str] = mapped_column(String(64))
    accuracy: Mapped[int]
    completeness: Mapped[int]
    practicability: Mapped[int]
    safety: Mapped[int]
    language_quality: Mapped[int]
    free_text: Mapped[str] = mapped_column(Text, default="")
    created_at: Mapped[datetime] = mapped_column(DateTime, default=utcnow)


class JobRow(Base):
    __tablename__ = "jobs"

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    kind: Mapped[str] = mapped_column(String(32))
    payload_json: Mapped[str] = mapped_column(Text)
    state: Mapped[str] = mapped_column(String(16), default="pending", index=True)
    attempts: Mapped[int] = mapped_column(default=0)
    max_attempts: Mapped[int] = mapped_column(default=3)
    last_error: Mapped[str | None] = mapped_column(Text, default=None)
    created_at: Mapped[datetime] = mapped_column(DateTime, default=utcnow)
    updated_at: Mapped[datetime] = mapped_column(DateTime, default=utcnow)


class ReminderRow(Base):
    __tablename__ = "reminders"

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    patient_id: Mapped[str] = mapped_column(ForeignKey("patients.patient_id"))
    local_date: Mapped[date]
    sent_at: Mapped[datetime] = mapped_column(DateTime, default=utcnow)

    __table_args__ = (
        UniqueConstraint("patient_id", "local_date", name="uq_reminder_day"),
    )


def advance_status(db, session_row: SessionRow, new_status: str) -> None:
    """Move a session forward (or to failed) and append to its history."""
    if new_status not in SESSION_STATUSES:
        raise ValidationError(f"unknown session status {new_status!r}")
    if new_status == "failed":
        allowed = session_row.status != "failed"
    else:
        allowed = _NEXT_STATUS.get(session_row.status) == new_status
    if not allowed:
        raise ValidationError(
            f"illegal status transition {session_row.status!r} -> {new_status!r}"
        )
    session_row.status = new_status
    db.add(
        StatusHistoryRow(
            session_id=session_row.session_id, status=new_status, at=utcnow()
        )
    )


def create_db_engine(db_url: str) -> Engine:
    kwargs = {}
    if db_url.startswith("sqlite"):
        # the worker thread shares the request handlers' engine
        kwargs["connect_args"] = {"check_same_thread": False}
    return create_engine(db_url, **kwargs)


def migrate(engine: Engine) -> None:
    Base.metadata.create_all(engine)


def make_session_factory(engine: Engine) -> sessionmaker:
    return sessionmaker(bind=engine, expire_on_commit=False)
