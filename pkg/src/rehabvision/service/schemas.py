"""Pydantic request/response bodies for the HTTP API."""

from datetime import date, datetime

from pydantic import BaseModel, Field


class PatientCreate(BaseModel):
    patient_id: str = Field(min_length=1, max_length=64)
    enrollment_date: date
    exercise_plan_id: str = Field(min_length=1, max_length=64)
    reminder_opt_in: bool = False
    timezone: str = "UTC"


class PatientOut(BaseModel):
    patient_id: str
    enrollment_date: date
    exercise_plan_id: str
    reminder_opt_in: bool
    timezone: str
    token: str  # bearer credential, returned only at registration


class UploadAccepted(BaseModel):
    session_id: str
    status: str
    deduplicated: bool = False  # true when an Idempotency-Key replay matched


class SegmentOut(BaseModel):
    label_id: int
    label_name: str
    start_frame: int
    end_frame: int
    mean_confidence: float
    flagged_low_confidence: bool
    subclip_uri: str | None


class StatusEvent(BaseModel):
    status: str
    at: datetime


class SessionOut(BaseModel):
    session_id: str
    patient_id: str
    upload_time: datetime
    status: str
    report_id: str | None
    error: str | None
    segments: list[SegmentOut]
    status_history: list[StatusEvent]


class ActionReportOut(BaseModel):
    segment_id: str
    action_id: int
    text: str
    failed: bool
    failure_reason: str


class ReportOut(BaseModel):
    report_id: str
    session_id: str
    created_at: datetime
    final_summary: str
    actions: list[ActionReportOut]
    model_fingerprint: str
    llm_calls: int
    prompt_tokens: int
    latency_s: float


class FeedbackIn(BaseModel):
    accuracy: int = Field(ge=1, le=10)
    completeness: int = Field(ge=1, le=10)
    practicability: int = Field(ge=1, le=10)
    safety: int = Field(ge=1, le=10)
    language_quality: int = Field(ge=1, le=10)
    free_text: str = ""


class FeedbackOut(FeedbackIn):
    feedback_id: int
    report_id: str
    nurse_id: str
    created_at: datetime


class ReminderOptInBody(BaseModel):
    opt_in: bool = True


class ReminderOptInOut(BaseModel):
    patient_id: str
    reminder_opt_in: bool


class PatientAdherenceOut(BaseModel):
    patient_id: str
    sessions: int
    enrolled_days: int
    frequency: float


class AdherenceOut(BaseModel):
    as_of: date
    avg_sessions: float
    avg_frequency: float
    per_patient: list[PatientAdherenceOut]
