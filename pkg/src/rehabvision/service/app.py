"""FastAPI application factory for the rehabilitation assessment service."""

import json
import logging
import secrets
import uuid
from contextlib import asynccontextmanager
from datetime import date
from zoneinfo import ZoneInfo

from fastapi import Depends, FastAPI, File, Form, Header, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer
from sqlalchemy import func, select
from sqlalchemy.exc import IntegrityError

from ..errors import ConfigurationError, ValidationError
from ..segmentation import segments_from_json
from .analytics import adherence_stats, enrolled_days
from .auth import ApiError, Principal, require_nurse, require_patient_access, resolve_token
from .blobs import BlobStore
from .config import ServiceConfig
from .db import (
    FeedbackRow,
    PatientRow,
    ReportRow,
    SessionRow,
    StatusHistoryRow,
    create_db_engine,
    make_session_factory,
    migrate,
    utcnow,
)
from .pipeline import (
    PROCESS_SESSION,
    ProcessingContext,
    SessionProcessor,
    build_processing_context,
)
from .queue import JobHandler, JobQueue, Worker
from .schemas import (
    ActionReportOut,
    AdherenceOut,
    FeedbackIn,
    FeedbackOut,
    PatientAdherenceOut,
    PatientCreate,
    PatientOut,
    ReminderOptInBody,
    ReminderOptInOut,
    ReportOut,
    SegmentOut,
    SessionOut,
    StatusEvent,
    UploadAccepted,
)

logger = logging.getLogger(__name__)

_bearer = HTTPBearer(auto_error=False)


def create_app(
    config: ServiceConfig, context: ProcessingContext | None = None
) -> FastAPI:
    config.data_dir.mkdir(parents=True, exist_ok=True)
    engine = create_db_engine(config.db_url)
    migrate(engine)
    session_factory = make_session_factory(engine)
    blobs = BlobStore(config.blob_dir)
    if context is None:
        context = build_processing_context(config)
    queue = JobQueue(session_factory)
    processor = SessionProcessor(session_factory, blobs, context)
    worker = Worker(
        queue,
        {PROCESS_SESSION: JobHandler(processor, processor.on_final_failure)},
        poll_s=config.worker_poll_s,
    )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if config.run_worker:
            worker.start()
        yield
        worker.stop()

    app = FastAPI(title="rehabvision service", lifespan=lifespan)
    app.state.config = config
    app.state.engine = engine
    app.state.session_factory = session_factory
    app.state.blobs = blobs
    app.state.context = context
    app.state.queue = queue
    app.state.worker = worker

    label_names = {d.label_id: d.name for d in context.descriptions}

    # ---- plumbing -------------------------------------------------------

    def get_db(request: Request):
        with request.app.state.session_factory() as db:
            yield db

    def get_principal(
        request: Request,
        credentials: HTTPAuthorizationCredentials | None = Depends(_bearer),
        db=Depends(get_db),
    ) -> Principal:
        if credentials is None:
            raise ApiError(401, "unauthenticated", "missing bearer token")
        principal = resolve_token(db, request.app.state.config, credentials.credentials)
        if principal is None:
            raise ApiError(401, "unauthenticated", "unknown bearer token")
        return principal

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def request_validation_handler(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": [str(part) for part in error["loc"]], "msg": error["msg"]}
            for error in exc.errors()
        ]
        return JSONResponse(
            status_code=422,
            content={
                "error": {
                    "code": "validation_error",
                    "message": "; ".join(
                        f"{'.'.join(item['loc'])}: {item['msg']}" for item in detail
                    ),
                    "detail": detail,
                }
            },
        )

    @app.exception_handler(ValidationError)
    async def domain_validation_handler(request: Request, exc: ValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "validation_error", "message": str(exc)}},
        )

    def load_patient(db, patient_id: str) -> PatientRow:
        row = db.get(PatientRow, patient_id)
        if row is None:
            raise ApiError(404, "unknown_patient", f"no patient {patient_id!r}")
        return row

    def load_session(db, session_id: str) -> SessionRow:
        row = db.get(SessionRow, session_id)
        if row is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return row

    def session_out(db, row: SessionRow) -> SessionOut:
        segments = (
            segments_from_json(row.segments_json) if row.segments_json else []
        )
        history = db.execute(
            select(StatusHistoryRow)
            .where(StatusHistoryRow.session_id == row.session_id)
            .order_by(StatusHistoryRow.id)
        ).scalars().all()
        return SessionOut(
            session_id=row.session_id,
            patient_id=row.patient_id,
            upload_time=row.upload_time,
            status=row.status,
            report_id=row.report_id,
            error=row.error,
            segments=[
                SegmentOut(
                    label_id=s.label_id,
                    label_name=label_names.get(s.label_id, f"class {s.label_id}"),
                    start_frame=s.start_frame,
                    end_frame=s.end_frame,
                    mean_confidence=s.mean_confidence,
                    flagged_low_confidence=s.flagged_low_confidence,
                    subclip_uri=s.subclip_uri,
                )
                for s in segments
            ],
            status_history=[
                StatusEvent(status=h.status, at=h.at) for h in history
            ],
        )

    # ---- endpoints ------------------------------------------------------

    @app.post("/patients", response_model=PatientOut, status_code=201)
    def create_patient(
        body: PatientCreate,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        require_nurse(principal)
        if body.enrollment_date > date.today():
            raise ApiError(
                422, "validation_error", "enrollment_date must not be in the future"
            )
        try:
            ZoneInfo(body.timezone)
        except Exception as err:
            raise ApiError(
                422, "validation_error", f"unknown timezone {body.timezone!r}"
            ) from err
        if db.get(PatientRow, body.patient_id) is not None:
            raise ApiError(
                409, "duplicate_patient", f"patient {body.patient_id!r} already exists"
            )
        token = secrets.token_urlsafe(16)
        db.add(
            PatientRow(
                patient_id=body.patient_id,
                enrollment_date=body.enrollment_date,
                exercise_plan_id=body.exercise_plan_id,
                reminder_opt_in=body.reminder_opt_in,
                timezone=body.timezone,
                token=token,
            )
        )
        db.commit()
        return PatientOut(token=token, **body.model_dump())

    @app.post("/sessions", response_model=UploadAccepted, status_code=201)
    async def upload_session(
        request: Request,
        patient_id: str = Form(),
        video: UploadFile = File(),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        require_patient_access(principal, patient_id)
        load_patient(db, patient_id)
        if idempotency_key is not None:
            existing = db.execute(
                select(SessionRow).where(
                    SessionRow.patient_id == patient_id,
                    SessionRow.idempotency_key == idempotency_key,
                )
            ).scalar_one_or_none()
            if existing is not None:
                return JSONResponse(
                    status_code=200,
                    content=UploadAccepted(
                        session_id=existing.session_id,
                        status=existing.status,
                        deduplicated=True,
                    ).model_dump(),
                )
        data = await video.read()
        limit = request.app.state.config.max_video_bytes
        if not data:
            raise ApiError(422, "empty_video", "uploaded video is empty")
        if len(data) > limit:
            raise ApiError(
                413,
                "video_too_large",
                f"video is {len(data)} bytes; the limit is {limit} bytes",
            )
        suffix = "".join(
            c for c in (video.filename or "") if c == "." or c.isalnum()
        )
        suffix = suffix[suffix.rfind(".") :] if "." in suffix else ".mp4"
        uri = request.app.state.blobs.put(data, suffix=suffix)

        session_id = f"ses-{uuid.uuid4().hex[:12]}"
        row = SessionRow(
            session_id=session_id,
            patient_id=patient_id,
            upload_time=utcnow(),
            video_uri=uri,
            status="uploaded",
            idempotency_key=idempotency_key,
        )
        db.add(row)
        db.add(
            StatusHistoryRow(
                session_id=session_id, status="uploaded", at=row.upload_time
            )
        )
        try:
            db.commit()
        except IntegrityError:
            # a concurrent retry with the same Idempotency-Key won the insert
            db.rollback()
            existing = db.execute(
                select(SessionRow).where(
                    SessionRow.patient_id == patient_id,
                    SessionRow.idempotency_key == idempotency_key,
                )
            ).scalar_one()
            return JSONResponse(
                status_code=200,
                content=UploadAccepted(
                    session_id=existing.session_id,
                    status=existing.status,
                    deduplicated=True,
                ).model_dump(),
            )
        request.app.state.queue.enqueue(PROCESS_SESSION, {"session_id": session_id})
        return UploadAccepted(session_id=session_id, status="uploaded")

    @app.get("/sessions/{session_id}", response_model=SessionOut)
    def get_session(
        session_id: str,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        row = load_session(db, session_id)
        require_patient_access(principal, row.patient_id)
        return session_out(db, row)

    @app.get("/patients/{patient_id}/sessions", response_model=list[SessionOut])
    def list_patient_sessions(
        patient_id: str,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        require_patient_access(principal, patient_id)
        load_patient(db, patient_id)
        rows = db.execute(
            select(SessionRow)
            .where(SessionRow.patient_id == patient_id)
            .order_by(SessionRow.upload_time, SessionRow.session_id)
        ).scalars().all()
        return [session_out(db, row) for row in rows]

    @app.get("/reports/{report_id}", response_model=ReportOut)
    def get_report(
        report_id: str,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        report = db.get(ReportRow, report_id)
        if report is None:
            raise ApiError(404, "unknown_report", f"no report {report_id!r}")
        session = load_session(db, report.session_id)
        require_patient_access(principal, session.patient_id)
        payload = json.loads(report.payload_json)
        return ReportOut(
            report_id=report.report_id,
            session_id=report.session_id,
            created_at=report.created_at,
            final_summary=payload["final_summary"],
            actions=[
                ActionReportOut(
                    segment_id=action["segment_id"],
                    action_id=action["action_id"],
                    text=action["text"],
                    failed=action["failed"],
                    failure_reason=action["failure_reason"],
                )
                for action in payload["actions"]
            ],
            model_fingerprint=payload["model_fingerprint"],
            llm_calls=payload["llm_calls"],
            prompt_tokens=payload["prompt_tokens"],
            latency_s=payload["latency_s"],
        )

    @app.post(
        "/reports/{report_id}/feedback", response_model=FeedbackOut, status_code=201
    )
    def submit_feedback(
        report_id: str,
        body: FeedbackIn,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        require_nurse(principal)
        if db.get(ReportRow, report_id) is None:
            raise ApiError(404, "unknown_report", f"no report {report_id!r}")
        row = FeedbackRow(
            report_id=report_id,
            nurse_id=principal.actor_id,
            accuracy=body.accuracy,
            completeness=body.completeness,
            practicability=body.practicability,
            safety=body.safety,
            language_quality=body.language_quality,
            free_text=body.free_text,
        )
        db.add(row)
        db.commit()
        return FeedbackOut(
            feedback_id=row.id,
            report_id=report_id,
            nurse_id=row.nurse_id,
            created_at=row.created_at,
            **body.model_dump(),
        )

    @app.post("/patients/{patient_id}/reminder-optin", response_model=ReminderOptInOut)
    def reminder_optin(
        patient_id: str,
        body: ReminderOptInBody,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        require_patient_access(principal, patient_id)
        row = load_patient(db, patient_id)
        row.reminder_opt_in = body.opt_in
        db.commit()
        return ReminderOptInOut(
            patient_id=patient_id, reminder_opt_in=row.reminder_opt_in
        )

    @app.get("/analytics/adherence", response_model=AdherenceOut)
    def adherence(
        as_of: date | None = None,
        principal: Principal = Depends(get_principal),
        db=Depends(get_db),
    ):
        require_nurse(principal)
        if as_of is None:
            as_of = date.today()
        patients = db.execute(select(PatientRow)).scalars().all()
        if not patients:
            raise ApiError(422, "validation_error", "no patients registered")
        session_counts = dict(
            db.execute(
                select(SessionRow.patient_id, func.count())
                .group_by(SessionRow.patient_id)
            ).all()
        )
        counts = {
            p.patient_id: (
                session_counts.get(p.patient_id, 0),
                enrolled_days(p.enrollment_date, as_of),
            )
            for p in patients
        }
        stats = adherence_stats(counts)
        return AdherenceOut(
            as_of=as_of,
            avg_sessions=stats.avg_sessions,
            avg_frequency=stats.avg_frequency,
            per_patient=[
                PatientAdherenceOut(
                    patient_id=p.patient_id,
                    sessions=p.sessions,
                    enrolled_days=p.enrolled_days,
                    frequency=p.frequency,
                )
                for p in stats.per_patient
            ],
        )

    if config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        if not config.static_dir.is_dir():
            raise ConfigurationError(
                f"static_dir {config.static_dir} is not a directory"
            )
        app.mount(
            "/app", StaticFiles(directory=config.static_dir, html=True), name="app"
        )

    return app
