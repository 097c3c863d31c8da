"""Daily exercise reminders at 08:00 patient-local time.

Delivery is an interface with a logging default; a cycle runs periodically,
sends whatever is due, and records deliveries so each (patient, local day)
gets at most one reminder.  Failed deliveries are not recorded, so the next
cycle retries them.
"""

import logging
from datetime import datetime, timedelta, timezone
from typing import Protocol
from zoneinfo import ZoneInfo

from sqlalchemy import select
from sqlalchemy.exc import IntegrityError
from sqlalchemy.orm import sessionmaker

from ..errors import ValidationError
from .db import PatientRow, ReminderRow, utcnow

logger = logging.getLogger(__name__)

REMINDER_HOUR = 8
REMINDER_MESSAGE = "Good morning! Please remember today's rehabilitation exercises."


def next_reminder_time(now_local: datetime) -> datetime:
    """The next local 08:00 at or after ``now_local``."""
    due = now_local.replace(hour=REMINDER_HOUR, minute=0, second=0, microsecond=0)
    if now_local > due:
        due += timedelta(days=1)
    return due


class ReminderSender(Protocol):
    def send(self, patient_id: str, message: str) -> None: ...


class LoggingReminderSender:
    """Default delivery channel: log the reminder and remember it."""

    def __init__(self):
        self.sent: list[tuple[str, str]] = []

    def send(self, patient_id: str, message: str) -> None:
        logger.info("reminder to %s: %s", patient_id, message)
        self.sent.append((patient_id, message))


def run_reminder_cycle(
    session_factory: sessionmaker,
    sender: ReminderSender,
    now_utc: datetime | None = None,
) -> list[str]:
    """Deliver reminders due in each opted-in patient's local morning.

    Returns the patient ids delivered this cycle.
    """
    if now_utc is None:
        now_utc = datetime.now(timezone.utc)
    if now_utc.tzinfo is None:
        raise ValidationError("now_utc must be timezone-aware")

    delivered = []
    with session_factory() as db:
        patients = db.execute(
            select(PatientRow).where(PatientRow.reminder_opt_in)
        ).scalars().all()
        for patient in patients:
            local = now_utc.astimezone(ZoneInfo(patient.timezone))
            if local.hour < REMINDER_HOUR:
                continue
            already = db.execute(
                select(ReminderRow.id).where(
                    ReminderRow.patient_id == patient.patient_id,
                    ReminderRow.local_date == local.date(),
                )
            ).scalar_one_or_none()
            if already is not None:
                continue
            try:
                sender.send(patient.patient_id, REMINDER_MESSAGE)
            except Exception as error:  # noqa: BLE001 - retried next cycle
                logger.warning(
                    "reminder delivery to %s failed (will retry): %s",
                    patient.patient_id, error,
                )
                continue
            db.add(
                ReminderRow(
                    patient_id=patient.patient_id,
                    local_date=local.date(),
                    sent_at=utcnow(),
                )
            )
            try:
                db.commit()
            except IntegrityError:  # concurrent cycle already recorded it
                db.rollback()
                continue
            delivered.append(patient.patient_id)
    return delivered
