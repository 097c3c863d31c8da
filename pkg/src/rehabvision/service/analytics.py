"""Adherence analytics over registered patients and recorded sessions."""

from dataclasses import dataclass
from datetime import date
from typing import Mapping

from ..errors import ValidationError


@dataclass(frozen=True)
class PatientAdherence:
    patient_id: str
    sessions: int
    enrolled_days: int
    frequency: float


@dataclass(frozen=True)
class AdherenceStats:
    avg_sessions: float
    avg_frequency: float
    per_patient: tuple[PatientAdherence, ...]


def enrolled_days(enrollment_date: date, as_of: date) -> int:
    """Days enrolled counting both endpoints (enrolled today -> 1)."""
    if as_of < enrollment_date:
        raise ValidationError(
            f"as_of {as_of} precedes enrollment {enrollment_date}"
        )
    return (as_of - enrollment_date).days + 1


def adherence_stats(counts: Mapping[str, tuple[int, int]]) -> AdherenceStats:
    """Summarise per-patient (session count, enrolled days) pairs.

    avg_sessions is total sessions over total patients; each patient's
    frequency is sessions per enrolled day and avg_frequency is their mean.
    """
    if not counts:
        raise ValidationError("adherence stats need at least one patient")
    per_patient = []
    for patient_id in sorted(counts):
        sessions, days = counts[patient_id]
        if sessions < 0:
            raise ValidationError(f"patient {patient_id!r}: negative sessions")
        if days < 1:
            raise ValidationError(
                f"patient {patient_id!r}: enrolled days must be >= 1"
            )
        per_patient.append(
            PatientAdherence(
                patient_id=patient_id,
                sessions=sessions,
                enrolled_days=days,
                frequency=sessions / days,
            )
        )
    total_sessions = sum(p.sessions for p in per_patient)
    return AdherenceStats(
        avg_sessions=total_sessions / len(per_patient),
        avg_frequency=sum(p.frequency for p in per_patient) / len(per_patient),
        per_patient=tuple(per_patient),
    )
