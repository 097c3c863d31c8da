"""Bearer-token auth with two roles: nurse tokens come from configuration,
patient tokens are issued at registration and live in the patients table."""

from dataclasses import dataclass

from fastapi import HTTPException
from sqlalchemy import select

from .config import ServiceConfig
from .db import PatientRow

NURSE = "nurse"
PATIENT = "patient"


class ApiError(HTTPException):
    """HTTP error whose body carries a machine-readable code."""

    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(status_code=status_code, detail=message)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class Principal:
    role: str
    actor_id: str


def resolve_token(db, config: ServiceConfig, token: str) -> Principal | None:
    nurse_id = config.nurse_tokens.get(token)
    if nurse_id is not None:
        return Principal(role=NURSE, actor_id=nurse_id)
    patient_id = db.execute(
        select(PatientRow.patient_id).where(PatientRow.token == token)
    ).scalar_one_or_none()
    if patient_id is not None:
        return Principal(role=PATIENT, actor_id=patient_id)
    return None


def require_nurse(principal: Principal) -> None:
    if principal.role != NURSE:
        raise ApiError(403, "forbidden", "this endpoint requires a nurse token")


def require_patient_access(principal: Principal, patient_id: str) -> None:
    """Nurses see everyone; a patient token only reaches its own records."""
    if principal.role == NURSE:
        return
    if principal.actor_id != patient_id:
        raise ApiError(403, "forbidden", "token does not grant access to this patient")
