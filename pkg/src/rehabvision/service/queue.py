"""Persistent job queue over the service database.

Delivery is at-least-once: a claim can be retried after a crash, so every
handler must be idempotent.  Claiming is an optimistic compare-and-set on
the job state, which serializes workers without database-specific locking.
"""

import json
import logging
import threading
import time
from dataclasses import dataclass
from datetime import timedelta
from typing import Callable, Mapping, Optional

from sqlalchemy import select, update
from sqlalchemy.orm import sessionmaker

from ..errors import ConfigurationError
from .db import JobRow, utcnow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JobHandler:
    run: Callable[[dict], None]
    on_final_failure: Optional[Callable[[dict, str], None]] = None


@dataclass(frozen=True)
class ClaimedJob:
    job_id: int
    kind: str
    payload: dict
    attempts: int
    max_attempts: int


class JobQueue:
    def __init__(self, session_factory: sessionmaker):
        self._session_factory = session_factory

    def enqueue(self, kind: str, payload: dict, max_attempts: int = 3) -> int:
        with self._session_factory() as db:
            job = JobRow(
                kind=kind,
                payload_json=json.dumps(payload),
                max_attempts=max_attempts,
            )
            db.add(job)
            db.commit()
            return job.id

    def claim(self) -> ClaimedJob | None:
        with self._session_factory() as db:
            candidate = db.execute(
                select(JobRow.id)
                .where(JobRow.state == "pending")
                .order_by(JobRow.id)
                .limit(1)
            ).scalar_one_or_none()
            if candidate is None:
                return None
            taken = db.execute(
                update(JobRow)
                .where(JobRow.id == candidate, JobRow.state == "pending")
                .values(
                    state="running",
                    attempts=JobRow.attempts + 1,
                    updated_at=utcnow(),
                )
            ).rowcount
            db.commit()
            if taken != 1:  # another worker won the row
                return None
            job = db.get(JobRow, candidate)
            return ClaimedJob(
                job_id=job.id,
                kind=job.kind,
                payload=json.loads(job.payload_json),
                attempts=job.attempts,
                max_attempts=job.max_attempts,
            )

    def _finish(self, job_id: int, state: str, error: str | None = None) -> None:
        with self._session_factory() as db:
            db.execute(
                update(JobRow)
                .where(JobRow.id == job_id)
                .values(state=state, last_error=error, updated_at=utcnow())
            )
            db.commit()

    def complete(self, job_id: int) -> None:
        self._finish(job_id, "done")

    def release_for_retry(self, job_id: int, error: str) -> None:
        self._finish(job_id, "pending", error)

    def fail(self, job_id: int, error: str) -> None:
        self._finish(job_id, "failed", error)

    def pending_count(self) -> int:
        with self._session_factory() as db:
            return len(
                db.execute(
                    select(JobRow.id).where(JobRow.state.in_(("pending", "running")))
                ).all()
            )

    def reset_stale_running(self, older_than_s: float) -> int:
        """Requeue jobs stuck in 'running' (e.g. after a crashed worker)."""
        cutoff = utcnow() - timedelta(seconds=older_than_s)
        with self._session_factory() as db:
            count = db.execute(
                update(JobRow)
                .where(JobRow.state == "running", JobRow.updated_at < cutoff)
                .values(state="pending", updated_at=utcnow())
            ).rowcount
            db.commit()
            return count


class Worker:
    """Pulls jobs and dispatches to handlers; retries until attempts run out."""

    def __init__(
        self,
        queue: JobQueue,
        handlers: Mapping[str, JobHandler],
        poll_s: float = 0.2,
    ):
        self.queue = queue
        self.handlers = dict(handlers)
        self.poll_s = poll_s
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def run_once(self) -> bool:
        job = self.queue.claim()
        if job is None:
            return False
        handler = self.handlers.get(job.kind)
        if handler is None:
            self.queue.fail(job.job_id, f"no handler for job kind {job.kind!r}")
            raise ConfigurationError(f"no handler for job kind {job.kind!r}")
        try:
            handler.run(job.payload)
        except Exception as error:  # noqa: BLE001 - queue boundary
            message = f"{type(error).__name__}: {error}"
            if job.attempts < job.max_attempts:
                logger.warning(
                    "job %d (%s) attempt %d/%d failed: %s",
                    job.job_id, job.kind, job.attempts, job.max_attempts, message,
                )
                self.queue.release_for_retry(job.job_id, message)
            else:
                logger.error(
                    "job %d (%s) failed permanently: %s",
                    job.job_id, job.kind, message,
                )
                self.queue.fail(job.job_id, message)
                if handler.on_final_failure is not None:
                    handler.on_final_failure(job.payload, message)
        else:
            self.queue.complete(job.job_id)
        return True

    def run_pending(self, max_jobs: int = 1000) -> int:
        ran = 0
        while ran < max_jobs and self.run_once():
            ran += 1
        return ran

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=10)
        self._thread = None

    def _loop(self) -> None:
        while not self._stop.is_set():
            try:
                if not self.run_once():
                    self._stop.wait(self.poll_s)
            except Exception:  # noqa: BLE001 - keep the loop alive
                logger.exception("worker loop error")
                self._stop.wait(self.poll_s)
