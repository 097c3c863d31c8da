"""Pluggable multimodal LLM client: protocol, deterministic mock, retries."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from ..errors import FrameLimitError, ProviderError, ValidationError


@dataclass(frozen=True)
class ProviderProfile:
    """Provider identity and limits the caller must respect."""

    name: str
    max_frames_per_call: int = 64

    def __post_init__(self):
        if not self.name:
            raise ValidationError("provider name must be non-empty")
        if self.max_frames_per_call < 1:
            raise ValidationError("max_frames_per_call must be positive")


class LlmClient(Protocol):
    @property
    def profile(self) -> ProviderProfile: ...

    def send(self, prompt_text: str, frames: Sequence[np.ndarray]) -> str: ...


def check_frame_limit(profile: ProviderProfile, frame_count: int) -> None:
    """Pre-flight guard: reject calls that would exceed the provider cap."""
    if frame_count > profile.max_frames_per_call:
        raise FrameLimitError(
            f"{frame_count} frames exceeds {profile.name} cap of "
            f"{profile.max_frames_per_call}"
        )


class MockLlmClient:
    """Deterministic stand-in: the response is a pure function of inputs.

    Distinct prompts/frames give distinct tags, so tests can check that a
    downstream prompt embeds earlier responses verbatim and in order.
    """

    def __init__(self, profile: ProviderProfile | None = None):
        self._profile = profile or ProviderProfile(name="mock", max_frames_per_call=64)

    @property
    def profile(self) -> ProviderProfile:
        return self._profile

    def send(self, prompt_text: str, frames: Sequence[np.ndarray]) -> str:
        check_frame_limit(self._profile, len(frames))
        digest = hashlib.sha256(prompt_text.encode("utf-8"))
        for frame in frames:
            array = np.ascontiguousarray(frame)
            digest.update(str(array.shape).encode())
            digest.update(array.tobytes())
        return f"[{self._profile.name}-response {digest.hexdigest()[:16]}]"


class FlakyLlmClient:
    """Test double that fails a fixed number of times before succeeding."""

    def __init__(self, inner: LlmClient, failures: int):
        self._inner = inner
        self._remaining_failures = failures
        self.calls = 0

    @property
    def profile(self) -> ProviderProfile:
        return self._inner.profile

    def send(self, prompt_text: str, frames: Sequence[np.ndarray]) -> str:
        self.calls += 1
        if self._remaining_failures > 0:
            self._remaining_failures -= 1
            raise ProviderError("synthetic transient failure")
        return self._inner.send(prompt_text, frames)


class RetryingLlmClient:
    """Retries transient provider failures with exponential backoff.

    Frame-limit violations are configuration problems, not transient, and
    are never retried.
    """

    def __init__(
        self,
        inner: LlmClient,
        max_retries: int = 2,
        backoff_s: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_retries < 0:
            raise ValidationError("max_retries must be non-negative")
        self._inner = inner
        self._max_retries = max_retries
        self._backoff_s = backoff_s
        self._sleep = sleep

    @property
    def profile(self) -> ProviderProfile:
        return self._inner.profile

    def send(self, prompt_text: str, frames: Sequence[np.ndarray]) -> str:
        last: ProviderError | None = None
        for attempt in range(self._max_retries + 1):
            try:
                return self._inner.send(prompt_text, frames)
            except FrameLimitError:
                raise
            except ProviderError as error:
                last = error
                if attempt < self._max_retries:
                    self._sleep(self._backoff_s * 2**attempt)
        raise ProviderError(
            f"provider {self.profile.name} failed after "
            f"{self._max_retries + 1} attempts: {last}",
            attempts=self._max_retries + 1,
        )
