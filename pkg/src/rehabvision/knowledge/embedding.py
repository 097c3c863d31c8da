"""Deterministic hash-based text embedder.

A stand-in for a sentence-embedding provider: each lowercase token hashes to
a signed bucket, and the bucket counts are L2-normalized.  Texts sharing
vocabulary land near each other, which is all retrieval tests and desk-scale
corpora need, and the output is exactly reproducible across processes.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Protocol

import numpy as np

from ..errors import ValidationError


class Embedder(Protocol):
    @property
    def dim(self) -> int: ...

    @property
    def fingerprint(self) -> str: ...

    def embed(self, text: str) -> np.ndarray: ...

    def embed_batch(self, texts: Iterable[str]) -> np.ndarray: ...


class HashingEmbedder:
    """Signed hashing-trick embedder with unit-norm output."""

    def __init__(self, dim: int = 256):
        if dim < 2:
            raise ValidationError("embedding dim must be at least 2")
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def fingerprint(self) -> str:
        return f"hashing-v1-dim{self._dim}"

    def _bucket(self, token: str) -> tuple[int, float]:
        digest = hashlib.sha1(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:4], "big") % self._dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        return bucket, sign

    def embed(self, text: str) -> np.ndarray:
        vector = np.zeros(self._dim, dtype=np.float64)
        for token in text.lower().split():
            bucket, sign = self._bucket(token)
            vector[bucket] += sign
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            # tokens cancelled (or empty text): fall back to a unit vector
            # keyed on the whole text so the norm invariant always holds
            bucket, sign = self._bucket(text)
            vector[bucket] = sign
            norm = 1.0
        return (vector / norm).astype(np.float32)

    def embed_batch(self, texts: Iterable[str]) -> np.ndarray:
        rows = [self.embed(text) for text in texts]
        if not rows:
            return np.zeros((0, self._dim), dtype=np.float32)
        return np.stack(rows)
