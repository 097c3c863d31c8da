"""Tokenization and class-description assets for the text stream.

The text encoder is trained from scratch, so a fixed subword vocabulary buys
nothing; a stable hashing tokenizer keeps the pipeline dependency-free and
deterministic across processes.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import ConfigurationError, ValidationError

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
NUM_RESERVED = 3

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class HashingTokenizer:
    """Word-level tokenizer hashing each token into a fixed id space."""

    def __init__(self, vocab_size: int):
        if vocab_size <= NUM_RESERVED:
            raise ConfigurationError("vocab_size must exceed the reserved ids")
        self.vocab_size = vocab_size

    def _token_id(self, token: str) -> int:
        digest = hashlib.sha1(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "big") % (self.vocab_size - NUM_RESERVED)
        return NUM_RESERVED + bucket

    def encode(self, text: str) -> list[int]:
        """BOS + hashed word tokens + EOS; no truncation."""
        tokens = _TOKEN_RE.findall(text.lower())
        return [BOS_ID, *(self._token_id(t) for t in tokens), EOS_ID]


@dataclass(frozen=True)
class ClassDescription:
    """One action class with its motion description used as the text prompt."""

    label_id: int
    name: str
    description: str

    def __post_init__(self):
        if self.label_id < 0:
            raise ValidationError("label_id must be non-negative")
        if not self.name.strip() or not self.description.strip():
            raise ValidationError(f"class {self.label_id} has empty name/description")


def load_class_descriptions(path: str | Path | None = None) -> tuple[ClassDescription, ...]:
    """Load class descriptions from ``path`` or the packaged default asset.

    Label ids must form the contiguous range 0..N-1.
    """
    if path is None:
        ref = resources.files("rehabvision.assets") / "class_descriptions.json"
        payload = json.loads(ref.read_text(encoding="utf-8"))
    else:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = [
        ClassDescription(
            label_id=int(row["label_id"]),
            name=row["name"],
            description=row["description"],
        )
        for row in payload["classes"]
    ]
    entries.sort(key=lambda d: d.label_id)
    ids = [d.label_id for d in entries]
    if ids != list(range(len(entries))):
        raise ValidationError(f"label ids must be contiguous from 0, got {ids}")
    return tuple(entries)


def descriptions_fingerprint(descriptions: tuple[ClassDescription, ...]) -> str:
    """Stable hash of the class texts, for checkpoint compatibility checks."""
    canonical = json.dumps(
        [[d.label_id, d.name, d.description] for d in descriptions],
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
