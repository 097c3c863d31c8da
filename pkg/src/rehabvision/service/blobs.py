"""Content-addressed blob store: the database keeps URIs, not bytes."""

import hashlib
from pathlib import Path

from ..errors import ValidationError


class BlobStore:
    """Files stored under sha256 fan-out paths; identical bytes share one file."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def put(self, data: bytes, suffix: str = "") -> str:
        if not data:
            raise ValidationError("refusing to store an empty blob")
        digest = hashlib.sha256(data).hexdigest()
        path = self.root / digest[:2] / f"{digest[2:]}{suffix}"
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return str(path)

    def open_dir(self, name: str) -> Path:
        """A named subdirectory for derived artifacts (e.g. per-session clips)."""
        path = self.root / "derived" / name
        path.mkdir(parents=True, exist_ok=True)
        return path
