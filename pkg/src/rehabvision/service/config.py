"""Service configuration, sourced from a dataclass or environment variables."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..errors import ConfigurationError

ENV_PREFIX = "REHABVISION_"


@dataclass
class ServiceConfig:
    data_dir: Path
    db_url: str = ""
    max_video_bytes: int = 256 * 1024 * 1024
    nurse_tokens: Mapping[str, str] = field(default_factory=dict)  # token -> nurse id
    run_worker: bool = True
    worker_poll_s: float = 0.2
    min_segment_frames: int = 30
    brightness_floor: float = 90.0
    retrieval_k: int = 3
    framing_confidence_floor: float = 0.3
    static_dir: Path | None = None  # built dashboard assets, served at /app

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if not self.db_url:
            self.db_url = f"sqlite:///{self.data_dir / 'service.db'}"
        if self.max_video_bytes < 1:
            raise ConfigurationError("max_video_bytes must be positive")
        if self.static_dir is not None:
            self.static_dir = Path(self.static_dir)

    @property
    def blob_dir(self) -> Path:
        return self.data_dir / "blobs"

    @property
    def knowledge_cache_path(self) -> Path:
        return self.data_dir / "knowledge_cache.json"

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ServiceConfig":
        """Read REHABVISION_* variables; DATA_DIR is the only required one."""
        env = os.environ if env is None else env
        data_dir = env.get(f"{ENV_PREFIX}DATA_DIR")
        if not data_dir:
            raise ConfigurationError(f"{ENV_PREFIX}DATA_DIR is not set")
        # "token:nurse1,token2:nurse2"
        tokens: dict[str, str] = {}
        for pair in filter(None, env.get(f"{ENV_PREFIX}NURSE_TOKENS", "").split(",")):
            token, _, nurse_id = pair.partition(":")
            if not token or not nurse_id:
                raise ConfigurationError(
                    f"malformed {ENV_PREFIX}NURSE_TOKENS entry {pair!r}"
                )
            tokens[token] = nurse_id
        return cls(
            data_dir=Path(data_dir),
            db_url=env.get(f"{ENV_PREFIX}DB_URL", ""),
            max_video_bytes=int(
                env.get(f"{ENV_PREFIX}MAX_VIDEO_MB", "256")
            ) * 1024 * 1024,
            nurse_tokens=tokens,
            static_dir=(
                Path(static) if (static := env.get(f"{ENV_PREFIX}STATIC_DIR")) else None
            ),
        )
