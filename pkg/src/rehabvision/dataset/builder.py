"""Windowed dataset construction from annotated session videos.

Every window of every video becomes one sample; videos are assigned to
splits whole, so no video contributes to more than one split. Rebuilding
from identical inputs yields byte-identical manifests: videos are processed
in sorted id order and serialization is canonical.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ValidationError
from .annotations import TimelineAnnotation
from .windows import extract_windows, resolve_window_label, sampled_indices

MANIFEST_VERSION = 1

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class WindowSample:
    video_id: str
    start_frame: int
    sampled_frame_indices: tuple[int, ...]
    per_frame_labels: tuple[int, ...]
    window_label: int

    def to_record(self) -> dict:
        return {
            "video_id": self.video_id,
            "start_frame": self.start_frame,
            "sampled_frame_indices": list(self.sampled_frame_indices),
            "per_frame_labels": list(self.per_frame_labels),
            "window_label": self.window_label,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "WindowSample":
        return cls(
            video_id=rec["video_id"],
            start_frame=rec["start_frame"],
            sampled_frame_indices=tuple(rec["sampled_frame_indices"]),
            per_frame_labels=tuple(rec["per_frame_labels"]),
            window_label=rec["window_label"],
        )


@dataclass
class DatasetManifest:
    version: int
    split_assignments: dict[str, str]  # video_id -> split
    sample_counts: dict[str, int]
    label_histograms: dict[str, dict[int, int]]
    seed: int | None = None

    def to_json(self) -> str:
        data = {
            "version": self.version,
            "seed": self.seed,
            "split_assignments": self.split_assignments,
            "sample_counts": self.sample_counts,
            "label_histograms": {
                split: {str(k): v for k, v in sorted(hist.items())}
                for split, hist in self.label_histograms.items()
            },
        }
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        data = json.loads(text)
        return cls(
            version=data["version"],
            split_assignments=data["split_assignments"],
            sample_counts=data["sample_counts"],
            label_histograms={
                split: {int(k): v for k, v in hist.items()}
                for split, hist in data["label_histograms"].items()
            },
            seed=data.get("seed"),
        )


@dataclass
class BuiltDataset:
    manifest: DatasetManifest
    samples: dict[str, list[WindowSample]] = field(default_factory=dict)

    def save(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "manifest.json").write_text(self.manifest.to_json() + "\n", encoding="utf-8")
        samples_dir = out / "samples"
        samples_dir.mkdir(exist_ok=True)
        for split, samples in sorted(self.samples.items()):
            with open(samples_dir / f"{split}.jsonl", "w", encoding="utf-8") as fh:
                for s in samples:
                    fh.write(json.dumps(s.to_record(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, in_dir: str | Path) -> "BuiltDataset":
        root = Path(in_dir)
        manifest = DatasetManifest.from_json((root / "manifest.json").read_text(encoding="utf-8"))
        samples: dict[str, list[WindowSample]] = {}
        for split_file in sorted((root / "samples").glob("*.jsonl")):
            with open(split_file, "r", encoding="utf-8") as fh:
                samples[split_file.stem] = [
                    WindowSample.from_record(json.loads(line)) for line in fh if line.strip()
                ]
        return cls(manifest=manifest, samples=samples)


def split_videos(video_ids: list[str], n_train: int, seed: int = 0) -> dict[str, str]:
    """Assign the first ``n_train`` ids to train; shuffle the rest (seeded)
    and split them equally into val and test (odd remainder goes to val)."""
    assignments = {vid: "train" for vid in video_ids[:n_train]}
    rest = list(video_ids[n_train:])
    random.Random(seed).shuffle(rest)
    half = (len(rest) + 1) // 2
    for vid in rest[:half]:
        assignments[vid] = "val"
    for vid in rest[half:]:
        assignments[vid] = "test"
    return assignments


def build_dataset(
    frame_counts: dict[str, int],
    annotations: dict[str, TimelineAnnotation],
    split_config: dict[str, str] | dict[str, list[str]],
    seed: int | None = None,
) -> BuiltDataset:
    """Emit WindowSamples for every window of every video.

    ``split_config`` is either video_id -> split or split -> [video_ids].
    Every video must have an annotation; a video listed in more than one
    split is rejected.
    """
    assignments = _normalize_split_config(split_config)
    unknown = sorted(set(assignments) - set(frame_counts))
    if unknown:
        raise ValidationError(f"split_config references unknown videos: {unknown}")
    missing = sorted(set(assignments) - set(annotations))
    if missing:
        raise ValidationError(f"videos lack annotations: {missing}")

    samples: dict[str, list[WindowSample]] = {s: [] for s in SPLITS}
    histograms: dict[str, dict[int, int]] = {s: {} for s in SPLITS}
    for video_id in sorted(assignments):
        split = assignments[video_id]
        ann = annotations[video_id]
        n = frame_counts[video_id]
        for start in extract_windows(n):
            idxs = tuple(sampled_indices(start))
            labels = tuple(ann.label_at(i) for i in idxs)
            window_label = resolve_window_label(list(labels))
            samples[split].append(
                WindowSample(video_id, start, idxs, labels, window_label)
            )
            histograms[split][window_label] = histograms[split].get(window_label, 0) + 1

    manifest = DatasetManifest(
        version=MANIFEST_VERSION,
        split_assignments=dict(sorted(assignments.items())),
        sample_counts={s: len(samples[s]) for s in SPLITS},
        label_histograms=histograms,
        seed=seed,
    )
    return BuiltDataset(manifest=manifest, samples=samples)


def _normalize_split_config(split_config) -> dict[str, str]:
    if not split_config:
        raise ValidationError("split_config is empty")
    first_value = next(iter(split_config.values()))
    if isinstance(first_value, str):
        assignments = dict(split_config)
    else:
        assignments = {}
        for split, vids in split_config.items():
            for vid in vids:
                if vid in assignments:
                    raise ValidationError(
                        f"video {vid!r} assigned to both {assignments[vid]!r} and {split!r}"
                    )
                assignments[vid] = split
    bad = {s for s in assignments.values() if s not in SPLITS}
    if bad:
        raise ValidationError(f"unknown split names: {sorted(bad)}")
    return assignments
