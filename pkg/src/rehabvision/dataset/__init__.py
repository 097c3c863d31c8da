from .annotations import LabelSpan, TimelineAnnotation, load_annotation, save_annotation
from .builder import (
    BuiltDataset,
    DatasetManifest,
    WindowSample,
    build_dataset,
    split_videos,
)
from .windows import (
    NO_ACTION,
    NUM_CLASSES,
    SAMPLE_STEP,
    SAMPLES_PER_WINDOW,
    WINDOW_SIZE,
    WINDOW_STRIDE,
    extract_windows,
    resolve_window_label,
    sampled_indices,
)

__all__ = [
    "LabelSpan",
    "TimelineAnnotation",
    "load_annotation",
    "save_annotation",
    "BuiltDataset",
    "DatasetManifest",
    "WindowSample",
    "build_dataset",
    "split_videos",
    "NO_ACTION",
    "NUM_CLASSES",
    "SAMPLE_STEP",
    "SAMPLES_PER_WINDOW",
    "WINDOW_SIZE",
    "WINDOW_STRIDE",
    "extract_windows",
    "resolve_window_label",
    "sampled_indices",
]
