import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rehabvision.dataset import (
    NO_ACTION,
    extract_windows,
    resolve_window_label,
    sampled_indices,
)
from rehabvision.errors import DependencyError, MediaError, ValidationError
from rehabvision.model import ColorStubClassifier
from rehabvision.segmentation import (
    ActionSegment,
    WindowPrediction,
    extract_subclips,
    frame_labels,
    predict_windows,
    segment_video,
    segments_from_json,
    segments_to_json,
    smooth_and_segment,
)
from rehabvision.video import probe_video, write_video


def preds(*rows):
    return [
        WindowPrediction(start_frame=s, label_id=l, confidence=c)
        for s, l, c in rows
    ]


def zero_noise_predictions(true_labels):
    """Window predictions a perfect model would emit for a labelled video."""
    out = []
    for start in extract_windows(len(true_labels)):
        label = resolve_window_label([int(true_labels[i]) for i in sampled_indices(start)])
        out.append(WindowPrediction(start_frame=start, label_id=label, confidence=0.95))
    return out


def solid_video(path, spans, frame_count, size=64, fps=30.0):
    """Video of solid-color frames: spans map [start, end] -> RGB color."""
    frames = np.zeros((frame_count, size, size, 3), dtype=np.uint8)
    frames[:] = 8  # dark background -> "no action" for the stub
    for (start, end), color in spans:
        frames[start : end + 1] = color
    write_video(path, list(frames), fps)
    return path


RED, GREEN = (200, 16, 16), (16, 200, 16)  # stub labels 4 and 5


class TestPredictWindows:
    def test_150_frame_video_gives_5_predictions(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 149), RED)], 150)
        predictions = predict_windows(video, ColorStubClassifier())
        assert [p.start_frame for p in predictions] == [0, 21, 42, 63, 84]
        assert all(p.label_id == 4 for p in predictions)

    def test_deterministic(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 99), GREEN)], 160)
        first = predict_windows(video, ColorStubClassifier())
        second = predict_windows(video, ColorStubClassifier())
        assert first == second

    def test_confidence_is_top_class_probability(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 149), RED)], 150)
        predictions = predict_windows(video, ColorStubClassifier(confidence=0.9))
        assert all(p.confidence == pytest.approx(0.9) for p in predictions)

    def test_undecodable_video_is_media_error(self, tmp_path):
        bogus = tmp_path / "not_a_video.mp4"
        bogus.write_bytes(b"definitely not mp4")
        with pytest.raises(MediaError):
            predict_windows(bogus, ColorStubClassifier())

    def test_missing_pose_stream_is_dependency_error(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 149), RED)], 150)

        class NeedsSkeleton(ColorStubClassifier):
            requires_skeleton = True

        with pytest.raises(DependencyError):
            predict_windows(video, NeedsSkeleton())

    def test_short_pose_stream_is_dependency_error(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 149), RED)], 150)
        with pytest.raises(DependencyError):
            predict_windows(
                video, ColorStubClassifier(), skeleton_features=np.zeros((100, 17))
            )


class TestFrameLabels:
    def test_single_window_labels_all_covered_frames(self):
        labels = frame_labels(preds((0, 4, 0.9)), 60)
        assert (labels == 4).all()

    def test_majority_vote(self):
        # frame 59 covered by windows {4, 4, no-action}
        labels = frame_labels(
            preds((0, 4, 0.9), (21, 4, 0.9), (42, NO_ACTION, 0.9)), 102
        )
        assert labels[59] == 4

    def test_action_beats_no_action_tie(self):
        labels = frame_labels(preds((0, NO_ACTION, 0.9), (21, 7, 0.9)), 81)
        assert labels[30] == 7

    def test_action_tie_earliest_window_wins(self):
        labels = frame_labels(preds((0, 9, 0.9), (21, 3, 0.9)), 81)
        assert labels[30] == 9

    def test_uncovered_tail_inherits_nearest(self):
        # 70 frames, one window: frames 60..69 uncovered
        labels = frame_labels(preds((0, 5, 0.9)), 70)
        assert (labels[60:] == 5).all()

    def test_no_windows_gives_no_action(self):
        assert (frame_labels([], 30) == NO_ACTION).all()


class TestSmoothAndSegment:
    def test_single_run(self):
        segments = smooth_and_segment([4] * 100, 45)
        assert [(s.start_frame, s.end_frame, s.label_id) for s in segments] == [
            (0, 99, 4)
        ]

    def test_no_action_runs_removed(self):
        labels = [4] * 50 + [NO_ACTION] * 50 + [4] * 50
        segments = smooth_and_segment(labels, 45)
        assert [(s.start_frame, s.end_frame) for s in segments] == [(0, 49), (100, 149)]

    def test_short_action_run_absorbed_into_merged_segment(self):
        labels = [4] * 50 + [7] * 3 + [4] * 50
        segments = smooth_and_segment(labels, 30)
        assert [(s.start_frame, s.end_frame, s.label_id) for s in segments] == [
            (0, 102, 4)
        ]

    def test_leading_short_run_absorbs_forward(self):
        labels = [7] * 10 + [4] * 90
        segments = smooth_and_segment(labels, 45)
        assert [(s.start_frame, s.end_frame, s.label_id) for s in segments] == [
            (0, 99, 4)
        ]

    def test_confidence_mean_and_low_confidence_flag(self):
        predictions = preds((0, 4, 0.3), (21, 4, 0.35), (42, 4, 0.25))
        segments = smooth_and_segment(
            [4] * 102, 45, video_id="v", predictions=predictions
        )
        assert segments[0].mean_confidence == pytest.approx(0.3)
        assert segments[0].flagged_low_confidence

    def test_confident_segment_not_flagged(self):
        segments = smooth_and_segment(
            [4] * 102, 45, video_id="v", predictions=preds((0, 4, 0.9), (21, 4, 0.8))
        )
        assert not segments[0].flagged_low_confidence

    def test_empty_labels(self):
        assert smooth_and_segment([], 45) == []

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.sampled_from([0, 0, 0, 4, 5]), min_size=1, max_size=400),
        st.integers(5, 60),
    )
    def test_segments_sorted_disjoint_and_long_enough(self, labels, floor):
        segments = smooth_and_segment(labels, floor)
        for segment in segments:
            assert segment.frame_count >= floor
            assert segment.label_id != NO_ACTION
        for before, after in zip(segments, segments[1:]):
            assert before.end_frame < after.start_frame

    def test_round_trip_idempotent(self):
        true = np.zeros(630, dtype=int)
        true[60:168] = 4
        true[207:378] = 5
        predictions = zero_noise_predictions(true)
        labels = frame_labels(predictions, 630)
        first = smooth_and_segment(labels, 45, video_id="v", predictions=predictions)

        relabelled = np.zeros(630, dtype=int)
        for segment in first:
            relabelled[segment.start_frame : segment.end_frame + 1] = segment.label_id
        second = smooth_and_segment(
            relabelled, 45, video_id="v", predictions=predictions
        )
        assert first == second

    def test_exact_recovery_on_aligned_spans(self):
        # span boundaries sit on the vote-stable offsets of the window grid
        # (start = 18 mod 21, end = 20 mod 21, first start past one window)
        spans = [(60, 188, 7), (228, 356, 2), (396, 503, 9)]
        true = np.zeros(630, dtype=int)
        for start, end, label in spans:
            true[start : end + 1] = label
        predictions = zero_noise_predictions(true)
        labels = frame_labels(predictions, 630)
        segments = smooth_and_segment(labels, 45, predictions=predictions)
        assert [(s.start_frame, s.end_frame, s.label_id) for s in segments] == spans


class TestActionSegmentValidation:
    def test_no_action_segment_rejected(self):
        with pytest.raises(ValidationError):
            ActionSegment("v", NO_ACTION, 0, 10, 0.9)

    def test_inverted_span_rejected(self):
        with pytest.raises(ValidationError):
            ActionSegment("v", 4, 10, 5, 0.9)

    def test_json_round_trip(self):
        segments = [
            ActionSegment("v", 4, 0, 99, 0.8, subclip_uri="clips/a.mp4"),
            ActionSegment("v", 5, 150, 260, 0.3, flagged_low_confidence=True),
        ]
        assert segments_from_json(segments_to_json(segments)) == segments


class TestExtractSubclips:
    def test_subclip_frame_counts_and_uris(self, tmp_path):
        video = solid_video(
            tmp_path / "v.mp4", [((0, 99), RED), ((150, 260), GREEN)], 300
        )
        segments = [
            ActionSegment("v", 4, 30, 89, 0.9),
            ActionSegment("v", 5, 150, 260, 0.9),
        ]
        extracted = extract_subclips(video, segments, tmp_path / "clips")
        assert len({s.subclip_uri for s in extracted}) == 2
        assert probe_video(extracted[0].subclip_uri).frame_count == 60
        assert probe_video(extracted[1].subclip_uri).frame_count == 111

    def test_empty_segments_no_files(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 99), RED)], 100)
        out = tmp_path / "clips"
        assert extract_subclips(video, [], out) == []
        assert not out.exists()

    def test_out_of_range_segment_names_segment(self, tmp_path):
        video = solid_video(tmp_path / "v.mp4", [((0, 99), RED)], 100)
        with pytest.raises(MediaError, match=r"\[90, 150\]"):
            extract_subclips(
                video, [ActionSegment("v", 4, 90, 150, 0.9)], tmp_path / "clips"
            )


class TestSegmentVideo:
    def test_end_to_end_on_synthetic_video(self, tmp_path):
        video = solid_video(
            tmp_path / "v.mp4", [((60, 188), RED), ((228, 356), GREEN)], 630
        )
        # brightest channel mean is ~4 + 19.2k for k bright samples of 10, so
        # a floor of 90 makes the stub vote "action" exactly on majority (k>=5)
        classifier = ColorStubClassifier(brightness_floor=90.0)
        segments, predictions = segment_video(video, classifier, "v")
        assert [s.label_id for s in segments] == [4, 5]
        assert [(s.start_frame, s.end_frame) for s in segments] == [
            (60, 188),
            (228, 356),
        ]
        assert len(predictions) == len(extract_windows(630))
