import math

import pytest
import torch
from helpers import synthetic_clips, tiny_config
from hypothesis import given, settings
from hypothesis import strategies as st

from rehabvision.errors import ConfigurationError, ValidationError
from rehabvision.model import (
    ActionRecognizer,
    ClassDescription,
    ClipBatch,
    ModelConfig,
    TrainConfig,
    cosine_logits,
    evaluate_model,
    load_checkpoint,
    save_checkpoint,
    train_model,
)


@pytest.fixture(scope="module")
def tiny_model():
    torch.manual_seed(0)
    model = ActionRecognizer(tiny_config())
    model.eval()
    return model


def random_batch(model, b=2, n_f=10, seed=0):
    g = torch.Generator().manual_seed(seed)
    size = model.config.image_size
    return ClipBatch(
        frames=torch.randn(b, n_f, 3, size, size, generator=g),
        skeleton=torch.randn(b, n_f, model.config.feature_dim, generator=g),
    )


class TestClipBatch:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            ClipBatch(frames=torch.zeros(2, 10, 3, 16, 16), skeleton=torch.zeros(2, 9, 17))

    def test_wrong_channel_count_rejected(self):
        with pytest.raises(ValidationError):
            ClipBatch(frames=torch.zeros(2, 10, 1, 16, 16), skeleton=torch.zeros(2, 10, 17))

    def test_non_finite_rejected(self):
        frames = torch.zeros(1, 2, 3, 16, 16)
        frames[0, 0, 0, 0, 0] = float("nan")
        with pytest.raises(ValidationError):
            ClipBatch(frames=frames, skeleton=torch.zeros(1, 2, 17))


class TestEncodeFrames:
    @settings(max_examples=15, deadline=None)
    @given(b=st.integers(1, 4), n_f=st.integers(2, 12))
    def test_shape_contract(self, tiny_model, b, n_f):
        frames = torch.randn(b, n_f, 3, 16, 16)
        assert tiny_model.encode_frames(frames).shape == (b, n_f, 16)

    def test_identical_frames_identical_rows(self, tiny_model):
        frame = torch.randn(3, 16, 16)
        frames = frame.expand(1, 4, 3, 16, 16)
        with torch.no_grad():
            out = tiny_model.encode_frames(frames)
        assert torch.allclose(out[0, 0], out[0, 1])

    def test_batch_independence(self, tiny_model):
        clip = torch.randn(1, 5, 3, 16, 16)
        with torch.no_grad():
            out = tiny_model.encode_frames(clip.repeat(2, 1, 1, 1, 1))
        assert torch.allclose(out[0], out[1])

    def test_wrong_image_size_rejected(self, tiny_model):
        with pytest.raises(ValidationError):
            tiny_model.encode_frames(torch.randn(1, 4, 3, 32, 32))


class TestEncodeSkeleton:
    def test_shape_contract(self, tiny_model):
        assert tiny_model.encode_skeleton(torch.randn(4, 10, 17)).shape == (4, 10, 16)

    def test_time_reversal_changes_output(self, tiny_model):
        skel = torch.randn(1, 10, 17)
        with torch.no_grad():
            fwd = tiny_model.encode_skeleton(skel)
            rev = tiny_model.encode_skeleton(skel.flip(1))
        assert not torch.allclose(fwd, rev.flip(1), atol=1e-4)

    def test_zero_input_finite(self, tiny_model):
        out = tiny_model.encode_skeleton(torch.zeros(2, 6, 17))
        assert torch.isfinite(out).all()

    def test_wrong_feature_dim_rejected(self, tiny_model):
        with pytest.raises(ValidationError):
            tiny_model.encode_skeleton(torch.randn(1, 10, 16))

    def test_no_skeleton_variant_has_no_encoder(self):
        model = ActionRecognizer(tiny_config(variant="no_skeleton"))
        with pytest.raises(ConfigurationError):
            model.encode_skeleton(torch.randn(1, 10, 17))


class TestGuidedSpatialFuse:
    @settings(max_examples=10, deadline=None)
    @given(b=st.integers(1, 4), n_f=st.integers(2, 12))
    def test_shape_contract(self, tiny_model, b, n_f):
        v = torch.randn(b, n_f, 16)
        k = torch.randn(b, n_f, 16)
        assert tiny_model.guided_spatial_fuse(v, k).shape == (b, n_f, 16)

    def test_batch_permutation_equivariance(self, tiny_model):
        v, k = torch.randn(3, 5, 16), torch.randn(3, 5, 16)
        perm = torch.tensor([2, 0, 1])
        with torch.no_grad():
            direct = tiny_model.guided_spatial_fuse(v, k)[perm]
            permuted = tiny_model.guided_spatial_fuse(v[perm], k[perm])
        assert torch.allclose(direct, permuted, atol=1e-5)

    def test_gradients_reach_both_streams(self, tiny_model):
        v = torch.randn(2, 5, 16, requires_grad=True)
        k = torch.randn(2, 5, 16, requires_grad=True)
        tiny_model.guided_spatial_fuse(v, k).sum().backward()
        assert v.grad.norm() > 0
        assert k.grad.norm() > 0

    def test_mismatched_frames_rejected(self, tiny_model):
        with pytest.raises(ValidationError):
            tiny_model.guided_spatial_fuse(torch.randn(1, 5, 16), torch.randn(1, 6, 16))


class TestMotionEncode:
    def test_frame_count_contract(self, tiny_model):
        assert tiny_model.motion_encode(torch.randn(2, 10, 16)).shape == (2, 9, 16)

    def test_single_frame_rejected(self, tiny_model):
        with pytest.raises(ValidationError):
            tiny_model.motion_encode(torch.randn(2, 1, 16))

    def test_constant_offset_cancels(self, tiny_model):
        v = torch.randn(1, 6, 16)
        shifted = v + torch.randn(1, 1, 16)
        with torch.no_grad():
            assert torch.allclose(
                tiny_model.motion_encode(v),
                tiny_model.motion_encode(shifted),
                atol=1e-5,
            )

    def test_time_constant_input_matches_zero_motion(self, tiny_model):
        # both collapse to an all-zero difference sequence
        a = torch.randn(1, 1, 16).expand(1, 6, 16)
        b = torch.randn(1, 1, 16).expand(1, 6, 16)
        with torch.no_grad():
            assert torch.allclose(
                tiny_model.motion_encode(a), tiny_model.motion_encode(b), atol=1e-6
            )


class TestFuseStreams:
    def test_zero_motion_is_identity(self, tiny_model):
        t_s = torch.randn(2, 5, 16)
        v = tiny_model.fuse_streams(t_s, torch.zeros(2, 4, 16))
        assert torch.allclose(v, t_s.mean(dim=1, keepdim=True))

    def test_constant_streams_add(self, tiny_model):
        c1, c2 = torch.randn(16), torch.randn(16)
        v = tiny_model.fuse_streams(
            c1.expand(1, 5, 16), c2.expand(1, 4, 16)
        )
        assert torch.allclose(v.squeeze(), c1 + c2, atol=1e-6)

    def test_shape(self, tiny_model):
        assert tiny_model.fuse_streams(
            torch.randn(3, 5, 16), torch.randn(3, 4, 16)
        ).shape == (3, 1, 16)

    def test_width_mismatch_rejected(self, tiny_model):
        with pytest.raises(ValidationError):
            tiny_model.fuse_streams(torch.randn(1, 5, 16), torch.randn(1, 4, 8))


class TestMotionPrompt:
    def test_shape_default_four_tokens(self, tiny_model):
        assert tiny_model.motion_prompt(torch.randn(3, 9, 16)).shape == (3, 4, 16)

    def test_deterministic(self, tiny_model):
        t_m = torch.randn(1, 9, 16)
        with torch.no_grad():
            assert torch.equal(
                tiny_model.motion_prompt(t_m), tiny_model.motion_prompt(t_m)
            )

    def test_gradient_reaches_adapter(self):
        torch.manual_seed(0)
        model = ActionRecognizer(tiny_config())
        logits = model(random_batch(model, b=2, n_f=4))
        loss = torch.nn.functional.cross_entropy(logits, torch.tensor([1, 2]))
        loss.backward()
        grads = [
            p.grad.norm() for p in model.motion_adapter.parameters() if p.grad is not None
        ]
        assert grads and all(g > 0 for g in grads)


class TestEncodeClassTexts:
    def test_sixteen_classes(self, tiny_model):
        p_m = torch.randn(2, 4, 16)
        assert tiny_model.encode_class_texts(p_m).shape == (2, 16, 16)

    def test_identical_descriptions_identical_rows(self):
        torch.manual_seed(0)
        model = ActionRecognizer(tiny_config())
        model.eval()
        descs = list(model.descriptions)
        descs[3] = ClassDescription(3, descs[3].name, descs[5].description)
        descs[5] = ClassDescription(5, descs[5].name, descs[5].description)
        model.set_class_descriptions(tuple(descs))
        with torch.no_grad():
            t = model.encode_class_texts(torch.randn(1, 4, 16))
        assert torch.allclose(t[0, 3], t[0, 5], atol=1e-6)

    def test_prompt_changes_rows(self, tiny_model):
        g = torch.Generator().manual_seed(1)
        with torch.no_grad():
            t1 = tiny_model.encode_class_texts(torch.randn(1, 4, 16, generator=g))
            t2 = tiny_model.encode_class_texts(torch.randn(1, 4, 16, generator=g))
        assert not torch.allclose(t1, t2, atol=1e-4)

    def test_overlong_description_names_class(self):
        model = ActionRecognizer(tiny_config())
        descs = list(model.descriptions)
        descs[7] = ClassDescription(7, "overhead ear touch", "word " * 100)
        with pytest.raises(ValidationError, match="overhead ear touch"):
            model.set_class_descriptions(tuple(descs))


class TestCrossModalEnhance:
    def test_shapes_preserved(self, tiny_model):
        v, t = torch.randn(2, 1, 16), torch.randn(2, 16, 16)
        v_p, t_p = tiny_model.cross_modal_enhance(v, t)
        assert v_p.shape == v.shape and t_p.shape == t.shape

    def test_layernorm_statistics_at_init(self):
        # default affine init (gamma=1, beta=0) leaves rows standardized
        torch.manual_seed(0)
        model = ActionRecognizer(tiny_config())
        model.eval()
        with torch.no_grad():
            v_p, t_p = model.cross_modal_enhance(
                torch.randn(2, 1, 16), torch.randn(2, 16, 16)
            )
        for out in (v_p, t_p):
            assert torch.allclose(out.mean(-1), torch.zeros_like(out.mean(-1)), atol=1e-5)
            assert torch.allclose(
                out.var(-1, unbiased=False), torch.ones_like(out.var(-1)), atol=1e-4
            )

    def test_parallel_not_chained(self, tiny_model):
        torch.manual_seed(3)
        v, t = torch.randn(2, 1, 16), torch.randn(2, 16, 16)
        with torch.no_grad():
            v_parallel, t_prime = tiny_model.cross_modal_enhance(v, t)
            # a sequential variant would compute V' from the enhanced T'
            chained_attn, _ = tiny_model.enhance.video_attn(
                query=v, key=t_prime, value=t_prime, need_weights=False
            )
            v_chained = tiny_model.enhance.video_norm(v + chained_attn)
        assert not torch.allclose(v_parallel, v_chained, atol=1e-5)


class TestClassify:
    def test_aligned_vectors_give_exp_tau(self):
        v = torch.randn(1, 1, 8)
        t = torch.cat([v, torch.randn(1, 15, 8)], dim=1)
        tau = torch.tensor(1.3)
        logits = cosine_logits(v, t, tau)
        assert torch.allclose(logits[0, 0], tau.exp(), atol=1e-5)

    def test_scale_invariance(self):
        g = torch.Generator().manual_seed(0)
        v = torch.randn(2, 1, 8, generator=g)
        t = torch.randn(2, 16, 8, generator=g)
        tau = torch.tensor(0.7)
        base = cosine_logits(v, t, tau)
        for scale in (1e-3, 7.0, 1e3):
            assert torch.allclose(cosine_logits(v * scale, t, tau), base, atol=1e-5)

    def test_orthogonal_zero_tau(self):
        v = torch.zeros(1, 1, 4)
        v[0, 0, 0] = 1.0
        t = torch.zeros(1, 16, 4)
        t[:, :, 1] = 1.0
        logits = cosine_logits(v, t, torch.tensor(0.0))
        assert torch.allclose(logits, torch.zeros(1, 16), atol=1e-7)

    def test_zero_norm_guarded(self):
        logits = cosine_logits(
            torch.zeros(1, 1, 8), torch.zeros(1, 16, 8), torch.tensor(2.0)
        )
        assert torch.isfinite(logits).all()

    @settings(max_examples=25, deadline=None)
    @given(tau=st.floats(-3.0, 4.0), seed=st.integers(0, 1000))
    def test_argmax_invariant_under_tau(self, tau, seed):
        g = torch.Generator().manual_seed(seed)
        v = torch.randn(3, 1, 8, generator=g)
        t = torch.randn(3, 16, 8, generator=g)
        scaled = cosine_logits(v, t, torch.tensor(tau))
        unscaled = cosine_logits(v, t, torch.tensor(0.0))
        assert torch.equal(scaled.argmax(dim=1), unscaled.argmax(dim=1))

    def test_temperature_cap(self):
        v = torch.randn(1, 1, 8)
        t = v.expand(1, 16, 8).clone()
        logits = cosine_logits(v, t, torch.tensor(10.0), tau_max=100.0)
        assert torch.allclose(logits, torch.full((1, 16), 100.0), atol=1e-4)

    def test_gradient_matches_finite_differences(self):
        torch.manual_seed(0)
        d = 6
        v = torch.randn(1, 1, d, dtype=torch.float64, requires_grad=True)
        t = torch.randn(1, 16, d, dtype=torch.float64)
        tau = torch.tensor(0.5, dtype=torch.float64)
        weights = torch.randn(1, 16, dtype=torch.float64)

        def f(v_in):
            return (cosine_logits(v_in, t, tau) * weights).sum()

        analytic = torch.autograd.grad(f(v), v)[0].squeeze()
        step = 1e-4
        numeric = torch.zeros(d, dtype=torch.float64)
        for i in range(d):
            delta = torch.zeros(1, 1, d, dtype=torch.float64)
            delta[0, 0, i] = step
            numeric[i] = (f(v.detach() + delta) - f(v.detach() - delta)) / (2 * step)
        rel_err = (analytic - numeric).norm() / numeric.norm()
        assert rel_err < 1e-3


class TestForward:
    @settings(max_examples=10, deadline=None)
    @given(b=st.integers(1, 4), n_f=st.integers(2, 12))
    def test_shape_contract(self, tiny_model, b, n_f):
        with torch.no_grad():
            logits = tiny_model(random_batch(tiny_model, b=b, n_f=n_f, seed=b * 13 + n_f))
        assert logits.shape == (b, 16)
        assert torch.isfinite(logits).all()

    def test_softmax_rows_normalized(self, tiny_model):
        with torch.no_grad():
            logits = tiny_model(random_batch(tiny_model, b=3, n_f=6))
        sums = torch.softmax(logits, dim=1).sum(dim=1)
        assert torch.allclose(sums, torch.ones(3), atol=1e-6)

    def test_zero_inputs_finite(self, tiny_model):
        batch = ClipBatch(
            frames=torch.zeros(1, 4, 3, 16, 16), skeleton=torch.zeros(1, 4, 17)
        )
        with torch.no_grad():
            assert torch.isfinite(tiny_model(batch)).all()


class TestTraining:
    def test_first_step_loss_near_chance(self):
        # wide embeddings keep random-init cosine noise small relative to ln(16)
        torch.manual_seed(0)
        model = ActionRecognizer(ModelConfig(embed_dim=512, transformer_ff=512))
        frames = torch.randn(8, 10, 3, 64, 64)
        skeleton = torch.randn(8, 10, 17)
        labels = torch.arange(8) % 16
        with torch.no_grad():
            loss = torch.nn.functional.cross_entropy(
                model(ClipBatch(frames=frames, skeleton=skeleton)), labels
            )
        target = math.log(16)
        assert abs(float(loss) - target) <= 0.2 * target

    def test_overfits_three_class_toy_set(self):
        torch.manual_seed(0)
        dataset = synthetic_clips([1, 2, 3], per_class=10)
        model = ActionRecognizer(ModelConfig())
        result = train_model(
            model,
            dataset,
            dataset,
            TrainConfig(
                epochs=20, batch_size=10, learning_rate=2e-3, seed=0, max_steps=60
            ),
        )
        assert result.steps_run <= 200
        report = evaluate_model(model, dataset)
        assert report.top1_accuracy >= 0.95

    def test_seeded_runs_identical(self):
        def run():
            torch.manual_seed(7)
            model = ActionRecognizer(tiny_config())
            dataset = synthetic_clips([1, 2], per_class=4, image_size=16, seed=1)
            return train_model(
                model, dataset, dataset, TrainConfig(epochs=2, batch_size=4, seed=7)
            )

        first, second = run(), run()
        assert first.history == second.history
        assert first.first_step_loss == second.first_step_loss

    def test_best_checkpoint_bookkeeping(self):
        torch.manual_seed(0)
        model = ActionRecognizer(tiny_config())
        dataset = synthetic_clips([1, 2], per_class=4, image_size=16, seed=2)
        result = train_model(
            model,
            dataset,
            dataset,
            TrainConfig(epochs=3, batch_size=4, learning_rate=1e-3, seed=0),
        )
        assert len(result.history) == 3
        f1s = [h["val_weighted_f1"] for h in result.history]
        assert result.best_val_f1 == max(f1s)
        assert result.best_epoch == f1s.index(max(f1s))
        assert result.best_state is not None

    def test_checkpoint_round_trip(self, tmp_path):
        torch.manual_seed(0)
        model = ActionRecognizer(tiny_config())
        model.eval()
        path = tmp_path / "model.pt"
        save_checkpoint(path, model, history=[{"epoch": 0}])
        restored, payload = load_checkpoint(path)
        assert payload["history"] == [{"epoch": 0}]
        batch = random_batch(model, b=2, n_f=5)
        with torch.no_grad():
            assert torch.allclose(model(batch), restored(batch), atol=1e-6)
