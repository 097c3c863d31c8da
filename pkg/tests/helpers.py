"""Shared fixtures for model and ablation tests."""

import torch

from rehabvision.model import ModelConfig, TensorClipDataset


def tiny_config(**overrides) -> ModelConfig:
    """Smallest config that still exercises every architectural stage."""
    params = dict(
        image_size=16,
        patch_size=8,
        embed_dim=16,
        vision_layers=1,
        vision_heads=2,
        lstm_hidden=8,
        fuse_layers=1,
        fuse_heads=2,
        motion_layers=1,
        motion_heads=2,
        text_layers=1,
        text_heads=2,
        transformer_ff=32,
    )
    params.update(overrides)
    return ModelConfig(**params)


def synthetic_clips(
    classes, per_class, n_f=10, image_size=64, seed=0
) -> TensorClipDataset:
    """Class-separable toy clips: solid colors + class-specific skeleton motion."""
    g = torch.Generator().manual_seed(seed)
    frames, skels, labels = [], [], []
    for slot, label in enumerate(classes):
        color = torch.zeros(3).index_fill_(0, torch.tensor(slot % 3), 1.0)
        freq = (slot + 1) * 0.7
        for _ in range(per_class):
            base = color.view(1, 3, 1, 1).expand(n_f, 3, image_size, image_size)
            clip = base + 0.05 * torch.randn(base.shape, generator=g)
            t = torch.arange(n_f, dtype=torch.float32)
            skel = torch.sin(freq * t)[:, None].expand(n_f, 17).clone()
            skel += 0.05 * torch.randn(skel.shape, generator=g)
            frames.append(clip)
            skels.append(skel)
            labels.append(label)
    return TensorClipDataset(
        torch.stack(frames), torch.stack(skels), torch.tensor(labels)
    )
