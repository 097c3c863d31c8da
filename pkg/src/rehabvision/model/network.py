"""Skeleton-guided, motion-prompted dual-stream action classifier.

Pipeline: a patch-transformer vision encoder produces per-frame features
``V_seq``; a bidirectional LSTM embeds per-frame skeleton features as
``K_s``; a transformer decoder fuses them (visual queries, skeleton
keys/values) into spatially-aware features ``T_s``; a motion transformer
over consecutive-frame differences of ``V_seq`` yields ``T_m``.  The fused
video feature is ``V = AvgPool_t(T_s) + AvgPool_t(T_m)``.  On the text
side, a motion adapter turns ``T_m`` into prompt tokens ``P_m`` that are
prepended to every class description before a text transformer produces
motion-aware class features ``T``.  Two parallel cross-attention layers
enhance both sides, and logits are temperature-scaled cosine similarities.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from ..errors import ConfigurationError, ValidationError
from .config import ModelConfig
from .text import (
    EOS_ID,
    PAD_ID,
    ClassDescription,
    HashingTokenizer,
    load_class_descriptions,
)


@dataclass
class ClipBatch:
    """A batch of clips: frames ``B×N_f×3×H×W`` and skeleton ``B×N_f×17``."""

    frames: torch.Tensor
    skeleton: torch.Tensor

    def __post_init__(self):
        if self.frames.dim() != 5 or self.frames.shape[2] != 3:
            raise ValidationError(
                f"frames must be (B, N_f, 3, H, W), got {tuple(self.frames.shape)}"
            )
        if self.skeleton.dim() != 3:
            raise ValidationError(
                f"skeleton must be (B, N_f, F), got {tuple(self.skeleton.shape)}"
            )
        if self.frames.shape[:2] != self.skeleton.shape[:2]:
            raise ValidationError(
                "frames and skeleton disagree on batch/frame counts: "
                f"{tuple(self.frames.shape[:2])} vs {tuple(self.skeleton.shape[:2])}"
            )
        if not bool(torch.isfinite(self.frames).all()) or not bool(
            torch.isfinite(self.skeleton).all()
        ):
            raise ValidationError("clip batch contains non-finite values")

    def __len__(self) -> int:
        return self.frames.shape[0]


def _encoder(cfg: ModelConfig, layers: int, heads: int) -> nn.TransformerEncoder:
    layer = nn.TransformerEncoderLayer(
        d_model=cfg.embed_dim,
        nhead=heads,
        dim_feedforward=cfg.transformer_ff,
        dropout=0.0,
        activation="gelu",
        batch_first=True,
        norm_first=True,
    )
    return nn.TransformerEncoder(layer, num_layers=layers, enable_nested_tensor=False)


class PatchVisionEncoder(nn.Module):
    """Compact patch transformer mapping one frame to a D-dim feature."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.patch_embed = nn.Conv2d(
            3, cfg.embed_dim, kernel_size=cfg.patch_size, stride=cfg.patch_size
        )
        self.cls_token = nn.Parameter(torch.zeros(1, 1, cfg.embed_dim))
        self.pos_embed = nn.Parameter(
            torch.zeros(1, cfg.patches_per_frame + 1, cfg.embed_dim)
        )
        nn.init.trunc_normal_(self.cls_token, std=0.02)
        nn.init.trunc_normal_(self.pos_embed, std=0.02)
        self.encoder = _encoder(cfg, cfg.vision_layers, cfg.vision_heads)
        self.norm = nn.LayerNorm(cfg.embed_dim)

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        b, n_f = frames.shape[:2]
        flat = frames.reshape(b * n_f, *frames.shape[2:])
        patches = self.patch_embed(flat).flatten(2).transpose(1, 2)
        cls = self.cls_token.expand(patches.shape[0], -1, -1)
        tokens = torch.cat([cls, patches], dim=1) + self.pos_embed
        encoded = self.encoder(tokens)
        return self.norm(encoded[:, 0]).reshape(b, n_f, -1)


class SkeletonBiLSTM(nn.Module):
    """Bidirectional recurrent encoder over per-frame skeleton features."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.lstm = nn.LSTM(
            input_size=cfg.feature_dim,
            hidden_size=cfg.lstm_hidden,
            num_layers=cfg.lstm_layers,
            batch_first=True,
            bidirectional=True,
        )
        self.proj = nn.Linear(2 * cfg.lstm_hidden, cfg.embed_dim)

    def forward(self, skeleton: torch.Tensor) -> torch.Tensor:
        hidden, _ = self.lstm(skeleton)
        return self.proj(hidden)


class SkeletonMLP(nn.Module):
    """Per-frame MLP ablation of the recurrent skeleton encoder."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        # hidden width matches the recurrent encoder's hidden size
        self.net = nn.Sequential(
            nn.Linear(cfg.feature_dim, cfg.lstm_hidden),
            nn.GELU(),
            nn.Linear(cfg.lstm_hidden, cfg.embed_dim),
        )

    def forward(self, skeleton: torch.Tensor) -> torch.Tensor:
        return self.net(skeleton)


class GuidedSpatialTransformer(nn.Module):
    """Transformer decoder: visual queries attend to skeleton keys/values."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        layer = nn.TransformerDecoderLayer(
            d_model=cfg.embed_dim,
            nhead=cfg.fuse_heads,
            dim_feedforward=cfg.transformer_ff,
            dropout=0.0,
            activation="gelu",
            batch_first=True,
            norm_first=True,
        )
        self.decoder = nn.TransformerDecoder(layer, num_layers=cfg.fuse_layers)

    def forward(self, v_seq: torch.Tensor, k_s: torch.Tensor) -> torch.Tensor:
        return self.decoder(tgt=v_seq, memory=k_s)


class ConcatFuse(nn.Module):
    """Concatenation + MLP ablation of the guided spatial transformer."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        # hidden width matches the transformer feed-forward width
        self.net = nn.Sequential(
            nn.Linear(2 * cfg.embed_dim, cfg.transformer_ff),
            nn.GELU(),
            nn.Linear(cfg.transformer_ff, cfg.embed_dim),
        )

    def forward(self, v_seq: torch.Tensor, k_s: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([v_seq, k_s], dim=-1))


class MotionAdapter(nn.Module):
    """Maps pooled motion features to a fixed number of prompt tokens."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.prompt_tokens = cfg.prompt_tokens
        self.net = nn.Sequential(
            nn.Linear(cfg.embed_dim, cfg.embed_dim),
            nn.GELU(),
            nn.Linear(cfg.embed_dim, cfg.prompt_tokens * cfg.embed_dim),
        )

    def forward(self, t_m: torch.Tensor) -> torch.Tensor:
        pooled = t_m.mean(dim=1)
        return self.net(pooled).reshape(len(t_m), self.prompt_tokens, -1)


class TextTransformer(nn.Module):
    """Encodes [prompt tokens ; class description tokens] per class."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.token_embed = nn.Embedding(cfg.vocab_size, cfg.embed_dim, padding_idx=PAD_ID)
        self.pos_embed = nn.Parameter(
            torch.zeros(1, cfg.prompt_tokens + cfg.max_text_tokens, cfg.embed_dim)
        )
        nn.init.trunc_normal_(self.pos_embed, std=0.02)
        self.encoder = _encoder(cfg, cfg.text_layers, cfg.text_heads)
        self.norm = nn.LayerNorm(cfg.embed_dim)

    def forward(
        self,
        p_m: torch.Tensor,
        token_ids: torch.Tensor,
        eos_positions: torch.Tensor,
    ) -> torch.Tensor:
        b = p_m.shape[0]
        n_c, l_tok = token_ids.shape
        l_p = p_m.shape[1]
        text = self.token_embed(token_ids)  # (N_c, L_tok, D)
        seq = torch.cat(
            [
                p_m[:, None].expand(b, n_c, l_p, p_m.shape[-1]),
                text[None].expand(b, n_c, l_tok, text.shape[-1]),
            ],
            dim=2,
        ).reshape(b * n_c, l_p + l_tok, -1)
        seq = seq + self.pos_embed[:, : l_p + l_tok]
        pad_mask = token_ids.eq(PAD_ID)[None].expand(b, n_c, l_tok)
        pad_mask = torch.cat(
            [torch.zeros(b, n_c, l_p, dtype=torch.bool, device=seq.device), pad_mask],
            dim=2,
        ).reshape(b * n_c, l_p + l_tok)
        encoded = self.encoder(seq, src_key_padding_mask=pad_mask)
        # the class feature is read at the EOS position, prompt offset included
        gather = (l_p + eos_positions).repeat(b)
        out = encoded[torch.arange(b * n_c), gather]
        return self.norm(out).reshape(b, n_c, -1)


class CrossModalEnhance(nn.Module):
    """Two parallel cross-attention layers with residual + LayerNorm."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.text_attn = nn.MultiheadAttention(
            cfg.embed_dim, cfg.fuse_heads, dropout=0.0, batch_first=True
        )
        self.video_attn = nn.MultiheadAttention(
            cfg.embed_dim, cfg.fuse_heads, dropout=0.0, batch_first=True
        )
        self.text_norm = nn.LayerNorm(cfg.embed_dim)
        self.video_norm = nn.LayerNorm(cfg.embed_dim)

    def forward(
        self, v: torch.Tensor, t: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        # both branches read the *inputs*; neither sees the other's output
        t_from_v, _ = self.text_attn(query=t, key=v, value=v, need_weights=False)
        v_from_t, _ = self.video_attn(query=v, key=t, value=t, need_weights=False)
        return self.video_norm(v + v_from_t), self.text_norm(t + t_from_v)


def cosine_logits(
    v_prime: torch.Tensor,
    t_prime: torch.Tensor,
    tau: torch.Tensor,
    eps: float = 1e-8,
    tau_max: float = 100.0,
) -> torch.Tensor:
    """``logits[b, c] = min(exp(tau), tau_max) · cosine(V'[b], T'[b, c])``."""
    v = v_prime.squeeze(1)
    v = v / v.norm(dim=-1, keepdim=True).clamp_min(eps)
    t = t_prime / t_prime.norm(dim=-1, keepdim=True).clamp_min(eps)
    scale = torch.exp(tau).clamp(max=tau_max)
    return scale * torch.einsum("bd,bcd->bc", v, t)


class ActionRecognizer(nn.Module):
    """End-to-end window classifier over 16 exercise classes."""

    def __init__(
        self,
        config: ModelConfig | None = None,
        descriptions: tuple[ClassDescription, ...] | None = None,
    ):
        super().__init__()
        self.config = config or ModelConfig()
        cfg = self.config
        self.vision = PatchVisionEncoder(cfg)
        if cfg.variant == "no_skeleton":
            self.skeleton_encoder = None
            self.fuse = None
        else:
            self.skeleton_encoder = (
                SkeletonMLP(cfg)
                if cfg.variant == "mlp_skeleton_encoder"
                else SkeletonBiLSTM(cfg)
            )
            self.fuse = (
                ConcatFuse(cfg)
                if cfg.variant == "mlp_guided_fuse"
                else GuidedSpatialTransformer(cfg)
            )
        self.motion_encoder = _encoder(cfg, cfg.motion_layers, cfg.motion_heads)
        self.motion_adapter = MotionAdapter(cfg)
        self.text_transformer = TextTransformer(cfg)
        self.enhance = CrossModalEnhance(cfg)
        self.tau = nn.Parameter(torch.tensor(float(cfg.tau_init)))

        self.tokenizer = HashingTokenizer(cfg.vocab_size)
        self._descriptions: tuple[ClassDescription, ...] | None = None
        # derived from the description asset, so excluded from the state dict
        self.register_buffer(
            "class_token_ids", torch.zeros(0, 0, dtype=torch.long), persistent=False
        )
        self.register_buffer(
            "class_eos_positions", torch.zeros(0, dtype=torch.long), persistent=False
        )
        self.set_class_descriptions(descriptions or load_class_descriptions())

    # -- text side -----------------------------------------------------

    @property
    def descriptions(self) -> tuple[ClassDescription, ...]:
        assert self._descriptions is not None
        return self._descriptions

    def set_class_descriptions(self, descriptions: tuple[ClassDescription, ...]) -> None:
        cfg = self.config
        if len(descriptions) != cfg.num_classes:
            raise ConfigurationError(
                f"expected {cfg.num_classes} class descriptions, got {len(descriptions)}"
            )
        encoded = []
        for desc in descriptions:
            ids = self.tokenizer.encode(desc.description)
            if len(ids) > cfg.max_text_tokens:
                raise ValidationError(
                    f"description for class {desc.name!r} is {len(ids)} tokens, "
                    f"exceeding the {cfg.max_text_tokens}-token context window"
                )
            encoded.append(ids)
        l_tok = max(len(ids) for ids in encoded)
        token_ids = torch.full((cfg.num_classes, l_tok), PAD_ID, dtype=torch.long)
        eos_positions = torch.zeros(cfg.num_classes, dtype=torch.long)
        for row, ids in enumerate(encoded):
            token_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            eos_positions[row] = ids.index(EOS_ID)
        self.class_token_ids = token_ids
        self.class_eos_positions = eos_positions
        self._descriptions = tuple(descriptions)

    # -- stages ----------------------------------------------------------

    def encode_frames(self, frames: torch.Tensor) -> torch.Tensor:
        cfg = self.config
        if frames.dim() != 5 or frames.shape[2] != 3:
            raise ValidationError(
                f"frames must be (B, N_f, 3, H, W), got {tuple(frames.shape)}"
            )
        if frames.shape[3] != cfg.image_size or frames.shape[4] != cfg.image_size:
            raise ValidationError(
                f"expected {cfg.image_size}×{cfg.image_size} frames, "
                f"got {frames.shape[3]}×{frames.shape[4]}"
            )
        return self.vision(frames)

    def encode_skeleton(self, skeleton: torch.Tensor) -> torch.Tensor:
        if self.skeleton_encoder is None:
            raise ConfigurationError("variant 'no_skeleton' has no skeleton encoder")
        if skeleton.dim() != 3 or skeleton.shape[-1] != self.config.feature_dim:
            raise ValidationError(
                f"skeleton must end in {self.config.feature_dim} features, "
                f"got shape {tuple(skeleton.shape)}"
            )
        return self.skeleton_encoder(skeleton)

    def guided_spatial_fuse(
        self, v_seq: torch.Tensor, k_s: torch.Tensor
    ) -> torch.Tensor:
        if self.fuse is None:
            raise ConfigurationError("variant 'no_skeleton' has no fusion stage")
        if v_seq.shape != k_s.shape:
            raise ValidationError(
                f"stream shapes differ: {tuple(v_seq.shape)} vs {tuple(k_s.shape)}"
            )
        return self.fuse(v_seq, k_s)

    def motion_encode(self, v_seq: torch.Tensor) -> torch.Tensor:
        if v_seq.shape[1] < 2:
            raise ValidationError("motion encoding needs at least 2 frames")
        diffs = v_seq[:, 1:] - v_seq[:, :-1]
        return self.motion_encoder(diffs)

    def fuse_streams(self, t_s: torch.Tensor, t_m: torch.Tensor) -> torch.Tensor:
        if t_s.shape[0] != t_m.shape[0] or t_s.shape[-1] != t_m.shape[-1]:
            raise ValidationError(
                f"streams disagree on batch or width: "
                f"{tuple(t_s.shape)} vs {tuple(t_m.shape)}"
            )
        return t_s.mean(dim=1, keepdim=True) + t_m.mean(dim=1, keepdim=True)

    def motion_prompt(self, t_m: torch.Tensor) -> torch.Tensor:
        return self.motion_adapter(t_m)

    def encode_class_texts(
        self,
        p_m: torch.Tensor,
        descriptions: tuple[ClassDescription, ...] | None = None,
    ) -> torch.Tensor:
        if descriptions is not None:
            self.set_class_descriptions(descriptions)
        if self.class_token_ids.numel() == 0:
            raise ConfigurationError("class descriptions have not been set")
        return self.text_transformer(
            p_m, self.class_token_ids, self.class_eos_positions
        )

    def cross_modal_enhance(
        self, v: torch.Tensor, t: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        return self.enhance(v, t)

    def classify(self, v_prime: torch.Tensor, t_prime: torch.Tensor) -> torch.Tensor:
        return cosine_logits(
            v_prime, t_prime, self.tau, eps=self.config.eps, tau_max=self.config.tau_max
        )

    # -- end to end ------------------------------------------------------

    def forward(self, batch: ClipBatch) -> torch.Tensor:
        if batch.skeleton.shape[-1] != self.config.feature_dim:
            raise ValidationError(
                f"skeleton feature width {batch.skeleton.shape[-1]} != "
                f"{self.config.feature_dim}"
            )
        v_seq = self.encode_frames(batch.frames)
        if self.skeleton_encoder is None:
            t_s = v_seq
        else:
            k_s = self.encode_skeleton(batch.skeleton)
            t_s = self.guided_spatial_fuse(v_seq, k_s)
        t_m = self.motion_encode(v_seq)
        v = self.fuse_streams(t_s, t_m)
        p_m = self.motion_prompt(t_m)
        t = self.encode_class_texts(p_m)
        v_prime, t_prime = self.cross_modal_enhance(v, t)
        return self.classify(v_prime, t_prime)

    def skeleton_parameter_count(self) -> int:
        """Parameters on the skeleton path (encoder + fusion); 0 if removed."""
        modules = [m for m in (self.skeleton_encoder, self.fuse) if m is not None]
        return sum(p.numel() for m in modules for p in m.parameters())
