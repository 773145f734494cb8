""" Skip-connected transformer stacks shared by the motion prior, the
denoiser and the motion feature extractor."""

import torch
from torch import nn

from emogest.core.errors import ConfigurationError


class PositionalAttentionLayer(nn.Module):
    """ Pre-norm transformer layer that adds a positional embedding to the
    queries and keys of every attention it performs.

    Args
    ----
    d_model : int
        Token width.

    heads : int
        Attention heads.

    ff_dim : int
        Width of the feed-forward block.

    dropout : float
        Dropout rate of attention weights and residual branches.

    cross : bool
        If True, a cross-attention over a memory sequence follows the
        self-attention.
    """

    def __init__(self, d_model, heads, ff_dim, dropout=0.0, cross=False):
        super(PositionalAttentionLayer, self).__init__()
        self.cross = cross

        self.norm_self = nn.LayerNorm(d_model)
        self.self_attn = nn.MultiheadAttention(d_model, heads, dropout=dropout,
                                               batch_first=True)
        if cross:
            self.norm_cross = nn.LayerNorm(d_model)
            self.cross_attn = nn.MultiheadAttention(d_model, heads, dropout=dropout,
                                                    batch_first=True)
        self.norm_ff = nn.LayerNorm(d_model)
        self.ff = nn.Sequential(nn.Linear(d_model, ff_dim), nn.GELU(), nn.Dropout(dropout),
                                nn.Linear(ff_dim, d_model))
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, pos, memory=None, memory_pos=None):
        h = self.norm_self(x)
        qk = h + pos
        x = x + self.dropout(self.self_attn(qk, qk, h, need_weights=False)[0])

        if self.cross:
            h = self.norm_cross(x)
            keys = memory if memory_pos is None else memory + memory_pos
            x = x + self.dropout(self.cross_attn(h + pos, keys, memory,
                                                 need_weights=False)[0])

        return x + self.dropout(self.ff(self.norm_ff(x)))


class SkipTransformer(nn.Module):
    """ U-Net shaped stack: (L - 1) / 2 input layers, a middle layer and
    (L - 1) / 2 output layers. Each output layer first concatenates the
    output of its mirrored input layer and projects back to `d_model`.

    Args
    ----
    d_model : int
        Token width.

    layers : int
        Total layer count L, odd.

    heads : int
        Attention heads per layer.

    ff_dim : int
        Feed-forward width per layer.

    dropout : float
        Dropout rate.

    cross : bool
        Whether every layer also attends to a memory sequence.
    """

    def __init__(self, d_model, layers, heads, ff_dim, dropout=0.0, cross=False):
        super(SkipTransformer, self).__init__()
        if layers < 1 or layers % 2 == 0:
            raise ConfigurationError("A skip-connected transformer needs an odd layer "
                                     "count, got %d" % layers)
        if d_model % heads:
            raise ConfigurationError("Width %d is not divisible by %d heads"
                                     % (d_model, heads))

        half = (layers - 1) // 2

        def make():
            return PositionalAttentionLayer(d_model, heads, ff_dim, dropout, cross)

        self.input_blocks = nn.ModuleList([make() for _ in range(half)])
        self.middle_block = make()
        self.output_blocks = nn.ModuleList([make() for _ in range(half)])
        self.skip_projections = nn.ModuleList([nn.Linear(2 * d_model, d_model)
                                               for _ in range(half)])
        self.norm = nn.LayerNorm(d_model)

    def forward(self, x, pos, memory=None, memory_pos=None):
        """
        Args
        ----
        x : Tensor
            Tokens [B x N x d].

        pos : Tensor
            Positional embedding [N x d] or [B x N x d].

        memory : Tensor, optional
            Memory tokens [B x M x d] for cross-attention.

        memory_pos : Tensor, optional
            Positional embedding of the memory tokens.
        """
        skips = []
        for block in self.input_blocks:
            x = block(x, pos, memory, memory_pos)
            skips.append(x)

        x = self.middle_block(x, pos, memory, memory_pos)

        for block, proj in zip(self.output_blocks, self.skip_projections):
            x = proj(torch.cat([x, skips.pop()], dim=-1))
            x = block(x, pos, memory, memory_pos)

        return self.norm(x)


def layer_parameter_count(d_model, ff_dim, cross=False):
    """ Trainable parameters of one `PositionalAttentionLayer`."""
    attention = 4 * d_model * d_model + 4 * d_model
    norms = 2 * d_model * (3 if cross else 2)
    ff = 2 * d_model * ff_dim + ff_dim + d_model
    return attention * (2 if cross else 1) + norms + ff


def skip_transformer_parameter_count(d_model, layers, ff_dim, cross=False):
    """ Trainable parameters of a `SkipTransformer`."""
    half = (layers - 1) // 2
    projections = half * (2 * d_model * d_model + d_model)
    return layers * layer_parameter_count(d_model, ff_dim, cross) + projections + 2 * d_model
