""" Conditional noise predictor of the latent diffusion model."""

import math

import torch
from torch import nn

from emogest.core.errors import InvalidInputError
from emogest.prior.transformer import SkipTransformer

N_OPERANDS = 5


def timestep_embedding(t, dim, max_period=10000.0):
    """ Sinusoidal embedding [B x dim] of integer timesteps [B]."""
    half = dim // 2
    freqs = torch.exp(-math.log(max_period) *
                      torch.arange(half, dtype=torch.float64, device=t.device) / half)
    args = t.to(torch.float64)[:, None] * freqs[None]
    emb = torch.cat([torch.cos(args), torch.sin(args)], dim=-1)
    if dim % 2:
        emb = torch.nn.functional.pad(emb, (0, 1))
    return emb


class Denoiser(nn.Module):
    """ Predicts the noise of a latent from the five operands
    [z_t, embedding of t, content, emotion, style], each of width d_m and
    projected to one token. The output of the z_t token is the prediction.

    Args
    ----
    options : `DiffusionOptions`
        Architecture.
    """

    def __init__(self, options):
        super(Denoiser, self).__init__()
        self.latent_dim = options['latent_dim']
        d = options['hidden']
        self.operand_proj = nn.ModuleList([nn.Linear(self.latent_dim, d)
                                           for _ in range(N_OPERANDS)])
        self.pos_embedding = nn.Parameter(torch.randn(N_OPERANDS, d) * 0.02)
        self.transformer = SkipTransformer(d, options['layers'], options['heads'],
                                           options['ff_dim'], options['dropout'])
        self.output_proj = nn.Linear(d, self.latent_dim)

    def forward(self, z_t, t, cond):
        """
        Args
        ----
        z_t : Tensor
            Noised latents [B x d_m].

        t : Tensor
            Timesteps [B].

        cond : Tensor
            Content, emotion and style latents [B x 3 x d_m].

        Returns
        -------
        Tensor
            Predicted noise [B x d_m].
        """
        if cond.dim() != 3 or cond.shape[1] != 3 or cond.shape[0] != z_t.shape[0]:
            raise InvalidInputError.shape_mismatch('condition', (z_t.shape[0], 3, self.latent_dim),
                                                   cond.shape)
        t_emb = timestep_embedding(t, self.latent_dim).to(z_t.dtype)
        operands = [z_t, t_emb, cond[:, 0], cond[:, 1], cond[:, 2]]
        tokens = torch.stack([proj(x) for proj, x in zip(self.operand_proj, operands)], dim=1)
        out = self.transformer(tokens, self.pos_embedding)
        return self.output_proj(out[:, 0])
