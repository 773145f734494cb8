""" Reverse-process samplers and the noise prediction loss."""

import torch

from emogest.core.errors import InvalidInputError
from emogest.diffusion.schedule import ddim_timesteps


def ld_loss(noise, noise_pred):
    """ Squared L2 norm of the noise prediction error, summed over the
    latent and averaged over a batch."""
    if tuple(noise.shape) != tuple(noise_pred.shape):
        raise InvalidInputError.shape_mismatch('predicted noise', noise.shape, noise_pred.shape)
    sq = (noise - noise_pred) ** 2
    return sq.sum(dim=-1).mean() if sq.dim() > 1 else sq.sum()


def _prepare(cond, generator, seed, init):
    cond = torch.as_tensor(cond)
    single = cond.dim() == 2
    if single:
        cond = cond.unsqueeze(0)
    if cond.dim() != 3 or cond.shape[1] != 3:
        raise InvalidInputError.shape_mismatch('condition', ('B', 3, 'd'), cond.shape)

    if init is not None:
        z = torch.as_tensor(init, dtype=cond.dtype).reshape(cond.shape[0], cond.shape[2])
    else:
        if generator is None:
            generator = torch.Generator(device=cond.device)
            if seed is not None:
                generator.manual_seed(int(seed))
        z = torch.randn((cond.shape[0], cond.shape[2]), generator=generator,
                        dtype=cond.dtype, device=cond.device)
    return cond, z, single


def ddim_sample(denoiser, cond, sched, steps=50, seed=None, generator=None, init=None):
    """ Deterministic (eta = 0) DDIM reverse process.

    Starting from z ~ N(0, I), each timestep t of the strided sequence maps
    z to sqrt(abar_prev) * z0_hat + sqrt(1 - abar_prev) * eps_hat, where
    abar_prev belongs to the next smaller timestep; the final update uses
    abar_prev = 1 and so returns the predicted clean latent.

    Args
    ----
    denoiser : callable
        Maps (z_t [B x d], t [B], cond [B x 3 x d]) to predicted noise.

    cond : Tensor
        Condition [3 x d] or [B x 3 x d].

    sched : `DiffusionSchedule`
        Training schedule.

    steps : int
        Number of reverse updates, at most D.

    seed : int, optional
        Seed of the starting noise when no `generator` is given.

    generator : torch.Generator, optional
        Source of the starting noise.

    init : Tensor, optional
        Starting latent; replaces the noise draw.

    Returns
    -------
    Tensor
        Latent [d] or [B x d], detached.
    """
    timesteps = ddim_timesteps(sched.D, steps)
    cond, z, single = _prepare(cond, generator, seed, init)
    abars = sched.alpha_bars.to(dtype=z.dtype, device=z.device)

    with torch.no_grad():
        for i in range(len(timesteps) - 1, -1, -1):
            t = int(timesteps[i])
            abar = abars[t]
            abar_prev = abars[int(timesteps[i - 1])] if i > 0 else torch.ones_like(abar)

            t_batch = torch.full((z.shape[0],), t, dtype=torch.long, device=z.device)
            eps = denoiser(z, t_batch, cond)
            z0_hat = (z - torch.sqrt(1.0 - abar) * eps) / torch.sqrt(abar)
            z = torch.sqrt(abar_prev) * z0_hat + torch.sqrt(1.0 - abar_prev) * eps

    return z[0] if single else z


def ddpm_sample(denoiser, cond, sched, seed=None, generator=None, init=None):
    """ Ancestral sampler over every timestep using the posterior variance
    beta_t (1 - abar_prev) / (1 - abar_t). The step at t = 0 adds no noise.

    Takes the same arguments as `ddim_sample`, without a step count.
    """
    cond, z, single = _prepare(cond, generator, seed, init)
    if generator is None:
        generator = torch.Generator(device=z.device)
        generator.manual_seed(0 if seed is None else int(seed) + 1)

    betas = sched.betas.to(dtype=z.dtype, device=z.device)
    alphas = sched.alphas.to(dtype=z.dtype, device=z.device)
    abars = sched.alpha_bars.to(dtype=z.dtype, device=z.device)

    with torch.no_grad():
        for t in range(sched.D - 1, -1, -1):
            abar = abars[t]
            abar_prev = abars[t - 1] if t > 0 else torch.ones_like(abar)

            t_batch = torch.full((z.shape[0],), t, dtype=torch.long, device=z.device)
            eps = denoiser(z, t_batch, cond)
            z0_hat = (z - torch.sqrt(1.0 - abar) * eps) / torch.sqrt(abar)

            coef0 = torch.sqrt(abar_prev) * betas[t] / (1.0 - abar)
            coef_t = torch.sqrt(alphas[t]) * (1.0 - abar_prev) / (1.0 - abar)
            z = coef0 * z0_hat + coef_t * z
            if t > 0:
                var = betas[t] * (1.0 - abar_prev) / (1.0 - abar)
                z = z + torch.sqrt(var) * torch.randn(z.shape, generator=generator,
                                                      dtype=z.dtype, device=z.device)

    return z[0] if single else z
