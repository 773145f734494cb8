""" Noise schedules and the forward noising process."""

import numpy as np
import torch

from emogest.core.errors import ConfigurationError, InvalidInputError
from emogest.core.options import OptionsDictionary


class DiffusionOptions(OptionsDictionary):
    """ Schedule and denoiser architecture."""

    def __init__(self, **values):
        super(DiffusionOptions, self).__init__()
        self.add_option('steps_train', 1000, low=2, desc='Diffusion steps D during training.')
        self.add_option('steps_infer', 50, low=1, desc='DDIM steps at inference.')
        self.add_option('beta_min', 0.00085, low=0.0, high=1.0, desc='First beta.')
        self.add_option('beta_max', 0.012, low=0.0, high=1.0, desc='Last beta.')
        self.add_option('schedule', 'linear', values=['linear', 'scaled_linear'],
                        desc='Interpolation of the betas (scaled_linear interpolates '
                        'their square roots).')
        self.add_option('latent_dim', 256, low=1, desc='Width of every denoiser operand.')
        self.add_option('hidden', 1024, low=1, desc='Token width of the denoiser.')
        self.add_option('ff_dim', 1024, low=1, desc='Feed-forward width.')
        self.add_option('layers', 9, low=1, desc='Denoiser layers, odd.')
        self.add_option('heads', 4, low=1, desc='Attention heads.')
        self.add_option('dropout', 0.1, low=0.0, high=1.0, desc='Dropout rate.')
        self.update(values)


class DiffusionSchedule(object):
    """ Betas with their alphas and cumulative products.

    Args
    ----
    betas : array_like
        Strictly increasing values in (0, 1).
    """

    def __init__(self, betas):
        betas = np.asarray(betas, dtype=np.float64)
        self.betas = torch.from_numpy(betas)
        self.alphas = 1.0 - self.betas
        self.alpha_bars = torch.cumprod(self.alphas, dim=0)

    @property
    def D(self):
        return self.betas.shape[0]

    def __len__(self):
        return self.D

    def check_timesteps(self, t):
        t = torch.as_tensor(t)
        if bool(((t < 0) | (t >= self.D)).any()):
            raise InvalidInputError.out_of_range('t', t.tolist(), 0, self.D - 1)
        return t.long()


def make_schedule(D=1000, beta_min=0.00085, beta_max=0.012, kind='linear'):
    """ Builds a schedule of `D` betas from `beta_min` to `beta_max`.

    Raises
    ------
    ConfigurationError
        Unless 0 < beta_min < beta_max < 1 and D >= 2.
    """
    if D < 2:
        raise ConfigurationError("A diffusion schedule needs at least 2 steps, got %d" % D)
    if not 0.0 < beta_min < beta_max < 1.0:
        raise ConfigurationError("Betas must satisfy 0 < beta_min < beta_max < 1, got "
                                 "%g and %g" % (beta_min, beta_max))
    if kind == 'linear':
        betas = np.linspace(beta_min, beta_max, D)
    elif kind == 'scaled_linear':
        betas = np.linspace(np.sqrt(beta_min), np.sqrt(beta_max), D) ** 2
    else:
        raise ConfigurationError("Unknown schedule '%s'" % kind)
    return DiffusionSchedule(betas)


def schedule_from_options(options):
    return make_schedule(options['steps_train'], options['beta_min'], options['beta_max'],
                         options['schedule'])


def _per_sample(values, like):
    """ Reshapes per-sample coefficients [B] to broadcast against `like`."""
    values = values.to(dtype=like.dtype, device=like.device)
    return values.reshape(values.shape + (1,) * (like.dim() - values.dim()))


def q_sample(z0, t, sched, noise=None, generator=None):
    """ Noised latents sqrt(abar_t) * z0 + sqrt(1 - abar_t) * noise.

    Args
    ----
    z0 : Tensor
        Clean latents [d] or [B x d].

    t : int or Tensor
        One timestep, or one per batch element.

    sched : `DiffusionSchedule`
        Schedule.

    noise : Tensor, optional
        Drawn from N(0, I) with `generator` when omitted.

    Returns
    -------
    Tensor
    """
    t = sched.check_timesteps(t)
    if noise is None:
        noise = torch.randn(z0.shape, generator=generator, dtype=z0.dtype, device=z0.device)
    elif tuple(noise.shape) != tuple(z0.shape):
        raise InvalidInputError.shape_mismatch('noise', z0.shape, noise.shape)

    abar = sched.alpha_bars[t]
    if abar.dim() > 0:
        abar = _per_sample(abar, z0)
    else:
        abar = abar.to(dtype=z0.dtype, device=z0.device)
    return torch.sqrt(abar) * z0 + torch.sqrt(1.0 - abar) * noise


def ddim_timesteps(D, steps):
    """ Uniformly strided timesteps 0, D // steps, ... (`steps` of them).

    Raises
    ------
    ConfigurationError
        If steps is not in [1, D].
    """
    if steps < 1 or steps > D:
        raise ConfigurationError("DDIM needs between 1 and %d steps, got %d" % (D, steps))
    return np.arange(0, D, D // steps)[:steps]
