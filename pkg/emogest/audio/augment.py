""" Masking, noise and circular-shift augmentation of standardized filterbanks."""

import numpy as np

from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary
from emogest.audio.features import Filterbank


class AugmentConfig(OptionsDictionary):
    """ Augmentation settings. All maxima are inclusive; mask widths beyond a
    filterbank's dimension are clipped to it."""

    def __init__(self, **values):
        super(AugmentConfig, self).__init__()
        self.add_option('enabled', True, desc='Apply augmentation while training.')
        self.add_option('max_freq_mask', 24, low=0, desc='Widest frequency mask.')
        self.add_option('max_time_mask', 96, low=0, desc='Widest time mask.')
        self.add_option('noise_std', 0.1, low=0.0,
                        desc='Standard deviation of additive Gaussian noise.')
        self.add_option('circular_shift_max_frames', 10, low=0,
                        desc='Largest circular shift along time, either direction.')
        self.add_option('rng_seed', 0, desc='Seed of the augmentation generator.')
        self.update(values)

    @classmethod
    def disabled(cls):
        """ A configuration under which `augment` is the identity."""
        return cls(max_freq_mask=0, max_time_mask=0, noise_std=0.0,
                   circular_shift_max_frames=0)


def augment(fb, cfg, seed=None):
    """ Applies one frequency mask, one time mask, Gaussian noise and a
    circular time shift, in that order.

    Draw order of the generator ``numpy.random.default_rng(seed)``: frequency
    mask width, frequency mask start, time mask width, time mask start, noise
    (only when noise_std > 0), shift. Masked cells are set to 0, the mean of
    a standardized filterbank.

    Args
    ----
    fb : `Filterbank`
        Standardized input.

    cfg : `AugmentConfig`
        Settings.

    seed : int, optional
        Overrides cfg['rng_seed'].

    Returns
    -------
    `Filterbank`
    """
    if not fb.standardized:
        raise InvalidInputError("augment expects a standardized filterbank")

    rng = np.random.default_rng(cfg['rng_seed'] if seed is None else seed)
    values = fb.values.copy()
    n_frames, n_mels = values.shape

    width = rng.integers(0, min(cfg['max_freq_mask'], n_mels) + 1)
    start = rng.integers(0, n_mels - width + 1)
    values[:, start:start + width] = 0.0

    width = rng.integers(0, min(cfg['max_time_mask'], n_frames) + 1)
    start = rng.integers(0, n_frames - width + 1)
    values[start:start + width, :] = 0.0

    if cfg['noise_std'] > 0.0:
        noise = rng.standard_normal(values.shape) * cfg['noise_std']
        values = (values + noise).astype(np.float32)

    max_shift = cfg['circular_shift_max_frames']
    shift = rng.integers(-max_shift, max_shift + 1)
    values = np.roll(values, shift, axis=0)

    return Filterbank(values, frame_shift_ms=fb.frame_shift_ms,
                      frame_window_ms=fb.frame_window_ms, standardized=True)
