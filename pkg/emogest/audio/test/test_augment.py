""" Tests of filterbank augmentation. """

import unittest

import numpy as np

from emogest.audio.augment import AugmentConfig, augment
from emogest.audio.features import Filterbank
from emogest.core.errors import InvalidInputError


def _standardized(shape=(120, 32), seed=0):
    values = np.random.RandomState(seed).randn(*shape)
    return Filterbank(values, standardized=True)


class TestAugment(unittest.TestCase):

    def test_disabled_is_identity(self):
        for seed in range(5):
            fb = _standardized(seed=seed)
            out = augment(fb, AugmentConfig.disabled(), seed=seed)
            self.assertTrue(np.array_equal(out.values, fb.values))

    def test_deterministic(self):
        fb = _standardized()
        cfg = AugmentConfig(rng_seed=7)
        first = augment(fb, cfg)
        second = augment(fb, cfg)
        self.assertTrue(np.array_equal(first.values, second.values))

        other = augment(fb, cfg, seed=8)
        self.assertFalse(np.array_equal(first.values, other.values))

    def test_shift_replay(self):
        fb = _standardized()
        n_frames, n_mels = fb.shape
        cfg = AugmentConfig(max_freq_mask=0, max_time_mask=0, noise_std=0.0,
                            circular_shift_max_frames=n_frames, rng_seed=3)

        out = augment(fb, cfg)

        rng = np.random.default_rng(3)
        rng.integers(0, 1)
        rng.integers(0, n_mels + 1)
        rng.integers(0, 1)
        rng.integers(0, n_frames + 1)
        shift = rng.integers(-n_frames, n_frames + 1)

        self.assertTrue(np.array_equal(out.values, np.roll(fb.values, shift, axis=0)))

    def test_mask_widths(self):
        fb = Filterbank(np.ones((200, 64)), standardized=True)
        cfg = AugmentConfig(max_freq_mask=24, max_time_mask=96, noise_std=0.0,
                            circular_shift_max_frames=0)
        for seed in range(20):
            out = augment(fb, cfg, seed=seed)
            zero_cols = np.all(out.values == 0.0, axis=0).sum()
            zero_rows = np.all(out.values == 0.0, axis=1).sum()
            self.assertLessEqual(zero_cols, 24)
            self.assertLessEqual(zero_rows, 96)

    def test_mask_clipped_to_dimension(self):
        fb = Filterbank(np.ones((10, 8)), standardized=True)
        cfg = AugmentConfig(max_freq_mask=24, max_time_mask=96, noise_std=0.0,
                            circular_shift_max_frames=0)
        out = augment(fb, cfg, seed=1)
        self.assertEqual(out.shape, (10, 8))

    def test_requires_standardized(self):
        with self.assertRaises(InvalidInputError):
            augment(Filterbank(np.zeros((10, 8))), AugmentConfig())

    def test_negative_settings_rejected(self):
        with self.assertRaises(ValueError):
            AugmentConfig(noise_std=-1.0)
        with self.assertRaises(ValueError):
            AugmentConfig(max_time_mask=-2)


if __name__ == "__main__":
    unittest.main()
