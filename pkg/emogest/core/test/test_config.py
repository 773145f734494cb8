""" Tests of the dotted-key configuration. """

import os
import unittest
from shutil import rmtree
from tempfile import mkdtemp

from emogest.core.config import Config, SEED_ENV, SEED_ENV_ALIAS
from emogest.core.errors import ConfigurationError


class TestConfig(unittest.TestCase):

    def setUp(self):
        self.dir = mkdtemp()

    def tearDown(self):
        rmtree(self.dir)

    def _write(self, text):
        filename = os.path.join(self.dir, 'user.ini')
        with open(filename, 'w') as out:
            out.write(text)
        return filename

    def test_defaults(self):
        config = Config(env={})

        self.assertEqual(config['diffusion.steps_train'], 1000)
        self.assertEqual(config['diffusion.steps_infer'], 50)
        self.assertEqual(config['diffusion.beta_min'], 0.00085)
        self.assertEqual(config['diffusion.beta_max'], 0.012)
        self.assertEqual(config['train.lr'], 1e-4)
        self.assertEqual(config['train.batch'], 64)
        self.assertEqual(config['prior.latent_dim'], 256)
        self.assertEqual(config['prior.window'], 300)
        self.assertEqual(config['data.fps'], 30)
        self.assertEqual(config['data.window_seconds'], 10.0)
        self.assertEqual(config['gesture_loss.kl_weight'], 1e-4)
        self.assertEqual(config['filterbank.n_mels'], 128)
        self.assertEqual(config['augment.max_freq_mask'], 24)
        self.assertEqual(config['augment.max_time_mask'], 96)
        self.assertEqual(config['diffusion.schedule'], 'linear')
        self.assertEqual(config['body.asset_path'], '')

    def test_user_overlay(self):
        filename = self._write("[diffusion]\nsteps_infer = 10\n\n[train]\nlr = 0.001\n")
        config = Config(filename, env={})

        self.assertEqual(config['diffusion.steps_infer'], 10)
        self.assertEqual(config['train.lr'], 0.001)
        self.assertEqual(config['diffusion.steps_train'], 1000)

    def test_unknown_key(self):
        filename = self._write("[diffusion]\nsteps_total = 10\n")

        with self.assertRaises(ConfigurationError) as cm:
            Config(filename)

        self.assertIn("diffusion.steps_total", str(cm.exception))

    def test_write_round_trip(self):
        config = Config(env={})
        config['train.seed'] = 11
        config['diffusion.schedule'] = 'scaled_linear'
        filename = os.path.join(self.dir, 'out.ini')
        config.write(filename)

        self.assertEqual(Config(filename, env={}), config)

    def test_seed_env_override(self):
        config = Config(env={SEED_ENV: '42'})
        self.assertEqual(config.seed, 42)
        self.assertEqual(config['train.seed'], 42)

        config = Config(env={})
        self.assertEqual(config.seed, 0)

    def test_amuse_seed_env(self):
        config = Config(env={'AMUSE_SEED': '7'})
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.section('train')['seed'], 7)
        self.assertEqual(config.to_dict()['train.seed'], 7)

    def test_seed_env_alias(self):
        config = Config(env={SEED_ENV_ALIAS: '5'})
        self.assertEqual(config.seed, 5)

        config = Config(env={SEED_ENV: '3', SEED_ENV_ALIAS: '5'})
        self.assertEqual(config.seed, 3)

    def test_section(self):
        section = Config(env={}).section('body')
        self.assertEqual(section, {'kind': 'stub', 'asset_path': '', 'n_vertices': 500})

    def test_patch_tiling_lives_in_audio_model(self):
        config = Config(env={})
        self.assertEqual(config['audio_model.patch_size'], 16)
        self.assertEqual(config['audio_model.patch_overlap'], 6)
        self.assertEqual(config.section('patch'), {})
        self.assertNotIn('body.fps', config)

        filename = self._write("[patch]\noverlap = 2\n")
        with self.assertRaises(ConfigurationError):
            Config(filename, env={})


if __name__ == "__main__":
    unittest.main()
