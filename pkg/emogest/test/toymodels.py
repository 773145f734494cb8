""" Tiny model configurations for gradient checks and overfit runs."""

import numpy as np
import torch

from emogest.audio.features import Filterbank, FilterbankOptions
from emogest.audio.patches import patchify
from emogest.body.bodymodel import PoseSequence, StubBody
from emogest.body.skeleton import Skeleton
from emogest.core.config import Config
from emogest.data.windowing import WindowedSample
from emogest.diffusion.schedule import DiffusionOptions
from emogest.disentangle.latents import AudioQuadruple
from emogest.disentangle.model import AudioModelOptions
from emogest.drivers.driver import Driver, TrainOptions
from emogest.evaluation.extractor import ExtractorOptions
from emogest.prior.vae import PriorOptions

TOY_LATENT = 8
TOY_JOINTS = 3
TOY_WINDOW = 8

# filterbank frames and mels of the toy audio model
TOY_FRAMES = 24
TOY_MELS = 16


def toy_prior_options(**values):
    options = PriorOptions(n_joints=TOY_JOINTS, window=TOY_WINDOW, latent_dim=TOY_LATENT,
                           hidden=16, ff_dim=32, layers=3, heads=2, dropout=0.0)
    options.update(values)
    return options


def toy_diffusion_options(**values):
    options = DiffusionOptions(steps_train=50, steps_infer=5, latent_dim=TOY_LATENT,
                               hidden=16, ff_dim=32, layers=3, heads=2, dropout=0.0)
    options.update(values)
    return options


def toy_audio_options(**values):
    """ 4x4 patches without overlap on a 24 x 16 filterbank."""
    options = AudioModelOptions(n_frames=TOY_FRAMES, n_mels=TOY_MELS, patch_size=4,
                                patch_overlap=0, embed_dim=16, depth=1, heads=2,
                                mlp_ratio=2.0, latent_dim=TOY_LATENT, n_emotions=2, n_styles=2,
                                fusion_dim=16, fusion_layers=1, fusion_heads=2, decoder_dim=16,
                                decoder_layers=1, decoder_heads=2)
    options.update(values)
    return options


def toy_filterbank_options(**values):
    options = FilterbankOptions(n_mels=TOY_MELS, target_frames=TOY_FRAMES, n_fft=512)
    options.update(values)
    return options


def toy_extractor_options(**values):
    options = ExtractorOptions(n_joints=TOY_JOINTS, window=TOY_WINDOW, hidden=16, ff_dim=32,
                               layers=1, heads=2, dropout=0.0, n_emotions=2)
    options.update(values)
    return options


def toy_body():
    """ Three-joint chain with a dozen vertices."""
    return StubBody(Skeleton.chain(TOY_JOINTS, 0.3), n_vertices=12)


class ScriptedDriver(Driver):
    """ Reports a fixed sequence of losses, two steps per epoch, without
    changing its one parameter."""

    def __init__(self, epochs=2, name='Scripted'):
        super(ScriptedDriver, self).__init__(TrainOptions(epochs=epochs, lr=0.0), name)
        self.weight = torch.nn.Parameter(torch.zeros(1))

    def parameters(self):
        return [self.weight]

    def batches(self, rng):
        return [0, 1]

    def step(self, batch):
        return {'l_total': 4.0 / (self.iter_count + 1), 'grad_norm': float(batch)}


# corpus and model settings of the end-to-end runs: 0.8 s clips at 10 fps
_TOY_CONFIG = {
    'filterbank': {'n_mels': TOY_MELS, 'target_frames': TOY_FRAMES, 'n_fft': 512},
    'augment': {'enabled': False},
    'audio_model': dict(toy_audio_options().items()),
    'prior': dict(toy_prior_options().items()),
    'diffusion': dict(toy_diffusion_options().items()),
    'body': {'n_vertices': 12},
    'extractor': dict(toy_extractor_options().items()),
    'train': {'epochs': 2, 'batch': 4, 'lr': 1e-3, 'seed': 0},
    'data': {'window_seconds': 0.8, 'fps': 10, 'holdout_contents': 1},
    'synthetic': {'n_styles': 2, 'n_contents': 3, 'n_emotions': 2, 'duration_s': 0.8,
                  'fps': 10, 'n_joints': TOY_JOINTS, 'beats_per_clip': 3},
}


def toy_config(**overrides):
    """ A `Config` for the toy corpus, ignoring the seed environment
    variable. Overrides use dotted keys with '__' for the dot."""
    config = Config(env={})
    for section, values in _TOY_CONFIG.items():
        for name, value in values.items():
            config['%s.%s' % (section, name)] = value
    for key, value in overrides.items():
        config[key.replace('__', '.')] = value
    return config


def toy_windows(n_contents=2, n_styles=2, n_emotions=2, seed=0):
    """ Labeled windows with raw filterbanks whose pattern follows the
    content, style and emotion, and near-identity poses whose swing grows
    with the emotion."""
    rng = np.random.RandomState(seed)
    t = np.arange(TOY_FRAMES)[:, None]
    f = np.arange(TOY_MELS)[None, :]
    steps = np.linspace(0.0, 1.0, TOY_WINDOW)[:, None]
    identity = np.tile([1.0, 0.0, 0.0, 0.0, 1.0, 0.0], TOY_JOINTS)[None, :]
    samples = []
    for c in range(n_contents):
        for e in range(n_emotions):
            for s in range(n_styles):
                values = -4.0 + np.sin(0.4 * (c + 1) * t + 0.3 * f) + \
                    0.5 * s * np.cos(0.5 * f) + 0.4 * e + 0.05 * rng.randn(TOY_FRAMES, TOY_MELS)
                swing = (0.1 + 0.3 * e) * np.sin(2.0 * np.pi * (1 + s) * steps + c)
                frames = identity + swing * np.tile([0.0, 1.0, 0.0, -1.0, 0.0, 0.0], TOY_JOINTS)
                labels = {'emotion_id': e, 'style_id': s, 'content_id': c}
                samples.append(WindowedSample(('c%d_e%d_s%d' % (c, e, s), 0), Filterbank(values),
                                              PoseSequence(frames, 10, TOY_JOINTS), None, labels))
    return samples


def toy_quadruple(emotion, rng, offset=1.5, overlap=0):
    """ A quadruple of standardized filterbanks with content, style and
    emotion patterns on top of a common offset."""
    t = np.arange(TOY_FRAMES)[:, None]
    f = np.arange(TOY_MELS)[None, :]
    audios = []
    for c, s in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        values = offset + np.sin(0.5 * (c + 1) * t + 0.3 * f) + 0.5 * s * np.cos(0.5 * f) + \
            0.3 * emotion + 0.05 * rng.randn(TOY_FRAMES, TOY_MELS)
        audios.append(patchify(Filterbank(values, standardized=True), 4, overlap))
    return AudioQuadruple(audios, [0, 1, 0, 1], [0, 0, 1, 1], emotion)


def toy_quadruples(n=4, seed=0, overlap=0):
    """ `n` quadruples alternating between emotions 0 and 1."""
    rng = np.random.RandomState(seed)
    return [toy_quadruple(k % 2, rng, overlap=overlap) for k in range(n)]
