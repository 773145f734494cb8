""" Drivers that train the audio model, the gesture model and the motion
feature extractor."""

import numpy as np
import torch

from emogest.audio.augment import AugmentConfig, augment
from emogest.audio.patches import patchify
from emogest.core.config import Config
from emogest.core.errors import ConfigurationError, InvalidInputError, NumericalError
from emogest.data.quadruples import build_quadruples
from emogest.data.windowing import filterbank_stats
from emogest.diffusion.schedule import DiffusionOptions
from emogest.diffusion.training import (BodyOptions, GestureBatch, GestureLossWeights,
                                        GestureModel, joint_train_step)
from emogest.disentangle.latents import AudioQuadruple, QuadrupleBatch
from emogest.disentangle.losses import (AUDIO_TERMS, AudioLossWeights, classification_loss,
                                        disentangle_losses, evaluate_audio_classifier)
from emogest.disentangle.model import AudioModel, AudioModelOptions
from emogest.drivers.driver import Driver, TrainOptions
from emogest.evaluation.extractor import ExtractorOptions, MotionExtractor, extract_features
from emogest.evaluation.metrics import emotion_accuracy
from emogest.prior.vae import PriorOptions


def _chunks(rng, n, size):
    order = rng.permutation(n)
    for start in range(0, n, size):
        yield order[start:start + size]


def _grad_norm(parameters):
    grads = [p.grad for p in parameters if p.grad is not None]
    if not grads:
        return 0.0
    return float(torch.sqrt(sum((g.double() ** 2).sum() for g in grads)))


class AudioTrainer(Driver):
    """ Trains the audio encoders and fusion decoder on quadruples.

    Args
    ----
    model : `AudioModel`
        Model being trained.

    quadruples : list of `AudioQuadruple`
        Training set.

    options : `TrainOptions`, optional
        Training settings.

    weights : `AudioLossWeights`, optional
        Loss term factors.

    augment_config : `AugmentConfig`, optional
        Augmentation of every member, drawn anew per step; off when omitted
        or disabled.

    validation : list of `AudioQuadruple`, optional
        Quadruples whose classifier accuracy is recorded after each epoch.
    """

    def __init__(self, model, quadruples, options=None, weights=None, augment_config=None,
                 validation=None, name=None):
        super(AudioTrainer, self).__init__(options, name)
        if not quadruples:
            raise ConfigurationError.missing_factor('emotion', 'no training quadruples')
        self.model = model
        self.quadruples = list(quadruples)
        self.weights = weights if weights is not None else AudioLossWeights()
        self.augment_config = augment_config
        self.validation = validation
        if not any(self.weights[name] > 0 for name in self.weights.keys()):
            raise ConfigurationError("Every audio loss weight is zero")

    def parameters(self):
        return list(self.model.encoders.parameters()) + list(self.model.decoder.parameters())

    def _augmented(self, q, rng):
        seeds = rng.randint(0, 2 ** 31 - 1, size=4)
        audios = []
        for a, seed in zip(q.audios, seeds):
            if a.filterbank is None:
                audios.append(a)
            else:
                fb = augment(a.filterbank, self.augment_config, seed=int(seed))
                audios.append(patchify(fb, a.patch_size, a.overlap))
        return AudioQuadruple(audios, q.content_ids, q.style_ids, q.emotion_id, q.keys)

    def batches(self, rng):
        cfg = self.augment_config
        for idx in _chunks(rng, len(self.quadruples), self.options['batch']):
            chunk = [self.quadruples[i] for i in idx]
            if cfg is not None and cfg['enabled']:
                chunk = [self._augmented(q, rng) for q in chunk]
            yield QuadrupleBatch.from_quadruples(chunk)

    def step(self, batch):
        self.model.train()
        self.optimizer.zero_grad(set_to_none=True)
        bundle = disentangle_losses(batch, self.model.encoders, self.model.decoder,
                                    weights=self.weights)
        for name in AUDIO_TERMS:
            if not bool(torch.isfinite(getattr(bundle, name))):
                raise NumericalError.non_finite_loss(name, self.iter_count)
        bundle.total.backward()
        values = bundle.as_dict()
        values['grad_norm'] = _grad_norm(self.parameters())
        self.optimizer.step()
        return values

    def end_epoch(self, epoch):
        if not self.validation:
            return {}
        return evaluate_audio_classifier(self.model.encoders, self.validation)

    def save(self, path):
        self.model.save(path, extra={'iter_count': self.iter_count})


class GestureTrainer(Driver):
    """ Trains the motion prior and the denoiser jointly on pose windows and
    the audio latents of the same windows.

    Args
    ----
    model : `GestureModel`
        Model being trained.

    poses : Tensor
        Pose windows [N x T x 6J].

    cond : Tensor
        Latent triples [N x 3 x d_m].

    options : `TrainOptions`, optional
        Training settings.

    weights : `GestureLossWeights`, optional
        Loss term factors.

    steps : int, optional
        DDIM steps of the alignment pass.
    """

    def __init__(self, model, poses, cond, options=None, weights=None, steps=None, name=None):
        super(GestureTrainer, self).__init__(options, name)
        GestureBatch(poses, cond)
        self.model = model
        self.poses = poses
        self.cond = cond
        self.weights = weights if weights is not None else GestureLossWeights()
        self.steps = steps

    def parameters(self):
        return list(self.model.prior.parameters()) + list(self.model.denoiser.parameters())

    def batches(self, rng):
        for idx in _chunks(rng, self.poses.shape[0], self.options['batch']):
            idx = torch.as_tensor(idx, dtype=torch.long)
            yield GestureBatch(self.poses[idx], self.cond[idx])

    def step(self, batch):
        self.model.train()
        report = joint_train_step(batch, self.model, self.optimizer, self.weights,
                                  self.generator, self.steps, step=self.iter_count)
        return report.as_dict()

    def save(self, path):
        self.model.save(path, extra={'iter_count': self.iter_count})


class ExtractorTrainer(Driver):
    """ Trains the motion feature extractor with emotion cross-entropy.

    Args
    ----
    extractor : `MotionExtractor`
        Model being trained.

    poses : Tensor
        Pose windows [N x T x 6J].

    labels : array_like
        Emotion ids [N].

    validation : tuple, optional
        (poses, labels) whose accuracy is recorded after each epoch as
        'val_accuracy'.
    """

    def __init__(self, extractor, poses, labels, options=None, validation=None, name=None):
        super(ExtractorTrainer, self).__init__(options, name)
        self.extractor = extractor
        self.poses = poses
        self.labels = torch.as_tensor(labels, dtype=torch.long).reshape(-1)
        if self.labels.shape[0] != poses.shape[0]:
            raise InvalidInputError("%d labels for %d pose windows"
                                    % (self.labels.shape[0], poses.shape[0]))
        self.validation = validation

    def parameters(self):
        return list(self.extractor.parameters())

    def batches(self, rng):
        for idx in _chunks(rng, self.poses.shape[0], self.options['batch']):
            idx = torch.as_tensor(idx, dtype=torch.long)
            yield self.poses[idx], self.labels[idx]

    def step(self, batch):
        poses, labels = batch
        self.extractor.train()
        self.optimizer.zero_grad(set_to_none=True)
        dtype = next(self.extractor.parameters()).dtype
        _, logits = self.extractor(poses.to(dtype))
        loss = classification_loss(logits, labels)
        if not bool(torch.isfinite(loss)):
            raise NumericalError.non_finite_loss('l_ce', self.iter_count)
        loss.backward()
        self.optimizer.step()
        return {'l_total': float(loss)}

    def accuracy(self, poses, labels):
        """ Emotion accuracy in percent on pose windows."""
        feats = extract_features(poses, self.extractor)
        return emotion_accuracy(feats.logits, np.asarray(labels))

    def end_epoch(self, epoch):
        if self.validation is None:
            return {}
        return {'val_accuracy': self.accuracy(*self.validation)}

    def save(self, path):
        self.extractor.save(path, extra={'iter_count': self.iter_count})


def _config(config):
    return config if config is not None else Config()


def _train_options(config):
    options = TrainOptions().from_config(config, 'train')
    options['seed'] = config.seed
    return options


def _add_recorders(driver, recorders):
    for recorder in recorders or ():
        driver.add_recorder(recorder)
    return driver


def train_audio_model(samples, config=None, recorders=None, validation=None, options=None):
    """ Builds quadruples from windowed samples and trains an audio model.

    Args
    ----
    samples : list of `WindowedSample`
        Labeled training windows.

    config : `Config`, optional
        Configuration; the packaged defaults when omitted.

    recorders : list of `BaseRecorder`, optional
        Recorders of the training history.

    validation : list of `WindowedSample`, optional
        Windows whose quadruples report classifier accuracy per epoch.

    options : `TrainOptions`, optional
        Overrides the 'train' section.

    Returns
    -------
    tuple
        (`AudioModel`, `AudioTrainer`)

    Raises
    ------
    ConfigurationError
        If the samples form no valid quadruple.
    """
    config = _config(config)
    model_options = AudioModelOptions().from_config(config, 'audio_model')
    stats = filterbank_stats(samples) if samples else None
    size, overlap = model_options['patch_size'], model_options['patch_overlap']
    quadruples = build_quadruples(samples, stats, size, overlap)
    if quadruples[0].audios[0].n_patches != model_options.n_patches:
        raise ConfigurationError.mismatch('Filterbank shape', ['filterbank.target_frames',
                                                               'audio_model.n_frames'])
    held_out = None
    if validation:
        held_out = build_quadruples(validation, stats, size, overlap)

    if options is None:
        options = _train_options(config)
    augment_config = AugmentConfig().from_config(config, 'augment')
    augment_config['rng_seed'] = options['seed']
    model = AudioModel(model_options, stats)
    trainer = AudioTrainer(model, quadruples, options,
                           AudioLossWeights().from_config(config, 'audio_loss'),
                           augment_config, held_out)
    _add_recorders(trainer, recorders).run()
    model.eval()
    return model, trainer


def cache_latents(samples, audio_model):
    """ Fills the latent cache of every sample that lacks one."""
    audio_model.eval()
    for sample in samples:
        if sample.latents is None:
            sample.latents = audio_model.latents(sample.filterbank)
    return samples


def gesture_tensors(samples, audio_model=None):
    """ Pose windows [N x T x 6J] and latent triples [N x 3 x d_m] of
    windowed samples, encoding latents with `audio_model` where the cache is
    empty."""
    if not samples:
        raise InvalidInputError.empty('samples')
    if audio_model is not None:
        cache_latents(samples, audio_model)
    missing = [s.key for s in samples if s.latents is None]
    if missing:
        raise ConfigurationError("Windows %s have no audio latents" % missing[:3])
    batch = GestureBatch(torch.stack([s.poses.to_tensor() for s in samples]),
                         torch.stack([s.latents.as_tensor() for s in samples]),
                         keys=[(s.key, s.key) for s in samples])
    return batch.poses, batch.cond


def train_gesture_model(samples, audio_model, config=None, recorders=None, body=None,
                        options=None):
    """ Trains a gesture model on windowed samples conditioned on the latents
    of a trained audio model.

    Returns
    -------
    tuple
        (`GestureModel`, `GestureTrainer`)
    """
    config = _config(config)
    prior_options = PriorOptions().from_config(config, 'prior')
    diffusion_options = DiffusionOptions().from_config(config, 'diffusion')
    if audio_model.options['latent_dim'] != diffusion_options['latent_dim']:
        raise ConfigurationError.mismatch('Audio and motion latent width',
                                          ['audio_model.latent_dim', 'diffusion.latent_dim'])
    poses, cond = gesture_tensors(samples, audio_model)
    if poses.shape[1] != prior_options['window']:
        raise ConfigurationError("Windows have %d frames, 'prior.window' is %d"
                                 % (poses.shape[1], prior_options['window']))

    if options is None:
        options = _train_options(config)
    model = GestureModel(prior_options, diffusion_options,
                         BodyOptions().from_config(config, 'body'), body=body)
    trainer = GestureTrainer(model, poses, cond, options,
                             GestureLossWeights().from_config(config, 'gesture_loss'))
    _add_recorders(trainer, recorders).run()
    model.eval()
    return model, trainer


def train_extractor(samples, config=None, recorders=None, validation=None, options=None):
    """ Trains the motion feature extractor on the emotion labels of windowed
    samples.

    When `validation` is omitted, a seeded fifth of the samples (at least
    one) is held out, provided five or more samples exist.

    Returns
    -------
    tuple
        (`MotionExtractor`, `ExtractorTrainer`)

    Raises
    ------
    ConfigurationError
        If fewer than two emotion classes are present.
    """
    config = _config(config)
    if options is None:
        options = _train_options(config)
    labels = np.array([s.emotion_id for s in samples], dtype=np.int64)
    if len(set(labels.tolist())) < 2:
        raise ConfigurationError("The extractor needs at least two emotion classes, got %d"
                                 % len(set(labels.tolist())))

    extractor_options = ExtractorOptions().from_config(config, 'extractor')
    poses = torch.stack([s.poses.to_tensor() for s in samples])
    if poses.shape[1] != extractor_options['window'] or \
       poses.shape[2] != 6 * extractor_options['n_joints']:
        raise ConfigurationError.mismatch('Extractor input', ['extractor.window',
                                                              'extractor.n_joints'])

    if validation is None and len(samples) >= 5:
        order = np.random.RandomState(options['seed']).permutation(len(samples))
        held = order[:max(1, len(samples) // 5)]
        kept = order[len(held):]
        validation = (poses[torch.as_tensor(held)], labels[held])
        poses, labels = poses[torch.as_tensor(kept)], labels[kept]
    elif validation is not None:
        validation = (torch.stack([s.poses.to_tensor() for s in validation]),
                      np.array([s.emotion_id for s in validation], dtype=np.int64))

    extractor = MotionExtractor(extractor_options)
    trainer = ExtractorTrainer(extractor, poses, labels, options, validation)
    _add_recorders(trainer, recorders).run()
    extractor.eval()
    return extractor, trainer
