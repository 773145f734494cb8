""" Inference from speech to motion, with and without latent edits."""

import math

import numpy as np
import torch

from emogest.audio.features import FilterbankOptions, compute_filterbank
from emogest.body.bodymodel import PoseSequence
from emogest.core.errors import ConfigurationError, InvalidInputError
from emogest.diffusion.sampler import ddim_sample
from emogest.editing.recombine import recombine, NO_EDIT
from emogest.prior.vae import decode_motion


class GesturePipeline(object):
    """ Audio model, gesture model and the windowing that joins them.

    Audio is cut into windows of `window_seconds` from time 0; the last,
    partial window is padded. Each window is encoded, its motion latent is
    sampled by DDIM under the window's latent triple and decoded, and the
    motion windows are joined and cut to the audio length. Window k samples
    with seed ``seed + k``.

    Args
    ----
    audio_model : `AudioModel`
        Encoders and filterbank statistics.

    gesture_model : `GestureModel`
        Motion prior and denoiser.

    filterbank_options : `FilterbankOptions`, optional
        Front end; its mel count and frame count must match the audio model.

    window_seconds : float
        Length of one window.

    fps : int
        Motion frame rate.
    """

    def __init__(self, audio_model, gesture_model, filterbank_options=None, window_seconds=10.0,
                 fps=30):
        audio_dim = audio_model.options['latent_dim']
        motion_dim = gesture_model.diffusion_options['latent_dim']
        if audio_dim != motion_dim:
            raise ConfigurationError("Audio checkpoint has %d-d latents, the gesture "
                                     "checkpoint is conditioned on %d-d latents"
                                     % (audio_dim, motion_dim))
        if filterbank_options is None:
            filterbank_options = FilterbankOptions(n_mels=audio_model.options['n_mels'],
                                                   target_frames=audio_model.options['n_frames'])
        if filterbank_options['n_mels'] != audio_model.options['n_mels'] or \
           filterbank_options['target_frames'] != audio_model.options['n_frames']:
            raise ConfigurationError.mismatch('Filterbank front end',
                                              ['filterbank.n_mels', 'filterbank.target_frames'])

        self.audio_model = audio_model.eval()
        self.gesture_model = gesture_model.eval()
        self.filterbank_options = filterbank_options
        self.window_seconds = float(window_seconds)
        self.fps = int(fps)
        self.window_frames = gesture_model.prior_options['window']
        if int(round(self.window_seconds * self.fps)) != self.window_frames:
            raise ConfigurationError("A %.2f s window at %d fps does not fill the prior's "
                                     "%d frame window" % (self.window_seconds, self.fps,
                                                          self.window_frames))

    def _windows(self, audio):
        count = max(1, int(math.ceil(audio.duration_s / self.window_seconds - 1e-9)))
        return [audio.segment(k * self.window_seconds, (k + 1) * self.window_seconds)
                for k in range(count)]

    def latents(self, audio):
        """ Latent triple of every window of a waveform.

        Returns
        -------
        list of `AudioLatents`
        """
        out = []
        for segment in self._windows(audio):
            fb = compute_filterbank(segment, options=self.filterbank_options)
            out.append(self.audio_model.latents(fb))
        return out

    def sample(self, latents, seed=0, steps=None, n_frames=None):
        """ Motion of a sequence of window latents.

        Args
        ----
        latents : list of `AudioLatents`
            One triple per window.

        seed : int
            Seed of the first window.

        steps : int, optional
            DDIM steps, defaults to the gesture model's 'steps_infer'.

        n_frames : int, optional
            Length of the result; defaults to whole windows.

        Returns
        -------
        `PoseSequence`
        """
        if not latents:
            raise InvalidInputError.empty('latents')
        model = self.gesture_model
        if steps is None:
            steps = model.diffusion_options['steps_infer']
        dtype = next(model.parameters()).dtype

        frames = []
        with torch.no_grad():
            for k, triple in enumerate(latents):
                z = ddim_sample(model.denoiser, triple.as_tensor(dtype), model.schedule, steps,
                                seed=seed + k)
                frames.append(decode_motion(z, model.prior.decoder, self.window_frames,
                                            self.fps).frames)
        frames = np.concatenate(frames)
        if n_frames is not None:
            frames = frames[:max(1, n_frames)]
        return PoseSequence(frames, self.fps, model.prior_options['n_joints'])

    def _length(self, audio):
        return int(round(audio.duration_s * self.fps))

    def generate(self, audio, seed=0, steps=None):
        """ Motion for a waveform."""
        return self.sample(self.latents(audio), seed, steps, self._length(audio))

    def generate_variations(self, audio, seeds, steps=None):
        """ One motion per seed for the same waveform."""
        latents = self.latents(audio)
        return [self.sample(latents, seed, steps, self._length(audio)) for seed in seeds]

    def edit(self, audio1, audio2, mode, seed=0, steps=None):
        """ Motion for `audio1` with one factor taken from `audio2`; window k
        of `audio1` is paired with window k of `audio2`, wrapping around when
        `audio2` is shorter."""
        first = self.latents(audio1)
        second = first if audio2 is audio1 else self.latents(audio2)
        mixed = [recombine(l1, second[k % len(second)], mode) for k, l1 in enumerate(first)]
        return self.sample(mixed, seed, steps, self._length(audio1))


def generate_edited(audio1, audio2, mode=NO_EDIT, steps=None, seed=0, models=None):
    """ Encodes both audios, recombines their latents, samples and decodes.

    Args
    ----
    audio1, audio2 : `Waveform`
        Source of the kept factors and of the swapped factor.

    mode : str
        One of `EDIT_MODES`, or a factor name.

    steps : int, optional
        DDIM steps.

    seed : int
        Sampling seed.

    models : `GesturePipeline` or tuple
        A pipeline, or an (audio model, gesture model) pair.

    Returns
    -------
    `PoseSequence`
    """
    if models is None:
        raise ConfigurationError("generate_edited needs trained models")
    pipeline = models if isinstance(models, GesturePipeline) else GesturePipeline(*models)
    return pipeline.edit(audio1, audio2, mode, seed, steps)
