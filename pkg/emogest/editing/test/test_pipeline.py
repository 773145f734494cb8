""" Tests of speech-to-motion inference and latent edits. """

import unittest

import numpy as np
import torch

from emogest.audio.features import Waveform
from emogest.core.errors import ConfigurationError, InvalidInputError
from emogest.diffusion.training import GestureModel
from emogest.disentangle.model import AudioModel
from emogest.drivers.driver import TrainOptions
from emogest.drivers.trainers import train_audio_model, train_extractor, train_gesture_model
from emogest.editing.pipeline import GesturePipeline, generate_edited
from emogest.editing.recombine import EDIT_MODES, EMOTION_SWAP, recombine
from emogest.evaluation.extractor import extract_features
from emogest.test.toymodels import (toy_audio_options, toy_body, toy_config,
                                    toy_diffusion_options, toy_filterbank_options,
                                    toy_prior_options, toy_windows, TOY_JOINTS, TOY_WINDOW)


def tone(freq, duration=2.0, rate=16000):
    t = np.arange(int(duration * rate)) / float(rate)
    return Waveform(0.3 * np.sin(2.0 * np.pi * freq * t) * (1.0 + np.sin(2.0 * np.pi * 3.0 * t)),
                    rate)


def toy_pipeline(**diffusion):
    torch.manual_seed(0)
    audio_model = AudioModel(toy_audio_options())
    gesture_model = GestureModel(toy_prior_options(), toy_diffusion_options(**diffusion),
                                 body=toy_body())
    return GesturePipeline(audio_model, gesture_model, toy_filterbank_options(), 0.8, 10)


class TestGenerate(unittest.TestCase):

    def setUp(self):
        self.pipeline = toy_pipeline()
        self.audio = tone(220.0)

    def test_length(self):
        motion = self.pipeline.generate(self.audio, seed=0)
        # three 0.8 s windows cut to 2.0 s
        self.assertEqual(motion.n_frames, 20)
        self.assertEqual(motion.n_joints, TOY_JOINTS)
        self.assertEqual(motion.fps, 10)
        self.assertEqual(len(self.pipeline.latents(self.audio)), 3)

    def test_seeded(self):
        first = self.pipeline.generate(self.audio, seed=3)
        second = self.pipeline.generate(self.audio, seed=3)
        other = self.pipeline.generate(self.audio, seed=4)
        np.testing.assert_array_equal(first.frames, second.frames)
        self.assertFalse(np.array_equal(first.frames, other.frames))

    def test_window_seeds(self):
        latents = self.pipeline.latents(self.audio)
        whole = self.pipeline.sample(latents, seed=5)
        second = self.pipeline.sample(latents[1:2], seed=6)
        self.assertEqual(whole.n_frames, 3 * TOY_WINDOW)
        np.testing.assert_array_equal(whole.frames[TOY_WINDOW:2 * TOY_WINDOW], second.frames)

    def test_variations(self):
        motions = self.pipeline.generate_variations(self.audio, [0, 1])
        np.testing.assert_array_equal(motions[0].frames,
                                      self.pipeline.generate(self.audio, seed=0).frames)
        self.assertFalse(np.array_equal(motions[0].frames, motions[1].frames))

    def test_steps(self):
        motion = self.pipeline.generate(self.audio, seed=0, steps=2)
        self.assertEqual(motion.n_frames, 20)

    def test_empty_latents(self):
        with self.assertRaises(InvalidInputError):
            self.pipeline.sample([])


class TestEdit(unittest.TestCase):

    def setUp(self):
        self.pipeline = toy_pipeline()
        self.audio1 = tone(220.0)
        self.audio2 = tone(660.0, duration=0.8)

    def test_self_swap(self):
        reference = self.pipeline.generate(self.audio1, seed=2)
        for mode in EDIT_MODES:
            edited = self.pipeline.edit(self.audio1, self.audio1, mode, seed=2)
            np.testing.assert_array_equal(edited.frames, reference.frames)

    def test_emotion_swap(self):
        reference = self.pipeline.generate(self.audio1, seed=2)
        edited = generate_edited(self.audio1, self.audio2, EMOTION_SWAP, seed=2,
                                 models=self.pipeline)
        self.assertEqual(edited.n_frames, reference.n_frames)
        self.assertFalse(np.array_equal(edited.frames, reference.frames))

    def test_none_ignores_second_audio(self):
        reference = self.pipeline.generate(self.audio1, seed=2)
        edited = self.pipeline.edit(self.audio1, self.audio2, 'none', seed=2)
        np.testing.assert_array_equal(edited.frames, reference.frames)

    def test_needs_models(self):
        with self.assertRaises(ConfigurationError):
            generate_edited(self.audio1, self.audio2)


class TestTrainedEmotionSwap(unittest.TestCase):
    """ Swaps the emotion latent of every toy window with that of the
    window sharing its content and style, then lets a trained extractor
    label the generated motion."""

    @classmethod
    def setUpClass(cls):
        torch.manual_seed(0)
        config = toy_config(diffusion__beta_min=1e-3, diffusion__beta_max=0.2)
        cls.windows = toy_windows()
        cls.audio_model, _ = train_audio_model(
            cls.windows, config, options=TrainOptions(epochs=300, batch=4, lr=3e-3,
                                                      weight_decay=0.0))
        cls.gesture_model, _ = train_gesture_model(
            cls.windows, cls.audio_model, config, body=toy_body(),
            options=TrainOptions(epochs=1500, batch=8, lr=2e-3, weight_decay=0.0))
        cls.extractor, cls.extractor_trainer = train_extractor(
            cls.windows, config, validation=toy_windows(seed=1),
            options=TrainOptions(epochs=60, batch=4, lr=3e-3, weight_decay=0.0))
        cls.pipeline = GesturePipeline(cls.audio_model, cls.gesture_model,
                                       toy_filterbank_options(), 0.8, 10)

    def test_extractor_separates_emotions(self):
        held_out = toy_windows(seed=1)
        accuracy = self.extractor_trainer.accuracy(
            torch.stack([s.poses.to_tensor() for s in held_out]),
            [s.emotion_id for s in held_out])
        self.assertGreaterEqual(accuracy, 95.0)

    def test_labels_follow_donor(self):
        by_factors = dict(((s.content_id, s.emotion_id, s.style_id), s) for s in self.windows)
        motions, donors = [], []
        for (c, e, s), sample in sorted(by_factors.items()):
            donor = by_factors[(c, 1 - e, s)]
            mixed = recombine(sample.latents, donor.latents, EMOTION_SWAP)
            for seed in (0, 1):
                motions.append(self.pipeline.sample([mixed], seed=seed))
                donors.append(donor.emotion_id)

        logits = extract_features(motions, self.extractor).logits
        hits = np.mean(logits.argmax(axis=1) == np.array(donors))
        # two emotions, so chance is one half
        self.assertGreater(hits, 0.5)


class TestConfiguration(unittest.TestCase):

    def setUp(self):
        torch.manual_seed(0)
        self.audio_model = AudioModel(toy_audio_options())
        self.gesture_model = GestureModel(toy_prior_options(), toy_diffusion_options(),
                                          body=toy_body())

    def test_window_must_fill_prior(self):
        with self.assertRaises(ConfigurationError):
            GesturePipeline(self.audio_model, self.gesture_model, toy_filterbank_options(),
                            1.0, 10)

    def test_latent_width(self):
        narrow = GestureModel(toy_prior_options(latent_dim=4),
                              toy_diffusion_options(latent_dim=4), body=toy_body())
        with self.assertRaises(ConfigurationError):
            GesturePipeline(self.audio_model, narrow, toy_filterbank_options(), 0.8, 10)

    def test_filterbank_front_end(self):
        with self.assertRaises(ConfigurationError):
            GesturePipeline(self.audio_model, self.gesture_model,
                            toy_filterbank_options(n_mels=32), 0.8, 10)


if __name__ == "__main__":
    unittest.main()
