""" Tests of kinematic and audio beat detection. """

import unittest
import warnings

import numpy as np

from emogest.audio.features import Waveform
from emogest.body.bodymodel import PoseSequence, StubBody
from emogest.body.skeleton import BEAT_JOINTS
from emogest.core.errors import InvalidInputError
from emogest.evaluation.beats import (beat_joints, beats_from_options, detect_audio_beats,
                                      detect_kinematic_beats, joint_speed, onset_strength)
from emogest.evaluation.metrics import EvaluationOptions
from emogest.test.toymodels import toy_body, TOY_JOINTS


def swinging_root(n_frames=60, fps=30, freq=1.25, amplitude=0.5):
    """ The root of a chain turns back and forth about z; the turn stops at
    t = (k + 0.5) / (2 freq)."""
    t = np.arange(n_frames) / float(fps)
    theta = amplitude * np.sin(2.0 * np.pi * freq * t)
    frames = np.tile([1.0, 0.0, 0.0, 0.0, 1.0, 0.0], (n_frames, TOY_JOINTS))
    frames[:, :6] = np.stack([np.cos(theta), np.sin(theta), 0 * theta, -np.sin(theta),
                              np.cos(theta), 0 * theta], axis=1)
    return PoseSequence(frames, fps, TOY_JOINTS)


def bursts(onsets, duration=1.6, rate=16000, length=0.1):
    t = np.arange(int(duration * rate)) / float(rate)
    samples = np.zeros_like(t)
    for onset in onsets:
        active = (t >= onset) & (t < onset + length)
        samples[active] = 0.5 * np.sin(2.0 * np.pi * 1000.0 * (t[active] - onset))
    return Waveform(samples, rate)


class TestKinematicBeats(unittest.TestCase):

    def setUp(self):
        self.body = toy_body()
        self.joints = ('joint1', 'joint2')

    def test_valleys_of_speed(self):
        beats = detect_kinematic_beats(swinging_root(), self.body, min_gap=0.2,
                                       joints=self.joints)
        np.testing.assert_allclose(beats, [0.2, 0.6, 1.0, 1.4, 1.8], atol=1e-9)

    def test_min_gap(self):
        beats = detect_kinematic_beats(swinging_root(), self.body, min_gap=0.5,
                                       joints=self.joints)
        self.assertTrue(np.all(np.diff(beats) >= 0.5 - 1e-9))

    def test_still_motion(self):
        still = PoseSequence.identity(30, TOY_JOINTS, 30)
        self.assertEqual(detect_kinematic_beats(still, self.body, joints=self.joints), [])

    def test_speed_shape(self):
        speed = joint_speed(swinging_root(), self.body, self.joints)
        self.assertEqual(speed.shape, (60,))
        self.assertTrue(np.all(speed >= 0.0))

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            detect_kinematic_beats(swinging_root(n_frames=2), self.body, joints=self.joints)
        with self.assertRaises(InvalidInputError):
            detect_kinematic_beats(swinging_root(), self.body)


class TestBeatJoints(unittest.TestCase):

    def test_named_arm_joints(self):
        self.assertEqual(beat_joints(StubBody(n_vertices=94)), BEAT_JOINTS)

    def test_fallback(self):
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter('always')
            joints = beat_joints(toy_body())
        self.assertEqual(joints, ('joint1', 'joint2'))
        self.assertEqual(len(w), 1)

    def test_from_options(self):
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            beats = beats_from_options(swinging_root(), toy_body(), EvaluationOptions())
        np.testing.assert_allclose(beats, [0.2, 0.6, 1.0, 1.4, 1.8], atol=1e-9)


class TestAudioBeats(unittest.TestCase):

    def test_onsets(self):
        onsets = [0.25, 0.75, 1.25]
        beats = detect_audio_beats(bursts(onsets))
        self.assertEqual(len(beats), len(onsets))
        for found, true in zip(beats, onsets):
            self.assertLess(abs(found - true), 0.03)

    def test_silence(self):
        self.assertEqual(detect_audio_beats(Waveform(np.zeros(8000), 16000)), [])

    def test_strength_frames(self):
        flux, rate = onset_strength(bursts([0.25]), window=256, hop=80)
        self.assertEqual(rate, 200.0)
        self.assertEqual(flux.shape, ((25600 - 256) // 80 + 1,))
        self.assertTrue(np.all(flux >= 0.0))

    def test_short_input_is_padded(self):
        flux, _ = onset_strength(Waveform(np.ones(100), 16000))
        self.assertEqual(flux.shape, (1,))


if __name__ == "__main__":
    unittest.main()
