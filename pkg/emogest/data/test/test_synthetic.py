""" Tests of the synthetic corpus. """

import json
import os
import unittest
from shutil import rmtree
from tempfile import mkdtemp

import numpy as np

from emogest.audio.features import Waveform
from emogest.body.bodymodel import PoseSequence
from emogest.core.errors import ConfigurationError, InvalidInputError
from emogest.data.records import EMOTIONS, emotion_id, load_records, read_labels
from emogest.data.synthetic import (SyntheticCorpusSpec, clip_name, content_beats,
                                    generate_synthetic_corpus, semantic_weights,
                                    synthetic_angles, synthetic_audio, synthetic_motion)


def small_spec(**values):
    spec = SyntheticCorpusSpec(n_styles=2, n_contents=2, n_emotions=2, duration_s=2.0,
                               fps=10, n_joints=3, beats_per_clip=4)
    spec.update(values)
    return spec


class TestSignals(unittest.TestCase):

    def test_motion_frequency(self):
        spec = SyntheticCorpusSpec(duration_s=10.0, fps=30)
        angle = synthetic_angles(spec, 0, 2, 1)
        spectrum = np.abs(np.fft.rfft(angle - angle.mean()))
        freqs = np.fft.rfftfreq(angle.size, 1.0 / 30)
        self.assertAlmostEqual(freqs[spectrum.argmax()], spec.frequency(2), places=6)

    def test_joint_scaling(self):
        spec = small_spec(n_joints=4)
        motion = synthetic_motion(spec, 1, 1, 0)
        angle = synthetic_angles(spec, 1, 1, 0)
        rot = motion.rot6d()
        for j in range(4):
            recovered = np.arctan2(rot[:, j, 1], rot[:, j, 0])
            expected = 0.0 if j == 0 else angle / (1.0 + 0.1 * j)
            np.testing.assert_allclose(recovered, expected, atol=1e-6)

    def test_beats(self):
        spec = small_spec()
        beats = content_beats(spec, 1)
        self.assertEqual(len(beats), 4)
        self.assertTrue(np.all(np.diff(beats) > 0))
        np.testing.assert_allclose(beats * 10, np.round(beats * 10), atol=1e-9)
        np.testing.assert_array_equal(beats, content_beats(spec, 1))

    def test_semantic_peaks_on_beats(self):
        spec = small_spec()
        weights = semantic_weights(spec, 0)
        frames = np.round(content_beats(spec, 0) * 10).astype(int)
        np.testing.assert_allclose(weights[frames], 1.0)
        self.assertTrue(np.all(weights <= 1.0))

    def test_audio(self):
        spec = small_spec()
        audio = synthetic_audio(spec, 0, 1, 1)
        self.assertEqual(audio.samples.size, 32000)
        self.assertAlmostEqual(float(np.abs(audio.samples).max()), 0.9, places=5)
        np.testing.assert_array_equal(audio.samples, synthetic_audio(spec, 0, 1, 1).samples)


class TestCorpus(unittest.TestCase):

    def setUp(self):
        self.tempdir = mkdtemp()

    def tearDown(self):
        rmtree(self.tempdir)

    def test_layout(self):
        records = generate_synthetic_corpus(small_spec(), self.tempdir)
        self.assertEqual(len(records), 8)
        for name in ('labels.csv', 'semantic.csv', 'corpus.json'):
            self.assertTrue(os.path.isfile(os.path.join(self.tempdir, name)))

        loaded = load_records(self.tempdir)
        self.assertEqual([r.clip_id for r in loaded], [r.clip_id for r in records])
        rec = loaded[-1]
        self.assertEqual(rec.clip_id, clip_name(1, 1, 1))
        self.assertEqual((rec.content_id, rec.emotion_id, rec.style_id), (1, 1, 1))
        self.assertAlmostEqual(rec.duration_s, 2.0)

        with open(os.path.join(self.tempdir, 'corpus.json')) as inp:
            self.assertEqual(json.load(inp)['n_styles'], 2)

    def test_deterministic(self):
        first = os.path.join(self.tempdir, 'a')
        second = os.path.join(self.tempdir, 'b')
        generate_synthetic_corpus(small_spec(), first)
        generate_synthetic_corpus(small_spec(), second)
        name = clip_name(0, 1, 0)
        np.testing.assert_array_equal(
            Waveform.read(os.path.join(first, 'audio', name + '.wav')).samples,
            Waveform.read(os.path.join(second, 'audio', name + '.wav')).samples)
        np.testing.assert_array_equal(
            PoseSequence.read(os.path.join(first, 'motion', name)).frames,
            PoseSequence.read(os.path.join(second, 'motion', name)).frames)

    def test_invalid_duration(self):
        with self.assertRaises(InvalidInputError):
            generate_synthetic_corpus(small_spec(duration_s=0.0), self.tempdir)


class TestRecords(unittest.TestCase):

    def setUp(self):
        self.tempdir = mkdtemp()

    def tearDown(self):
        rmtree(self.tempdir)

    def test_emotion_names(self):
        self.assertEqual(emotion_id('Angry'), EMOTIONS.index('angry'))
        self.assertEqual(emotion_id('3'), 3)
        self.assertEqual(emotion_id(7), 7)
        with self.assertRaises(InvalidInputError):
            emotion_id('bored')
        with self.assertRaises(InvalidInputError):
            emotion_id(8)

    def test_missing_columns(self):
        path = os.path.join(self.tempdir, 'labels.csv')
        with open(path, 'w') as out:
            out.write('clip_id,emotion_id\na,happy\n')
        with self.assertRaises(ConfigurationError):
            read_labels(path)

    def test_missing_labels_file(self):
        with self.assertRaises(ConfigurationError):
            load_records(self.tempdir)

    def test_misaligned_clip(self):
        generate_synthetic_corpus(small_spec(n_styles=1, n_contents=1, n_emotions=1),
                                  self.tempdir)
        name = clip_name(0, 0, 0)
        audio = Waveform(np.zeros(16000), 16000)
        audio.write(os.path.join(self.tempdir, 'audio', name + '.wav'))
        with self.assertRaises(InvalidInputError):
            load_records(self.tempdir)


if __name__ == "__main__":
    unittest.main()
