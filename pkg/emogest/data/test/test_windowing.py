""" Tests of clip windowing and the content split. """

import os
import unittest
import warnings
from shutil import rmtree
from tempfile import mkdtemp

import numpy as np

from emogest.audio.features import FilterbankOptions
from emogest.core.errors import ConfigurationError, InvalidInputError
from emogest.data.records import load_records
from emogest.data.synthetic import SyntheticCorpusSpec, generate_synthetic_corpus
from emogest.data.windowing import (DataOptions, filterbank_stats, split_by_content,
                                    window_count, window_dataset)
from emogest.test.toymodels import toy_windows


def one_clip_corpus(out_dir, duration_s):
    spec = SyntheticCorpusSpec(n_styles=1, n_contents=1, n_emotions=1, duration_s=duration_s,
                               fps=10, n_joints=3, beats_per_clip=4)
    return generate_synthetic_corpus(spec, out_dir)


class TestWindowCount(unittest.TestCase):

    def test_counts(self):
        self.assertEqual(window_count(25.0, 10.0), 2)
        self.assertEqual(window_count(20.0, 10.0), 2)
        self.assertEqual(window_count(9.9, 10.0), 0)
        self.assertEqual(window_count(2.4, 0.8), 3)


class TestWindowDataset(unittest.TestCase):

    def setUp(self):
        self.tempdir = mkdtemp()
        self.options = DataOptions(window_seconds=10.0, fps=10)
        self.fb_options = FilterbankOptions(n_mels=16, target_frames=64, n_fft=512)

    def tearDown(self):
        rmtree(self.tempdir)

    def test_trailing_remainder_dropped(self):
        records = one_clip_corpus(self.tempdir, 25.0)
        samples = window_dataset(records, self.options, self.fb_options)

        self.assertEqual([s.key for s in samples], [('c00_e0_s00', 0), ('c00_e0_s00', 1)])
        for s in samples:
            self.assertEqual(s.poses.n_frames, 100)
            self.assertEqual(s.filterbank.shape, (64, 16))
            self.assertAlmostEqual(s.audio.duration_s, 10.0)

        motion = records[0].read_motion()
        np.testing.assert_array_equal(samples[1].poses.frames, motion.frames[100:200])

    def test_short_clip_skipped(self):
        records = one_clip_corpus(self.tempdir, 9.9)
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter('always')
            samples = window_dataset(records, self.options, self.fb_options)
        self.assertEqual(samples, [])
        self.assertTrue(any('shorter than one' in str(x.message) for x in w))

    def test_frame_rate_mismatch(self):
        records = one_clip_corpus(self.tempdir, 2.0)
        with self.assertRaises(InvalidInputError):
            window_dataset(records, DataOptions(window_seconds=1.0, fps=30), self.fb_options)

    def test_reads_corpus_directory(self):
        one_clip_corpus(self.tempdir, 2.0)
        samples = window_dataset(load_records(self.tempdir), DataOptions(window_seconds=1.0,
                                                                         fps=10),
                                 self.fb_options)
        self.assertEqual(len(samples), 2)
        self.assertEqual(samples[0].emotion_id, 0)


class TestSplit(unittest.TestCase):

    def test_highest_contents_held_out(self):
        samples = toy_windows(n_contents=4)
        train, test = split_by_content(samples, 2)
        self.assertEqual(set(s.content_id for s in train), set([0, 1]))
        self.assertEqual(set(s.content_id for s in test), set([2, 3]))
        self.assertEqual(len(train) + len(test), len(samples))

    def test_no_holdout(self):
        samples = toy_windows()
        train, test = split_by_content(samples, 0)
        self.assertEqual(len(train), len(samples))
        self.assertEqual(test, [])

    def test_too_many_held_out(self):
        with self.assertRaises(ConfigurationError):
            split_by_content(toy_windows(), 2)

    def test_stats(self):
        samples = toy_windows()
        stats = filterbank_stats(samples)
        values = np.concatenate([s.filterbank.values.ravel() for s in samples])
        self.assertAlmostEqual(stats.mean, values.astype(np.float64).mean(), places=6)
        self.assertAlmostEqual(stats.std, values.astype(np.float64).std(), places=6)
        with self.assertRaises(InvalidInputError):
            filterbank_stats([])


if __name__ == "__main__":
    unittest.main()
