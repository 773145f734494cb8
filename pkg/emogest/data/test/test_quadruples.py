""" Tests of quadruple construction. """

import unittest

import numpy as np

from emogest.audio.patches import patchify
from emogest.core.errors import ConfigurationError
from emogest.data.quadruples import build_quadruples, quadruple_keys
from emogest.data.windowing import WindowedSample, filterbank_stats
from emogest.test.toymodels import toy_windows


class TestQuadrupleKeys(unittest.TestCase):

    def test_one_quadruple(self):
        samples = toy_windows(n_emotions=1)
        found = quadruple_keys(samples)
        self.assertEqual(len(found), 1)
        emotion, members = found[0]
        self.assertEqual(emotion, 0)
        cells = [(samples[i].content_id, samples[i].style_id) for i in members]
        self.assertEqual(cells, [(0, 0), (1, 0), (0, 1), (1, 1)])

    def test_every_pair(self):
        # 3 content pairs x 1 style pair, per emotion
        self.assertEqual(len(quadruple_keys(toy_windows(n_contents=3))), 6)
        # 1 content pair x 3 style pairs
        self.assertEqual(len(quadruple_keys(toy_windows(n_styles=3, n_emotions=1))), 3)

    def test_windows_are_not_mixed(self):
        samples = toy_windows(n_emotions=1)
        shifted = [WindowedSample((s.clip_id, 1 if s.content_id == 1 else 0), s.filterbank,
                                  s.poses, None, {'emotion_id': s.emotion_id,
                                                  'style_id': s.style_id,
                                                  'content_id': s.content_id})
                   for s in samples]
        self.assertEqual(quadruple_keys(shifted), [])


class TestBuildQuadruples(unittest.TestCase):

    def test_members(self):
        samples = toy_windows(n_emotions=1)
        stats = filterbank_stats(samples)
        q, = build_quadruples(samples, stats, 4, 0)

        self.assertEqual(q.content_ids, [0, 1, 0, 1])
        self.assertEqual(q.style_ids, [0, 0, 1, 1])
        self.assertEqual(q.emotion_id, 0)
        self.assertEqual(q.keys[1], samples[2].key)
        expected = patchify(stats.apply(samples[2].filterbank), 4, 0)
        np.testing.assert_array_equal(q.audios[1].patches, expected.patches)

    def test_shuffle(self):
        samples = toy_windows(n_contents=3)
        canonical = build_quadruples(samples, None, 4, 0)
        shuffled = build_quadruples(samples, None, 4, 0, seed=3)
        self.assertEqual(sorted(q.keys for q in canonical), sorted(q.keys for q in shuffled))

    def test_missing_factor(self):
        with self.assertRaises(ConfigurationError) as cm:
            build_quadruples(toy_windows(n_styles=1), None, 4, 0)
        self.assertIn('style', str(cm.exception))

        with self.assertRaises(ConfigurationError) as cm:
            build_quadruples(toy_windows(n_contents=1), None, 4, 0)
        self.assertIn('content', str(cm.exception))


if __name__ == "__main__":
    unittest.main()
