""" Tests of the audio disentanglement losses. """

import unittest

import numpy as np
import torch

from emogest.audio.patches import PatchSequence, unpatchify
from emogest.core.errors import InvalidInputError
from emogest.core.gradcheck import check_partial_derivatives
from emogest.disentangle.latents import AudioQuadruple
from emogest.disentangle.losses import (AUDIO_TERMS, AudioLossWeights, classification_loss,
                                        disentangle_losses, evaluate_audio_classifier,
                                        filterbank_l1)
from emogest.disentangle.model import EncoderStack, FusionDecoder
from emogest.test.testutil import assert_rel_error, assert_gradients_match
from emogest.test.toymodels import toy_audio_options, toy_quadruples


def only(*names):
    values = dict((name, 0.0) for name in AudioLossWeights().keys())
    for name in names:
        values[name] = 1.0
    return AudioLossWeights(**values)


def toy_stack(seed=0, **values):
    torch.manual_seed(seed)
    options = toy_audio_options(**values)
    return EncoderStack(options).double(), FusionDecoder(options).double()


class TestClassificationLoss(unittest.TestCase):

    def test_confident_and_uniform(self):
        logits = torch.full((3, 4), -50.0, dtype=torch.float64)
        labels = torch.tensor([0, 2, 3])
        logits[torch.arange(3), labels] = 50.0
        self.assertLess(float(classification_loss(logits, labels)), 1e-12)

        uniform = torch.zeros(3, 4, dtype=torch.float64)
        assert_rel_error(self, float(classification_loss(uniform, labels)), np.log(4.0), 1e-12)

    def test_shape_mismatch(self):
        with self.assertRaises(InvalidInputError):
            classification_loss(torch.zeros(3, 4), [0, 1])

    def test_gradient(self):
        rng = np.random.RandomState(1)
        inputs = {'logits': torch.from_numpy(rng.randn(5, 3))}
        labels = torch.tensor([0, 1, 2, 1, 0])
        data = check_partial_derivatives(lambda inp: classification_loss(inp['logits'], labels),
                                         inputs, out_stream=None)
        assert_gradients_match(self, data, 1e-5)


class TestFilterbankL1(unittest.TestCase):

    def test_covered_cells_only(self):
        rng = np.random.RandomState(0)
        values = rng.randn(2, 4, 6, 5)
        target = rng.randn(2, 4, 6, 5)
        covered = np.ones((6, 5), dtype=bool)
        covered[5] = False
        covered[:, 4] = False

        expected = np.abs(values - target)[..., :5, :4].mean(axis=(-2, -1)).sum(axis=1).mean()
        actual = filterbank_l1(torch.from_numpy(values), torch.from_numpy(target),
                               torch.from_numpy(covered))
        assert_rel_error(self, float(actual), expected, 1e-12)

    def test_gradient(self):
        rng = np.random.RandomState(2)
        target = torch.from_numpy(rng.randn(1, 4, 3, 3))
        covered = torch.ones(3, 3, dtype=torch.bool)
        inputs = {'values': torch.from_numpy(rng.randn(1, 4, 3, 3))}
        data = check_partial_derivatives(
            lambda inp: filterbank_l1(inp['values'], target, covered), inputs, out_stream=None)
        assert_gradients_match(self, data, 1e-5)


class TestDisentangleLosses(unittest.TestCase):

    def test_terms(self):
        enc, fd = toy_stack()
        bundle = disentangle_losses(toy_quadruples(2), enc, fd)
        values = bundle.as_dict()
        self.assertEqual(sorted(values), sorted(AUDIO_TERMS + ('l_total',)))
        assert_rel_error(self, values['l_total'], sum(values[name] for name in AUDIO_TERMS),
                         1e-12)
        for name in AUDIO_TERMS:
            self.assertGreater(values[name], 0.0)

    def test_self_term_against_unfolded_patches(self):
        enc, fd = toy_stack(patch_overlap=2)
        q = toy_quadruples(1, overlap=2)[0]
        bundle = disentangle_losses(q, enc, fd, weights=only('w_self'))

        with torch.no_grad():
            out = enc(q.to_tensor().double())
            pred = fd(out['content'], out['emotion'], out['style']).numpy()
        expected = 0.0
        for k, a in enumerate(q.audios):
            decoded = PatchSequence(pred[k].reshape(-1, 4, 4), a.positions, 4, 2, a.source_shape)
            values, covered = unpatchify(decoded)
            target, _ = unpatchify(a)
            expected += np.abs(values - target)[covered].mean()

        assert_rel_error(self, float(bundle.l_self), expected, 1e-5)

    def test_content_term(self):
        enc, fd = toy_stack()
        q = toy_quadruples(1)[0]
        bundle = disentangle_losses(q, enc, fd, weights=only('w_con'))
        with torch.no_grad():
            content = enc(q.to_tensor().double())['content'].numpy()
        expected = np.abs(content[0] - content[2]).mean() + np.abs(content[1] - content[3]).mean()
        assert_rel_error(self, float(bundle.l_con), expected, 1e-10)

    def test_identical_members(self):
        # equal audio gives equal latents, so every swap reconstructs like the self term
        enc, fd = toy_stack()
        a = toy_quadruples(1)[0].audios[0]
        q = AudioQuadruple([a] * 4, [0, 1, 0, 1], [0, 0, 1, 1], 1)
        bundle = disentangle_losses(q, enc, fd)
        for name in ('l_xemo', 'l_xsty', 'l_xcon'):
            assert_rel_error(self, float(getattr(bundle, name)), float(bundle.l_self), 1e-10)
        self.assertLess(float(bundle.l_con), 1e-12)

    def test_weights_scale_terms(self):
        enc, fd = toy_stack()
        quads = toy_quadruples(2)
        base = disentangle_losses(quads, enc, fd, weights=only('w_xsty'))
        weights = only('w_xsty')
        weights['w_xsty'] = 2.5
        scaled = disentangle_losses(quads, enc, fd, weights=weights)
        assert_rel_error(self, float(scaled.l_xsty), 2.5 * float(base.l_xsty), 1e-12)

    def test_zero_weight_leaves_graph(self):
        enc, fd = toy_stack()
        weights = AudioLossWeights(w_emo=0.0)
        bundle = disentangle_losses(toy_quadruples(2), enc, fd, weights=weights)
        self.assertEqual(float(bundle.l_emo), 0.0)
        bundle.total.backward()
        self.assertIsNone(enc.emotion_head.weight.grad)
        self.assertIsNotNone(enc.style_head.weight.grad)

    def test_label_override(self):
        enc, fd = toy_stack()
        q = toy_quadruples(1)[0]
        weights = only('w_emo')
        default = disentangle_losses(q, enc, fd, weights=weights)
        same = disentangle_losses(q, enc, fd, labels=([0], [[0, 0, 1, 1]]), weights=weights)
        other = disentangle_losses(q, enc, fd, labels=([1], [[0, 0, 1, 1]]), weights=weights)
        self.assertEqual(float(default.l_emo), float(same.l_emo))
        self.assertNotEqual(float(default.l_emo), float(other.l_emo))

        with self.assertRaises(InvalidInputError):
            disentangle_losses(q, enc, fd, labels=([0], [[0, 1, 0, 1]]))

    def test_decoder_gradient(self):
        enc, fd = toy_stack()
        quads = toy_quadruples(2)
        inputs = {'bias': fd.patch_head.bias}

        data = check_partial_derivatives(
            lambda inp: disentangle_losses(quads, enc, fd).total, inputs, max_entries=6,
            out_stream=None)
        assert_gradients_match(self, data, 1e-4)


class TestClassifierReport(unittest.TestCase):

    def test_keys_and_ranges(self):
        enc, _ = toy_stack()
        enc.train()
        report = evaluate_audio_classifier(enc, toy_quadruples(2))
        self.assertEqual(sorted(report),
                         ['emotion_accuracy', 'emotion_f1', 'style_accuracy', 'style_f1'])
        for value in report.values():
            self.assertTrue(0.0 <= value <= 100.0)
        self.assertTrue(enc.training)


if __name__ == "__main__":
    unittest.main()
