""" The seven disentanglement losses over audio quadruples."""

import torch
import torch.nn.functional as F

from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary
from emogest.disentangle.latents import (AudioQuadruple, QuadrupleBatch, CONTENT_SWAP,
                                         EMOTION_STYLE_SWAP, check_quadruple_labels)
from emogest.evaluation.metrics import emotion_accuracy, f1_score

AUDIO_TERMS = ('l_self', 'l_con', 'l_emo', 'l_sty', 'l_xemo', 'l_xsty', 'l_xcon')


class AudioLossWeights(OptionsDictionary):
    """ Factors of the seven audio loss terms. A zero factor leaves its term
    out of the graph."""

    def __init__(self, **values):
        super(AudioLossWeights, self).__init__()
        self.add_option('w_self', 1.0, low=0.0, desc='Self reconstruction.')
        self.add_option('w_con', 1.0, low=0.0, desc='Content latent agreement.')
        self.add_option('w_emo', 1.0, low=0.0, desc='Emotion classification.')
        self.add_option('w_sty', 1.0, low=0.0, desc='Style classification.')
        self.add_option('w_xemo', 1.0, low=0.0, desc='Reconstruction after an emotion swap.')
        self.add_option('w_xsty', 1.0, low=0.0, desc='Reconstruction after a style swap.')
        self.add_option('w_xcon', 1.0, low=0.0, desc='Reconstruction after a content swap.')
        self.update(values)


class AudioLossBundle(object):
    """ Weighted audio loss terms as scalar tensors; omitted terms are zero.

    Attributes
    ----------
    total : Tensor
        Sum of the seven terms.
    """

    def __init__(self, terms, like):
        zero = torch.zeros((), dtype=like.dtype, device=like.device)
        for name in AUDIO_TERMS:
            setattr(self, name, terms.get(name, zero))
        self.total = sum(getattr(self, name) for name in AUDIO_TERMS)

    def as_dict(self):
        values = dict((name, float(getattr(self, name))) for name in AUDIO_TERMS)
        values['l_total'] = float(self.total)
        return values


def classification_loss(logits, labels):
    """ Mean cross-entropy of logits [n x C] against integer labels [n]."""
    labels = torch.as_tensor(labels, dtype=torch.long, device=logits.device).reshape(-1)
    if logits.dim() != 2 or logits.shape[0] != labels.shape[0]:
        raise InvalidInputError.shape_mismatch('logits', (labels.shape[0], 'C'), logits.shape)
    return F.cross_entropy(logits, labels)


def _as_batch(q, labels):
    if isinstance(q, AudioQuadruple):
        q = QuadrupleBatch.from_quadruples([q])
    elif isinstance(q, (list, tuple)):
        q = QuadrupleBatch.from_quadruples(q)
    if labels is not None:
        emotion_ids, style_ids = labels
        style_ids = torch.as_tensor(style_ids, dtype=torch.long).reshape(-1, 4)
        for c, s in zip(q.content_ids.tolist(), style_ids.tolist()):
            check_quadruple_labels(c, s)
        q = QuadrupleBatch(q.patches, emotion_ids, style_ids, q.content_ids)
    return q


def filterbank_l1(values, target, covered):
    """ Mean absolute error over the covered cells of each filterbank,
    summed over the quadruple members and averaged over the batch.

    Args
    ----
    values, target : Tensor
        Filterbanks [B x 4 x F x M].

    covered : Tensor
        Boolean mask [F x M].
    """
    diff = (values - target).abs()[..., covered]
    return diff.mean(dim=-1).sum(dim=-1).mean()


def disentangle_losses(q, enc, fd, labels=None, weights=None):
    """ Self, content, classification and swap losses of quadruples.

    Members k of a quadruple are decoded from (c_k, e_k, s_k) for the self
    term, from (c_k, e_j(k), s_k) and (c_k, e_k, s_j(k)) for the emotion and
    style swaps and from (c_jc(k), e_k, s_k) for the content swap, where j
    and jc are the two partner maps. Every reconstruction is compared with
    the member's own filterbank.

    Args
    ----
    q : `AudioQuadruple` or `QuadrupleBatch`
        Standardized patch tilings and their labels.

    enc : `EncoderStack`
        Encoders and classifier heads.

    fd : `FusionDecoder`
        Decoder.

    labels : tuple, optional
        (emotion_ids, style_ids) replacing the labels carried by `q`.

    weights : `AudioLossWeights`, optional
        Term factors.

    Returns
    -------
    `AudioLossBundle`
    """
    if weights is None:
        weights = AudioLossWeights()
    batch = _as_batch(q, labels)
    dtype = next(enc.parameters()).dtype
    patches = batch.patches.to(dtype)
    b, _, n, pp = patches.shape

    out = enc(patches.reshape(b * 4, n, pp))
    content, emotion, style = [out[name].reshape(b, 4, -1)
                               for name in ('content', 'emotion', 'style')]
    target, covered = fd.fold(patches)

    def reconstruction(c, e, s):
        pred = fd(c.reshape(b * 4, -1), e.reshape(b * 4, -1), s.reshape(b * 4, -1))
        values, _ = fd.fold(pred.reshape(b, 4, n, pp))
        return filterbank_l1(values, target, covered)

    es = list(EMOTION_STYLE_SWAP)
    cs = list(CONTENT_SWAP)
    terms = {}
    if weights['w_self'] > 0:
        terms['l_self'] = weights['w_self'] * reconstruction(content, emotion, style)
    if weights['w_xemo'] > 0:
        terms['l_xemo'] = weights['w_xemo'] * reconstruction(content, emotion[:, es], style)
    if weights['w_xsty'] > 0:
        terms['l_xsty'] = weights['w_xsty'] * reconstruction(content, emotion, style[:, es])
    if weights['w_xcon'] > 0:
        terms['l_xcon'] = weights['w_xcon'] * reconstruction(content[:, cs], emotion, style)
    if weights['w_con'] > 0:
        gap = (content[:, :2] - content[:, 2:]).abs().mean(dim=-1)
        terms['l_con'] = weights['w_con'] * gap.sum(dim=-1).mean()
    if weights['w_emo'] > 0:
        terms['l_emo'] = weights['w_emo'] * classification_loss(
            out['emotion_logits'], batch.emotion_ids.repeat_interleave(4))
    if weights['w_sty'] > 0:
        terms['l_sty'] = weights['w_sty'] * classification_loss(
            out['style_logits'], batch.style_ids.reshape(-1))

    return AudioLossBundle(terms, patches)


def evaluate_audio_classifier(enc, q):
    """ Emotion and style accuracy (percent) and macro-F1 of the classifier
    heads on quadruples.

    Returns
    -------
    dict
        Keys 'emotion_accuracy', 'style_accuracy', 'emotion_f1', 'style_f1'.
    """
    batch = _as_batch(q, None)
    dtype = next(enc.parameters()).dtype
    b, _, n, pp = batch.patches.shape
    was_training = enc.training
    enc.eval()
    with torch.no_grad():
        out = enc(batch.patches.to(dtype).reshape(b * 4, n, pp))
    enc.train(was_training)

    emotion_labels = batch.emotion_ids.repeat_interleave(4).numpy()
    style_labels = batch.style_ids.reshape(-1).numpy()
    emotion_logits = out['emotion_logits'].double().numpy()
    style_logits = out['style_logits'].double().numpy()
    return {'emotion_accuracy': emotion_accuracy(emotion_logits, emotion_labels),
            'style_accuracy': emotion_accuracy(style_logits, style_labels),
            'emotion_f1': f1_score(emotion_logits, emotion_labels,
                                   enc.options['n_emotions']),
            'style_f1': f1_score(style_logits, style_labels, enc.options['n_styles'])}
