""" Latent triples, audio quadruples and the swap index maps."""

import json

import numpy as np
import torch

from emogest.core.errors import InvalidInputError

FACTORS = ('content', 'emotion', 'style')


def _check_member(k):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= 4:
        raise InvalidInputError.out_of_range('k', k, 1, 4)


def cross_index_emotion_style(k):
    """ Partner of quadruple member `k` (1-based) for emotion and style
    swaps: the member with the same style and the other content."""
    _check_member(k)
    return (6 - k) % 4 + 1


def cross_index_content(k):
    """ Partner of quadruple member `k` (1-based) for content swaps: the
    member with the same content and the other style."""
    _check_member(k)
    return (1 + k) % 4 + 1


# 0-based gather tables of the two maps
EMOTION_STYLE_SWAP = tuple(cross_index_emotion_style(k) - 1 for k in range(1, 5))
CONTENT_SWAP = tuple(cross_index_content(k) - 1 for k in range(1, 5))


class AudioLatents(object):
    """ Content, emotion and style latents of one utterance.

    Args
    ----
    content, emotion, style : array_like or Tensor
        Vectors of one common width.
    """

    def __init__(self, content, emotion, style):
        values = []
        for name, value in zip(FACTORS, (content, emotion, style)):
            if isinstance(value, torch.Tensor):
                value = value.detach().cpu().numpy()
            value = np.asarray(value, dtype=np.float32).reshape(-1)
            if not np.all(np.isfinite(value)):
                raise InvalidInputError.not_finite('%s latent' % name)
            values.append(value)
        if len(set(v.size for v in values)) != 1 or values[0].size == 0:
            raise InvalidInputError("Latents must share one non-zero width, got %s"
                                    % [v.size for v in values])
        self.content, self.emotion, self.style = values

    @property
    def dim(self):
        return self.content.size

    def stack(self):
        """ Array [3 x d] in content, emotion, style order."""
        return np.stack([self.content, self.emotion, self.style])

    def as_tensor(self, dtype=torch.float32):
        return torch.as_tensor(self.stack(), dtype=dtype)

    @classmethod
    def from_stack(cls, values):
        values = np.asarray(values)
        if values.ndim != 2 or values.shape[0] != 3:
            raise InvalidInputError.shape_mismatch('latent triple', (3, 'd'), values.shape)
        return cls(values[0], values[1], values[2])

    def replace(self, **factors):
        """ A copy with some factors taken from `factors`."""
        values = dict(zip(FACTORS, (self.content, self.emotion, self.style)))
        values.update(factors)
        return AudioLatents(values['content'], values['emotion'], values['style'])

    def __eq__(self, other):
        if not isinstance(other, AudioLatents):
            return NotImplemented
        return np.array_equal(self.stack(), other.stack())

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def write_json(self, filename):
        with open(filename, 'w') as out:
            json.dump(dict((name, getattr(self, name).tolist()) for name in FACTORS), out)

    @classmethod
    def read_json(cls, filename):
        with open(filename) as inp:
            data = json.load(inp)
        return cls(data['content'], data['emotion'], data['style'])

    def write_raw(self, filename):
        """ Little-endian float32 triple plus a ``.json`` sidecar."""
        self.stack().astype('<f4').tofile(filename)
        with open(filename + '.json', 'w') as out:
            json.dump({'dim': self.dim, 'dtype': 'float32', 'order': list(FACTORS)}, out)

    @classmethod
    def read_raw(cls, filename):
        with open(filename + '.json') as inp:
            meta = json.load(inp)
        values = np.fromfile(filename, dtype='<f4').reshape(3, meta['dim'])
        return cls.from_stack(values)


def check_quadruple_labels(content_ids, style_ids):
    """ Raises InvalidInputError unless the ids follow the layout
    [c1, c2, c1, c2] and [s1, s1, s2, s2] with c1 != c2 and s1 != s2."""
    c = list(content_ids)
    s = list(style_ids)
    if len(c) != 4 or len(s) != 4:
        raise InvalidInputError("A quadruple has exactly four members")
    if not (c[0] == c[2] and c[1] == c[3] and c[0] != c[1]):
        raise InvalidInputError("Quadruple content ids %s are not [c1, c2, c1, c2]" % c)
    if not (s[0] == s[1] and s[2] == s[3] and s[0] != s[2]):
        raise InvalidInputError("Quadruple style ids %s are not [s1, s1, s2, s2]" % s)


class AudioQuadruple(object):
    """ Four utterances of one emotion: two contents spoken in two styles.

    Args
    ----
    audios : list of `PatchSequence`
        Members a1..a4.

    content_ids : list of int
        [c1, c2, c1, c2].

    style_ids : list of int
        [s1, s1, s2, s2].

    emotion_id : int
        Emotion shared by all members.

    keys : list, optional
        Identifiers of the members, e.g. (clip_id, window) pairs.
    """

    def __init__(self, audios, content_ids, style_ids, emotion_id, keys=None):
        check_quadruple_labels(content_ids, style_ids)
        shapes = set(tuple(a.patches.shape) for a in audios)
        if len(audios) != 4 or len(shapes) != 1:
            raise InvalidInputError("Quadruple members must be four equally tiled audios")
        self.audios = list(audios)
        self.content_ids = [int(c) for c in content_ids]
        self.style_ids = [int(s) for s in style_ids]
        self.emotion_id = int(emotion_id)
        self.keys = keys

    def to_tensor(self):
        """ Patches [4 x N x p*p]."""
        return torch.stack([a.to_tensor() for a in self.audios])


class QuadrupleBatch(object):
    """ A batch of quadruples as tensors.

    Args
    ----
    patches : Tensor
        [B x 4 x N x p*p].

    emotion_ids : Tensor
        [B].

    style_ids : Tensor
        [B x 4].

    content_ids : Tensor
        [B x 4].
    """

    def __init__(self, patches, emotion_ids, style_ids, content_ids):
        patches = torch.as_tensor(patches)
        if patches.dim() != 4 or patches.shape[1] != 4:
            raise InvalidInputError.shape_mismatch('quadruple patches', ('B', 4, 'N', 'p*p'),
                                                   patches.shape)
        self.patches = patches
        self.emotion_ids = torch.as_tensor(emotion_ids, dtype=torch.long).reshape(-1)
        self.style_ids = torch.as_tensor(style_ids, dtype=torch.long).reshape(-1, 4)
        self.content_ids = torch.as_tensor(content_ids, dtype=torch.long).reshape(-1, 4)
        if not (len(self.emotion_ids) == len(self.style_ids) == len(self.content_ids)
                == patches.shape[0]):
            raise InvalidInputError("Quadruple labels do not match a batch of %d"
                                    % patches.shape[0])
        for c, s in zip(self.content_ids.tolist(), self.style_ids.tolist()):
            check_quadruple_labels(c, s)

    def __len__(self):
        return self.patches.shape[0]

    @classmethod
    def from_quadruples(cls, quadruples):
        if not quadruples:
            raise InvalidInputError.empty('quadruples')
        return cls(torch.stack([q.to_tensor() for q in quadruples]),
                   [q.emotion_id for q in quadruples],
                   [q.style_ids for q in quadruples],
                   [q.content_ids for q in quadruples])

    def to(self, dtype):
        return QuadrupleBatch(self.patches.to(dtype), self.emotion_ids, self.style_ids,
                              self.content_ids)
