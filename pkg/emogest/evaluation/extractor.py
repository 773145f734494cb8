""" The motion feature extractor used by the distribution metrics."""

import numpy as np
import torch
from torch import nn

from emogest.body.bodymodel import PoseSequence
from emogest.core.checkpoint import save_checkpoint, load_checkpoint
from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary
from emogest.evaluation.metrics import GestureFeatures


class ExtractorOptions(OptionsDictionary):
    """ Architecture of the motion feature extractor."""

    def __init__(self, **values):
        super(ExtractorOptions, self).__init__()
        self.add_option('n_joints', 47, low=1, desc='Joints per pose.')
        self.add_option('window', 300, low=1, desc='Frames per motion window.')
        self.add_option('hidden', 256, low=1, desc='Token width, also the feature width.')
        self.add_option('ff_dim', 512, low=1, desc='Feed-forward width.')
        self.add_option('layers', 4, low=1, desc='Encoder layers.')
        self.add_option('heads', 4, low=1, desc='Attention heads.')
        self.add_option('dropout', 0.1, low=0.0, high=1.0, desc='Dropout rate.')
        self.add_option('n_emotions', 8, low=2, desc='Emotion classes.')
        self.update(values)


class MotionExtractor(nn.Module):
    """ Transformer encoder over pose frames with a CLS token in front. The
    CLS output is the motion feature; a linear head classifies emotion from
    it.

    Args
    ----
    options : `ExtractorOptions`, optional
        Architecture.
    """

    def __init__(self, options=None):
        super(MotionExtractor, self).__init__()
        self.options = options if options is not None else ExtractorOptions()
        width = self.options['hidden']
        self.input_proj = nn.Linear(6 * self.options['n_joints'], width)
        self.cls_token = nn.Parameter(torch.zeros(1, 1, width))
        self.pos_embedding = nn.Parameter(torch.randn(1, self.options['window'] + 1, width) * 0.02)
        layer = nn.TransformerEncoderLayer(width, self.options['heads'], self.options['ff_dim'],
                                           self.options['dropout'], activation='gelu',
                                           batch_first=True, norm_first=True)
        self.encoder = nn.TransformerEncoder(layer, self.options['layers'],
                                             enable_nested_tensor=False)
        self.norm = nn.LayerNorm(width)
        self.head = nn.Linear(width, self.options['n_emotions'])

    def forward(self, poses):
        """
        Args
        ----
        poses : Tensor
            [B x T x 6J] with T at most 'window'.

        Returns
        -------
        tuple
            Features [B x hidden] and logits [B x n_emotions].
        """
        if poses.dim() != 3 or poses.shape[-1] != 6 * self.options['n_joints'] or \
           poses.shape[1] > self.options['window']:
            raise InvalidInputError.shape_mismatch('poses', ('B', self.options['window'],
                                                             6 * self.options['n_joints']),
                                                   poses.shape)
        tokens = torch.cat([self.cls_token.expand(poses.shape[0], -1, -1),
                            self.input_proj(poses)], dim=1)
        out = self.encoder(tokens + self.pos_embedding[:, :tokens.shape[1]])
        features = self.norm(out[:, 0])
        return features, self.head(features)

    def save(self, path, extra=None):
        save_checkpoint(path, 'extractor', {'extractor': self.options},
                        {'extractor': self}, extra)

    @classmethod
    def load(cls, path, expected=None):
        payload = load_checkpoint(path, 'extractor',
                                  None if expected is None else {'extractor': expected})
        model = cls(ExtractorOptions(**payload['options']['extractor']))
        model.load_state_dict(payload['state']['extractor'])
        return model


def _pose_tensor(motions):
    if isinstance(motions, PoseSequence):
        return motions.to_tensor().unsqueeze(0)
    if isinstance(motions, torch.Tensor):
        return motions if motions.dim() == 3 else motions.unsqueeze(0)
    motions = list(motions)
    if not motions:
        raise InvalidInputError.empty('motions')
    return torch.stack([m.to_tensor() if isinstance(m, PoseSequence) else torch.as_tensor(m)
                        for m in motions])


def extract_features(motions, extractor, batch_size=64):
    """ Features and logits of motion windows in evaluation mode.

    Args
    ----
    motions : list of `PoseSequence`, `PoseSequence` or Tensor
        Windows of equal length.

    extractor : `MotionExtractor`
        Trained extractor.

    Returns
    -------
    `GestureFeatures`
    """
    poses = _pose_tensor(motions)
    dtype = next(extractor.parameters()).dtype
    was_training = extractor.training
    extractor.eval()
    features = []
    logits = []
    with torch.no_grad():
        for start in range(0, poses.shape[0], batch_size):
            f, l = extractor(poses[start:start + batch_size].to(dtype))
            features.append(f.double().numpy())
            logits.append(l.double().numpy())
    extractor.train(was_training)
    return GestureFeatures(np.concatenate(features), np.concatenate(logits))
