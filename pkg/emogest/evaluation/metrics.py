""" Distribution, diversity, classification and keypoint recall metrics."""

import csv
import warnings
from collections import defaultdict

import numpy as np
import torch
from scipy.spatial.distance import pdist

from emogest.core.errors import InvalidInputError, NumericalError
from emogest.core.options import OptionsDictionary


class EvaluationOptions(OptionsDictionary):
    """ Metric settings."""

    def __init__(self, **values):
        super(EvaluationOptions, self).__init__()
        self.add_option('beat_sigma', 0.1, low=0.0, desc='Beat-align tolerance in seconds.')
        self.add_option('srgr_delta', 0.05, low=0.0,
                        desc='Keypoint distance threshold of SRGR in body units.')
        self.add_option('min_beat_gap', 0.2, low=0.0,
                        desc='Shortest interval between two kinematic beats in seconds.')
        self.add_option('smooth_sigma_frames', 0.0, low=0.0,
                        desc='Gaussian smoothing of the joint speed before beat picking.')
        self.add_option('diversity', 'pairwise', values=['pairwise', 'trace'],
                        desc='Mean pairwise distance or trace of the covariance.')
        self.add_option('fgd_eps', 1e-6, low=0.0, desc='Diagonal added to both covariances.')
        self.add_option('onset_window', 256, low=2, desc='Onset detector frame length.')
        self.add_option('onset_hop', 80, low=1, desc='Onset detector frame hop.')
        self.add_option('onset_min_gap', 0.05, low=0.0,
                        desc='Shortest interval between two onsets in seconds.')
        self.add_option('onset_threshold', 0.1, low=0.0,
                        desc='Onset strength threshold relative to the strongest flux.')
        self.update(values)


def _numpy(x, dtype=np.float64):
    if isinstance(x, torch.Tensor):
        x = x.detach().cpu().numpy()
    return np.asarray(x, dtype=dtype)


class GestureFeatures(object):
    """ Extractor features and emotion logits of N motion windows.

    Args
    ----
    features : array_like
        Array [N x d_f].

    logits : array_like, optional
        Array [N x C].
    """

    def __init__(self, features, logits=None):
        features = _numpy(features)
        if features.ndim != 2 or features.shape[0] < 1:
            raise InvalidInputError.shape_mismatch('features', ('N', 'd_f'), features.shape)
        if not np.all(np.isfinite(features)):
            raise InvalidInputError.not_finite('features')
        if logits is not None:
            logits = _numpy(logits)
            if logits.ndim != 2 or logits.shape[0] != features.shape[0]:
                raise InvalidInputError.shape_mismatch('logits', (features.shape[0], 'C'),
                                                       logits.shape)
        self.features = features
        self.logits = logits

    def __len__(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    @classmethod
    def concatenate(cls, parts):
        parts = list(parts)
        if not parts:
            raise InvalidInputError.empty('feature sets')
        logits = None
        if all(p.logits is not None for p in parts):
            logits = np.concatenate([p.logits for p in parts])
        return cls(np.concatenate([p.features for p in parts]), logits)


def _psd_sqrt(matrix):
    vals, vecs = np.linalg.eigh(0.5 * (matrix + matrix.T))
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def frechet_distance(mu_a, cov_a, mu_b, cov_b, eps=1e-6):
    """ Frechet distance between two Gaussians,
    ``|mu_a - mu_b|^2 + Tr(cov_a + cov_b - 2 (cov_a cov_b)^(1/2))``.

    The trace of the square root is taken from the eigenvalues of the
    symmetric matrix ``cov_a^(1/2) cov_b cov_a^(1/2)``, clamped at zero.
    `eps` is added to the diagonal of both covariances first.

    Raises
    ------
    NumericalError
        If a covariance has eigenvalues clearly below zero or the result is
        not finite.
    """
    mu_a, mu_b = _numpy(mu_a), _numpy(mu_b)
    cov_a, cov_b = np.atleast_2d(_numpy(cov_a)), np.atleast_2d(_numpy(cov_b))
    if mu_a.shape != mu_b.shape or cov_a.shape != cov_b.shape or \
       cov_a.shape != (mu_a.size, mu_a.size):
        raise InvalidInputError("Gaussians of different dimensions: %s, %s"
                                % (cov_a.shape, cov_b.shape))

    eye = np.eye(mu_a.size)
    cov_a = cov_a + eps * eye
    cov_b = cov_b + eps * eye
    for name, cov in (('first', cov_a), ('second', cov_b)):
        lowest = np.linalg.eigvalsh(0.5 * (cov + cov.T)).min()
        scale = max(np.abs(np.diag(cov)).max(), 1.0)
        if not np.isfinite(lowest) or lowest < -1e-8 * scale:
            raise NumericalError.covariance("%s covariance has eigenvalue %g after adding "
                                            "%g to its diagonal" % (name, lowest, eps))

    root_a = _psd_sqrt(cov_a)
    inner = np.linalg.eigvalsh(0.5 * (root_a @ cov_b @ root_a + (root_a @ cov_b @ root_a).T))
    trace_sqrt = np.sqrt(np.clip(inner, 0.0, None)).sum()

    diff = mu_a - mu_b
    value = diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * trace_sqrt
    if not np.isfinite(value):
        raise NumericalError.covariance("distance is not finite")
    return float(max(value, 0.0))


def fgd(feats_a, feats_b, eps=1e-6):
    """ Frechet gesture distance between the Gaussian fits of two feature
    sets.

    Args
    ----
    feats_a, feats_b : `GestureFeatures`
        At least two windows each, of equal feature width.

    eps : float
        Diagonal regularization of the covariances.
    """
    for name, feats in (('feats_a', feats_a), ('feats_b', feats_b)):
        if len(feats) < 2:
            raise InvalidInputError("'%s' needs at least two feature vectors" % name)
    if feats_a.dim != feats_b.dim:
        raise InvalidInputError("Feature widths differ: %d and %d" % (feats_a.dim, feats_b.dim))

    a, b = feats_a.features, feats_b.features
    return frechet_distance(a.mean(axis=0), np.cov(a, rowvar=False),
                            b.mean(axis=0), np.cov(b, rowvar=False), eps)


def diversity(feats, mode='pairwise'):
    """ Spread of a feature set: the mean Euclidean distance over all
    unordered pairs, or with ``mode='trace'`` the trace of the covariance.
    """
    if len(feats) < 2:
        raise InvalidInputError("Diversity needs at least two feature vectors")
    if mode == 'pairwise':
        return float(pdist(feats.features, 'euclidean').mean())
    if mode == 'trace':
        return float(np.trace(np.atleast_2d(np.cov(feats.features, rowvar=False))))
    raise InvalidInputError("Unknown diversity mode '%s'" % mode)


def _predictions(logits, labels):
    logits = _numpy(logits)
    labels = _numpy(labels, np.int64).reshape(-1)
    if labels.size == 0:
        raise InvalidInputError.empty('labels')
    preds = logits.argmax(axis=-1) if logits.ndim == 2 else logits.astype(np.int64)
    if preds.shape != labels.shape:
        raise InvalidInputError.shape_mismatch('predictions', labels.shape, preds.shape)
    return preds, labels


def emotion_accuracy(logits, labels):
    """ Top-1 accuracy in percent.

    Args
    ----
    logits : array_like
        Scores [N x C], or predicted class ids [N].

    labels : array_like
        True class ids [N].
    """
    preds, labels = _predictions(logits, labels)
    return 100.0 * float(np.mean(preds == labels))


def confusion_matrix(logits, labels, n_classes):
    """ Counts [C x C]; row is the true class, column the prediction."""
    preds, labels = _predictions(logits, labels)
    if labels.max() >= n_classes or preds.max() >= n_classes or min(labels.min(),
                                                                      preds.min()) < 0:
        raise InvalidInputError("Class ids must lie in [0, %d)" % n_classes)
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (labels, preds), 1)
    return counts


def f1_score(logits, labels, n_classes=None):
    """ Macro-averaged F1 in [0, 1] over the classes that occur as a label
    or a prediction."""
    preds, labels = _predictions(logits, labels)
    if n_classes is None:
        n_classes = int(max(labels.max(), preds.max())) + 1
    counts = confusion_matrix(preds, labels, n_classes)
    tp = np.diag(counts).astype(np.float64)
    predicted = counts.sum(axis=0)
    actual = counts.sum(axis=1)
    present = (predicted + actual) > 0
    f1 = 2.0 * tp[present] / (predicted[present] + actual[present])
    return float(f1.mean())


def beat_align(kin_beats, audio_beats, sigma=0.1):
    """ Mean over kinematic beats of ``exp(-d^2 / (2 sigma^2))`` where d is
    the distance to the nearest audio beat.

    Returns 0 with a warning when there are no kinematic beats, and 0 when
    there are no audio beats.
    """
    kin = _numpy(kin_beats).reshape(-1)
    audio = _numpy(audio_beats).reshape(-1)
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive, got %r" % (sigma,))
    if kin.size == 0:
        warnings.warn("No kinematic beats: beat alignment is 0")
        return 0.0
    if audio.size == 0:
        return 0.0

    nearest = np.abs(kin[:, None] - audio[None, :]).min(axis=1)
    return float(np.mean(np.exp(-nearest ** 2 / (2.0 * sigma ** 2))))


class SemanticScores(object):
    """ Per-frame semantic relevance of a clip.

    Args
    ----
    weights : array_like
        Weights in [0, 1], either [T] or [T x K] for K gesture categories
        (beat, deictic, iconic, metaphoric). A frame counts with its largest
        category weight.

    delta : float
        Keypoint distance threshold.
    """

    CATEGORIES = ('beat', 'deictic', 'iconic', 'metaphoric')

    def __init__(self, weights, delta=0.05):
        weights = _numpy(weights)
        if weights.ndim not in (1, 2) or weights.shape[0] == 0:
            raise InvalidInputError.shape_mismatch('semantic weights', ('T', 'K'),
                                                   weights.shape)
        if not np.all(np.isfinite(weights)) or weights.min() < 0.0 or weights.max() > 1.0:
            raise InvalidInputError("Semantic weights must lie in [0, 1]")
        if not delta > 0:
            raise InvalidInputError("delta must be positive, got %r" % (delta,))
        self.weights = weights
        self.delta = float(delta)

    @property
    def n_frames(self):
        return self.weights.shape[0]

    def frame_weights(self):
        if self.weights.ndim == 2:
            return self.weights.max(axis=1)
        return self.weights

    @classmethod
    def uniform(cls, n_frames, delta=0.05):
        return cls(np.ones(n_frames), delta)

    @staticmethod
    def read_table(filename):
        """ Weights of every clip in a ``clip_id, frame, weight`` file.

        Returns
        -------
        dict
            Maps a clip id to weights [F] over frames 0 to the last frame
            the file mentions; frames it skips weigh 0.
        """
        frames = defaultdict(dict)
        with open(filename, newline='') as inp:
            for row in csv.DictReader(inp, skipinitialspace=True):
                frame = int(row['frame'])
                if frame >= 0:
                    frames[row['clip_id'].strip()][frame] = float(row['weight'])
        table = {}
        for clip_id, known in frames.items():
            weights = np.zeros(max(known) + 1)
            weights[list(known)] = list(known.values())
            table[clip_id] = weights
        return table

    @classmethod
    def from_table(cls, table, clip_id, n_frames, delta=0.05):
        """ The first `n_frames` weights of one clip of a `read_table` result,
        zero past its end or for an unknown clip."""
        weights = np.zeros(n_frames)
        known = table.get(str(clip_id))
        if known is not None:
            m = min(n_frames, known.size)
            weights[:m] = known[:m]
        return cls(weights, delta)

    @classmethod
    def read_csv(cls, filename, clip_id, n_frames, delta=0.05):
        """ Weights of one clip from a ``clip_id, frame, weight`` file.
        Frames the file does not mention weigh 0."""
        return cls.from_table(cls.read_table(filename), clip_id, n_frames, delta)


def srgr_joints(gen, gt, scores):
    """ SRGR of joint positions [T x J x 3]: the semantic-weighted share of
    joints whose generated position lies within `scores.delta` of the
    reference, normalized so that identical sequences score 1."""
    gen = _numpy(gen)
    gt = _numpy(gt)
    if gen.shape != gt.shape:
        raise InvalidInputError.shape_mismatch('generated joints', gt.shape, gen.shape)
    if gen.ndim != 3 or gen.shape[0] != scores.n_frames:
        raise InvalidInputError("Joint positions of %d frames do not match %d semantic "
                                "frames" % (gen.shape[0], scores.n_frames))
    weights = scores.frame_weights()
    if weights.sum() <= 0.0:
        raise InvalidInputError("Semantic weights of the clip are all zero")

    hits = np.linalg.norm(gen - gt, axis=-1) < scores.delta
    return float((weights * hits.mean(axis=1)).sum() / weights.sum())


def srgr(gen, gt, scores, body):
    """ SRGR of two pose sequences through the body model's joint
    positions.

    Args
    ----
    gen, gt : `PoseSequence`
        Generated and reference motion of equal length.

    scores : `SemanticScores`
        Per-frame weights and threshold.

    body : `BodyModel`
        Forward kinematics.
    """
    if gen.n_frames != gt.n_frames:
        raise InvalidInputError("Sequences of %d and %d frames cannot be compared"
                                % (gen.n_frames, gt.n_frames))
    with torch.no_grad():
        gen_joints = body.joints(gen.to_tensor().double())
        gt_joints = body.joints(gt.to_tensor().double())
    return srgr_joints(gen_joints, gt_joints, scores)
