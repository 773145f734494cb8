""" The five-metric report over a corpus directory."""

import os
import warnings

import numpy as np

from emogest.audio.features import FilterbankOptions
from emogest.core.config import Config
from emogest.core.errors import ConfigurationError
from emogest.data.records import load_records
from emogest.data.windowing import DataOptions, split_by_content, window_dataset
from emogest.drivers.trainers import train_extractor
from emogest.editing.pipeline import GesturePipeline
from emogest.evaluation.beats import audio_beats_from_options, beats_from_options
from emogest.evaluation.extractor import extract_features
from emogest.evaluation.metrics import (EvaluationOptions, SemanticScores, beat_align,
                                        diversity, emotion_accuracy, fgd, srgr)

REPORT_KEYS = ('srgr', 'ba', 'fgd', 'div', 'ga')

SEMANTIC_FILE = 'semantic.csv'


def select_split(samples, split, holdout_contents):
    """ The 'train', 'test' or 'all' windows of a corpus."""
    if split == 'all':
        return samples
    train, test = split_by_content(samples, holdout_contents)
    if split == 'train':
        return train
    if split == 'test':
        return test
    raise ConfigurationError("Unknown split '%s', expected train, test or all" % split)


def window_scores(semantic, sample, n_frames, delta):
    """ Semantic scores of one window, or None when the window has no
    weight. `semantic` is a `SemanticScores.read_table` result; without one
    every frame weighs 1."""
    if semantic is None:
        return SemanticScores.uniform(n_frames, delta)
    start = sample.window * n_frames
    clip = SemanticScores.from_table(semantic, sample.clip_id, start + n_frames, delta)
    weights = clip.weights[start:]
    if not weights.max() > 0.0:
        return None
    return SemanticScores(weights, delta)


def evaluate_samples(samples, pipeline, extractor, options=None, semantic=None, seed=0,
                     steps=None):
    """ Generates motion for every window and scores it against the
    reference motion.

    Window i is generated with seed ``seed + i``. FGD compares the extractor
    features of generated and reference windows, diversity spreads the
    generated features, GA is the extractor's emotion accuracy (percent) on
    generated windows, and BA and SRGR are averaged over windows. SRGR
    weighs frames with `semantic`, a `SemanticScores.read_table` result,
    or uniformly when it is None.

    Returns
    -------
    dict
        Keys of `REPORT_KEYS` plus 'n_windows'.
    """
    if options is None:
        options = EvaluationOptions()
    if len(samples) < 2:
        raise ConfigurationError("Evaluation needs at least two windows, got %d"
                                 % len(samples))
    body = pipeline.gesture_model.body

    generated = [pipeline.generate(s.audio, seed=seed + i, steps=steps)
                 for i, s in enumerate(samples)]
    gen_feats = extract_features(generated, extractor)
    gt_feats = extract_features([s.poses for s in samples], extractor)
    labels = np.array([s.emotion_id for s in samples], dtype=np.int64)

    aligns = []
    recalls = []
    for sample, motion in zip(samples, generated):
        kin = beats_from_options(motion, body, options)
        audio = audio_beats_from_options(sample.audio, options)
        aligns.append(beat_align(kin, audio, options['beat_sigma']))

        scores = window_scores(semantic, sample, motion.n_frames, options['srgr_delta'])
        if scores is None:
            warnings.warn("Window %s has no semantic weight, skipped by SRGR" % (sample.key,))
            continue
        recalls.append(srgr(motion, sample.poses, scores, body))

    return {'srgr': float(np.mean(recalls)) if recalls else 0.0,
            'ba': float(np.mean(aligns)),
            'fgd': fgd(gt_feats, gen_feats, options['fgd_eps']),
            'div': diversity(gen_feats, options['diversity']),
            'ga': emotion_accuracy(gen_feats.logits, labels),
            'n_windows': len(samples)}


def evaluate_directory(data_dir, audio_model, gesture_model, extractor=None, config=None,
                       split='test'):
    """ Metric report of one split of a corpus directory.

    Args
    ----
    data_dir : str
        Corpus with ``labels.csv`` and optionally ``semantic.csv``.

    audio_model : `AudioModel`
        Trained audio model.

    gesture_model : `GestureModel`
        Trained gesture model.

    extractor : `MotionExtractor`, optional
        Feature extractor; trained on the reference motion of the training
        split when omitted.

    config : `Config`, optional
        Configuration.

    split : str
        'test', 'train' or 'all'.

    Returns
    -------
    tuple
        (report dict, extractor)
    """
    if config is None:
        config = Config()
    data_options = DataOptions().from_config(config, 'data')
    fb_options = FilterbankOptions().from_config(config, 'filterbank')
    samples = window_dataset(load_records(data_dir), data_options, fb_options)

    if extractor is None:
        train = select_split(samples, 'train', data_options['holdout_contents'])
        extractor, _ = train_extractor(train, config)

    pipeline = GesturePipeline(audio_model, gesture_model, fb_options,
                               data_options['window_seconds'], data_options['fps'])
    path = os.path.join(data_dir, SEMANTIC_FILE)
    semantic = SemanticScores.read_table(path) if os.path.isfile(path) else None
    report = evaluate_samples(select_split(samples, split, data_options['holdout_contents']),
                              pipeline, extractor,
                              EvaluationOptions().from_config(config, 'evaluation'),
                              semantic,
                              seed=config.seed)
    return report, extractor
