""" A synthetic labeled corpus with a known factorization.

Every (content, emotion, style) combination becomes one clip.

* Content fixes the beat times of a clip. Speech is a train of decaying tone
  bursts starting at those beats, and the motion stresses them with small
  bumps, so clips of one content are frame aligned.
* Emotion k fixes the burst pitch and loudness, and the motion oscillates
  at ``base_frequency + k * frequency_step`` Hz with amplitude
  ``base_amplitude + k * amplitude_step``.
* Style s adds a steady hum whose pitch depends on s, shifts the phase of
  the oscillation by ``2 pi s / n_styles`` and scales it by ``1 + 0.1 s``.
"""

import json
import os

import numpy as np

from emogest.audio.features import Waveform
from emogest.body.bodymodel import PoseSequence
from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary
from emogest.data.records import ClipRecord, write_labels


class SyntheticCorpusSpec(OptionsDictionary):
    """ Factors and signal settings of a synthetic corpus."""

    def __init__(self, **values):
        super(SyntheticCorpusSpec, self).__init__()
        self.add_option('n_styles', 4, low=1, desc='Speakers.')
        self.add_option('n_contents', 4, low=1, desc='Scripts.')
        self.add_option('n_emotions', 8, low=1, high=8, desc='Emotions.')
        self.add_option('duration_s', 10.0, low=0.0, desc='Clip length.')
        self.add_option('sample_rate', 16000, low=8000, desc='Audio rate.')
        self.add_option('fps', 30, low=1, desc='Motion rate.')
        self.add_option('n_joints', 47, low=2, desc='Joints per pose.')
        self.add_option('seed', 0, low=0, desc='Seed of beat patterns and noise.')
        self.add_option('base_frequency', 0.5, low=0.0,
                        desc='Motion frequency of emotion 0 in Hz.')
        self.add_option('frequency_step', 0.3, low=0.0,
                        desc='Motion frequency increment per emotion in Hz.')
        self.add_option('base_amplitude', 0.3, low=0.0,
                        desc='Motion amplitude of emotion 0 in radians.')
        self.add_option('amplitude_step', 0.05, low=0.0,
                        desc='Motion amplitude increment per emotion in radians.')
        self.add_option('beats_per_clip', 12, low=1, desc='Beats of each content pattern.')
        self.update(values)

    def frequency(self, emotion):
        return self['base_frequency'] + emotion * self['frequency_step']

    def amplitude(self, emotion):
        return self['base_amplitude'] + emotion * self['amplitude_step']

    def phase(self, style):
        return 2.0 * np.pi * style / self['n_styles']

    def style_scale(self, style):
        return 1.0 + 0.1 * style

    @property
    def n_frames(self):
        return int(round(self['duration_s'] * self['fps']))

    @property
    def n_samples(self):
        return int(round(self['duration_s'] * self['sample_rate']))


def clip_name(content, emotion, style):
    return 'c%02d_e%d_s%02d' % (content, emotion, style)


def content_beats(spec, content):
    """ Beat times of a content in seconds, on the motion frame grid.

    Beats sit on an even grid of ``beats_per_clip`` slots, each jittered by
    up to a quarter slot with a generator seeded from the corpus seed and
    the content id.
    """
    rng = np.random.RandomState(spec['seed'] * 1009 + content)
    slot = spec['duration_s'] / (spec['beats_per_clip'] + 1)
    times = slot * (np.arange(spec['beats_per_clip']) + 1.0)
    times = times + rng.uniform(-0.25, 0.25, spec['beats_per_clip']) * slot
    frames = np.round(times * spec['fps'])
    return np.clip(frames, 0, spec.n_frames - 1) / float(spec['fps'])


def synthetic_audio(spec, content, emotion, style):
    """ Tone bursts at the content beats over a style hum."""
    rate = spec['sample_rate']
    t = np.arange(spec.n_samples) / float(rate)
    pitch = 250.0 + 90.0 * emotion
    loudness = 0.3 + 0.05 * emotion
    brightness = 0.2 + 0.15 * style

    signal = 0.05 * np.sin(2.0 * np.pi * (110.0 + 55.0 * style) * t)
    for beat in content_beats(spec, content):
        local = t - beat
        active = (local >= 0.0) & (local < 0.15)
        envelope = np.exp(-local[active] / 0.04)
        burst = np.sin(2.0 * np.pi * pitch * local[active]) + \
            brightness * np.sin(4.0 * np.pi * pitch * local[active])
        signal[active] += loudness * envelope * burst

    rng = np.random.RandomState(spec['seed'] * 7919 + (content * 8 + emotion) * 131 + style)
    signal += 0.002 * rng.randn(signal.size)
    return Waveform(0.9 * signal / np.abs(signal).max(), rate)


def synthetic_angles(spec, content, emotion, style):
    """ Joint-independent rotation angle [T] about the vertical axis."""
    t = np.arange(spec.n_frames) / float(spec['fps'])
    angle = spec.amplitude(emotion) * spec.style_scale(style) * np.sin(
        2.0 * np.pi * spec.frequency(emotion) * t + spec.phase(style))
    for beat in content_beats(spec, content):
        angle += 0.1 * spec.amplitude(emotion) * np.exp(-0.5 * ((t - beat) / 0.1) ** 2)
    return angle


def synthetic_motion(spec, content, emotion, style):
    """ Every non-root joint rotates about z by the clip angle scaled with
    ``1 / (1 + 0.1 j)`` for joint j."""
    angle = synthetic_angles(spec, content, emotion, style)
    scale = np.concatenate([[0.0], 1.0 / (1.0 + 0.1 * np.arange(1, spec['n_joints']))])
    theta = angle[:, None] * scale[None, :]
    c, s = np.cos(theta), np.sin(theta)
    zero = np.zeros_like(theta)
    frames = np.stack([c, s, zero, -s, c, zero], axis=-1)
    return PoseSequence(frames.reshape(spec.n_frames, -1), spec['fps'], spec['n_joints'])


def semantic_weights(spec, content):
    """ Per-frame weights peaking at 1 on the content beats."""
    t = np.arange(spec.n_frames) / float(spec['fps'])
    beats = content_beats(spec, content)
    return np.exp(-0.5 * ((t[:, None] - beats[None, :]) / 0.2) ** 2).max(axis=1)


def generate_synthetic_corpus(spec, out_dir):
    """ Writes a corpus directory: ``labels.csv``, ``semantic.csv``,
    ``corpus.json`` and one WAV file and motion directory per clip.

    Returns
    -------
    list of `ClipRecord`
    """
    if spec['duration_s'] <= 0:
        raise InvalidInputError("duration_s must be positive")
    for sub in ('audio', 'motion'):
        path = os.path.join(out_dir, sub)
        if not os.path.isdir(path):
            os.makedirs(path)

    records = []
    semantic = ['clip_id,frame,weight']
    for content in range(spec['n_contents']):
        weights = semantic_weights(spec, content)
        for emotion in range(spec['n_emotions']):
            for style in range(spec['n_styles']):
                name = clip_name(content, emotion, style)
                rec = ClipRecord(name, os.path.join(out_dir, 'audio', name + '.wav'),
                                 os.path.join(out_dir, 'motion', name), emotion, style, content,
                                 spec['duration_s'])
                synthetic_audio(spec, content, emotion, style).write(rec.audio_path)
                synthetic_motion(spec, content, emotion, style).write(rec.motion_path)
                semantic.extend('%s,%d,%.6f' % (name, i, w) for i, w in enumerate(weights))
                records.append(rec)

    write_labels(os.path.join(out_dir, 'labels.csv'), records)
    with open(os.path.join(out_dir, 'semantic.csv'), 'w') as out:
        out.write('\n'.join(semantic) + '\n')
    with open(os.path.join(out_dir, 'corpus.json'), 'w') as out:
        json.dump(spec.to_dict(), out, indent=1, sort_keys=True)
    return records
