""" Clip records and the labels file of a corpus directory.

A corpus directory holds ``labels.csv`` with the columns
``clip_id, emotion_id, style_id, content_id``, the audio of every clip in
``audio/<clip_id>.wav`` and its motion in ``motion/<clip_id>/``.
"""

import csv
import os

from six import string_types

from emogest.audio.features import Waveform
from emogest.body.bodymodel import PoseSequence
from emogest.core.errors import ConfigurationError, InvalidInputError

EMOTIONS = ('neutral', 'happy', 'angry', 'sad', 'contempt', 'surprise', 'fear', 'disgust')

LABEL_COLUMNS = ('clip_id', 'emotion_id', 'style_id', 'content_id')


def emotion_id(label):
    """ Emotion id of an id or a name from `EMOTIONS`."""
    if isinstance(label, string_types) and not label.strip().isdigit():
        name = label.strip().lower()
        if name not in EMOTIONS:
            raise InvalidInputError("Unknown emotion '%s'" % label)
        return EMOTIONS.index(name)
    value = int(label)
    if not 0 <= value < len(EMOTIONS):
        raise InvalidInputError.out_of_range('emotion_id', value, 0, len(EMOTIONS) - 1)
    return value


class ClipRecord(object):
    """ One labeled clip of aligned audio and motion.

    Args
    ----
    clip_id : str
        Identifier, also the file stem.

    audio_path : str
        WAV file.

    motion_path : str
        Motion directory.

    emotion_id, style_id, content_id : int
        Labels; style is the speaker, content the script.

    duration_s : float, optional
        Clip length; read from the audio when omitted.
    """

    def __init__(self, clip_id, audio_path, motion_path, emotion_id, style_id, content_id,
                 duration_s=None):
        self.clip_id = str(clip_id)
        self.audio_path = audio_path
        self.motion_path = motion_path
        self.emotion_id = int(emotion_id)
        self.style_id = int(style_id)
        self.content_id = int(content_id)
        self.duration_s = duration_s

    def labels(self):
        return {'emotion_id': self.emotion_id, 'style_id': self.style_id,
                'content_id': self.content_id}

    def read_audio(self):
        return Waveform.read(self.audio_path)

    def read_motion(self):
        return PoseSequence.read(self.motion_path)

    def check_alignment(self, audio=None, motion=None):
        """ Raises InvalidInputError unless audio and motion span the same
        time within one motion frame; returns the audio duration."""
        audio = audio if audio is not None else self.read_audio()
        motion = motion if motion is not None else self.read_motion()
        if abs(audio.duration_s - motion.duration_s) > 1.0 / motion.fps:
            raise InvalidInputError("Clip '%s': audio lasts %.3f s but motion %.3f s"
                                    % (self.clip_id, audio.duration_s, motion.duration_s))
        return audio.duration_s

    def __repr__(self):
        return 'ClipRecord(%r, emotion=%d, style=%d, content=%d)' % (
            self.clip_id, self.emotion_id, self.style_id, self.content_id)


def write_labels(filename, records):
    with open(filename, 'w', newline='') as out:
        writer = csv.writer(out)
        writer.writerow(LABEL_COLUMNS)
        for rec in records:
            writer.writerow([rec.clip_id, rec.emotion_id, rec.style_id, rec.content_id])


def read_labels(filename):
    """ Rows of a labels file as dicts with integer labels; emotions may be
    given by name."""
    rows = []
    with open(filename, newline='') as inp:
        reader = csv.DictReader(inp, skipinitialspace=True)
        missing = set(LABEL_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigurationError("'%s' lacks the columns: %s"
                                     % (filename, ', '.join(sorted(missing))))
        for row in reader:
            rows.append({'clip_id': row['clip_id'].strip(),
                         'emotion_id': emotion_id(row['emotion_id']),
                         'style_id': int(row['style_id']),
                         'content_id': int(row['content_id'])})
    return rows


def load_records(data_dir, check=True):
    """ Records of every clip listed in ``<data_dir>/labels.csv``.

    Args
    ----
    data_dir : str
        Corpus directory.

    check : bool
        Read every clip and verify its audio and motion align.

    Returns
    -------
    list of `ClipRecord`
        In file order.
    """
    labels = os.path.join(data_dir, 'labels.csv')
    if not os.path.isfile(labels):
        raise ConfigurationError("No labels.csv in '%s'" % data_dir)

    records = []
    for row in read_labels(labels):
        rec = ClipRecord(row['clip_id'],
                         os.path.join(data_dir, 'audio', row['clip_id'] + '.wav'),
                         os.path.join(data_dir, 'motion', row['clip_id']),
                         row['emotion_id'], row['style_id'], row['content_id'])
        if check:
            rec.duration_s = rec.check_alignment()
        records.append(rec)
    if not records:
        raise ConfigurationError("'%s' lists no clips" % labels)
    return records
