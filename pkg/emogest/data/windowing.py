""" Fixed-length windows of aligned audio and motion."""

import warnings

from emogest.audio.features import FilterbankOptions, FilterbankStats, compute_filterbank
from emogest.core.errors import ConfigurationError, InvalidInputError
from emogest.core.options import OptionsDictionary


class DataOptions(OptionsDictionary):
    """ Windowing and split settings."""

    def __init__(self, **values):
        super(DataOptions, self).__init__()
        self.add_option('window_seconds', 10.0, low=0.0, desc='Window length.')
        self.add_option('fps', 30, low=1, desc='Motion frame rate.')
        self.add_option('holdout_contents', 1, low=0,
                        desc='Content ids held out for the test split.')
        self.update(values)

    @property
    def window_frames(self):
        return int(round(self['window_seconds'] * self['fps']))


class WindowedSample(object):
    """ One window of a clip.

    Args
    ----
    key : tuple
        (clip_id, window index).

    filterbank : `Filterbank`
        Raw filterbank of the window's audio.

    poses : `PoseSequence`
        Motion of the window.

    audio : `Waveform`
        Audio of the window.

    labels : dict
        'emotion_id', 'style_id' and 'content_id' of the clip.

    latents : `AudioLatents`, optional
        Cached audio latents.
    """

    def __init__(self, key, filterbank, poses, audio, labels, latents=None):
        self.key = tuple(key)
        self.filterbank = filterbank
        self.poses = poses
        self.audio = audio
        self.emotion_id = int(labels['emotion_id'])
        self.style_id = int(labels['style_id'])
        self.content_id = int(labels['content_id'])
        self.latents = latents

    @property
    def clip_id(self):
        return self.key[0]

    @property
    def window(self):
        return self.key[1]

    def __repr__(self):
        return 'WindowedSample(%r)' % (self.key,)


def window_count(duration_s, window_seconds):
    """ Whole windows that fit into a clip, starting at time 0."""
    return int((duration_s + 1e-9) // window_seconds)


def window_dataset(records, options=None, filterbank_options=None):
    """ Cuts every clip into consecutive windows from time 0 and drops the
    trailing remainder. Clips shorter than one window are skipped with a
    warning.

    Args
    ----
    records : list of `ClipRecord`
        Clips to cut.

    options : `DataOptions`, optional
        Window length and motion frame rate.

    filterbank_options : `FilterbankOptions`, optional
        Front end of the window audio.

    Returns
    -------
    list of `WindowedSample`
        Ordered by record, then window.
    """
    if options is None:
        options = DataOptions()
    if filterbank_options is None:
        filterbank_options = FilterbankOptions()
    seconds = options['window_seconds']
    frames = options.window_frames
    if not seconds > 0:
        raise ConfigurationError("'data.window_seconds' must be positive")

    samples = []
    for rec in records:
        audio = rec.read_audio()
        motion = rec.read_motion()
        if motion.fps != options['fps']:
            raise InvalidInputError("Clip '%s' has %d fps motion, expected %d"
                                    % (rec.clip_id, motion.fps, options['fps']))
        duration = min(rec.check_alignment(audio, motion), motion.duration_s)
        count = window_count(duration, seconds)
        if count == 0:
            warnings.warn("Skipping clip '%s': %.2f s is shorter than one %.2f s window"
                          % (rec.clip_id, duration, seconds))
            continue

        for k in range(count):
            segment = audio.segment(k * seconds, (k + 1) * seconds)
            poses = motion.window(k * frames, (k + 1) * frames)
            if poses.n_frames != frames:
                break
            fb = compute_filterbank(segment, options=filterbank_options)
            samples.append(WindowedSample((rec.clip_id, k), fb, poses, segment, rec.labels()))
    return samples


def split_by_content(samples, holdout_contents=1):
    """ Train and test samples; the `holdout_contents` highest content ids
    form the test split."""
    contents = sorted(set(s.content_id for s in samples))
    if holdout_contents >= len(contents) and holdout_contents > 0:
        raise ConfigurationError("Cannot hold out %d of %d contents"
                                 % (holdout_contents, len(contents)))
    held = set(contents[len(contents) - holdout_contents:]) if holdout_contents else set()
    train = [s for s in samples if s.content_id not in held]
    test = [s for s in samples if s.content_id in held]
    return train, test


def filterbank_stats(samples):
    """ Corpus statistics of the window filterbanks."""
    if not samples:
        raise InvalidInputError.empty('samples')
    return FilterbankStats.from_filterbanks(s.filterbank for s in samples)
