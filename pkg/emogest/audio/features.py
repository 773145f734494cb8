""" Waveforms, log-mel filterbanks and their standardization."""

import json
import math
import warnings

import numpy as np
import torch
import torchaudio
from scipy.io import wavfile
from scipy.signal import resample_poly

from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary


class FilterbankOptions(OptionsDictionary):
    """ Options of the log-mel filterbank front end."""

    def __init__(self, **values):
        super(FilterbankOptions, self).__init__()
        self.add_option('sample_rate', 16000, low=8000,
                        desc='Rate every waveform is resampled to before extraction.')
        self.add_option('n_mels', 128, low=1, desc='Number of mel bins.')
        self.add_option('frame_window_ms', 25.0, low=1.0,
                        desc='Hamming window length in milliseconds.')
        self.add_option('frame_shift_ms', 10.0, low=1.0,
                        desc='Hop between frames in milliseconds.')
        self.add_option('n_fft', 1024, low=16, desc='FFT size, at least the window length.')
        self.add_option('f_min', 20.0, low=0.0, desc='Lowest mel filter edge in Hz.')
        self.add_option('f_max', 0.0, low=0.0,
                        desc='Highest mel filter edge in Hz, 0 means Nyquist.')
        self.add_option('mel_floor', 1e-10, low=0.0,
                        desc='Mel energies are clamped here before the log.')
        self.add_option('target_frames', 1024, low=1,
                        desc='Frames per filterbank after padding or truncation.')
        self.update(values)

    @property
    def window_length(self):
        return int(round(self['sample_rate'] * self['frame_window_ms'] / 1000.0))

    @property
    def hop_length(self):
        return int(round(self['sample_rate'] * self['frame_shift_ms'] / 1000.0))


class Waveform(object):
    """ Mono audio signal.

    Args
    ----
    samples : array_like
        1-D float samples, nominally in [-1, 1].

    sample_rate_hz : int
        Sampling rate.
    """

    def __init__(self, samples, sample_rate_hz):
        samples = np.asarray(samples, dtype=np.float32)
        if samples.ndim != 1:
            raise InvalidInputError("Waveform must be mono (1-D), got shape %s"
                                    % (samples.shape,))
        if samples.size == 0:
            raise InvalidInputError.empty('waveform')
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError.not_finite('waveform')
        if int(sample_rate_hz) <= 0:
            raise InvalidInputError("sample_rate_hz must be positive")

        self.samples = samples
        self.sample_rate_hz = int(sample_rate_hz)

    @property
    def duration_s(self):
        return self.samples.size / float(self.sample_rate_hz)

    @classmethod
    def read(cls, filename):
        """ Reads a WAV file, downmixing multi-channel audio."""
        rate, data = wavfile.read(filename)
        if data.dtype == np.int16:
            data = data.astype(np.float32) / 32768.0
        elif data.dtype == np.int32:
            data = data.astype(np.float32) / 2147483648.0
        elif data.dtype == np.uint8:
            data = (data.astype(np.float32) - 128.0) / 128.0
        else:
            data = data.astype(np.float32)
        if data.ndim == 2:
            data = data.mean(axis=1)
        return cls(data, rate)

    def write(self, filename):
        """ Writes 16-bit PCM."""
        pcm = np.round(np.clip(self.samples, -1.0, 1.0) * 32767.0).astype('<i2')
        wavfile.write(filename, self.sample_rate_hz, pcm)

    def resample(self, sample_rate_hz):
        """ Polyphase resampling to a new rate."""
        if sample_rate_hz == self.sample_rate_hz:
            return self
        div = math.gcd(int(sample_rate_hz), self.sample_rate_hz)
        up = int(sample_rate_hz) // div
        down = self.sample_rate_hz // div
        return Waveform(resample_poly(self.samples, up, down), sample_rate_hz)

    def segment(self, start_s, end_s):
        """ Samples in [start_s, end_s)."""
        start = int(round(start_s * self.sample_rate_hz))
        end = int(round(end_s * self.sample_rate_hz))
        return Waveform(self.samples[start:end], self.sample_rate_hz)


class Filterbank(object):
    """ Time by mel matrix of log-mel energies.

    Args
    ----
    values : array_like
        Matrix [n_frames x n_mels].

    frame_shift_ms : float
        Hop between frames.

    frame_window_ms : float
        Analysis window length.

    standardized : bool
        True once dataset statistics have been applied.
    """

    def __init__(self, values, frame_shift_ms=10.0, frame_window_ms=25.0,
                 standardized=False):
        values = np.asarray(values, dtype=np.float32)
        if values.ndim != 2:
            raise InvalidInputError("Filterbank values must be a matrix, got shape %s"
                                    % (values.shape,))
        if not np.all(np.isfinite(values)):
            raise InvalidInputError.not_finite('filterbank')
        self.values = values
        self.frame_shift_ms = float(frame_shift_ms)
        self.frame_window_ms = float(frame_window_ms)
        self.standardized = bool(standardized)

    @property
    def n_frames(self):
        return self.values.shape[0]

    @property
    def n_mels(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def header(self):
        return {'frames': self.n_frames, 'mels': self.n_mels,
                'frame_shift_ms': self.frame_shift_ms,
                'frame_window_ms': self.frame_window_ms,
                'standardized': self.standardized}

    def write(self, filename):
        """ Writes little-endian float32 rows to `filename` and the header to
        `filename + '.json'`."""
        self.values.astype('<f4').tofile(filename)
        with open(filename + '.json', 'w') as out:
            json.dump(self.header(), out, sort_keys=True)

    @classmethod
    def read(cls, filename):
        with open(filename + '.json') as inp:
            header = json.load(inp)
        values = np.fromfile(filename, dtype='<f4')
        values = values.reshape(header['frames'], header['mels'])
        return cls(values, frame_shift_ms=header['frame_shift_ms'],
                   frame_window_ms=header.get('frame_window_ms', 25.0),
                   standardized=header['standardized'])


def mel_filters(options):
    """ Triangular HTK mel filters, shape (n_fft // 2 + 1, n_mels)."""
    rate = options['sample_rate']
    f_max = options['f_max'] or rate / 2.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        fbanks = torchaudio.functional.melscale_fbanks(
            options['n_fft'] // 2 + 1, options['f_min'], f_max, options['n_mels'],
            rate, norm=None, mel_scale='htk')
    for warning in caught:
        warnings.warn('mel filters: %s' % warning.message)
    return fbanks


def compute_filterbank(w, target_frames=None, options=None):
    """ Log-mel filterbank of a waveform with exactly `target_frames` rows.

    The waveform is resampled to the configured rate, then zero-padded (or
    truncated) at the end so that it spans exactly `target_frames` frames.

    Args
    ----
    w : `Waveform`
        Mono input.

    target_frames : int, optional
        Rows of the result, defaults to the 'target_frames' option.

    options : `FilterbankOptions`, optional
        Front end settings.

    Returns
    -------
    `Filterbank`
    """
    if options is None:
        options = FilterbankOptions()
    if target_frames is None:
        target_frames = options['target_frames']
    if w.samples.size == 0:
        raise InvalidInputError.empty('waveform')
    if w.sample_rate_hz < 8000:
        raise InvalidInputError.out_of_range('sample_rate_hz', w.sample_rate_hz,
                                             8000, 'inf')

    w = w.resample(options['sample_rate'])
    win = options.window_length
    hop = options.hop_length
    n_fft = options['n_fft']
    if n_fft < win:
        raise InvalidInputError("n_fft (%d) is shorter than the window (%d)" % (n_fft, win))

    needed = win + (target_frames - 1) * hop
    samples = torch.zeros(needed, dtype=torch.float64)
    used = min(needed, w.samples.size)
    samples[:used] = torch.from_numpy(w.samples[:used].astype(np.float64))

    frames = samples.unfold(0, win, hop)
    frames = frames - frames.mean(dim=1, keepdim=True)
    window = torch.hamming_window(win, periodic=False, dtype=torch.float64)
    power = torch.fft.rfft(frames * window, n=n_fft).abs() ** 2

    mel = power @ mel_filters(options).to(torch.float64)
    logmel = torch.log(torch.clamp(mel, min=options['mel_floor']))

    return Filterbank(logmel.numpy(), frame_shift_ms=options['frame_shift_ms'],
                      frame_window_ms=options['frame_window_ms'])


def standardize(fb, mean, std):
    """ Returns (fb - mean) / std with the standardized flag set.

    Raises
    ------
    InvalidInputError
        If `std` is not positive.
    """
    if not std > 0.0:
        raise InvalidInputError("std must be positive, got %r" % (std,))
    values = (fb.values.astype(np.float64) - mean) / std
    return Filterbank(values, frame_shift_ms=fb.frame_shift_ms,
                      frame_window_ms=fb.frame_window_ms, standardized=True)


class FilterbankStats(object):
    """ Corpus-level mean and standard deviation of filterbank values."""

    def __init__(self, mean, std):
        self.mean = float(mean)
        self.std = float(std)

    @classmethod
    def from_filterbanks(cls, filterbanks):
        """ Two-pass mean and population standard deviation over every value
        of every filterbank."""
        filterbanks = list(filterbanks)
        if not filterbanks:
            raise InvalidInputError.empty('filterbanks')

        total = 0.0
        count = 0
        for fb in filterbanks:
            total += fb.values.astype(np.float64).sum()
            count += fb.values.size
        mean = total / count

        sq = 0.0
        for fb in filterbanks:
            sq += ((fb.values.astype(np.float64) - mean) ** 2).sum()
        return cls(mean, math.sqrt(sq / count))

    def apply(self, fb):
        return standardize(fb, self.mean, self.std)

    def to_dict(self):
        return {'mean': self.mean, 'std': self.std}

    @classmethod
    def from_dict(cls, data):
        return cls(data['mean'], data['std'])
