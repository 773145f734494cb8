""" Kinematic beats of motion and onset beats of speech."""

import warnings

import numpy as np
import torch
from scipy.ndimage import gaussian_filter1d, uniform_filter1d
from scipy.signal import find_peaks

from emogest.body.skeleton import BEAT_JOINTS
from emogest.core.errors import InvalidInputError


def joint_speed(m, body, joints=BEAT_JOINTS):
    """ Summed speed [T] of the named joints, in body units per second,
    from central differences of their positions."""
    if m.n_frames < 3:
        raise InvalidInputError("Kinematic beats need at least 3 frames, got %d" % m.n_frames)
    try:
        slots = [body.joint_index(name) for name in joints]
    except ValueError:
        raise InvalidInputError("Body model lacks one of the joints %s" % (list(joints),))

    with torch.no_grad():
        positions = body.joints(m.to_tensor().double())[:, slots].numpy()
    velocity = np.gradient(positions, axis=0) * m.fps
    return np.linalg.norm(velocity, axis=-1).sum(axis=1)


def detect_kinematic_beats(m, body, min_gap=0.2, smooth_sigma_frames=0.0, joints=BEAT_JOINTS):
    """ Beat times in seconds at the valleys of the summed speed of the
    shoulder, elbow and wrist joints.

    Args
    ----
    m : `PoseSequence`
        Motion of at least three frames.

    body : `BodyModel`
        Forward kinematics; must name the joints in `joints`.

    min_gap : float
        Shortest interval between two beats in seconds.

    smooth_sigma_frames : float
        Gaussian smoothing of the speed curve; 0 disables it.

    Returns
    -------
    list of float
    """
    speed = joint_speed(m, body, joints)
    if smooth_sigma_frames > 0:
        speed = gaussian_filter1d(speed, smooth_sigma_frames, mode='nearest')
    if not speed.max() > 0.0:
        return []

    distance = max(1, int(round(min_gap * m.fps)))
    valleys, _ = find_peaks(-speed, distance=distance)
    return [float(i) / m.fps for i in valleys]


def onset_strength(w, window=256, hop=80):
    """ Half-wave rectified spectral flux of a Hann-windowed magnitude
    spectrogram, one value per frame, and the frame rate.

    Frame i covers samples ``[i * hop, i * hop + window)``; the first frame is
    compared against silence.
    """
    samples = np.asarray(w.samples, dtype=np.float64)
    if samples.size < window:
        samples = np.concatenate([samples, np.zeros(window - samples.size)])
    frames = np.lib.stride_tricks.sliding_window_view(samples, window)[::hop]
    spectrum = np.abs(np.fft.rfft(frames * np.hanning(window), axis=1))
    previous = np.vstack([np.zeros((1, spectrum.shape[1])), spectrum[:-1]])
    flux = np.maximum(spectrum - previous, 0.0).sum(axis=1)
    return flux, float(w.sample_rate_hz) / hop


def detect_audio_beats(w, window=256, hop=80, min_gap=0.05, threshold=0.1):
    """ Speech onset times in seconds.

    A frame is an onset when its normalized flux is a peak above
    `threshold`, at least 1.5 times the flux averaged over the surrounding
    0.2 s, and at least `min_gap` after the previous onset. Times refer to
    frame centers. Silence gives no onsets.
    """
    flux, rate = onset_strength(w, window, hop)
    if not flux.max() > 1e-12:
        return []
    flux = flux / flux.max()
    local = uniform_filter1d(flux, max(1, int(round(0.2 * rate))), mode='constant')
    peaks, _ = find_peaks(flux, height=threshold, distance=max(1, int(round(min_gap * rate))))
    peaks = [p for p in peaks if flux[p] >= 1.5 * local[p]]

    center = 0.5 * window / w.sample_rate_hz
    return [float(p) / rate + center for p in peaks]


def beat_joints(body):
    """ Shoulder, elbow and wrist joints of `body`, or every joint but the
    root (with a warning) when the body does not name them."""
    names = body.skeleton.names
    if all(name in names for name in BEAT_JOINTS):
        return BEAT_JOINTS
    warnings.warn("Body model lacks the arm joints, using every joint for beats")
    root = body.skeleton.root
    return tuple(names[j] for j in body.pose_joints if j != root)


def beats_from_options(m, body, options):
    """ `detect_kinematic_beats` with the settings of an `EvaluationOptions`
    over the `beat_joints` of `body`."""
    return detect_kinematic_beats(m, body, options['min_beat_gap'],
                                  options['smooth_sigma_frames'], beat_joints(body))


def audio_beats_from_options(w, options):
    """ `detect_audio_beats` with the settings of an `EvaluationOptions`."""
    return detect_audio_beats(w, options['onset_window'], options['onset_hop'],
                              options['onset_min_gap'], options['onset_threshold'])
