""" Quadruples of windows: two contents in two styles at one emotion."""

import itertools
from collections import defaultdict

import numpy as np

from emogest.audio.patches import patchify
from emogest.core.errors import ConfigurationError
from emogest.data.windowing import filterbank_stats
from emogest.disentangle.latents import AudioQuadruple


def quadruple_keys(samples):
    """ Member indices of every valid quadruple in canonical order.

    Members share emotion and window index, so same-content members are
    frame aligned. For each such group, every content pair c1 < c2 and
    style pair s1 < s2 covered by the group gives the members
    [(c1, s1), (c2, s1), (c1, s2), (c2, s2)].

    Returns
    -------
    list of tuple
        (emotion_id, [i1, i2, i3, i4]) with indices into `samples`.
    """
    groups = defaultdict(dict)
    for i, s in enumerate(samples):
        groups[(s.emotion_id, s.window)].setdefault((s.content_id, s.style_id), i)

    found = []
    for (emotion, _), members in sorted(groups.items()):
        contents = sorted(set(c for c, _ in members))
        styles = sorted(set(s for _, s in members))
        for c1, c2 in itertools.combinations(contents, 2):
            for s1, s2 in itertools.combinations(styles, 2):
                cells = [(c1, s1), (c2, s1), (c1, s2), (c2, s2)]
                if all(cell in members for cell in cells):
                    found.append((emotion, [members[cell] for cell in cells]))
    return found


def _missing_factor(samples):
    groups = defaultdict(lambda: (set(), set()))
    for s in samples:
        contents, styles = groups[(s.emotion_id, s.window)]
        contents.add(s.content_id)
        styles.add(s.style_id)
    if not groups:
        return 'emotion', 'no samples'
    if all(len(styles) < 2 for _, styles in groups.values()):
        return 'style', 'every emotion has a single style'
    if all(len(contents) < 2 for contents, _ in groups.values()):
        return 'content', 'every emotion has a single content'
    return 'style', 'no two styles share two contents at one emotion'


def build_quadruples(samples, stats=None, patch_size=16, overlap=6, seed=None):
    """ Audio quadruples of windowed samples.

    Args
    ----
    samples : list of `WindowedSample`
        Labeled windows.

    stats : `FilterbankStats`, optional
        Standardization; computed from `samples` when omitted.

    patch_size, overlap : int
        Patch tiling.

    seed : int, optional
        Shuffle the canonical order with this seed.

    Returns
    -------
    list of `AudioQuadruple`
        Member keys are the (clip_id, window) keys of the samples.

    Raises
    ------
    ConfigurationError
        If no valid quadruple exists, naming the missing factor.
    """
    found = quadruple_keys(samples)
    if not found:
        raise ConfigurationError.missing_factor(*_missing_factor(samples))
    if seed is not None:
        order = np.random.RandomState(seed).permutation(len(found))
        found = [found[i] for i in order]
    if stats is None:
        stats = filterbank_stats(samples)

    tiles = {}
    quadruples = []
    for emotion, members in found:
        for i in members:
            if i not in tiles:
                tiles[i] = patchify(stats.apply(samples[i].filterbank), patch_size, overlap)
        quadruples.append(AudioQuadruple([tiles[i] for i in members],
                                         [samples[i].content_id for i in members],
                                         [samples[i].style_id for i in members],
                                         emotion, keys=[samples[i].key for i in members]))
    return quadruples
