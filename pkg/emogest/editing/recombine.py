""" Latent recombination of two audios."""

from emogest.core.errors import InvalidInputError

EMOTION_SWAP = 'emotion_swap'
STYLE_SWAP = 'style_swap'
CONTENT_SWAP = 'content_swap'
NO_EDIT = 'none'

EDIT_MODES = (EMOTION_SWAP, STYLE_SWAP, CONTENT_SWAP, NO_EDIT)

# factor each mode takes from the second audio
_SWAPPED = {EMOTION_SWAP: 'emotion', STYLE_SWAP: 'style', CONTENT_SWAP: 'content',
            NO_EDIT: None}

_ALIASES = {'emotion': EMOTION_SWAP, 'style': STYLE_SWAP, 'content': CONTENT_SWAP}


def edit_mode(name):
    """ Canonical mode of a mode name or a factor name."""
    mode = _ALIASES.get(name, name)
    if mode not in EDIT_MODES:
        raise InvalidInputError("Unknown edit mode '%s', expected one of %s"
                                % (name, ', '.join(EDIT_MODES)))
    return mode


def recombine(l1, l2, mode):
    """ The triple of `l1` with one factor taken from `l2`.

    emotion_swap gives (c1, e2, s1), style_swap (c1, e1, s2), content_swap
    (c2, e1, s1) and none returns `l1` unchanged.
    """
    factor = _SWAPPED[edit_mode(mode)]
    if factor is None:
        return l1
    if l1.dim != l2.dim:
        raise InvalidInputError("Cannot recombine latents of widths %d and %d"
                                % (l1.dim, l2.dim))
    return l1.replace(**{factor: getattr(l2, factor)})
