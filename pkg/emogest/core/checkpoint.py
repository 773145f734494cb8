""" Self-describing model checkpoints."""

import pickle

import torch
from six import iteritems

from emogest.core.errors import ConfigurationError
from emogest.core.options import OptionsDictionary

FORMAT = 'emogest-checkpoint'
VERSION = 1


def _plain(options):
    if isinstance(options, OptionsDictionary):
        return options.to_dict()
    return dict(options)


def save_checkpoint(path, kind, options, modules, extra=None):
    """ Writes a checkpoint that embeds its architecture configuration.

    Args
    ----
    path : str
        Destination file.

    kind : str
        Model family stored in the file, e.g. 'audio_model'.

    options : dict
        Maps a group name to an `OptionsDictionary` (or plain dict).

    modules : dict
        Maps a name to a `torch.nn.Module` whose state is stored.

    extra : dict, optional
        Additional plain data (numbers, strings, lists).
    """
    payload = {
        'format': FORMAT,
        'version': VERSION,
        'kind': kind,
        'options': dict((name, _plain(opt)) for name, opt in iteritems(options)),
        'state': dict((name, mod.state_dict()) for name, mod in iteritems(modules)),
        'extra': dict(extra or {}),
    }
    torch.save(payload, path)


def load_checkpoint(path, kind, expected=None):
    """ Reads a checkpoint written by `save_checkpoint`.

    Args
    ----
    path : str
        Checkpoint file.

    kind : str
        Required model family.

    expected : dict, optional
        Maps group names to options the stored configuration must equal.

    Returns
    -------
    dict
        The payload with 'options', 'state' and 'extra' entries.

    Raises
    ------
    ConfigurationError
        On an unreadable or foreign file, a different kind, or a
        configuration mismatch.
    """
    try:
        payload = torch.load(path, map_location='cpu', weights_only=True)
    except (pickle.UnpicklingError, RuntimeError, EOFError) as err:
        raise ConfigurationError("'{}' is not a readable checkpoint: {}".format(path, err))

    if not isinstance(payload, dict) or payload.get('format') != FORMAT:
        raise ConfigurationError("'{}' is not an emogest checkpoint".format(path))
    if payload['kind'] != kind:
        msg = "Checkpoint '{}' holds a '{}' model, expected '{}'"
        raise ConfigurationError(msg.format(path, payload['kind'], kind))

    if expected:
        differing = []
        for group, opts in iteritems(expected):
            stored = payload['options'].get(group)
            if stored is None:
                differing.append(group)
                continue
            for name, value in iteritems(_plain(opts)):
                if stored.get(name) != value:
                    differing.append('%s.%s' % (group, name))
        if differing:
            raise ConfigurationError.mismatch("Checkpoint '%s'" % path, differing)

    return payload
