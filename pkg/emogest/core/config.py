""" Flat dotted-key configuration backed by INI files."""

import ast
import os
from collections import OrderedDict

from six import iteritems, string_types
from six.moves.configparser import RawConfigParser as ConfigParser

from emogest.core.errors import ConfigurationError

DEFAULTS_FILE = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                             'defaults.ini')

#: Environment variable that overrides ``train.seed``.
SEED_ENV = 'AMUSE_SEED'

#: Older name of the seed override, read when SEED_ENV is unset.
SEED_ENV_ALIAS = 'EMOGEST_SEED'


def _do_nothing(string):
    """Makes the ConfigParser case sensitive."""
    return string


def _parse_value(text):
    text = text.strip()
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _format_value(value):
    if isinstance(value, string_types):
        return value
    return repr(value)


class Config(object):
    """ Holds every configurable constant under a dotted key such as
    ``diffusion.steps_train``. The INI section is the part before the dot.

    Args
    ----
    filename : str, optional
        User file overlaid on the packaged defaults.

    env : dict, optional
        Environment used for the seed override, defaults to ``os.environ``.
    """

    def __init__(self, filename=None, env=None):
        self._values = OrderedDict()
        self._env = os.environ if env is None else env
        self._read(DEFAULTS_FILE, allow_new=True)
        if filename is not None:
            self.read(filename)

    def _read(self, filename, allow_new):
        cfg = ConfigParser()
        cfg.optionxform = _do_nothing
        with open(filename) as inp:
            cfg.read_file(inp)

        for section in cfg.sections():
            for name, text in cfg.items(section):
                key = '%s.%s' % (section, name)
                if not allow_new and key not in self._values:
                    raise ConfigurationError.unknown_key(key, filename)
                self._values[key] = _parse_value(text)

    def read(self, filename):
        """ Overlays the values from `filename`.

        Raises
        ------
        ConfigurationError
            If the file sets a key that has no default.
        """
        self._read(filename, allow_new=False)

    def write(self, filename):
        """ Writes every value to an INI file that `read` accepts."""
        cfg = ConfigParser()
        cfg.optionxform = _do_nothing
        for key, value in iteritems(self._values):
            section, name = key.split('.', 1)
            if not cfg.has_section(section):
                cfg.add_section(section)
            cfg.set(section, name, _format_value(value))
        with open(filename, 'w') as out:
            cfg.write(out)

    def __contains__(self, key):
        return key in self._values

    def __getitem__(self, key):
        if key == 'train.seed':
            override = self._env.get(SEED_ENV) or self._env.get(SEED_ENV_ALIAS)
            if override:
                return int(override)
        try:
            return self._values[key]
        except KeyError:
            raise KeyError("Configuration key '{}' does not exist".format(key))

    def __setitem__(self, key, value):
        if key not in self._values:
            raise ConfigurationError.unknown_key(key, '<runtime>')
        self._values[key] = value

    def __eq__(self, other):
        return isinstance(other, Config) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self.__eq__(other)

    def get(self, key, default=None):
        if key in self._values:
            return self[key]
        return default

    def keys(self):
        return list(self._values)

    def section(self, name):
        """
        Returns
        -------
        dict
            The values of one section with the prefix stripped.
        """
        prefix = name + '.'
        return dict((key[len(prefix):], self[key]) for key in self._values
                    if key.startswith(prefix))

    def to_dict(self):
        return dict((key, self[key]) for key in self._values)

    @property
    def seed(self):
        """ Training seed after the environment override."""
        return self['train.seed']
