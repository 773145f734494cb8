""" Typed option dictionaries."""

from six import iteritems


class _Option(object):
    __slots__ = ('value', 'low', 'high', 'values', 'desc')

    def __init__(self, value, low, high, values, desc):
        self.value = value
        self.low = low
        self.high = high
        self.values = values
        self.desc = desc

    def check(self, name, value):
        """ Raises ValueError unless `value` has the type of the default and
        lies within the bounds and the enumeration."""
        _type = type(self.value)
        if type(value) != _type:
            raise ValueError("'{}' should be a '{}'".format(name, _type))
        if self.low is not None and value < self.low:
            raise ValueError("minimum allowed value for '{}' is '{}'".format(name, self.low))
        if self.high is not None and value > self.high:
            raise ValueError("maximum allowed value for '{}' is '{}'".format(name, self.high))
        if self.values is not None and value not in self.values:
            msg = "'{}' must be one of the following values: '{}'"
            raise ValueError(msg.format(name, self.values))


class OptionsDictionary(object):
    """ A dictionary of the settings of a model, trainer or metric. It reads
    like a plain dict, except that only names registered with `add_option`
    exist and every assignment keeps the type, bounds and enumeration of the
    option.

    Subclasses register one group of settings in their constructor, e.g.
    `PriorOptions` or `TrainOptions`, and two groups compare equal when
    their values do.
    """

    def __init__(self):
        self._options = {}

    def add_option(self, name, value, low=None, high=None, values=None,
                   desc=''):
        """ Adds an option to this options dictionary.

        Args
        ----
        name : str
            Name of the option.

        value : object
            Default value for this option. The type of this value will be enforced.

        low : float, optional
            Lower bounds for a numeric value.

        high : float, optional
            Upper bounds for a numeric value.

        values : list, optional
            List of all possible values for an enumeration option.

        desc : str, optional
            String containing documentation of this option.
        """
        if name in self._options:
            raise ValueError("Option '{}' already exists".format(name))
        option = _Option(value, low, high, values, desc)
        option.check(name, value)
        self._options[name] = option

    def _option(self, name):
        try:
            return self._options[name]
        except KeyError:
            raise KeyError("Option '{}' has not been added".format(name))

    def __getitem__(self, name):
        return self._option(name).value

    def __setitem__(self, name, value):
        option = self._option(name)
        option.check(name, value)
        option.value = value

    def __contains__(self, name):
        return name in self._options

    def __eq__(self, other):
        if not isinstance(other, OptionsDictionary):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        equal = self.__eq__(other)
        return equal if equal is NotImplemented else not equal

    def items(self):
        """ (name, value) pairs in name order."""
        return iter([(name, self._options[name].value) for name in self.keys()])

    def keys(self):
        """ Sorted list of registered option names."""
        return sorted(self._options)

    def desc(self, name):
        """ Documentation string of the named option."""
        return self._option(name).desc

    def update(self, values):
        """ Sets several options at once. Every value goes through the same
        checks as a single assignment.

        Args
        ----
        values : dict
            Mapping of option name to new value.
        """
        for name, value in iteritems(dict(values)):
            self[name] = value

    def to_dict(self):
        """ Plain copy of the current option values."""
        return dict(self.items())

    def from_config(self, config, section):
        """ Copies every `section.name` key present in `config` into this
        dictionary. Integers read from a file are promoted when the option
        holds a float.

        Args
        ----
        config : `Config`
            Flat dotted-key configuration.

        section : str
            Prefix of the keys to copy.

        Returns
        -------
        `OptionsDictionary`
            This dictionary.
        """
        for name, option in iteritems(self._options):
            key = '%s.%s' % (section, name)
            if key not in config:
                continue
            value = config[key]
            if isinstance(option.value, float) and isinstance(value, int) and \
               not isinstance(value, bool):
                value = float(value)
            self[name] = value
        return self
