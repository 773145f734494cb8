""" Base class for training-history recorders."""

import sys
from fnmatch import fnmatch

from six import StringIO, iteritems, string_types

from emogest.core.options import OptionsDictionary
from emogest.util.recordutil import format_iteration_coordinate

_STREAMS = {'stdout': sys.stdout, 'stderr': sys.stderr}


def open_stream(out):
    """ A writable stream: 'stdout', 'stderr', a filename or a file-like
    object, which is returned as is."""
    if isinstance(out, string_types):
        if out in _STREAMS:
            return _STREAMS[out]
        return open(out, 'w')
    return out


class BaseRecorder(object):
    """ Base class for all recorders. Drivers hand each recorder a dict of
    named scalar values (losses, accuracies, gradient norms) together with
    the execution metadata of the current iteration.

    Options
    -------
    includes : list of str
        Glob patterns of the value names to record.

    excludes : list of str
        Glob patterns of names to drop, applied after `includes`.

    every : int
        Keep one record in this many.
    """

    def __init__(self):
        self.options = OptionsDictionary()
        self.options.add_option('includes', ['*'],
                                desc='Patterns for values to include in recording')
        self.options.add_option('excludes', [],
                                desc='Patterns for values to exclude from recording '
                                     '(processed after includes)')
        self.options.add_option('every', 1, low=1, desc='Keep one record in this many.')

        self.out = None
        self.driver_name = None
        self.n_seen = 0

    def startup(self, driver):
        """ Prepare for a new run of `driver`."""
        self.driver_name = driver.name
        self.n_seen = 0

    def keeps(self, name):
        """ True if the value called `name` passes includes and excludes."""
        if not any(fnmatch(name, pattern) for pattern in self.options['includes']):
            return False
        return not any(fnmatch(name, pattern) for pattern in self.options['excludes'])

    def raw_record(self, values, metadata):
        """ Called by drivers. Drops records according to `every`, filters
        the values by name and hands what is left to `record`. A record
        with no value left is dropped."""
        self.n_seen += 1
        if (self.n_seen - 1) % self.options['every']:
            return
        kept = dict((key, val) for key, val in iteritems(values) if self.keeps(key))
        if kept:
            self.record(kept, metadata)

    @staticmethod
    def coordinate(metadata):
        return format_iteration_coordinate(metadata['coord'])

    def record(self, values, metadata):
        raise NotImplementedError("record")

    def close(self):
        """Closes `out` unless it's ``sys.stdout``, ``sys.stderr``, or StringIO.
        A closed recorder ignores further records."""
        # closing a StringIO deletes its contents
        if self.out is not None and self.out not in _STREAMS.values():
            if not isinstance(self.out, StringIO):
                self.out.close()
        self.out = None
