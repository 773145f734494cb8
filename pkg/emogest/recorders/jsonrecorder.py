""" Line-delimited JSON recorder."""

import json

import numpy as np

from emogest.recorders.baserecorder import BaseRecorder, open_stream


def _jsonable(val):
    if isinstance(val, np.ndarray):
        return val.tolist()
    if hasattr(val, 'item') and callable(val.item):
        # numpy scalars and zero-dim tensors
        return val.item()
    return val


class JSONRecorder(BaseRecorder):
    """Writes one JSON object per record to `out`, which may be a filename or
    a file-like object (defaults to ``stdout``). Each line reads
    ``{"coord": "AudioTrainer/0-12", "values": {...}}``.
    """

    def __init__(self, out='stdout'):
        super(JSONRecorder, self).__init__()
        self.out = open_stream(out)

    def record(self, values, metadata):
        """Writes the given values as a single JSON line."""
        if self.out is None:
            return

        line = {
            'coord': self.coordinate(metadata),
            'values': dict((key, _jsonable(val)) for key, val in values.items()),
        }
        self.out.write(json.dumps(line, sort_keys=True) + '\n')
        self.out.flush()


def read_json_log(filename):
    """
    Returns
    -------
    list of dict
        Every record of a log written by `JSONRecorder`, in order.
    """
    with open(filename) as inp:
        return [json.loads(line) for line in inp if line.strip()]
