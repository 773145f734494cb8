from numbers import Number

import h5py
import numpy as np

from emogest.recorders.baserecorder import BaseRecorder

COORD = 'coord'


class HDF5Recorder(BaseRecorder):
    """
    Stores the history as columns: the dataset 'coord' holds the iteration
    coordinate of every record and each value name has a float dataset of
    the same length, NaN where a record lacks that name.

    Args
    ----
    out : str
        Filename of the HDF5 file.

    **driver_kwargs
        Passed to `h5py.File`, e.g. ``driver='core'``.
    """

    def __init__(self, out, **driver_kwargs):
        super(HDF5Recorder, self).__init__()
        self.out = h5py.File(out, 'w', **driver_kwargs)
        self.out.create_dataset(COORD, shape=(0,), maxshape=(None,),
                                dtype=h5py.string_dtype())
        self.n_rows = 0

    def _column(self, name):
        if name not in self.out:
            self.out.create_dataset(name, shape=(self.n_rows,), maxshape=(None,),
                                    dtype='f8', fillvalue=np.nan)
        return self.out[name]

    def record(self, values, metadata):
        if self.out is None:
            return
        for key, val in values.items():
            if not isinstance(val, (Number, np.number)) or key == COORD:
                msg = "HDF5Recorder stores scalars only, got '{0}' for '{1}'"
                raise NotImplementedError(msg.format(type(val).__name__, key))

        row = self.n_rows
        self.n_rows += 1
        for name in self.out:
            self.out[name].resize((self.n_rows,))
        self.out[COORD][row] = self.coordinate(metadata)
        for key, val in values.items():
            column = self._column(key)
            column[row] = float(val)


def read_hdf5_log(h5):
    """
    Returns
    -------
    list of tuple
        (coordinate, values) of every record in an open file written by
        `HDF5Recorder`, in order.
    """
    coords = [c.decode() if isinstance(c, bytes) else c for c in h5[COORD][()]]
    columns = dict((name, h5[name][()]) for name in h5 if name != COORD)
    rows = []
    for i, coord in enumerate(coords):
        values = dict((name, float(col[i])) for name, col in columns.items()
                      if not np.isnan(col[i]))
        rows.append((coord, values))
    return rows
