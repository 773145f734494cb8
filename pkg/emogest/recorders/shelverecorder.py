import shelve

from emogest.recorders.baserecorder import BaseRecorder

ORDER_KEY = 'order'


class ShelveRecorder(BaseRecorder):
    """
    Stores each record in a shelve under its formatted iteration coordinate.
    The key 'order' lists the coordinates in recording order.

    Args
    ----
    out : str
        Filename of the shelve.

    **shelve_args
        Passed to `shelve.open`.
    """

    def __init__(self, out, **shelve_args):
        super(ShelveRecorder, self).__init__()
        self.out = shelve.open(out, **shelve_args)
        self.order = []

    def record(self, values, metadata):
        if self.out is None:
            return
        coord = self.coordinate(metadata)
        self.out[coord] = dict((key, float(val)) for key, val in values.items())
        self.order.append(coord)
        self.out[ORDER_KEY] = self.order


def read_shelve_log(filename):
    """
    Returns
    -------
    list of tuple
        (coordinate, values) of every record of a shelve written by
        `ShelveRecorder`, in order.
    """
    db = shelve.open(filename, flag='r')
    try:
        return [(coord, db[coord]) for coord in db.get(ORDER_KEY, [])]
    finally:
        db.close()
