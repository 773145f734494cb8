from emogest.recorders.baserecorder import BaseRecorder, open_stream


class DumpCaseRecorder(BaseRecorder):
    """Writes one readable line per record to `out`: the iteration
    coordinate followed by ``name=value`` pairs in name order, e.g.
    ``AudioTrainer/0-3  l_con=0.0412  l_total=1.93``.

    `out` may be 'stdout' (the default), 'stderr', a filename or a file-like
    object.
    """

    def __init__(self, out='stdout'):
        super(DumpCaseRecorder, self).__init__()
        self.out = open_stream(out)

    def record(self, values, metadata):
        if self.out is None:
            return
        pairs = ['%s=%.6g' % (name, float(values[name])) for name in sorted(values)]
        self.out.write('%s  %s\n' % (self.coordinate(metadata), '  '.join(pairs)))
