""" Unit test for the JSONRecorder. """

import os
import unittest
from shutil import rmtree
from tempfile import mkdtemp

from six import StringIO

from emogest.recorders.jsonrecorder import JSONRecorder, read_json_log
from emogest.recorders.test.recordertests import RecorderTests
from emogest.test.testutil import assert_rel_error
from emogest.util.recordutil import format_iteration_coordinate


class TestJSONRecorder(RecorderTests.Tests):

    def setUp(self):
        self.dir = mkdtemp()
        self.filename = os.path.join(self.dir, 'log.jsonl')
        self.recorder = JSONRecorder(self.filename)

    def tearDown(self):
        super(TestJSONRecorder, self).tearDown()
        rmtree(self.dir)

    def assertDatasetEquals(self, expected, tolerance):
        self.recorder.close()
        lines = read_json_log(self.filename)
        self.assertEqual(len(lines), len(expected))

        for line, (coord, expect) in zip(lines, expected):
            self.assertEqual(line['coord'], format_iteration_coordinate(coord))
            self.assertEqual(sorted(line['values']), sorted(key for key, _ in expect))
            for key, val in expect:
                assert_rel_error(self, line['values'][key], val, tolerance)


class TestJSONStream(unittest.TestCase):

    def test_stream_lines(self):
        out = StringIO()
        recorder = JSONRecorder(out)
        recorder.raw_record({'l_total': 0.5}, {'coord': ['AudioTrainer', (3, 17)]})
        self.assertEqual(out.getvalue(),
                         '{"coord": "AudioTrainer/3-17", "values": {"l_total": 0.5}}\n')

    def test_closed_recorder_ignores_records(self):
        out = StringIO()
        recorder = JSONRecorder(out)
        recorder.close()
        recorder.out = None
        recorder.record({'l_total': 1.0}, {'coord': ['AudioTrainer', (0, 0)]})
        self.assertEqual(out.getvalue(), '')


if __name__ == "__main__":
    unittest.main()
