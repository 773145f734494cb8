import unittest

from emogest.util.recordutil import (create_local_meta, format_iteration_coordinate,
                                     update_local_meta)


class TestRecordUtil(unittest.TestCase):

    def test_format_coord(self):
        self.assertEqual(format_iteration_coordinate(['AudioTrainer', (3, 17)]),
                         'AudioTrainer/3-17')
        self.assertEqual(format_iteration_coordinate(['Eval', (1,), 'AudioTrainer', (0, 2)]),
                         'Eval/1/AudioTrainer/0-2')

    def test_top_level(self):
        meta = create_local_meta(None, 'GestureTrainer')
        self.assertEqual(meta['name'], 'GestureTrainer')
        self.assertEqual(meta['coord'], ['GestureTrainer', (0,)])

        update_local_meta(meta, (2, 5))
        self.assertEqual(meta['coord'], ['GestureTrainer', (2, 5)])
        self.assertIn((2, 5), meta)

    def test_only_current_iteration_kept(self):
        meta = create_local_meta(None, 'AudioTrainer')
        for epoch in range(3):
            for step in range(50):
                update_local_meta(meta, (epoch, step))

        self.assertEqual(sorted(k for k in meta if isinstance(k, tuple)), [(2, 49)])
        self.assertEqual(meta['coord'], ['AudioTrainer', (2, 49)])

    def test_same_iteration_keeps_children(self):
        parent = create_local_meta(None, 'Eval')
        update_local_meta(parent, (1,))
        child = create_local_meta(parent, 'ExtractorTrainer')
        update_local_meta(parent, (1,))
        self.assertIs(parent[(1,)]['ExtractorTrainer'], child)

        update_local_meta(parent, (2,))
        self.assertNotIn((1,), parent)
        self.assertEqual(parent[(2,)], {})

    def test_nested(self):
        parent = create_local_meta(None, 'Eval')
        update_local_meta(parent, (1,))
        child = create_local_meta(parent, 'ExtractorTrainer')

        self.assertEqual(child['coord'], ['Eval', (1,), 'ExtractorTrainer', (0,)])
        self.assertIs(parent[(1,)]['ExtractorTrainer'], child)

        update_local_meta(child, (0, 4))
        self.assertEqual(format_iteration_coordinate(child['coord']),
                         'Eval/1/ExtractorTrainer/0-4')
        # the parent's coordinate is copied, not shared
        self.assertEqual(parent['coord'], ['Eval', (1,)])


if __name__ == "__main__":
    unittest.main()
