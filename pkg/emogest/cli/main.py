""" The ``emogest`` command line."""

from __future__ import print_function

import argparse
import csv
import json
import os
import pickle
import sys

from emogest.audio.features import FilterbankOptions, Waveform
from emogest.core.config import Config
from emogest.core.errors import EmogestError
from emogest.data.records import load_records
from emogest.data.synthetic import SyntheticCorpusSpec, generate_synthetic_corpus
from emogest.data.windowing import (DataOptions, filterbank_stats, split_by_content,
                                    window_dataset)
from emogest.diffusion.training import GestureModel
from emogest.disentangle.model import AudioModel
from emogest.drivers.trainers import train_audio_model, train_gesture_model
from emogest.editing.pipeline import GesturePipeline
from emogest.editing.recombine import edit_mode
from emogest.evaluation.extractor import MotionExtractor
from emogest.evaluation.report import evaluate_directory
from emogest.recorders.jsonrecorder import JSONRecorder

#public symbols
__all__ = ['run_cli', 'main']


def _windows(args, config):
    options = DataOptions().from_config(config, 'data')
    samples = window_dataset(load_records(args.data), options,
                             FilterbankOptions().from_config(config, 'filterbank'))
    return samples, options


def _pipeline(args, config):
    options = DataOptions().from_config(config, 'data')
    return GesturePipeline(AudioModel.load(args.audio_model),
                           GestureModel.load(args.gesture_model),
                           FilterbankOptions().from_config(config, 'filterbank'),
                           options['window_seconds'], options['fps'])


def _seed(args, config):
    return config.seed if args.seed is None else args.seed


def synth_data(args, config, recorders):
    spec = SyntheticCorpusSpec().from_config(config, 'synthetic')
    if args.seed is not None:
        spec['seed'] = args.seed
    records = generate_synthetic_corpus(spec, args.out)
    return {'clips': len(records), 'out': args.out}


def preprocess(args, config, recorders):
    samples, _ = _windows(args, config)
    stats = filterbank_stats(samples)
    for sub in ('filterbanks', 'motion'):
        path = os.path.join(args.out, sub)
        if not os.path.isdir(path):
            os.makedirs(path)

    with open(os.path.join(args.out, 'windows.csv'), 'w', newline='') as out:
        writer = csv.writer(out)
        writer.writerow(['name', 'clip_id', 'window', 'emotion_id', 'style_id', 'content_id'])
        for s in samples:
            name = '%s_w%03d' % (s.clip_id, s.window)
            stats.apply(s.filterbank).write(os.path.join(args.out, 'filterbanks', name + '.fb'))
            s.poses.write(os.path.join(args.out, 'motion', name))
            writer.writerow([name, s.clip_id, s.window, s.emotion_id, s.style_id, s.content_id])
    with open(os.path.join(args.out, 'stats.json'), 'w') as out:
        json.dump(stats.to_dict(), out, sort_keys=True)
    return {'windows': len(samples), 'out': args.out}


def _train_split(args, config):
    samples, options = _windows(args, config)
    train, _ = split_by_content(samples, options['holdout_contents'])
    return train


def _training_result(trainer, out):
    final = trainer.history[-1]['l_total'] if trainer.history else None
    return {'steps': trainer.iter_count, 'final_loss': final, 'out': out}


def train_audio(args, config, recorders):
    model, trainer = train_audio_model(_train_split(args, config), config, recorders)
    model.save(args.out, extra={'iter_count': trainer.iter_count})
    return _training_result(trainer, args.out)


def train_gesture(args, config, recorders):
    audio_model = AudioModel.load(args.audio_model)
    model, trainer = train_gesture_model(_train_split(args, config), audio_model, config,
                                         recorders)
    model.save(args.out, extra={'iter_count': trainer.iter_count})
    return _training_result(trainer, args.out)


def generate(args, config, recorders):
    pipeline = _pipeline(args, config)
    audio = Waveform.read(args.audio)
    seed = _seed(args, config)
    if args.variations:
        seeds = [seed + k for k in range(args.variations)]
        for k, motion in enumerate(pipeline.generate_variations(audio, seeds, args.steps)):
            motion.write(os.path.join(args.out, 'variation_%d' % k))
        return {'variations': args.variations, 'seed': seed, 'out': args.out}
    motion = pipeline.generate(audio, seed, args.steps)
    motion.write(args.out)
    return {'frames': motion.n_frames, 'seed': seed, 'out': args.out}


def edit(args, config, recorders):
    pipeline = _pipeline(args, config)
    seed = _seed(args, config)
    motion = pipeline.edit(Waveform.read(args.audio_a), Waveform.read(args.audio_b),
                           edit_mode(args.mode), seed, args.steps)
    motion.write(args.out)
    return {'frames': motion.n_frames, 'mode': edit_mode(args.mode), 'seed': seed,
            'out': args.out}


def evaluate(args, config, recorders):
    extractor = MotionExtractor.load(args.extractor) if args.extractor else None
    report, trained = evaluate_directory(args.data, AudioModel.load(args.audio_model),
                                         GestureModel.load(args.gesture_model), extractor,
                                         config, args.split)
    result = {'out': args.out}
    if extractor is None:
        path = os.path.splitext(args.out)[0] + '_extractor.pt'
        trained.save(path)
        result['extractor'] = path
    with open(args.out, 'w') as out:
        json.dump(report, out, indent=1, sort_keys=True)
    result.update(report)
    return result


def _model_flags(parser):
    parser.add_argument('--audio-model', required=True, help='Audio model checkpoint.')
    parser.add_argument('--gesture-model', required=True, help='Gesture model checkpoint.')
    parser.add_argument('--steps', type=int, default=None,
                        help="DDIM steps, defaults to 'diffusion.steps_infer'.")
    parser.add_argument('--seed', type=int, default=None,
                        help="Sampling seed, defaults to 'train.seed'.")


def build_parser():
    """ The argument parser with one sub-parser per subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='INI file overlaid on the defaults.')
    common.add_argument('--log', default=None, help='Line-delimited JSON training log.')

    parser = argparse.ArgumentParser(prog='emogest',
                                     description='Emotional speech-driven gesture generation.')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('synth-data', parents=[common], help='Write a synthetic corpus.')
    p.add_argument('--out', required=True, help='Corpus directory.')
    p.add_argument('--seed', type=int, default=None, help="Overrides 'synthetic.seed'.")
    p.set_defaults(func=synth_data)

    p = sub.add_parser('preprocess', parents=[common],
                       help='Write standardized window filterbanks and motion windows.')
    p.add_argument('--data', required=True, help='Corpus directory.')
    p.add_argument('--out', required=True, help='Output directory.')
    p.set_defaults(func=preprocess)

    p = sub.add_parser('train-audio', parents=[common], help='Train the audio model.')
    p.add_argument('--data', required=True, help='Corpus directory.')
    p.add_argument('--out', required=True, help='Checkpoint file.')
    p.set_defaults(func=train_audio)

    p = sub.add_parser('train-gesture', parents=[common], help='Train the gesture model.')
    p.add_argument('--data', required=True, help='Corpus directory.')
    p.add_argument('--audio-model', required=True, help='Audio model checkpoint.')
    p.add_argument('--out', required=True, help='Checkpoint file.')
    p.set_defaults(func=train_gesture)

    p = sub.add_parser('generate', parents=[common], help='Generate motion for a WAV file.')
    p.add_argument('--audio', required=True, help='Input WAV file.')
    _model_flags(p)
    p.add_argument('--variations', type=int, default=0,
                   help='Write this many variations to out/variation_<k>/.')
    p.add_argument('--out', required=True, help='Motion directory.')
    p.set_defaults(func=generate)

    p = sub.add_parser('edit', parents=[common],
                       help='Generate motion with one factor taken from a second WAV file.')
    p.add_argument('--audio-a', required=True, help='WAV file of the kept factors.')
    p.add_argument('--audio-b', required=True, help='WAV file of the swapped factor.')
    p.add_argument('--mode', required=True, choices=['emotion', 'style', 'content', 'none'],
                   help='Factor to swap.')
    _model_flags(p)
    p.add_argument('--out', required=True, help='Motion directory.')
    p.set_defaults(func=edit)

    p = sub.add_parser('evaluate', parents=[common], help='Write the metric report.')
    p.add_argument('--data', required=True, help='Corpus directory.')
    p.add_argument('--audio-model', required=True, help='Audio model checkpoint.')
    p.add_argument('--gesture-model', required=True, help='Gesture model checkpoint.')
    p.add_argument('--extractor', default=None,
                   help='Extractor checkpoint; trained and saved next to --out when omitted.')
    p.add_argument('--split', default='test', choices=['train', 'test', 'all'],
                   help='Corpus split to evaluate.')
    p.add_argument('--out', required=True, help='Report JSON file.')
    p.set_defaults(func=evaluate)

    return parser


def run_cli(argv=None):
    """ Runs one subcommand.

    Returns
    -------
    int
        0 on success, 2 on a usage error and 1 when the command fails.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    recorders = []
    try:
        config = Config(args.config)
        if args.log:
            recorders.append(JSONRecorder(args.log))
        result = args.func(args, config, recorders)
    except (EmogestError, EnvironmentError, ValueError, RuntimeError,
            pickle.UnpicklingError) as err:
        print('emogest %s: %s' % (args.command, err), file=sys.stderr)
        return 1
    finally:
        for recorder in recorders:
            recorder.close()

    result['command'] = args.command
    print(json.dumps(result, sort_keys=True))
    return 0


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == '__main__':
    main()
