""" Base class for training drivers."""

from __future__ import print_function

import numpy as np
import torch

from emogest.core.errors import ConfigurationError, NumericalError
from emogest.core.options import OptionsDictionary
from emogest.util.recordutil import create_local_meta, update_local_meta

#public symbols
__all__ = ['Driver', 'TrainOptions']


class TrainOptions(OptionsDictionary):
    """ Optimizer, schedule and reporting settings shared by all drivers."""

    def __init__(self, **values):
        super(TrainOptions, self).__init__()
        self.add_option('lr', 1e-4, low=0.0, desc='AdamW learning rate.')
        self.add_option('batch', 64, low=1, desc='Batch size.')
        self.add_option('epochs', 5000, low=0, desc='Passes over the training set.')
        self.add_option('max_steps', 0, low=0,
                        desc='Stop after this many optimizer steps; 0 means no limit.')
        self.add_option('weight_decay', 0.01, low=0.0, desc='AdamW weight decay.')
        self.add_option('seed', 0, low=0, desc='Seed of shuffling and every random draw.')
        desc = 'Set to 0 to disable printing, set to 1 to print the ' \
               'loss to stdout each epoch, set to 2 to print ' \
               'the loss of every step as well.'
        self.add_option('iprint', 0, values=[0, 1, 2], desc=desc)
        self.add_option('checkpoint_every', 0, low=0,
                        desc='Save a checkpoint every this many epochs; 0 disables it.')
        self.add_option('checkpoint_path', '', desc='Checkpoint file of periodic saves.')
        self.update(values)


class Driver(object):
    """ Base class for training drivers. A driver owns an `OptionsDictionary`
    of `TrainOptions`, a list of recorders and an iteration count, and runs
    an AdamW loop over the batches its subclass provides.

    Subclasses implement `parameters`, `batches` and `step`, and may
    override `end_epoch` and `save`.

    Args
    ----
    options : `TrainOptions`, optional
        Training settings.

    name : str, optional
        Name in iteration coordinates, defaults to the class name.
    """

    def __init__(self, options=None, name=None):
        self.name = name or self.__class__.__name__
        self.options = options if options is not None else TrainOptions()
        self.recorders = []
        self.iter_count = 0
        self.local_meta = None
        self.history = []
        self.optimizer = None
        self.generator = None

    def add_recorder(self, recorder):
        """Appends the given recorder to this driver's list of recorders.

        Args
        ----
        recorder: `BaseRecorder`
            A recorder object.
        """
        self.recorders.append(recorder)

    def parameters(self):
        """ Parameters the optimizer updates."""
        raise NotImplementedError("parameters")

    def batches(self, rng):
        """ Batches of one epoch, drawn with the numpy generator `rng`."""
        raise NotImplementedError("batches")

    def step(self, batch):
        """ One optimizer step on `batch`.

        Returns
        -------
        dict
            Named float values, including 'l_total'.
        """
        raise NotImplementedError("step")

    def end_epoch(self, epoch):
        """ Values recorded once per epoch, e.g. validation accuracy."""
        return {}

    def save(self, path):
        raise NotImplementedError("save")

    def print_norm(self, driver_string, metadata, iteration, loss, loss0, msg=None):
        """ Prints the training loss in a neat readable format.

        Args
        ----
        driver_string: string
            Unique string to identify your driver type (e.g., 'AUDIO').

        metadata: dict
            Execution metadata containing iteration info.

        iteration: int
            Current iteration number

        loss: float
            Current total loss.

        loss0: float
            Loss of the first step for relative comparison.

        msg: string, optional
            Message that replaces the loss columns.
        """
        name = metadata['name']
        if msg is not None:
            print('[%s] TRAIN: %s   %d | %s' % (name, driver_string, iteration, msg))
            return
        rel = loss / loss0 if loss0 else float('nan')
        print('[%s] TRAIN: %s   %d | %.9g %.9g' % (name, driver_string, iteration, loss, rel))

    def _record(self, values):
        for recorder in self.recorders:
            recorder.raw_record(values, self.local_meta)

    def run(self, metadata=None):
        """ Runs the training loop.

        Args
        ----
        metadata : dict, optional
            Execution metadata of a parent level.

        Returns
        -------
        list of dict
            The values of every step, in order.
        """
        opt = self.options
        params = [p for p in self.parameters() if p.requires_grad]
        if not params:
            raise ConfigurationError("%s has no trainable parameters" % self.name)

        torch.manual_seed(opt['seed'])
        rng = np.random.RandomState(opt['seed'])
        self.generator = torch.Generator().manual_seed(opt['seed'])
        self.optimizer = torch.optim.AdamW(params, lr=opt['lr'],
                                           weight_decay=opt['weight_decay'])
        for recorder in self.recorders:
            recorder.startup(self)

        self.iter_count = 0
        self.history = []
        self.local_meta = create_local_meta(metadata, self.name)
        update_local_meta(self.local_meta, (0, 0))
        driver_string = self.name.upper()
        loss0 = None
        max_steps = opt['max_steps']

        for epoch in range(opt['epochs']):
            epoch_losses = []
            for i, batch in enumerate(self.batches(rng)):
                if max_steps and self.iter_count >= max_steps:
                    break
                update_local_meta(self.local_meta, (epoch, i))
                values = self.step(batch)
                loss = values['l_total']
                if not np.isfinite(loss):
                    raise NumericalError.non_finite_loss('l_total', self.iter_count)
                if loss0 is None:
                    loss0 = loss

                self.iter_count += 1
                epoch_losses.append(loss)
                self.history.append(values)
                self._record(values)
                if opt['iprint'] > 1:
                    self.print_norm(driver_string, self.local_meta, self.iter_count,
                                    loss, loss0)

            if not epoch_losses:
                break

            summary = self.end_epoch(epoch)
            if summary:
                self._record(summary)
            if opt['iprint'] > 0:
                self.print_norm(driver_string, self.local_meta, epoch,
                                float(np.mean(epoch_losses)), loss0)
            every = opt['checkpoint_every']
            if every and opt['checkpoint_path'] and (epoch + 1) % every == 0:
                self.save(opt['checkpoint_path'])

        return self.history
