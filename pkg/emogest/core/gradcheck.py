""" Finite-difference checks of autograd gradients."""

import sys

import numpy as np
import torch
from six import iteritems


def _fd_entries(func, inputs, name, indices, step_size):
    """ Central differences of `func` with respect to selected entries of one
    input."""
    tensor = inputs[name]
    flat = tensor.data.view(-1)
    jac = np.zeros(len(indices))

    with torch.no_grad():
        for i, idx in enumerate(indices):
            orig = flat[idx].item()

            flat[idx] = orig + step_size
            fplus = float(func(inputs))

            flat[idx] = orig - step_size
            fminus = float(func(inputs))

            flat[idx] = orig
            jac[i] = (fplus - fminus) / (2.0 * step_size)

    return jac


def check_partial_derivatives(func, inputs, step_size=1e-6, max_entries=None,
                              seed=0, out_stream=sys.stdout, label='loss'):
    """ Checks the autograd gradient of a scalar function against central
    finite differences.

    Args
    ----
    func : callable
        Maps the `inputs` dict to a scalar tensor.

    inputs : dict
        Maps names to tensors (double precision recommended). Parameters of
        a module may be passed directly.

    step_size : float
        Finite difference step.

    max_entries : int, optional
        Check at most this many randomly chosen entries per input.

    seed : int
        Seed for the entry subsample.

    out_stream : file_like
        Where to send human readable output. Default is sys.stdout. Set to
        None to suppress.

    label : str
        Name of the function in the printed report.

    Returns
    -------
    dict
        Keyed by input name; each value holds 'J_fwd' (autograd), 'J_fd',
        'magnitude', 'abs error' and 'rel error'.
    """
    names = sorted(inputs)
    tensors = [inputs[name] for name in names]
    for tensor in tensors:
        if not tensor.requires_grad:
            tensor.requires_grad_(True)

    value = func(inputs)
    grads = torch.autograd.grad(value, tensors, allow_unused=True)

    rng = np.random.RandomState(seed)
    data = {}
    started = False

    for name, tensor, grad in zip(names, tensors, grads):
        size = tensor.numel()
        if max_entries is not None and size > max_entries:
            indices = np.sort(rng.choice(size, max_entries, replace=False))
        else:
            indices = np.arange(size)

        if grad is None:
            jac_fwd = np.zeros(len(indices))
        else:
            jac_fwd = grad.detach().reshape(-1).cpu().numpy()[indices].astype(np.float64)

        jac_fd = _fd_entries(func, inputs, name, indices, step_size)

        magfwd = np.linalg.norm(jac_fwd)
        magfd = np.linalg.norm(jac_fd)
        abs_err = np.linalg.norm(jac_fwd - jac_fd)
        rel_err = abs_err / magfd if magfd > 0.0 else abs_err

        data[name] = {
            'J_fwd': jac_fwd,
            'J_fd': jac_fd,
            'magnitude': (magfwd, magfd),
            'abs error': abs_err,
            'rel error': rel_err,
            'fdstep': step_size,
        }

        if out_stream is None:
            continue

        if started is True:
            out_stream.write(' -'*30 + '\n')
        else:
            started = True

        out_stream.write("  '%s' wrt '%s' (%d entries)\n\n" % (label, name, len(indices)))
        out_stream.write('    Autograd Magnitude : %.6e\n' % magfwd)
        out_stream.write('          Fd Magnitude : %.6e\n\n' % magfd)
        out_stream.write('    Absolute Error (Jfwd - Jfd) : %.6e\n' % abs_err)
        out_stream.write('    Relative Error (Jfwd - Jfd) : %.6e\n\n' % rel_err)

    return data


def max_rel_error(data):
    """ Largest relative error over every input of a gradient check report."""
    return max(entry['rel error'] for _, entry in iteritems(data))
