""" Overlapping square patches of a filterbank."""

import numpy as np
import torch

from emogest.core.errors import InvalidInputError


def patch_grid(n_frames, n_mels, patch_size=16, overlap=6):
    """ Number of patch rows (time) and columns (mel) of a tiling.

    Top-left corners sit at multiples of ``stride = patch_size - overlap``
    and a patch must lie fully inside the filterbank, so along an axis of
    length n there are ``(n - patch_size) // stride + 1`` corners. A 1024 x 128
    filterbank with 16 x 16 patches and overlap 6 gives 101 x 12 = 1212
    patches.

    Returns
    -------
    tuple of int
        (time corners, mel corners)
    """
    if overlap >= patch_size:
        raise InvalidInputError("overlap (%d) must be smaller than patch_size (%d)"
                                % (overlap, patch_size))
    if n_frames < patch_size or n_mels < patch_size:
        raise InvalidInputError("Filterbank %dx%d is smaller than one %dx%d patch"
                                % (n_frames, n_mels, patch_size, patch_size))
    stride = patch_size - overlap
    return (n_frames - patch_size) // stride + 1, (n_mels - patch_size) // stride + 1


def patch_count(n_frames, n_mels, patch_size=16, overlap=6):
    """ Total number of patches of a tiling, see `patch_grid`."""
    n_t, n_f = patch_grid(n_frames, n_mels, patch_size, overlap)
    return n_t * n_f


class PatchSequence(object):
    """ Row-major sequence of patches cut from one filterbank.

    Args
    ----
    patches : ndarray
        Array [N x patch_size x patch_size].

    positions : ndarray
        Integer array [N x 2] of (time_index, mel_index) top-left corners.

    patch_size : int
        Side of each patch.

    overlap : int
        Overlap between neighbours.

    source_shape : tuple
        Shape of the filterbank the patches were cut from.

    filterbank : `Filterbank`, optional
        The source itself, kept so training can re-augment it.
    """

    def __init__(self, patches, positions, patch_size, overlap, source_shape,
                 filterbank=None):
        self.patches = np.asarray(patches, dtype=np.float32)
        self.positions = np.asarray(positions, dtype=np.int64)
        self.patch_size = patch_size
        self.overlap = overlap
        self.source_shape = tuple(source_shape)
        self.filterbank = filterbank

    @property
    def stride(self):
        return self.patch_size - self.overlap

    @property
    def n_patches(self):
        return self.patches.shape[0]

    def __len__(self):
        return self.n_patches

    def to_tensor(self):
        """ Flattened patches as a float tensor [N x patch_size**2]."""
        return torch.from_numpy(self.patches.reshape(self.n_patches, -1).copy())


def patchify(fb, patch_size=16, overlap=6):
    """ Cuts a filterbank into overlapping patches.

    Args
    ----
    fb : `Filterbank`
        Source matrix [n_frames x n_mels].

    patch_size : int
        Side of a square patch.

    overlap : int
        Overlap along both axes; the stride is patch_size - overlap.

    Returns
    -------
    `PatchSequence`
    """
    n_frames, n_mels = fb.values.shape
    n_t, n_f = patch_grid(n_frames, n_mels, patch_size, overlap)
    stride = patch_size - overlap

    windows = np.lib.stride_tricks.sliding_window_view(fb.values, (patch_size, patch_size))
    patches = windows[::stride, ::stride][:n_t, :n_f].reshape(-1, patch_size, patch_size)

    tt, ff = np.meshgrid(np.arange(n_t) * stride, np.arange(n_f) * stride, indexing='ij')
    positions = np.stack([tt.ravel(), ff.ravel()], axis=1)

    return PatchSequence(patches.copy(), positions, patch_size, overlap,
                         fb.values.shape, filterbank=fb)


def unpatchify(ps):
    """ Rebuilds a filterbank from patches by averaging overlapping entries.

    Returns
    -------
    tuple
        (values, covered) where `covered` marks the cells under at least one
        patch; uncovered cells are zero.
    """
    total = np.zeros(ps.source_shape, dtype=np.float64)
    counts = np.zeros(ps.source_shape, dtype=np.int64)
    p = ps.patch_size
    for patch, (t, f) in zip(ps.patches, ps.positions):
        total[t:t + p, f:f + p] += patch
        counts[t:t + p, f:f + p] += 1

    covered = counts > 0
    values = np.zeros(ps.source_shape, dtype=np.float64)
    values[covered] = total[covered] / counts[covered]
    return values.astype(np.float32), covered
