""" Conversions between 6D rotations and rotation matrices.

A 6D rotation stores the first two columns of a rotation matrix. The matrix
is recovered by Gram-Schmidt orthonormalization of those columns, with the
third column their cross product.
"""

import numpy as np
import torch

from emogest.core.errors import InvalidInputError, SingularInputError

# Below these norms a 6D input has no well defined orthonormalization.
_ZERO_NORM = 1e-12
_PARALLEL_TOL = 1e-8

IDENTITY_6D = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0)


def _as_tensor(x):
    if isinstance(x, torch.Tensor):
        return x, True
    return torch.as_tensor(np.asarray(x, dtype=np.float64)), False


def _to_caller(x, was_tensor):
    return x if was_tensor else x.numpy()


def rot6d_to_matrix(r):
    """ Rotation matrices from 6D rotations.

    Args
    ----
    r : array_like or Tensor
        Array [..., 6].

    Returns
    -------
    ndarray or Tensor
        Array [..., 3, 3] whose columns are orthonormal with determinant +1.

    Raises
    ------
    SingularInputError
        If a first triple is zero or a second triple is parallel to it.
    """
    r, was_tensor = _as_tensor(r)
    if r.shape[-1] != 6:
        raise InvalidInputError("6D rotations need a trailing dimension of 6, got %s"
                                % (tuple(r.shape),))

    a1 = r[..., 0:3]
    a2 = r[..., 3:6]

    n1 = torch.linalg.norm(a1, dim=-1, keepdim=True)
    if bool((n1 <= _ZERO_NORM).any()):
        raise SingularInputError.degenerate_rot6d('the first triple')
    b1 = a1 / n1

    u2 = a2 - (b1 * a2).sum(dim=-1, keepdim=True) * b1
    n2 = torch.linalg.norm(u2, dim=-1, keepdim=True)
    scale = torch.linalg.norm(a2, dim=-1, keepdim=True)
    if bool((scale <= _ZERO_NORM).any()) or bool((n2 <= _PARALLEL_TOL * scale).any()):
        raise SingularInputError.degenerate_rot6d('the second triple after projection')
    b2 = u2 / n2

    b3 = torch.linalg.cross(b1, b2, dim=-1)
    return _to_caller(torch.stack([b1, b2, b3], dim=-1), was_tensor)


def safe_rot6d_to_matrix(r, eps=1e-8):
    """ Differentiable variant of `rot6d_to_matrix` for training. Norms are
    offset by `eps` instead of raising on degenerate input.

    Args
    ----
    r : Tensor
        Tensor [..., 6].

    eps : float
        Added to both normalization denominators.
    """
    a1 = r[..., 0:3]
    a2 = r[..., 3:6]
    b1 = a1 / (torch.linalg.norm(a1, dim=-1, keepdim=True) + eps)
    u2 = a2 - (b1 * a2).sum(dim=-1, keepdim=True) * b1
    b2 = u2 / (torch.linalg.norm(u2, dim=-1, keepdim=True) + eps)
    b3 = torch.linalg.cross(b1, b2, dim=-1)
    return torch.stack([b1, b2, b3], dim=-1)


def matrix_to_rot6d(R, tol=1e-5):
    """ 6D rotations from rotation matrices: the first two columns.

    Args
    ----
    R : array_like or Tensor
        Array [..., 3, 3].

    tol : float
        Allowed deviation from orthonormality and unit determinant.

    Raises
    ------
    InvalidInputError
        If an input is not a proper rotation.
    """
    R, was_tensor = _as_tensor(R)
    if tuple(R.shape[-2:]) != (3, 3):
        raise InvalidInputError.shape_mismatch('R', (3, 3), R.shape[-2:])

    eye = torch.eye(3, dtype=R.dtype)
    ortho_err = (R.transpose(-1, -2) @ R - eye).abs()
    if R.numel() and (float(ortho_err.max()) > tol or
                      float((torch.linalg.det(R) - 1.0).abs().max()) > tol):
        raise InvalidInputError("Input is not a rotation matrix (orthonormal, det +1)")

    out = torch.cat([R[..., :, 0], R[..., :, 1]], dim=-1)
    return _to_caller(out, was_tensor)
