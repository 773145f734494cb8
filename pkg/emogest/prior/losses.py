""" Reconstruction and KL losses of the motion prior."""

import torch
import torch.nn.functional as F

from emogest.core.errors import InvalidInputError


def _check_same_shape(name, x, y):
    if tuple(x.shape) != tuple(y.shape):
        raise InvalidInputError.shape_mismatch(name, x.shape, y.shape)


def smooth_l1(x, y):
    """ Element-wise 0.5 d^2 for |d| < 1 and |d| - 0.5 otherwise, averaged
    over all elements."""
    x = torch.as_tensor(x)
    y = torch.as_tensor(y, dtype=x.dtype)
    _check_same_shape('smooth_l1 operand', x, y)
    return F.smooth_l1_loss(x, y, reduction='mean', beta=1.0)


def kl_loss(mu, sigma):
    """ KL divergence of N(mu, diag(sigma^2)) from N(0, I).

    Args
    ----
    mu : Tensor
        Means [d] or [B x d].

    sigma : Tensor
        Standard deviations, same shape, strictly positive.

    Returns
    -------
    Tensor
        0.5 * sum(mu^2 + sigma^2 - log(sigma^2) - 1) over the latent
        dimension, averaged over the batch.
    """
    mu = torch.as_tensor(mu)
    sigma = torch.as_tensor(sigma, dtype=mu.dtype)
    _check_same_shape('sigma', mu, sigma)
    if bool((sigma <= 0).any()):
        raise InvalidInputError("KL loss needs strictly positive sigma")

    var = sigma * sigma
    per_sample = 0.5 * (mu * mu + var - torch.log(var) - 1.0).sum(dim=-1)
    return per_sample.mean()


class PriorLossBundle(object):
    """ The three motion prior terms; `l_kl` is already weighted."""

    def __init__(self, l_rec, l_vrec, l_kl):
        self.l_rec = l_rec
        self.l_vrec = l_vrec
        self.l_kl = l_kl

    def total(self):
        return self.l_rec + self.l_vrec + self.l_kl

    def as_dict(self):
        return {'l_rec': float(self.l_rec), 'l_vrec': float(self.l_vrec),
                'l_kl': float(self.l_kl)}


def prior_losses(m, m_hat, V, V_hat, mu, sigma, kl_weight=1e-4):
    """ Pose reconstruction, vertex reconstruction and weighted KL terms.

    Args
    ----
    m, m_hat : Tensor
        Ground truth and reconstructed poses.

    V, V_hat : Tensor
        Vertices of both pose tensors from the same body model.

    mu, sigma : Tensor
        Posterior parameters.

    kl_weight : float
        Factor of the KL term; 0 drops it from the graph.

    Returns
    -------
    `PriorLossBundle`
    """
    _check_same_shape('reconstructed poses', m, m_hat)
    _check_same_shape('reconstructed vertices', V, V_hat)
    l_rec = smooth_l1(m_hat, m)
    l_vrec = smooth_l1(V_hat, V)
    if kl_weight == 0:
        l_kl = torch.zeros((), dtype=l_rec.dtype, device=l_rec.device)
    else:
        l_kl = kl_weight * kl_loss(mu, sigma)
    return PriorLossBundle(l_rec, l_vrec, l_kl)
