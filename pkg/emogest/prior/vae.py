""" Transformer VAE prior over fixed-length pose windows."""

import torch
from torch import nn

from emogest.body.bodymodel import PoseSequence
from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary
from emogest.prior.transformer import SkipTransformer, skip_transformer_parameter_count


class PriorOptions(OptionsDictionary):
    """ Architecture of the motion prior."""

    def __init__(self, **values):
        super(PriorOptions, self).__init__()
        self.add_option('n_joints', 47, low=1, desc='Joints J per frame (6J pose values).')
        self.add_option('window', 300, low=1, desc='Frames T per training window.')
        self.add_option('latent_dim', 256, low=1, desc='Width of the motion latent.')
        self.add_option('hidden', 1024, low=1, desc='Token width of both transformers.')
        self.add_option('ff_dim', 1024, low=1, desc='Feed-forward width.')
        self.add_option('layers', 9, low=1, desc='Layers per transformer, odd.')
        self.add_option('heads', 4, low=1, desc='Attention heads.')
        self.add_option('dropout', 0.1, low=0.0, high=1.0, desc='Dropout rate.')
        self.update(values)

    @property
    def pose_dim(self):
        return 6 * self['n_joints']


class PriorEncoder(nn.Module):
    """ Maps a pose window to the mean and log-variance of a diagonal
    Gaussian. Two learned distribution tokens are prepended to the projected
    frames; their outputs give the mean and the log-variance."""

    def __init__(self, options):
        super(PriorEncoder, self).__init__()
        d = options['hidden']
        self.window = options['window']
        self.pose_dim = options.pose_dim

        self.input_proj = nn.Linear(self.pose_dim, d)
        self.dist_tokens = nn.Parameter(torch.randn(2, d) * 0.02)
        self.pos_embedding = nn.Parameter(torch.randn(self.window + 2, d) * 0.02)
        self.transformer = SkipTransformer(d, options['layers'], options['heads'],
                                           options['ff_dim'], options['dropout'])
        self.mu_head = nn.Linear(d, options['latent_dim'])
        self.logvar_head = nn.Linear(d, options['latent_dim'])

    def forward(self, m):
        """
        Args
        ----
        m : Tensor
            Poses [B x T x 6J].

        Returns
        -------
        tuple
            mu [B x d_m], logvar [B x d_m].
        """
        if m.dim() != 3 or m.shape[1] != self.window or m.shape[2] != self.pose_dim:
            raise InvalidInputError.shape_mismatch('pose window',
                                                   ('B', self.window, self.pose_dim), m.shape)
        tokens = self.input_proj(m)
        dist = self.dist_tokens.unsqueeze(0).expand(m.shape[0], -1, -1)
        out = self.transformer(torch.cat([dist, tokens], dim=1), self.pos_embedding)
        return self.mu_head(out[:, 0]), self.logvar_head(out[:, 1])


class PriorDecoder(nn.Module):
    """ Decodes a latent into a pose window. The query sequence is the
    positional encoding of zeros, so it carries nothing but a learned
    position per frame; the projected latent is the single memory token of
    every cross-attention."""

    def __init__(self, options):
        super(PriorDecoder, self).__init__()
        d = options['hidden']
        self.window = options['window']
        self.latent_dim = options['latent_dim']

        self.latent_proj = nn.Linear(self.latent_dim, d)
        self.query_pos = nn.Parameter(torch.randn(self.window, d) * 0.02)
        self.transformer = SkipTransformer(d, options['layers'], options['heads'],
                                           options['ff_dim'], options['dropout'], cross=True)
        self.output_proj = nn.Linear(d, options.pose_dim)

    def forward(self, z, n_frames=None):
        """
        Args
        ----
        z : Tensor
            Latents [B x d_m].

        n_frames : int, optional
            Must equal the training window when given.

        Returns
        -------
        Tensor
            Poses [B x T x 6J].
        """
        if n_frames is not None and n_frames != self.window:
            raise InvalidInputError("The prior decodes windows of %d frames, %d requested"
                                    % (self.window, n_frames))
        if z.dim() != 2 or z.shape[1] != self.latent_dim:
            raise InvalidInputError.shape_mismatch('latent', ('B', self.latent_dim), z.shape)

        memory = self.latent_proj(z).unsqueeze(1)
        # zero queries plus their positional embedding
        queries = self.query_pos.unsqueeze(0).expand(z.shape[0], -1, -1)
        out = self.transformer(queries, self.query_pos, memory)
        return self.output_proj(out)


class MotionPrior(nn.Module):
    """ Encoder and decoder of the motion prior.

    Args
    ----
    options : `PriorOptions`, optional
        Architecture; defaults to `PriorOptions()`.
    """

    def __init__(self, options=None):
        super(MotionPrior, self).__init__()
        self.options = options if options is not None else PriorOptions()
        self.encoder = PriorEncoder(self.options)
        self.decoder = PriorDecoder(self.options)

    def forward(self, m, generator=None):
        """ Encodes, samples with the reparameterization trick and decodes.

        Returns
        -------
        tuple
            Reconstruction, mu, sigma.
        """
        mu, logvar = self.encoder(m)
        sigma = torch.exp(0.5 * logvar)
        z = reparameterize(mu, sigma, generator)
        return self.decoder(z), mu, sigma


def reparameterize(mu, sigma, generator=None):
    """ z = mu + sigma * eps with eps ~ N(0, I) drawn from `generator`."""
    eps = torch.randn(mu.shape, generator=generator, dtype=mu.dtype, device=mu.device)
    return mu + sigma * eps


def _pose_batch(m):
    if isinstance(m, PoseSequence):
        return m.to_tensor().unsqueeze(0), True
    if m.dim() == 2:
        return m.unsqueeze(0), True
    return m, False


def encode_motion(m, enc, sample=False, seed=None):
    """ Encodes pose windows into the motion latent.

    Args
    ----
    m : `PoseSequence` or Tensor
        A sequence, a tensor [T x 6J], or a batch [B x T x 6J].

    enc : `PriorEncoder`
        Encoder of the motion prior.

    sample : bool
        Draw z = mu + sigma * eps when True, otherwise z = mu.

    seed : int, optional
        Seed of the noise draw.

    Returns
    -------
    tuple
        mu, sigma, z; unbatched when `m` was a single sequence.
    """
    x, single = _pose_batch(m)
    x = x.to(next(enc.parameters()).dtype)
    mu, logvar = enc(x)
    sigma = torch.exp(0.5 * logvar)
    if sample:
        generator = torch.Generator(device=mu.device)
        if seed is not None:
            generator.manual_seed(int(seed))
        z = reparameterize(mu, sigma, generator)
    else:
        z = mu
    if single:
        return mu[0], sigma[0], z[0]
    return mu, sigma, z


def decode_motion(z, dec, n_frames=None, fps=30):
    """ Decodes motion latents.

    Args
    ----
    z : Tensor
        A latent [d_m] or a batch [B x d_m].

    dec : `PriorDecoder`
        Decoder of the motion prior.

    n_frames : int, optional
        Requested length; must equal the training window.

    fps : int
        Frame rate given to the returned sequence.

    Returns
    -------
    `PoseSequence` or Tensor
        A `PoseSequence` for a single latent, a tensor [B x T x 6J]
        otherwise.
    """
    if not torch.isfinite(z).all():
        raise InvalidInputError.not_finite('latent')
    if z.dim() == 1:
        poses = dec(z.unsqueeze(0), n_frames)[0]
        return PoseSequence(poses.detach().cpu().numpy(), fps, poses.shape[-1] // 6)
    return dec(z, n_frames)


def expected_parameter_count(options):
    """ Trainable parameters of a `MotionPrior` built from `options`.

    With the defaults (J = 47, T = 300, width 1024, 9 layers) the encoder has
    66,235,904 parameters and the decoder 103,773,466.

    Returns
    -------
    tuple
        Encoder count, decoder count.
    """
    d = options['hidden']
    f = options['ff_dim']
    m = options['latent_dim']
    p = options.pose_dim
    t = options['window']
    layers = options['layers']

    encoder = (p * d + d) + 2 * d + (t + 2) * d + \
        skip_transformer_parameter_count(d, layers, f) + 2 * (d * m + m)
    decoder = (m * d + d) + t * d + \
        skip_transformer_parameter_count(d, layers, f, cross=True) + (d * p + p)
    return encoder, decoder
