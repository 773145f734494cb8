""" The gesture model and its three-pass joint training step."""

import torch
from torch import nn

from emogest.body.bodymodel import N_JOINTS, make_body, pose_to_vertices
from emogest.core.checkpoint import save_checkpoint, load_checkpoint
from emogest.core.errors import ConfigurationError, InvalidInputError, NumericalError
from emogest.core.options import OptionsDictionary
from emogest.diffusion.denoiser import Denoiser
from emogest.diffusion.sampler import ddim_sample, ld_loss
from emogest.diffusion.schedule import DiffusionOptions, q_sample, schedule_from_options
from emogest.prior.losses import prior_losses, smooth_l1
from emogest.prior.vae import MotionPrior, PriorOptions, reparameterize

TERMS = ('l_rec', 'l_vrec', 'l_kl', 'l_align', 'l_valign', 'l_ld')


class GestureLossWeights(OptionsDictionary):
    """ Factors of the six gesture loss terms. A zero factor removes its
    term, and any pass that only feeds removed terms is skipped."""

    def __init__(self, **values):
        super(GestureLossWeights, self).__init__()
        self.add_option('w_rec', 1.0, low=0.0, desc='Pose reconstruction.')
        self.add_option('w_vrec', 1.0, low=0.0, desc='Vertex reconstruction.')
        self.add_option('kl_weight', 1e-4, low=0.0, desc='KL divergence of the prior.')
        self.add_option('w_align', 1.0, low=0.0, desc='Pose alignment of generated motion.')
        self.add_option('w_valign', 1.0, low=0.0,
                        desc='Vertex alignment of generated motion.')
        self.add_option('w_ld', 1.0, low=0.0, desc='Noise prediction.')
        self.update(values)


class BodyOptions(OptionsDictionary):
    """ Choice of body model."""

    def __init__(self, **values):
        super(BodyOptions, self).__init__()
        self.add_option('kind', 'stub', values=['stub', 'asset'], desc='Body model family.')
        self.add_option('asset_path', '', desc='Asset file of an asset body.')
        self.add_option('n_vertices', 500, low=1, desc='Vertices of the stub body.')
        self.update(values)

    def build(self, joint_map=None, n_joints=N_JOINTS):
        return make_body(self['kind'], self['asset_path'], joint_map, self['n_vertices'],
                         n_joints)


class TrainStepReport(object):
    """ Weighted loss terms of one joint training step.

    Args
    ----
    terms : dict
        Maps a name in `TERMS` to its float value; absent terms are 0.

    grad_norm : float
        Global L2 norm of the gradients that were applied.
    """

    def __init__(self, terms, grad_norm):
        for name in TERMS:
            setattr(self, name, float(terms.get(name, 0.0)))
        self.l_total = sum(getattr(self, name) for name in TERMS)
        self.grad_norm = float(grad_norm)

    def as_dict(self):
        values = dict((name, getattr(self, name)) for name in TERMS)
        values['l_total'] = self.l_total
        values['grad_norm'] = self.grad_norm
        return values


class GestureBatch(object):
    """ Aligned pose windows and audio latents.

    Args
    ----
    poses : Tensor
        Pose windows [B x T x 6J].

    cond : Tensor
        Content, emotion and style latents [B x 3 x d_m] of the same windows.

    keys : list, optional
        Pairs (audio window, motion window) identifying each element; the
        two halves of every pair must agree.
    """

    def __init__(self, poses, cond, keys=None):
        if poses.dim() != 3:
            raise InvalidInputError.shape_mismatch('poses', ('B', 'T', '6J'), poses.shape)
        if cond.dim() != 3 or cond.shape[0] != poses.shape[0] or cond.shape[1] != 3:
            raise InvalidInputError("Audio latents %s do not align with %d pose windows"
                                    % (tuple(cond.shape), poses.shape[0]))
        if keys is not None:
            for audio_key, motion_key in keys:
                if audio_key != motion_key:
                    raise InvalidInputError("Audio window %s is paired with motion window %s"
                                            % (audio_key, motion_key))
        self.poses = poses
        self.cond = cond
        self.keys = keys

    def __len__(self):
        return self.poses.shape[0]


class GestureModel(nn.Module):
    """ Motion prior, denoiser and schedule of the gesture generator.

    Args
    ----
    prior_options : `PriorOptions`, optional
        Prior architecture.

    diffusion_options : `DiffusionOptions`, optional
        Schedule and denoiser architecture.

    body_options : `BodyOptions`, optional
        Body model of the vertex losses.

    body : `BodyModel`, optional
        Prebuilt body; overrides `body_options`, whose vertex count it must
        match. Without `body_options` the count is taken from the body.

    Raises
    ------
    ConfigurationError
        If the model parts or the body disagree on a size.
    """

    def __init__(self, prior_options=None, diffusion_options=None, body_options=None,
                 body=None):
        super(GestureModel, self).__init__()
        self.prior_options = prior_options or PriorOptions()
        self.diffusion_options = diffusion_options or DiffusionOptions()
        if body_options is None:
            body_options = BodyOptions() if body is None else \
                BodyOptions(n_vertices=body.n_vertices)
        self.body_options = body_options

        if self.prior_options['latent_dim'] != self.diffusion_options['latent_dim']:
            raise ConfigurationError.mismatch('Denoiser latent width', ['diffusion.latent_dim'])

        self.prior = MotionPrior(self.prior_options)
        self.denoiser = Denoiser(self.diffusion_options)
        self.schedule = schedule_from_options(self.diffusion_options)
        self.body = body if body is not None else \
            self.body_options.build(n_joints=self.prior_options['n_joints'])
        self.extra = {}
        if self.body.n_joints != self.prior_options['n_joints']:
            raise ConfigurationError("Body model drives %d joints, the prior expects %d"
                                     % (self.body.n_joints, self.prior_options['n_joints']))
        self.body.check_vertex_count(self.body_options['n_vertices'])

    def save(self, path, extra=None):
        save_checkpoint(path, 'gesture_model',
                        {'prior': self.prior_options, 'diffusion': self.diffusion_options,
                         'body': self.body_options},
                        {'prior': self.prior, 'denoiser': self.denoiser}, extra)

    @classmethod
    def load(cls, path, expected=None, body=None):
        """ Rebuilds a model saved with `save`.

        Args
        ----
        path : str
            Checkpoint file.

        expected : dict, optional
            Option groups the stored configuration must match.

        body : `BodyModel`, optional
            Prebuilt body model.
        """
        payload = load_checkpoint(path, 'gesture_model', expected)
        options = payload['options']
        model = cls(PriorOptions(**options['prior']), DiffusionOptions(**options['diffusion']),
                    BodyOptions(**options['body']), body=body)
        model.prior.load_state_dict(payload['state']['prior'])
        model.denoiser.load_state_dict(payload['state']['denoiser'])
        model.extra = payload['extra']
        return model


def gesture_losses(model, batch, weights=None, generator=None, steps=None):
    """ The weighted loss terms of the three-pass forward computation.

    1. The prior encodes, samples and decodes the batch (reconstruction,
       vertex reconstruction and KL terms).
    2. The detached posterior mean is noised at a uniformly drawn timestep
       per element and the denoiser predicts the noise (noise term).
    3. DDIM denoises seeded noise under the batch condition without
       gradients, and the decoder reconstructs the batch from the result
       (alignment terms).

    Args
    ----
    model : `GestureModel`
        Model being trained.

    batch : `GestureBatch`
        Aligned poses and audio latents.

    weights : `GestureLossWeights`, optional
        Term factors.

    generator : torch.Generator, optional
        Source of every random draw.

    steps : int, optional
        DDIM steps of the third pass, defaults to 'steps_infer'.

    Returns
    -------
    dict
        Maps term names to weighted scalar tensors, only for enabled terms.
    """
    if weights is None:
        weights = GestureLossWeights()
    if steps is None:
        steps = model.diffusion_options['steps_infer']
    if batch.poses.shape[1] != model.prior_options['window']:
        raise InvalidInputError("Pose windows have %d frames, the prior expects %d"
                                % (batch.poses.shape[1], model.prior_options['window']))

    dtype = next(model.parameters()).dtype
    poses = batch.poses.to(dtype)
    cond = batch.cond.to(dtype).detach()
    sched = model.schedule
    terms = {}

    use_prior = weights['w_rec'] > 0 or weights['w_vrec'] > 0 or weights['kl_weight'] > 0
    use_align = weights['w_align'] > 0 or weights['w_valign'] > 0
    vertices = None
    if weights['w_vrec'] > 0 or weights['w_valign'] > 0:
        vertices = pose_to_vertices(poses, model.body)

    if use_prior or weights['w_ld'] > 0:
        mu, logvar = model.prior.encoder(poses)
        sigma = torch.exp(0.5 * logvar)
        z = reparameterize(mu, sigma, generator)

        if use_prior:
            m_hat = model.prior.decoder(z)
            if vertices is not None:
                V, V_hat = vertices, pose_to_vertices(m_hat, model.body)
            else:
                V = V_hat = torch.zeros(1, dtype=dtype, device=poses.device)
            bundle = prior_losses(poses, m_hat, V, V_hat, mu, sigma, weights['kl_weight'])
            if weights['w_rec'] > 0:
                terms['l_rec'] = weights['w_rec'] * bundle.l_rec
            if weights['w_vrec'] > 0:
                terms['l_vrec'] = weights['w_vrec'] * bundle.l_vrec
            if weights['kl_weight'] > 0:
                terms['l_kl'] = bundle.l_kl

        if weights['w_ld'] > 0:
            z_m = mu.detach()
            t = torch.randint(0, sched.D, (z_m.shape[0],), generator=generator,
                              device=z_m.device)
            noise = torch.randn(z_m.shape, generator=generator, dtype=dtype, device=z_m.device)
            z_t = q_sample(z_m, t, sched, noise=noise)
            terms['l_ld'] = weights['w_ld'] * ld_loss(noise, model.denoiser(z_t, t, cond))

    if use_align:
        z_gen = ddim_sample(model.denoiser, cond, sched, steps, generator=generator)
        m_gen = model.prior.decoder(z_gen.detach())
        if weights['w_align'] > 0:
            terms['l_align'] = weights['w_align'] * smooth_l1(m_gen, poses)
        if weights['w_valign'] > 0:
            terms['l_valign'] = weights['w_valign'] * smooth_l1(
                pose_to_vertices(m_gen, model.body), vertices)

    return terms


def joint_train_step(batch, model, optimizer, weights=None, generator=None, steps=None,
                     step=0):
    """ One optimizer step on the sum of the enabled gesture loss terms.

    Args
    ----
    batch : `GestureBatch`
        Aligned poses and audio latents.

    model : `GestureModel`
        Model being trained.

    optimizer : torch.optim.Optimizer
        Optimizer over the model parameters.

    weights : `GestureLossWeights`, optional
        Term factors.

    generator : torch.Generator, optional
        Source of every random draw.

    steps : int, optional
        DDIM steps of the alignment pass.

    step : int
        Step number reported when a loss becomes non-finite.

    Returns
    -------
    `TrainStepReport`
    """
    optimizer.zero_grad(set_to_none=True)
    terms = gesture_losses(model, batch, weights, generator, steps)
    if not terms:
        raise ConfigurationError("Every gesture loss weight is zero")

    total = sum(terms.values())
    for name, value in terms.items():
        if not bool(torch.isfinite(value)):
            raise NumericalError.non_finite_loss(name, step)

    total.backward()
    grads = [p.grad for p in model.parameters() if p.grad is not None]
    grad_norm = torch.sqrt(sum((g.double() ** 2).sum() for g in grads)) if grads else 0.0
    optimizer.step()

    return TrainStepReport(dict((name, value.detach()) for name, value in terms.items()),
                           grad_norm)
