""" Patch transformer encoders and the fusion decoder of the audio model."""

import warnings

import torch
import torch.nn.functional as F
from torch import nn

from emogest.audio.features import Filterbank, FilterbankStats
from emogest.audio.patches import patch_grid, patchify
from emogest.core.checkpoint import save_checkpoint, load_checkpoint
from emogest.core.errors import InvalidInputError
from emogest.core.options import OptionsDictionary
from emogest.disentangle.latents import AudioLatents


class AudioModelOptions(OptionsDictionary):
    """ Architecture of the speech disentanglement model."""

    def __init__(self, **values):
        super(AudioModelOptions, self).__init__()
        self.add_option('n_frames', 1024, low=1, desc='Filterbank frames.')
        self.add_option('n_mels', 128, low=1, desc='Filterbank mel bins.')
        self.add_option('patch_size', 16, low=1, desc='Side of a square patch.')
        self.add_option('patch_overlap', 6, low=0, desc='Overlap of neighbouring patches.')
        self.add_option('embed_dim', 768, low=1, desc='Token width of the encoders.')
        self.add_option('depth', 12, low=1, desc='Layers per encoder.')
        self.add_option('heads', 12, low=1, desc='Attention heads per encoder layer.')
        self.add_option('mlp_ratio', 4.0, low=0.0, desc='Feed-forward width over token width.')
        self.add_option('dropout', 0.0, low=0.0, high=1.0, desc='Dropout rate.')
        self.add_option('latent_dim', 256, low=1, desc='Width of each latent.')
        self.add_option('n_emotions', 8, low=2, desc='Emotion classes.')
        self.add_option('n_styles', 30, low=2, desc='Style (speaker) classes.')
        self.add_option('fusion_dim', 768, low=1, desc='Token width of the fusion layers.')
        self.add_option('fusion_layers', 2, low=1, desc='Fusion layers.')
        self.add_option('fusion_heads', 4, low=1, desc='Fusion attention heads.')
        self.add_option('decoder_dim', 768, low=1, desc='Token width of the decoder.')
        self.add_option('decoder_layers', 4, low=1, desc='Decoder layers.')
        self.add_option('decoder_heads', 4, low=1, desc='Decoder attention heads.')
        self.update(values)

    @property
    def grid(self):
        return patch_grid(self['n_frames'], self['n_mels'], self['patch_size'],
                          self['patch_overlap'])

    @property
    def n_patches(self):
        n_t, n_f = self.grid
        return n_t * n_f


def _encoder_layers(width, heads, ff_dim, dropout, depth):
    layer = nn.TransformerEncoderLayer(width, heads, ff_dim, dropout, activation='gelu',
                                       batch_first=True, norm_first=True)
    return nn.TransformerEncoder(layer, depth, enable_nested_tensor=False)


class PatchEncoder(nn.Module):
    """ Patch transformer with CLS and DIST tokens. The pooled output is the
    average of both token outputs; a linear head projects it to the latent.

    Args
    ----
    options : `AudioModelOptions`
        Architecture.
    """

    def __init__(self, options):
        super(PatchEncoder, self).__init__()
        p = options['patch_size']
        width = options['embed_dim']
        self.n_patches = options.n_patches

        self.patch_proj = nn.Linear(p * p, width)
        self.cls_token = nn.Parameter(torch.zeros(1, 1, width))
        self.dist_token = nn.Parameter(torch.zeros(1, 1, width))
        self.pos_embedding = nn.Parameter(torch.randn(1, self.n_patches + 2, width) * 0.02)
        self.dropout = nn.Dropout(options['dropout'])
        self.blocks = _encoder_layers(width, options['heads'],
                                      int(width * options['mlp_ratio']), options['dropout'],
                                      options['depth'])
        self.norm = nn.LayerNorm(width)
        self.latent_head = nn.Linear(width, options['latent_dim'])

    def forward(self, patches):
        """
        Args
        ----
        patches : Tensor
            [B x N x p*p].

        Returns
        -------
        tuple
            Latent [B x d], pooled token [B x width].
        """
        if patches.dim() != 3 or patches.shape[1] != self.n_patches:
            raise InvalidInputError.shape_mismatch('patches', ('B', self.n_patches, 'p*p'),
                                                   patches.shape)
        b = patches.shape[0]
        tokens = torch.cat([self.cls_token.expand(b, -1, -1), self.dist_token.expand(b, -1, -1),
                            self.patch_proj(patches)], dim=1)
        out = self.norm(self.blocks(self.dropout(tokens + self.pos_embedding)))
        pooled = 0.5 * (out[:, 0] + out[:, 1])
        return self.latent_head(pooled), pooled


class EncoderStack(nn.Module):
    """ Content, emotion and style encoders of identical architecture with
    separate parameters, plus the emotion and style classifier heads."""

    def __init__(self, options):
        super(EncoderStack, self).__init__()
        self.options = options
        self.content_encoder = PatchEncoder(options)
        self.emotion_encoder = PatchEncoder(options)
        self.style_encoder = PatchEncoder(options)
        self.emotion_head = nn.Linear(options['embed_dim'], options['n_emotions'])
        self.style_head = nn.Linear(options['embed_dim'], options['n_styles'])

    def forward(self, patches):
        """
        Returns
        -------
        dict
            'content', 'emotion', 'style' latents [B x d] and
            'emotion_logits', 'style_logits'.
        """
        content, _ = self.content_encoder(patches)
        emotion, emotion_pooled = self.emotion_encoder(patches)
        style, style_pooled = self.style_encoder(patches)
        return {'content': content, 'emotion': emotion, 'style': style,
                'emotion_logits': self.emotion_head(emotion_pooled),
                'style_logits': self.style_head(style_pooled)}

    def encoders(self):
        return [self.content_encoder, self.emotion_encoder, self.style_encoder]

    def import_patch_weights(self, state_dict, strict=False):
        """ Loads externally converted patch transformer weights into all
        three encoders. Entries whose shape differs from the encoder's are
        skipped with a warning.

        Args
        ----
        state_dict : dict
            Keys in the naming of `PatchEncoder`.

        strict : bool
            Raise when an encoder key is missing from `state_dict`.

        Returns
        -------
        list of str
            Encoder keys that were not loaded.
        """
        own = self.content_encoder.state_dict()
        usable = {}
        for name, value in state_dict.items():
            if name not in own:
                continue
            if tuple(value.shape) != tuple(own[name].shape):
                warnings.warn("Skipping imported weight '%s' of shape %s, expected %s"
                              % (name, tuple(value.shape), tuple(own[name].shape)))
                continue
            usable[name] = value

        missing = sorted(set(own) - set(usable))
        if strict and missing:
            raise InvalidInputError("Imported weights lack: %s" % ', '.join(missing))
        for encoder in self.encoders():
            encoder.load_state_dict(usable, strict=False)
        return missing


class FusionDecoder(nn.Module):
    """ Fuses a latent triple into one embedding and decodes it to patches.

    The fusion stage lets one learned query attend to the three projected
    latents. The decoder stage attends from one learned query per patch to
    the fused embedding and predicts the patch values; overlapping patch
    predictions are averaged back into a filterbank.
    """

    def __init__(self, options):
        super(FusionDecoder, self).__init__()
        self.options = options
        p = options['patch_size']
        fusion = options['fusion_dim']
        width = options['decoder_dim']
        self.n_patches = options.n_patches

        self.latent_proj = nn.Linear(options['latent_dim'], fusion)
        self.factor_embedding = nn.Parameter(torch.randn(1, 3, fusion) * 0.02)
        self.fusion_query = nn.Parameter(torch.randn(1, 1, fusion) * 0.02)
        layer = nn.TransformerDecoderLayer(fusion, options['fusion_heads'], 4 * fusion,
                                           options['dropout'], activation='gelu',
                                           batch_first=True, norm_first=True)
        self.fusion = nn.TransformerDecoder(layer, options['fusion_layers'],
                                            norm=nn.LayerNorm(fusion))

        self.fused_proj = nn.Linear(fusion, width)
        self.patch_queries = nn.Parameter(torch.randn(1, self.n_patches, width) * 0.02)
        layer = nn.TransformerDecoderLayer(width, options['decoder_heads'], 4 * width,
                                           options['dropout'], activation='gelu',
                                           batch_first=True, norm_first=True)
        self.decoder = nn.TransformerDecoder(layer, options['decoder_layers'],
                                             norm=nn.LayerNorm(width))
        self.patch_head = nn.Linear(width, p * p)

    def fuse(self, content, emotion, style):
        tokens = self.latent_proj(torch.stack([content, emotion, style], dim=1))
        query = self.fusion_query.expand(content.shape[0], -1, -1)
        return self.fusion(query, tokens + self.factor_embedding)

    def forward(self, content, emotion, style):
        """ Patch predictions [B x N x p*p] of latent triples [B x d]."""
        fused = self.fused_proj(self.fuse(content, emotion, style))
        queries = self.patch_queries.expand(content.shape[0], -1, -1) + fused
        return self.patch_head(self.decoder(queries, fused))

    def fold(self, patches):
        """ Averages patches [..., N, p*p] into filterbanks [..., F, M].

        Returns
        -------
        tuple
            Filterbank values and a boolean coverage mask [F x M]; cells
            under no patch are zero.
        """
        p = self.options['patch_size']
        stride = p - self.options['patch_overlap']
        size = (self.options['n_frames'], self.options['n_mels'])
        lead = patches.shape[:-2]

        cols = patches.reshape(-1, self.n_patches, p * p).transpose(1, 2)
        total = F.fold(cols, size, kernel_size=p, stride=stride)
        ones = torch.ones(1, p * p, self.n_patches, dtype=patches.dtype, device=patches.device)
        counts = F.fold(ones, size, kernel_size=p, stride=stride)[0, 0]

        covered = counts > 0
        values = total[:, 0] / counts.clamp(min=1.0)
        return values.reshape(lead + size), covered


class AudioModel(nn.Module):
    """ Encoders, fusion decoder and the filterbank statistics they were
    trained with.

    Args
    ----
    options : `AudioModelOptions`, optional
        Architecture.

    stats : `FilterbankStats`, optional
        Corpus statistics applied before encoding.
    """

    def __init__(self, options=None, stats=None):
        super(AudioModel, self).__init__()
        self.options = options if options is not None else AudioModelOptions()
        self.encoders = EncoderStack(self.options)
        self.decoder = FusionDecoder(self.options)
        self.stats = stats if stats is not None else FilterbankStats(0.0, 1.0)

    def patches_of(self, fb):
        """ Patch sequence of a raw or standardized filterbank."""
        if not fb.standardized:
            fb = self.stats.apply(fb)
        return patchify(fb, self.options['patch_size'], self.options['patch_overlap'])

    def latents(self, fb):
        """ Latent triple of one filterbank."""
        return encode(self.patches_of(fb), self.encoders)

    def save(self, path, extra=None):
        extra = dict(extra or {})
        extra['stats'] = self.stats.to_dict()
        save_checkpoint(path, 'audio_model', {'audio_model': self.options},
                        {'encoders': self.encoders, 'decoder': self.decoder}, extra)

    @classmethod
    def load(cls, path, expected=None):
        """ Rebuilds a model saved with `save`.

        Args
        ----
        path : str
            Checkpoint file.

        expected : `AudioModelOptions`, optional
            Architecture the checkpoint must match.
        """
        payload = load_checkpoint(path, 'audio_model',
                                  None if expected is None else {'audio_model': expected})
        model = cls(AudioModelOptions(**payload['options']['audio_model']),
                    FilterbankStats.from_dict(payload['extra']['stats']))
        model.encoders.load_state_dict(payload['state']['encoders'])
        model.decoder.load_state_dict(payload['state']['decoder'])
        return model


def encode(a, enc):
    """ Content, emotion and style latents of one patch sequence.

    Args
    ----
    a : `PatchSequence`
        Tiling of a standardized filterbank.

    enc : `EncoderStack`
        Encoders; call ``eval()`` first for deterministic output.

    Returns
    -------
    `AudioLatents`
    """
    x = a.to_tensor().unsqueeze(0)
    if x.shape[1] != enc.options.n_patches or x.shape[2] != enc.options['patch_size'] ** 2:
        raise InvalidInputError.shape_mismatch('patch sequence',
                                               (enc.options.n_patches,
                                                enc.options['patch_size'] ** 2), x.shape[1:])
    dtype = next(enc.parameters()).dtype
    with torch.no_grad():
        out = enc(x.to(dtype))
    return AudioLatents(out['content'][0], out['emotion'][0], out['style'][0])


def decode(l, fd):
    """ Filterbank decoded from a latent triple.

    Args
    ----
    l : `AudioLatents`
        Latent triple.

    fd : `FusionDecoder`
        Decoder.

    Returns
    -------
    `Filterbank`
        Standardized values of the canonical shape; cells outside the patch
        tiling are zero.
    """
    if l.dim != fd.options['latent_dim']:
        raise InvalidInputError.shape_mismatch('latents', (fd.options['latent_dim'],), (l.dim,))
    dtype = next(fd.parameters()).dtype
    triple = l.as_tensor(dtype).unsqueeze(1)
    with torch.no_grad():
        values, _ = fd.fold(fd(triple[0], triple[1], triple[2]))
    return Filterbank(values[0].cpu().numpy(), standardized=True)
