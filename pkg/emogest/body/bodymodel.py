""" Pose sequences and differentiable pose-to-vertices layers."""

import json
import os

import numpy as np
import torch

from emogest.body.rotations import IDENTITY_6D, safe_rot6d_to_matrix
from emogest.body.skeleton import Skeleton
from emogest.core.errors import ConfigurationError, InvalidInputError

N_JOINTS = 47
FPS = 30
_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class PoseSequence(object):
    """ T frames of 6D joint rotations.

    Args
    ----
    frames : array_like
        Array [T x 6J].

    fps : int
        Frame rate.

    n_joints : int
        J, the number of joints per frame.
    """

    def __init__(self, frames, fps=FPS, n_joints=N_JOINTS):
        frames = np.asarray(frames, dtype=np.float32)
        if frames.ndim != 2 or frames.shape[1] != 6 * n_joints:
            raise InvalidInputError.shape_mismatch('pose frames', ('T', 6 * n_joints),
                                                   frames.shape)
        if frames.shape[0] == 0:
            raise InvalidInputError.empty('pose frames')
        if not np.all(np.isfinite(frames)):
            raise InvalidInputError.not_finite('pose frames')
        self.frames = frames
        self.fps = int(fps)
        self.n_joints = int(n_joints)

    @property
    def n_frames(self):
        return self.frames.shape[0]

    @property
    def duration_s(self):
        return self.n_frames / float(self.fps)

    def rot6d(self):
        """ Frames as an array [T x J x 6]."""
        return self.frames.reshape(self.n_frames, self.n_joints, 6)

    def to_tensor(self):
        return torch.from_numpy(self.frames.copy())

    def window(self, start, stop):
        return PoseSequence(self.frames[start:stop], self.fps, self.n_joints)

    @classmethod
    def identity(cls, n_frames, n_joints=N_JOINTS, fps=FPS):
        frames = np.tile(np.asarray(IDENTITY_6D, dtype=np.float32), (n_frames, n_joints))
        return cls(frames, fps, n_joints)

    def write(self, dirname):
        """ Writes ``meta.json`` and little-endian ``frames.f32`` into
        `dirname`, creating it if needed."""
        if not os.path.isdir(dirname):
            os.makedirs(dirname)
        meta = {'fps': self.fps, 'frames': self.n_frames, 'joints': self.n_joints,
                'layout': 'rot6d'}
        with open(os.path.join(dirname, 'meta.json'), 'w') as out:
            json.dump(meta, out, sort_keys=True)
        self.frames.astype('<f4').tofile(os.path.join(dirname, 'frames.f32'))

    @classmethod
    def read(cls, dirname):
        with open(os.path.join(dirname, 'meta.json')) as inp:
            meta = json.load(inp)
        if meta.get('layout') != 'rot6d':
            raise InvalidInputError("Unsupported motion layout '%s'" % meta.get('layout'))
        frames = np.fromfile(os.path.join(dirname, 'frames.f32'), dtype='<f4')
        frames = frames.reshape(meta['frames'], 6 * meta['joints'])
        return cls(frames, meta['fps'], meta['joints'])


class BodyModel(torch.nn.Module):
    """ Linear blend skinning with zero shape and expression.

    Args
    ----
    skeleton : `Skeleton`
        Kinematic tree of the model.

    rest_vertices : array_like
        Rest-pose vertices [V x 3].

    weights : array_like
        Blend weights [V x skeleton.n_joints], rows summing to 1.

    pose_joints : list of int, optional
        Skeleton joint driven by each pose slot. Joints not listed keep
        their rest rotation. Defaults to every joint in order.
    """

    def __init__(self, skeleton, rest_vertices, weights, pose_joints=None):
        super(BodyModel, self).__init__()
        self.skeleton = skeleton
        if pose_joints is None:
            pose_joints = list(range(skeleton.n_joints))
        self.pose_joints = list(pose_joints)

        weights = np.asarray(weights, dtype=np.float64)
        rest_vertices = np.asarray(rest_vertices, dtype=np.float64)
        if weights.shape != (rest_vertices.shape[0], skeleton.n_joints):
            raise InvalidInputError.shape_mismatch('blend weights',
                                                   (rest_vertices.shape[0], skeleton.n_joints),
                                                   weights.shape)

        rest_joints = skeleton.rest_joints()
        self.register_buffer('rest_vertices', torch.tensor(rest_vertices, dtype=torch.float32))
        self.register_buffer('weights', torch.tensor(weights, dtype=torch.float32))
        self.register_buffer('rest_joints', torch.tensor(rest_joints, dtype=torch.float32))
        self.register_buffer('offsets', torch.tensor(skeleton.offsets, dtype=torch.float32))

    @property
    def n_joints(self):
        """ Number of posed joints J."""
        return len(self.pose_joints)

    @property
    def n_vertices(self):
        return self.rest_vertices.shape[0]

    def check_vertex_count(self, n_vertices):
        """ Raises ConfigurationError unless this body has `n_vertices`."""
        if n_vertices != self.n_vertices:
            msg = "Body model has %d vertices but the losses were configured for %d"
            raise ConfigurationError(msg % (self.n_vertices, n_vertices))

    def local_rotations(self, rot6d):
        """ Local rotation matrices [..., skeleton joints, 3, 3] of poses
        [..., 6J]."""
        if rot6d.shape[-1] != 6 * self.n_joints:
            raise InvalidInputError.shape_mismatch('pose', ('...', 6 * self.n_joints),
                                                   rot6d.shape)
        rot6d = rot6d.reshape(rot6d.shape[:-1] + (self.n_joints, 6))
        posed = safe_rot6d_to_matrix(rot6d)
        if self.pose_joints == list(range(self.skeleton.n_joints)):
            return posed

        batch = posed.shape[:-3]
        full = torch.eye(3, dtype=posed.dtype, device=posed.device)
        full = full.expand(batch + (self.skeleton.n_joints, 3, 3)).clone()
        full[..., self.pose_joints, :, :] = posed
        return full

    def forward_kinematics(self, rot6d):
        """ Global joint rotations [..., Js, 3, 3] and positions [..., Js, 3]
        of the whole skeleton."""
        local = self.local_rotations(rot6d)
        offsets = self.offsets.to(local.dtype)
        rest = self.rest_joints.to(local.dtype)

        glob = []
        pos = []
        for j, parent in enumerate(self.skeleton.parents):
            if parent < 0:
                glob.append(local[..., j, :, :])
                pos.append(rest[j].expand(local.shape[:-3] + (3,)))
            else:
                glob.append(glob[parent] @ local[..., j, :, :])
                pos.append(pos[parent] + (glob[parent] @ offsets[j].unsqueeze(-1)).squeeze(-1))
        return torch.stack(glob, dim=-3), torch.stack(pos, dim=-2)

    def skin(self, rot6d):
        """ Vertices [..., V, 3] and root position [..., 3], not centered."""
        glob, pos = self.forward_kinematics(rot6d)
        rest = self.rest_joints.to(glob.dtype)
        weights = self.weights.to(glob.dtype)

        trans = pos - (glob @ rest.unsqueeze(-1)).squeeze(-1)
        blend_rot = torch.einsum('vj,...jab->...vab', weights, glob)
        blend_trans = torch.einsum('vj,...ja->...va', weights, trans)
        verts = (blend_rot @ self.rest_vertices.to(glob.dtype).unsqueeze(-1)).squeeze(-1)
        return verts + blend_trans, pos[..., self.skeleton.root, :]

    def forward(self, rot6d):
        """ Root-centered vertices [..., V, 3] of poses [..., 6J]."""
        verts, root = self.skin(rot6d)
        return verts - root.unsqueeze(-2)

    def joints(self, rot6d):
        """ Root-centered positions [..., J, 3] of the posed joints."""
        _, pos = self.forward_kinematics(rot6d)
        pos = pos - pos[..., self.skeleton.root:self.skeleton.root + 1, :]
        return pos[..., self.pose_joints, :]

    def joint_index(self, name):
        """ Pose slot of a named skeleton joint."""
        return self.pose_joints.index(self.skeleton.index(name))


class StubBody(BodyModel):
    """ Procedural body without licensed assets. Every joint owns a small
    golden-angle sphere of vertices around its rest position; the radius is
    40% of the bone to its parent (5 cm at the root, at least 1 cm). A vertex
    blends between its joint and that joint's parent with weights
    proportional to inverse distance; root vertices follow the root only.

    Args
    ----
    skeleton : `Skeleton`, optional
        Defaults to the 47-joint upper body.

    n_vertices : int
        Total vertex count; the first ``n_vertices % J`` joints receive one
        extra vertex.
    """

    def __init__(self, skeleton=None, n_vertices=500):
        if skeleton is None:
            skeleton = Skeleton.upper_body()
        n_joints = skeleton.n_joints
        if n_vertices < n_joints:
            raise InvalidInputError("The stub body needs at least one vertex per joint")

        rest_joints = skeleton.rest_joints()
        lengths = skeleton.bone_lengths()
        base, extra = divmod(n_vertices, n_joints)

        vertices = []
        weights = np.zeros((n_vertices, n_joints))
        row = 0
        for j in range(n_joints):
            count = base + (1 if j < extra else 0)
            parent = skeleton.parents[j]
            radius = 0.05 if parent < 0 else max(0.4 * lengths[j], 0.01)
            for i in range(count):
                y = 1.0 - 2.0 * (i + 0.5) / count
                ring = np.sqrt(1.0 - y * y)
                theta = i * _GOLDEN_ANGLE
                v = rest_joints[j] + radius * np.array([np.cos(theta) * ring, y,
                                                        np.sin(theta) * ring])
                vertices.append(v)
                if parent < 0:
                    weights[row, j] = 1.0
                else:
                    w_self = 1.0 / (np.linalg.norm(v - rest_joints[j]) + 1e-3)
                    w_parent = 1.0 / (np.linalg.norm(v - rest_joints[parent]) + 1e-3)
                    weights[row, j] = w_self / (w_self + w_parent)
                    weights[row, parent] = w_parent / (w_self + w_parent)
                row += 1

        super(StubBody, self).__init__(skeleton, np.array(vertices), weights)
        self.vertex_owner = np.repeat(np.arange(n_joints),
                                      [base + (1 if j < extra else 0) for j in range(n_joints)])


class AssetBody(BodyModel):
    """ Body model loaded from user-supplied assets.

    The ``.npz`` file must hold 'v_template' [V x 3], 'weights' [V x Ja],
    'parents' [Ja] (with -1 for the root) and either 'joints' [Ja x 3] or
    'J_regressor' [Ja x V]. Shape and expression blendshapes are not applied
    since both stay zero.

    Args
    ----
    filename : str
        Asset file.

    joint_map : list of int
        Asset joint index driven by each of the J pose slots.
    """

    def __init__(self, filename, joint_map):
        data = np.load(filename)
        v_template = np.asarray(data['v_template'], dtype=np.float64)
        parents = [int(p) for p in data['parents']]
        if 'joints' in data:
            joints = np.asarray(data['joints'], dtype=np.float64)
        else:
            joints = np.asarray(data['J_regressor'], dtype=np.float64) @ v_template

        offsets = joints.copy()
        for j, parent in enumerate(parents):
            if parent >= 0:
                offsets[j] = joints[j] - joints[parent]
        names = ['asset%d' % j for j in range(len(parents))]

        if len(set(joint_map)) != len(joint_map) or \
           any(j < 0 or j >= len(parents) for j in joint_map):
            raise ConfigurationError("Invalid joint map for body asset '%s'" % filename)

        super(AssetBody, self).__init__(Skeleton(names, parents, offsets), v_template,
                                        np.asarray(data['weights']), pose_joints=joint_map)


def make_body(kind='stub', asset_path='', joint_map=None, n_vertices=500, n_joints=N_JOINTS):
    """ Builds the configured body model. A stub body for other than
    `N_JOINTS` joints is a straight chain."""
    if kind == 'stub':
        if n_joints != N_JOINTS:
            return StubBody(Skeleton.chain(n_joints, 0.3), n_vertices=n_vertices)
        return StubBody(n_vertices=n_vertices)
    if kind == 'asset':
        if not asset_path or joint_map is None:
            raise ConfigurationError("An asset body needs 'body.asset_path' and a joint map")
        return AssetBody(asset_path, joint_map)
    raise ConfigurationError("Unknown body kind '%s'" % kind)


def pose_to_vertices(m, body, translation=None):
    """ Root-centered vertices of a pose sequence.

    Args
    ----
    m : `PoseSequence` or Tensor
        Poses; a tensor has shape [..., T, 6J].

    body : `BodyModel`
        Skinning layer.

    translation : Tensor, optional
        Global translation [..., T, 3]. It moves the root along with every
        vertex, so it cancels under root-centering.

    Returns
    -------
    Tensor
        Vertices [..., T, V, 3], differentiable with respect to `m`.
    """
    if isinstance(m, PoseSequence):
        m = m.to_tensor()
    verts, root = body.skin(m)
    if translation is not None:
        translation = torch.as_tensor(translation, dtype=verts.dtype)
        verts = verts + translation.unsqueeze(-2)
        root = root + translation
    return verts - root.unsqueeze(-2)
