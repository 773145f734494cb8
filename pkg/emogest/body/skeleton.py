""" Kinematic trees of the body models."""

import networkx as nx
import numpy as np

from emogest.core.errors import InvalidInputError

# Upper-body joint ordering of the stub body: the 55 joints of the usual
# parametric body layout without the eight hip, knee, ankle and foot joints.
UPPER_BODY_JOINTS = (
    'pelvis', 'spine1', 'spine2', 'spine3', 'neck', 'left_collar',
    'right_collar', 'head', 'left_shoulder', 'right_shoulder', 'left_elbow',
    'right_elbow', 'left_wrist', 'right_wrist', 'jaw', 'left_eye', 'right_eye',
)

_FINGERS = ('index', 'middle', 'pinky', 'ring', 'thumb')

#: Joints whose speed defines kinematic beats.
BEAT_JOINTS = ('left_wrist', 'left_elbow', 'left_shoulder',
               'right_wrist', 'right_elbow', 'right_shoulder')

_BODY_LAYOUT = {
    # name: (parent, offset from parent in meters; x left, y up, z forward)
    'pelvis': (None, (0.0, 0.0, 0.0)),
    'spine1': ('pelvis', (0.0, 0.10, 0.0)),
    'spine2': ('spine1', (0.0, 0.13, 0.0)),
    'spine3': ('spine2', (0.0, 0.05, 0.0)),
    'neck': ('spine3', (0.0, 0.22, 0.0)),
    'left_collar': ('spine3', (0.07, 0.12, 0.0)),
    'right_collar': ('spine3', (-0.07, 0.12, 0.0)),
    'head': ('neck', (0.0, 0.09, 0.02)),
    'left_shoulder': ('left_collar', (0.11, 0.03, 0.0)),
    'right_shoulder': ('right_collar', (-0.11, 0.03, 0.0)),
    'left_elbow': ('left_shoulder', (0.26, 0.0, 0.0)),
    'right_elbow': ('right_shoulder', (-0.26, 0.0, 0.0)),
    'left_wrist': ('left_elbow', (0.25, 0.0, 0.0)),
    'right_wrist': ('right_elbow', (-0.25, 0.0, 0.0)),
    'jaw': ('head', (0.0, -0.02, 0.05)),
    'left_eye': ('head', (0.03, 0.06, 0.08)),
    'right_eye': ('head', (-0.03, 0.06, 0.08)),
}

# Offsets of the three segments of each finger of the left hand.
_FINGER_LAYOUT = {
    'index': ((0.09, 0.0, 0.03), (0.035, 0.0, 0.0), (0.025, 0.0, 0.0)),
    'middle': ((0.095, 0.0, 0.01), (0.04, 0.0, 0.0), (0.027, 0.0, 0.0)),
    'pinky': ((0.08, 0.0, -0.04), (0.025, 0.0, 0.0), (0.02, 0.0, 0.0)),
    'ring': ((0.09, 0.0, -0.015), (0.035, 0.0, 0.0), (0.025, 0.0, 0.0)),
    'thumb': ((0.03, -0.015, 0.04), (0.03, 0.0, 0.02), (0.03, 0.0, 0.01)),
}


class Skeleton(object):
    """ A kinematic tree with rest-pose offsets.

    Args
    ----
    names : list of str
        Joint names; parents must precede their children.

    parents : list of int
        Parent index per joint, -1 for the single root.

    offsets : array_like
        Rest-pose translation [J x 3] of each joint relative to its parent
        (relative to the origin for the root).
    """

    def __init__(self, names, parents, offsets):
        self.names = list(names)
        self.parents = [int(p) for p in parents]
        self.offsets = np.asarray(offsets, dtype=np.float64).reshape(len(self.names), 3)

        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.names)))
        for child, parent in enumerate(self.parents):
            if parent >= child:
                raise InvalidInputError("Joint '%s' is listed before its parent"
                                        % self.names[child])
            if parent >= 0:
                graph.add_edge(parent, child)
        if not nx.is_arborescence(graph):
            raise InvalidInputError("Skeleton must be a tree with a single root")
        self.graph = graph

    @property
    def n_joints(self):
        return len(self.names)

    @property
    def root(self):
        return self.parents.index(-1)

    def index(self, name):
        return self.names.index(name)

    def descendants(self, joint):
        """ Indices of every joint below `joint` in the tree."""
        return sorted(nx.descendants(self.graph, joint))

    def rest_joints(self):
        """ Rest-pose joint positions [J x 3]."""
        positions = np.zeros((self.n_joints, 3))
        for j, parent in enumerate(self.parents):
            base = positions[parent] if parent >= 0 else 0.0
            positions[j] = base + self.offsets[j]
        return positions

    def bone_lengths(self):
        return np.linalg.norm(self.offsets, axis=1)

    @classmethod
    def upper_body(cls):
        """ The 47-joint upper-body stub: 17 body joints then 15 joints for
        each hand (index, middle, pinky, ring, thumb; three segments each)."""
        names = list(UPPER_BODY_JOINTS)
        parents = []
        offsets = []
        for name in UPPER_BODY_JOINTS:
            parent, offset = _BODY_LAYOUT[name]
            parents.append(-1 if parent is None else names.index(parent))
            offsets.append(offset)

        for side, sign in (('left', 1.0), ('right', -1.0)):
            for finger in _FINGERS:
                parent = names.index('%s_wrist' % side)
                for seg, offset in enumerate(_FINGER_LAYOUT[finger]):
                    names.append('%s_%s%d' % (side, finger, seg + 1))
                    parents.append(parent)
                    offsets.append((sign * offset[0], offset[1], offset[2]))
                    parent = len(names) - 1

        return cls(names, parents, offsets)

    @classmethod
    def chain(cls, n_joints, length=1.0):
        """ A straight chain along +x, the root at the origin."""
        names = ['joint%d' % i for i in range(n_joints)]
        parents = [i - 1 for i in range(n_joints)]
        offsets = [(0.0, 0.0, 0.0)] + [(length, 0.0, 0.0)] * (n_joints - 1)
        return cls(names, parents, offsets)
