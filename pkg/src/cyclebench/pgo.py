"""Pose-graph data model, g2o I/O and the least-squares objective.

Edge ``k`` with endpoints ``(i, j)`` measures ``T_i^-1 T_j``.  Information
matrices use the twist ordering of :mod:`cyclebench.liegroup` (rotation
first); the g2o files list translation first and are permuted on the way in
and out.

Planar records are embedded into SE(3): heading becomes rotation about z and
the three unconstrained coordinates (roll, pitch, z) get a stiff prior.
"""
from __future__ import annotations

import io
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from . import liegroup as lg
from .errors import DisconnectedGraph, ParseError, UnknownTagWarning
from .graph import Graph
from .liegroup import Transform

STIFF_PRIOR = 1e6
# g2o lists [x y z roll pitch yaw]; internal order is [rot(3), trans(3)]
_G2O_TO_TWIST = np.array([3, 4, 5, 0, 1, 2])
_TWIST_TO_G2O = np.argsort(_G2O_TO_TWIST)
# planar (x, y, theta) -> twist indices
_SE2_TO_TWIST = np.array([3, 4, 2])
_IGNORED_TAGS = {"FIX", "PARAMS_SE3OFFSET", "VERTEX_TRACKXYZ"}


@dataclass
class Measurement:
    edge_id: int
    source: int
    target: int
    transform: Transform
    information: np.ndarray


@dataclass
class PoseGraph:
    """Poses indexed densely ``0..n-1`` plus ordered relative measurements.

    ``vertex_ids`` keeps the ids found in the file, ``vertex_ids[i]`` being
    the id of dense vertex ``i``.
    """

    poses: list
    measurements: list
    vertex_ids: list = field(default_factory=list)
    planar: bool = False

    def __post_init__(self):
        if not self.vertex_ids:
            self.vertex_ids = list(range(len(self.poses)))

    @property
    def vertex_count(self) -> int:
        return len(self.poses)

    @property
    def edge_count(self) -> int:
        return len(self.measurements)

    @property
    def cycle_rank(self) -> int:
        return self.edge_count - self.vertex_count + 1

    def topology(self, weights=None) -> Graph:
        """Undirected topology graph with edge ``k`` for measurement ``k``."""
        if weights is None:
            return Graph(self.vertex_count, ((m.source, m.target) for m in self.measurements))
        return Graph(
            self.vertex_count,
            ((m.source, m.target, w) for m, w in zip(self.measurements, weights)),
        )

    def with_poses(self, poses) -> "PoseGraph":
        return PoseGraph(list(poses), self.measurements, list(self.vertex_ids), self.planar)


def _floats(fields, line_number, count, tag):
    if len(fields) != count:
        raise ParseError(line_number, f"{tag} expects {count} numeric fields, got {len(fields)}")
    try:
        return [float(f) for f in fields]
    except ValueError as exc:
        raise ParseError(line_number, f"bad number in {tag}: {exc}") from None


def _vertex_id(text, line_number):
    try:
        return int(text)
    except ValueError:
        raise ParseError(line_number, f"bad vertex id {text!r}") from None


def _quat_rotation(qx, qy, qz, qw, line_number):
    q = np.array([qx, qy, qz, qw])
    if not np.isfinite(q).all() or np.linalg.norm(q) < 1e-12:
        raise ParseError(line_number, "degenerate quaternion")
    return Rotation.from_quat(q).as_matrix()


def _upper_to_symmetric(values, n):
    M = np.zeros((n, n))
    M[np.triu_indices(n)] = values
    return M + np.triu(M, 1).T


def _se2_transform(x, y, theta):
    c, s = np.cos(theta), np.sin(theta)
    R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return Transform(R, np.array([x, y, 0.0]))


def _embed_se2_information(info3):
    M = np.zeros((6, 6))
    M[np.ix_(_SE2_TO_TWIST, _SE2_TO_TWIST)] = info3
    for i in (0, 1, 5):
        M[i, i] = STIFF_PRIOR
    return M


def parse_g2o(stream) -> PoseGraph:
    """Read a g2o pose graph from a text stream or string.

    Supports ``VERTEX_SE3:QUAT``, ``EDGE_SE3:QUAT``, ``VERTEX_SE2`` and
    ``EDGE_SE2``.  Unknown tags are skipped with :class:`UnknownTagWarning`;
    ``#`` starts a comment.  Vertices referenced only by edges start at the
    identity.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    vertices = {}
    raw_edges = []
    kinds = set()
    for line_number, line in enumerate(stream, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *fields = line.split()
        if tag == "VERTEX_SE3:QUAT":
            vid = _vertex_id(fields[0], line_number) if fields else None
            x, y, z, qx, qy, qz, qw = _floats(fields[1:], line_number, 7, tag)
            pose = Transform(_quat_rotation(qx, qy, qz, qw, line_number), np.array([x, y, z]))
            kinds.add(3)
        elif tag == "VERTEX_SE2":
            vid = _vertex_id(fields[0], line_number) if fields else None
            x, y, th = _floats(fields[1:], line_number, 3, tag)
            pose = _se2_transform(x, y, th)
            kinds.add(2)
        elif tag == "EDGE_SE3:QUAT":
            if len(fields) < 2:
                raise ParseError(line_number, f"{tag} is missing vertex ids")
            i, j = _vertex_id(fields[0], line_number), _vertex_id(fields[1], line_number)
            vals = _floats(fields[2:], line_number, 28, tag)
            T = Transform(_quat_rotation(*vals[3:7], line_number), np.array(vals[:3]))
            info = _upper_to_symmetric(vals[7:], 6)[np.ix_(_G2O_TO_TWIST, _G2O_TO_TWIST)]
            raw_edges.append((line_number, i, j, T, info))
            kinds.add(3)
            continue
        elif tag == "EDGE_SE2":
            if len(fields) < 2:
                raise ParseError(line_number, f"{tag} is missing vertex ids")
            i, j = _vertex_id(fields[0], line_number), _vertex_id(fields[1], line_number)
            vals = _floats(fields[2:], line_number, 9, tag)
            T = _se2_transform(*vals[:3])
            info = _embed_se2_information(_upper_to_symmetric(vals[3:], 3))
            raw_edges.append((line_number, i, j, T, info))
            kinds.add(2)
            continue
        else:
            if tag not in _IGNORED_TAGS:
                warnings.warn(f"line {line_number}: skipping unknown tag {tag}", UnknownTagWarning)
            continue
        if vid is None:
            raise ParseError(line_number, f"{tag} is missing a vertex id")
        if vid in vertices:
            raise ParseError(line_number, f"duplicate vertex {vid}")
        vertices[vid] = pose

    ids = set(vertices)
    for _, i, j, _, _ in raw_edges:
        ids.add(i)
        ids.add(j)
    order = sorted(ids)
    index = {vid: k for k, vid in enumerate(order)}
    poses = [vertices.get(vid, Transform()) for vid in order]
    measurements = []
    for k, (line_number, i, j, T, info) in enumerate(raw_edges):
        info = 0.5 * (info + info.T)
        try:
            np.linalg.cholesky(info)
        except np.linalg.LinAlgError:
            raise ParseError(line_number, "information matrix is not positive definite") from None
        measurements.append(Measurement(k, index[i], index[j], T, info))
    return PoseGraph(poses, measurements, order, kinds == {2})


def load_g2o(path) -> PoseGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_g2o(fh)


def _quat_fields(R):
    q = Rotation.from_matrix(R).as_quat()
    if q[3] < 0:
        q = -q
    return q


def _fmt(values):
    return " ".join(f"{v:.17g}" for v in values)


def write_g2o(g: PoseGraph, stream=None):
    """Write ``g`` in the SE(3) g2o dialect.

    Returns the text when ``stream`` is None, otherwise writes to it.
    """
    lines = []
    for vid, T in zip(g.vertex_ids, g.poses):
        lines.append(f"VERTEX_SE3:QUAT {vid} {_fmt(np.concatenate([T.translation, _quat_fields(T.rotation)]))}")
    iu = np.triu_indices(6)
    for m in g.measurements:
        info = m.information[np.ix_(_TWIST_TO_G2O, _TWIST_TO_G2O)]
        vals = np.concatenate([m.transform.translation, _quat_fields(m.transform.rotation), info[iu]])
        lines.append(f"EDGE_SE3:QUAT {g.vertex_ids[m.source]} {g.vertex_ids[m.target]} {_fmt(vals)}")
    text = "".join(line + "\n" for line in lines)
    if stream is None:
        return text
    stream.write(text)
    return None


def residual(m: Measurement, poses) -> np.ndarray:
    Ti, Tj = poses[m.source], poses[m.target]
    return lg.log(m.transform.inverse() @ Ti.inverse() @ Tj)


def objective(g: PoseGraph, poses=None) -> float:
    """Sum of squared Mahalanobis residuals ``Log(Tm^-1 Ti^-1 Tj)``."""
    poses = g.poses if poses is None else poses
    total = 0.0
    for m in g.measurements:
        r = residual(m, poses)
        total += float(r @ m.information @ r)
    return total


def relative_from_poses(g: PoseGraph, poses=None) -> list:
    poses = g.poses if poses is None else poses
    return [poses[m.source].inverse() @ poses[m.target] for m in g.measurements]


def spanning_tree(g: PoseGraph, preferred=None) -> list:
    """Edge ids of a spanning tree, adding edges greedily in id order.

    Edges listed in ``preferred`` are tried first.
    """
    n = g.vertex_count
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    order = list(preferred or [])
    seen = set(order)
    order += [k for k in range(g.edge_count) if k not in seen]
    tree = []
    for k in order:
        m = g.measurements[k]
        a, b = find(m.source), find(m.target)
        if a != b:
            parent[a] = b
            tree.append(k)
            if len(tree) == n - 1:
                break
    if len(tree) != max(n - 1, 0):
        raise DisconnectedGraph("pose graph topology is not connected")
    return tree


def poses_from_relative(g: PoseGraph, rel, tree=None, anchor: Transform | None = None) -> list:
    """Compose relative poses outward from vertex 0 along a spanning tree.

    ``tree`` lists edge ids; by default the lowest-id spanning tree is used.
    """
    n = g.vertex_count
    if tree is None:
        tree = spanning_tree(g)
    adj = [[] for _ in range(n)]
    for k in tree:
        m = g.measurements[k]
        adj[m.source].append(k)
        adj[m.target].append(k)
    poses = [None] * n
    if n == 0:
        return poses
    poses[0] = Transform() if anchor is None else anchor
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for k in sorted(adj[x]):
            m = g.measurements[k]
            if m.source == x and poses[m.target] is None:
                poses[m.target] = poses[x] @ rel[k]
                queue.append(m.target)
            elif m.target == x and poses[m.source] is None:
                poses[m.source] = poses[x] @ rel[k].inverse()
                queue.append(m.source)
    if any(p is None for p in poses):
        raise DisconnectedGraph("tree does not span the pose graph")
    return poses
