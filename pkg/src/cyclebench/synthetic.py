"""Seeded synthetic pose graphs on a 3D lattice.

The trajectory is a random walk on the integer lattice inside a cube sized so
that the walk revisits its neighbourhood often.  Orientations vary smoothly
with position, so loop closures between nearby poses have small relative
rotations.  Edges ``0..n-2`` are odometry ``i -> i+1``; loop closures follow,
sampled from pose pairs within ``CLOSURE_RADIUS`` until the cycle ratio
``nu / |E|`` reaches the target.
"""
from __future__ import annotations

import math

import numpy as np

from . import liegroup as lg
from .errors import InfeasibleRatio
from .liegroup import Transform
from .pgo import Measurement, PoseGraph, poses_from_relative

CLOSURE_RADIUS = math.sqrt(2.0)
_MOVES = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=np.int64
)
_FIELD_AMPLITUDE = np.array([0.15, 0.15, 0.6])


def closure_count(n_poses: int, cycle_ratio: float) -> int:
    """Loop closures giving ``nu / |E|`` closest to ``cycle_ratio`` on a chain."""
    return int(round(cycle_ratio * (n_poses - 1) / (1.0 - cycle_ratio)))


def lattice_walk(n_poses: int, rng) -> np.ndarray:
    side = max(2, int(math.ceil((n_poses / 2.0) ** (1.0 / 3.0))))
    pos = np.zeros((n_poses, 3), dtype=np.int64)
    for i in range(1, n_poses):
        while True:
            step = _MOVES[rng.integers(6)]
            nxt = pos[i - 1] + step
            if np.all((nxt >= 0) & (nxt < side)):
                break
        pos[i] = nxt
    return pos


def _orientations(pos, rng):
    phase = rng.uniform(0.0, 2.0 * math.pi, size=3)
    freq = rng.uniform(0.5, 1.0, size=3)
    return [lg.so3_exp(_FIELD_AMPLITUDE * np.sin(freq * p[[1, 2, 0]] + phase)) for p in pos]


def generate_synthetic(
    n_poses: int,
    cycle_ratio: float,
    trans_std: float = 0.1,
    rot_std: float = 0.05,
    seed=0,
):
    """Ground-truth and noisy pose graphs sharing one topology.

    Parameters
    ----------
    n_poses : int
    cycle_ratio : float
        Target ``nu / |E|`` in ``(0, 0.6]``.
    trans_std, rot_std : float
        Standard deviations of the twist noise ``delta`` in
        ``measurement = truth * Exp(delta)``.
    seed : int, sequence or numpy Generator

    Returns
    -------
    truth : PoseGraph
        Ground-truth poses and exact measurements.
    noisy : PoseGraph
        Noisy measurements with poses initialized by odometry composition.
    """
    if not 0.0 < cycle_ratio <= 0.6:
        raise InfeasibleRatio(f"cycle ratio {cycle_ratio} outside (0, 0.6]")
    if n_poses < 3:
        raise InfeasibleRatio("need at least 3 poses for a loop closure")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pos = lattice_walk(n_poses, rng)
    rots = _orientations(pos, rng)
    truth_poses = [Transform(R, p.astype(float)) for R, p in zip(rots, pos)]

    diff = pos[:, None, :] - pos[None, :, :]
    close = (diff * diff).sum(-1) <= CLOSURE_RADIUS**2 + 1e-9
    ii, jj = np.nonzero(np.triu(close, k=2))
    want = closure_count(n_poses, cycle_ratio)
    want = max(want, 1)
    if len(ii) < want:
        raise InfeasibleRatio(
            f"{len(ii)} closure candidates for {want} loop closures at ratio {cycle_ratio}"
        )
    pick = np.sort(rng.choice(len(ii), size=want, replace=False))
    pairs = [(i, i + 1) for i in range(n_poses - 1)]
    pairs += [(int(ii[p]), int(jj[p])) for p in pick]

    info = np.diag(
        [1.0 / rot_std**2 if rot_std > 0 else 1.0] * 3
        + [1.0 / trans_std**2 if trans_std > 0 else 1.0] * 3
    )
    exact, noisy = [], []
    for k, (i, j) in enumerate(pairs):
        T = truth_poses[i].inverse() @ truth_poses[j]
        delta = np.concatenate([rot_std * rng.standard_normal(3), trans_std * rng.standard_normal(3)])
        exact.append(Measurement(k, i, j, T, info.copy()))
        noisy.append(Measurement(k, i, j, T @ lg.exp(delta), info.copy()))

    truth = PoseGraph(truth_poses, exact)
    noisy_graph = PoseGraph(list(truth_poses), noisy)
    odo = poses_from_relative(
        noisy_graph, [m.transform for m in noisy], list(range(n_poses - 1)), truth_poses[0]
    )
    noisy_graph.poses = odo
    return truth, noisy_graph
