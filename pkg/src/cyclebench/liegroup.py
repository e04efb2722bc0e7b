"""Closed-form SE(3) operations.

Twists are length-6 arrays ordered ``[omega (3), v (3)]``: rotation first,
then translation.  ``Exp`` maps a twist to a :class:`Transform` through the
4x4 screw matrix ``[[hat(omega), v], [0, 0]]``.

Coefficient functions switch to truncated Taylor series below
``SERIES_THRESHOLD`` radians, where the closed forms lose digits to
cancellation.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import AngleNearPi, JacobianSingular

SERIES_THRESHOLD = 0.05
NEAR_PI = 1e-6
SINGULAR_TOL = 1e-6
REORTHONORMALIZE_EVERY = 64

_I3 = np.eye(3)


def hat3(w) -> np.ndarray:
    """Skew-symmetric matrix with ``hat3(a) @ b == cross(a, b)``."""
    return np.array(
        [[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]]
    )


def vee3(W) -> np.ndarray:
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def hat(x) -> np.ndarray:
    """4x4 screw matrix of a twist."""
    X = np.zeros((4, 4))
    X[:3, :3] = hat3(x[:3])
    X[:3, 3] = x[3:6]
    return X


def vee(X) -> np.ndarray:
    return np.concatenate([vee3(X[:3, :3]), X[:3, 3]])


def normalize_rotation(R) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius sense."""
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        U[:, -1] = -U[:, -1]
        Q = U @ Vt
    return Q


class Transform:
    """Rigid-body transform stored as rotation plus translation.

    ``depth`` counts compositions since the rotation was last
    re-orthonormalized; the product of two transforms is re-projected onto
    SO(3) once it reaches ``REORTHONORMALIZE_EVERY``.
    """

    __slots__ = ("rotation", "translation", "depth")

    def __init__(self, rotation=None, translation=None, depth: int = 0):
        self.rotation = _I3.copy() if rotation is None else np.asarray(rotation, dtype=float)
        self.translation = (
            np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        )
        self.depth = depth

    @property
    def R(self):
        return self.rotation

    @property
    def t(self):
        return self.translation

    @classmethod
    def identity(cls) -> "Transform":
        return cls()

    @classmethod
    def from_matrix(cls, M) -> "Transform":
        M = np.asarray(M, dtype=float)
        return cls(M[:3, :3].copy(), M[:3, 3].copy())

    def matrix(self) -> np.ndarray:
        M = np.eye(4)
        M[:3, :3] = self.rotation
        M[:3, 3] = self.translation
        return M

    @classmethod
    def _raw(cls, R, t, depth):
        out = cls.__new__(cls)
        out.rotation = R
        out.translation = t
        out.depth = depth
        return out

    def compose(self, other: "Transform") -> "Transform":
        R = self.rotation @ other.rotation
        t = self.rotation @ other.translation + self.translation
        depth = (self.depth if self.depth > other.depth else other.depth) + 1
        if depth >= REORTHONORMALIZE_EVERY:
            R = normalize_rotation(R)
            depth = 0
        return Transform._raw(R, t, depth)

    __matmul__ = compose

    def inverse(self) -> "Transform":
        Rt = self.rotation.T
        return Transform._raw(Rt, -Rt @ self.translation, self.depth)

    def act(self, p) -> np.ndarray:
        return self.rotation @ np.asarray(p) + self.translation

    def normalized(self) -> "Transform":
        return Transform(normalize_rotation(self.rotation), self.translation)

    def allclose(self, other: "Transform", atol: float = 1e-9) -> bool:
        return np.allclose(self.rotation, other.rotation, atol=atol) and np.allclose(
            self.translation, other.translation, atol=atol
        )

    def __repr__(self):
        return f"Transform(rotation={self.rotation.tolist()}, translation={self.translation.tolist()})"


# Coefficients in theta.  A = sin/t, B = (1-cos)/t^2, C = (t-sin)/t^3 appear in
# Rodrigues' formula and the SO(3) Jacobian; D, E complete the SE(3) coupling
# block; F is the quadratic coefficient of the inverse SO(3) Jacobian.


def _coeffs(theta: float):
    t2 = theta * theta
    if theta < SERIES_THRESHOLD:
        t4 = t2 * t2
        t6 = t4 * t2
        A = 1.0 - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0
        B = 0.5 - t2 / 24.0 + t4 / 720.0 - t6 / 40320.0
        C = 1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t6 / 362880.0
        return A, B, C
    s, c = math.sin(theta), math.cos(theta)
    return s / theta, (1.0 - c) / t2, (theta - s) / (t2 * theta)


def _coeffs_de(theta: float):
    t2 = theta * theta
    if theta < SERIES_THRESHOLD:
        t4 = t2 * t2
        t6 = t4 * t2
        D = 1.0 / 24.0 - t2 / 720.0 + t4 / 40320.0 - t6 / 3628800.0
        E = 1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0 - t6 / 9979200.0
        return D, E
    s, c = math.sin(theta), math.cos(theta)
    D = (t2 + 2.0 * c - 2.0) / (2.0 * t2 * t2)
    E = (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t2 * t2 * theta)
    return D, E


def _coeff_f(theta: float) -> float:
    k = round(theta / (2.0 * math.pi))
    if k >= 1 and abs(theta - 2.0 * math.pi * k) < SINGULAR_TOL:
        raise JacobianSingular(f"rotation angle {theta} is near 2*pi*{k}")
    t2 = theta * theta
    if theta < SERIES_THRESHOLD:
        t4 = t2 * t2
        return 1.0 / 12.0 + t2 / 720.0 + t4 / 30240.0 + t4 * t2 / 1209600.0
    return 1.0 / t2 - (1.0 + math.cos(theta)) / (2.0 * theta * math.sin(theta))


def so3_exp(w) -> np.ndarray:
    W = hat3(w)
    A, B, _ = _coeffs(float(np.linalg.norm(w)))
    return _I3 + A * W + B * (W @ W)


def so3_jl(w) -> np.ndarray:
    W = hat3(w)
    _, B, C = _coeffs(float(np.linalg.norm(w)))
    return _I3 + B * W + C * (W @ W)


def so3_jl_inv(w) -> np.ndarray:
    W = hat3(w)
    F = _coeff_f(float(np.linalg.norm(w)))
    return _I3 - 0.5 * W + F * (W @ W)


def so3_log(R) -> np.ndarray:
    """Rotation vector of ``R`` on the principal branch."""
    R = np.asarray(R, dtype=float)
    a = 0.5 * vee3(R - R.T)  # sin(theta) * axis
    s = float(np.linalg.norm(a))
    c = 0.5 * (np.trace(R) - 1.0)
    theta = math.atan2(s, c)
    if theta > math.pi - NEAR_PI:
        raise AngleNearPi(f"rotation angle {theta} is within {NEAR_PI} of pi")
    if c < -0.99:
        # near pi the antisymmetric part vanishes; read the axis off the
        # symmetric part, R + R^T = 2 I + 2 B (w w^T - theta^2 I)
        _, B, _ = _coeffs(theta)
        S = (0.5 * (R + R.T) - _I3) / B + theta * theta * _I3  # = w w^T
        i = int(np.argmax(np.diag(S)))
        w = S[:, i] / math.sqrt(S[i, i])
        if w @ a < 0:
            w = -w
        return w
    A, _, _ = _coeffs(theta)
    return a / A


def exp(x) -> Transform:
    """Exponential map of a twist ``[omega, v]``."""
    x = np.asarray(x, dtype=float)
    w, v = x[:3], x[3:]
    W = hat3(w)
    W2 = W @ W
    A, B, C = _coeffs(float(np.linalg.norm(w)))
    R = _I3 + A * W + B * W2
    V = _I3 + B * W + C * W2
    return Transform(R, V @ v)


def log(T: Transform) -> np.ndarray:
    """Logarithm map; raises :class:`AngleNearPi` off the principal branch."""
    w = so3_log(T.rotation)
    return np.concatenate([w, so3_jl_inv(w) @ T.translation])


def adjoint(T: Transform) -> np.ndarray:
    """``Ad(T)`` with ``T Exp(y) = Exp(Ad(T) y) T``."""
    R = T.rotation
    M = np.zeros((6, 6))
    M[:3, :3] = R
    M[3:, 3:] = R
    M[3:, :3] = hat3(T.translation) @ R
    return M


def ad(x) -> np.ndarray:
    """Lie bracket matrix ``[[hat(omega), 0], [hat(v), hat(omega)]]``."""
    W = hat3(x[:3])
    M = np.zeros((6, 6))
    M[:3, :3] = W
    M[3:, 3:] = W
    M[3:, :3] = hat3(x[3:6])
    return M


def _q_block(w, v) -> np.ndarray:
    W = hat3(w)
    Vh = hat3(v)
    theta = float(np.linalg.norm(w))
    _, _, C = _coeffs(theta)
    D, E = _coeffs_de(theta)
    WV = W @ Vh
    VW = Vh @ W
    WVW = WV @ W
    W2 = W @ W
    return (
        0.5 * Vh
        + C * (WV + VW + WVW)
        + D * (W2 @ Vh + VW @ W - 3.0 * WVW)
        + E * (WVW @ W + W @ WVW)
    )


def jl(x) -> np.ndarray:
    """Left Jacobian: ``Exp(x + d) ~ Exp(jl(x) d) Exp(x)``."""
    x = np.asarray(x, dtype=float)
    J = so3_jl(x[:3])
    M = np.zeros((6, 6))
    M[:3, :3] = J
    M[3:, 3:] = J
    M[3:, :3] = _q_block(x[:3], x[3:])
    return M


def jr(x) -> np.ndarray:
    """Right Jacobian: ``Exp(x + d) ~ Exp(x) Exp(jr(x) d)``."""
    return jl(-np.asarray(x, dtype=float))


def jl_inv(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    Ji = so3_jl_inv(x[:3])
    Q = _q_block(x[:3], x[3:])
    M = np.zeros((6, 6))
    M[:3, :3] = Ji
    M[3:, 3:] = Ji
    M[3:, :3] = -Ji @ Q @ Ji
    return M


def jr_inv(x) -> np.ndarray:
    return jl_inv(-np.asarray(x, dtype=float))


def compose_all(transforms) -> Transform:
    """Left-to-right product of an iterable of transforms."""
    out = Transform()
    for T in transforms:
        out = out @ T
    return out
