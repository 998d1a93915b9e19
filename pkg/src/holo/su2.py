"""Unit quaternion model of SU(2) and its Lie algebra su(2).

Quaternions are float arrays ``[w, x, y, z]``; imaginary vectors (elements of
su(2)) are arrays ``[x, y, z]``. The inner product on su(2) is
``<u, v> = -Re(uv)``, which is the Euclidean dot product in these coordinates.
"""

from dataclasses import dataclass

import numpy as np

CENTRAL_TOL = 1e-10
TRACELESS_TOL = 1e-10
RENORM_EVERY = 16

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])


class CentralElement(ValueError):
    """Raised when an axis is requested for +1 or -1."""


def quat(w, x=0.0, y=0.0, z=0.0):
    """Unit quaternion from components, renormalized."""
    return normalize(np.array([w, x, y, z], dtype=float))


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def pure(v):
    """Embed an imaginary vector as a quaternion with zero real part."""
    return np.concatenate(([0.0], np.asarray(v, dtype=float)))


def qmul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def qinv(q):
    # unit quaternions only
    return np.array([q[0], -q[1], -q[2], -q[3]])


def qprod(*qs):
    out = ONE
    for n, q in enumerate(qs, 1):
        out = qmul(out, q)
        if n % RENORM_EVERY == 0:
            out = normalize(out)
    return out


def re(q):
    return q[0]


def im(q):
    return np.asarray(q[1:], dtype=float)


def inner(u, v):
    """<u, v> = -Re(uv) on su(2)."""
    return float(np.dot(u, v))


def is_central(q, tol=CENTRAL_TOL):
    return abs(abs(q[0]) - 1.0) <= tol


def is_traceless(q, tol=TRACELESS_TOL):
    return abs(q[0]) <= tol


def exp_im(v):
    """exp of an imaginary vector: cos|v| + sin|v| v/|v|."""
    v = np.asarray(v, dtype=float)
    a = np.linalg.norm(v)
    if a == 0.0:
        return ONE.copy()
    s = np.sin(a) / a
    return np.array([np.cos(a), s * v[0], s * v[1], s * v[2]])


def log_axis(g, tol=CENTRAL_TOL):
    """Return (alpha, Q) with g = exp(alpha Q), 0 < alpha < pi, |Q| = 1."""
    if is_central(g, tol):
        raise CentralElement(f"{np.round(g, 12)} is central")
    v = im(g)
    alpha = float(np.arctan2(np.linalg.norm(v), g[0]))
    return alpha, v / np.linalg.norm(v)


def axis(g, tol=CENTRAL_TOL):
    """H(g) = (g - Re g) / |g - Re g|."""
    return log_axis(g, tol)[1]


def ad(g):
    """Matrix of v -> g v g^-1 on su(2) (the rotation associated with g)."""
    w, x, y, z = g
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def left_mul_matrix(q):
    """4x3 matrix of v -> v q (v imaginary), the derivative of exp(sv) q at s = 0."""
    w, x, y, z = q
    return np.array([
        [-x, -y, -z],
        [w, z, -y],
        [-z, w, x],
        [y, -x, w],
    ])


def random_unit(rng, size=None):
    """Uniform samples on S^3 from normalized Gaussians."""
    if size is None:
        return normalize(rng.standard_normal(4))
    g = rng.standard_normal((size, 4))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_traceless(rng):
    v = rng.standard_normal(3)
    return pure(v / np.linalg.norm(v))


@dataclass(frozen=True)
class ShapeFunction:
    """Odd 2pi-periodic holonomy shape f(alpha) = t sin(alpha), or f = 0."""

    kind: str = "sine"
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "sine"):
            raise ValueError(f"unknown shape kind {self.kind!r}")

    def __call__(self, alpha):
        if self.kind == "zero":
            return 0.0 * alpha
        return self.t * np.sin(alpha)

    def deriv(self, alpha):
        if self.kind == "zero":
            return 0.0 * alpha
        return self.t * np.cos(alpha)

    def antideriv(self, alpha):
        """Even antiderivative psi with psi' = f."""
        if self.kind == "zero":
            return 0.0 * alpha
        return -self.t * np.cos(alpha)


def shape_apply(f, g):
    """F(exp(alpha Q)) = exp(f(alpha) Q); F(+-1) = 1."""
    if is_central(g):
        return ONE.copy()
    alpha, q = log_axis(g)
    return exp_im(f(alpha) * q)


def shape_jacobian(f, g):
    """Right-translated derivative of F at g.

    Returns M with d/ds F(exp(s v) g) F(g)^-1 |_{s=0} = M v.
    """
    if is_central(g):
        alpha = 0.0 if g[0] > 0 else np.pi
        return f.deriv(alpha) * np.eye(3)
    alpha, q = log_axis(g)
    sa, ca = np.sin(alpha), np.cos(alpha)
    proj = np.eye(3) - np.outer(q, q)
    # d alpha = <v, Q>;  dQ = proj (cos a v + sin a v x Q) / sin a
    cross_q = -_cross_matrix(q)  # v -> v x Q
    dq = proj @ (ca * np.eye(3) + sa * cross_q) / sa
    beta = f(alpha)
    sb, cb = np.sin(beta), np.cos(beta)
    dbeta = f.deriv(alpha) * q[None, :]
    # d exp(beta Q) exp(-beta Q) = dbeta Q + sin b cos b dQ - sin^2 b dQ x Q
    return np.outer(q, dbeta[0]) + sb * cb * dq + sb * sb * (_cross_matrix(q) @ dq)


def _cross_matrix(a):
    """Matrix of v -> a x v."""
    return np.array([
        [0.0, -a[2], a[1]],
        [a[2], 0.0, -a[0]],
        [-a[1], a[0], 0.0],
    ])


def to_json(q):
    return [float(c) for c in q]


def from_json(data):
    if len(data) != 4:
        raise ValueError(f"quaternion needs 4 components, got {data!r}")
    return normalize(np.array(data, dtype=float))
