"""Unit ball model of hyperbolic 3-space.

Points are arrays ``[x, y, t]`` standing for the quaternion w = (x + iy) + t j.
Quaternions in general are pairs (u, v) of complex numbers meaning u + v j,
with the rule j u = conj(u) j.
"""
import math

import numpy as np

from .errors import OriginFixed, PrecisionExhausted


# -- quaternion arithmetic on (u, v) pairs -----------------------------------

def qmul(p, q):
    u1, v1 = p
    u2, v2 = q
    return (u1 * u2 - v1 * np.conj(v2), u1 * v2 + v1 * np.conj(u2))


def qconj(p):
    return (np.conj(p[0]), -p[1])


def qabs2(p):
    return np.abs(p[0]) ** 2 + np.abs(p[1]) ** 2


def qinv(p):
    n = qabs2(p)
    c = qconj(p)
    return (c[0] / n, c[1] / n)


def _as_q(w):
    w = np.asarray(w, dtype=float)
    return (w[..., 0] + 1j * w[..., 1], w[..., 2] + 0j)


def _as_point(q):
    u, v = q
    return np.stack([np.real(u), np.imag(u), np.real(v)], axis=-1)


# -- isometries ---------------------------------------------------------------

def normalize_det(m):
    """Scale m so that det m = 1 exactly up to rounding."""
    m = np.asarray(m, dtype=complex)
    d = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return m / np.sqrt(d)


def ball_coefficients(m):
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    ca, cb, cc, cd = np.conj(a), np.conj(b), np.conj(c), np.conj(d)
    A = (a + cd, b - cc)
    B = (b + cc, a - cd)
    C = (c + cb, d - ca)
    D = (d + ca, c - cb)
    return A, B, C, D


class Isometry:
    """An element of PSL_2(C) with its ball-model data.

    ``coords`` optionally holds integer coordinates of a norm one order
    element mapping to this matrix, ``word`` a tuple of signed generator
    indices (+k for g_k, -k for its inverse, 1-based).
    """

    __slots__ = ("m", "A", "B", "C", "D", "norm2", "invrad", "coords", "word", "_key")

    def __init__(self, m, coords=None, word=None, renormalize=True):
        m = np.array(m, dtype=complex)
        if renormalize:
            m = normalize_det(m)
        self.m = m
        self.A, self.B, self.C, self.D = ball_coefficients(m)
        self.norm2 = float(np.sum(np.abs(m) ** 2))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        self.invrad = float(qabs2(self.C))
        # the two expressions agree for det = 1; keep the direct one (no cancellation)
        del det
        self.coords = None if coords is None else tuple(int(c) for c in coords)
        self.word = None if word is None else tuple(word)
        self._key = None

    @property
    def norm(self):
        return math.sqrt(self.norm2)

    @property
    def trace(self):
        return complex(self.m[0, 0] + self.m[1, 1])

    def inverse(self, conj_matrix=None):
        a, b, c, d = self.m[0, 0], self.m[0, 1], self.m[1, 0], self.m[1, 1]
        coords = None
        if self.coords is not None and conj_matrix is not None:
            coords = tuple(int(x) for x in np.asarray(self.coords) @ conj_matrix)
        word = None if self.word is None else tuple(-k for k in reversed(self.word))
        return Isometry([[d, -b], [-c, a]], coords=coords, word=word, renormalize=False)

    def compose(self, other, order=None):
        """self * other (apply other first)."""
        coords = None
        if order is not None and self.coords is not None and other.coords is not None:
            coords = order.mul_coords(self.coords, other.coords)
        word = None
        if self.word is not None and other.word is not None:
            word = free_reduce(self.word + other.word)
        return Isometry(self.m @ other.m, coords=coords, word=word)

    def __matmul__(self, other):
        return self.compose(other)

    def is_identity(self, tol=1e-8):
        return psl_distance(self.m, np.eye(2)) < tol

    def sphere(self):
        return isometric_sphere(self)

    @property
    def key(self):
        """Hashable identity in PSL_2: exact coordinates up to sign when known."""
        if self._key is None:
            if self.coords is not None:
                c = self.coords
                s = next((x for x in c if x != 0), 1)
                self._key = ("c",) + (c if s > 0 else tuple(-x for x in c))
            else:
                flat = self.m.ravel()
                k = int(np.argmax(np.abs(flat) > 1e-6))
                ph = flat[k] / abs(flat[k])
                v = flat / ph
                self._key = ("m",) + tuple(np.round(np.concatenate([v.real, v.imag]), 6) + 0.0)
        return self._key

    def __repr__(self):
        return f"Isometry(norm={self.norm:.4g}, word={self.word})"


def free_reduce(word):
    out = []
    for k in word:
        if out and out[-1] == -k:
            out.pop()
        else:
            out.append(k)
    return tuple(out)


def psl_distance(m1, m2):
    """min over signs of the Frobenius distance, matrices taken with det 1."""
    m1 = np.asarray(m1)
    m2 = np.asarray(m2)
    return float(min(np.linalg.norm(m1 - m2), np.linalg.norm(m1 + m2)))


def identity():
    return Isometry(np.eye(2), word=())


# -- action -----------------------------------------------------------------------

def act_error_bound(g, w, eps, eta=None):
    """Floating point error bound 68 d^{3/2}|g|^3 e + 136 d^{3/2}|g|^2 n for g.w."""
    eta = 8 * eps / 3 if eta is None else eta
    w = np.asarray(w, dtype=float)
    delta = 1.0 / max(1.0 - float(w @ w), 1e-300)
    return 68 * delta ** 1.5 * g.norm ** 3 * eps + 136 * delta ** 1.5 * g.norm2 * eta


def act(g, w, budget=None):
    """g . w for one point or an array of points (last axis of length 3).

    With a ``budget`` (PrecisionBudget) the accuracy condition of the floating
    point action is checked and PrecisionExhausted raised when it fails.
    """
    wq = _as_q(w)
    if budget is not None:
        r2 = np.sum(np.asarray(w, dtype=float) ** 2, axis=-1)
        delta = 1.0 / np.maximum(1.0 - r2, 1e-300)
        if np.any((g.norm * budget.eps + 2 * budget.eta) ** 2 > 1.0 / (3 * delta)):
            raise PrecisionExhausted("point too close to the boundary for the action error bound")
    num = qmul(g.A, wq)
    num = (num[0] + g.B[0], num[1] + g.B[1])
    den = qmul(g.C, wq)
    den = (den[0] + g.D[0], den[1] + g.D[1])
    if np.any(qabs2(den) == 0):
        raise PrecisionExhausted("pole of the action")
    return _as_point(qmul(num, qinv(den)))


def act_matrix(m, w):
    return act(Isometry(m, renormalize=True), w)


def denominator_sq(g, w):
    """|C w + D|^2; g is in Int(...) test form: 4/|Cw+D|^2 > 1 iff g moves w closer to 0."""
    wq = _as_q(w)
    den = qmul(g.C, wq)
    return qabs2((den[0] + g.D[0], den[1] + g.D[1]))


def eta(w):
    """Upper half-space -> ball: (w - j)(1 - j w)^{-1}."""
    wq = _as_q(w)
    num = (wq[0], wq[1] - 1)
    jw = (np.conj(wq[1]) * -1 + 0j, np.conj(wq[0]))  # j * (u + v j) = -conj(v) + conj(u) j
    den = (1 - jw[0], -jw[1])
    return _as_point(qmul(num, qinv(den)))


def eta_inv(p):
    """Ball -> upper half-space: (1 + p j)^{-1} (p + j)."""
    pq = _as_q(p)
    pj = (-pq[1], pq[0])  # (u + v j) j = u j + v j j = -v + u j
    den = (1 + pj[0], pj[1])
    num = (pq[0], pq[1] + 1)
    return _as_point(qmul(qinv(den), num))


def dist(w1, w2):
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    d2 = np.sum((w1 - w2) ** 2, axis=-1)
    a = 1 - np.sum(w1 ** 2, axis=-1)
    b = 1 - np.sum(w2 ** 2, axis=-1)
    return np.arccosh(1 + 2 * d2 / (a * b))


def dist_upper(w1, w2):
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    d2 = np.sum((w1 - w2) ** 2, axis=-1)
    return np.arccosh(1 + d2 / (2 * w1[..., 2] * w2[..., 2]))


def isometric_sphere(g, tol=1e-14):
    """(center, radius) of I(g) as a 3-vector and a float; raises OriginFixed if C = 0."""
    if g.invrad <= tol:
        raise OriginFixed(g)
    c = qmul(qinv(g.C), g.D)
    center = -np.array([c[0].real, c[0].imag, c[1].real])
    return center, 2.0 / math.sqrt(g.invrad)


def has_sphere(g, tol=1e-14):
    return g.invrad > tol


def boost(p):
    """An isometry u with u . 0 = p (upper triangular in the half-space picture)."""
    z = eta_inv(np.asarray(p, dtype=float))
    x, y, t = z
    s = math.sqrt(t)
    return Isometry(np.array([[s, complex(x, y) / s], [0, 1 / s]]), renormalize=False)


# -- Klein model -------------------------------------------------------------------

def klein_to_ball(k):
    k = np.asarray(k, dtype=float)
    r2 = np.sum(k * k, axis=-1, keepdims=True)
    return k / (1 + np.sqrt(np.maximum(1 - r2, 0.0)))


def ball_to_klein(p):
    p = np.asarray(p, dtype=float)
    r2 = np.sum(p * p, axis=-1, keepdims=True)
    return 2 * p / (1 + r2)


def boundary_fixed_points(g, tol=1e-12):
    """Fixed points of g on the sphere at infinity, as ball points (0, 1 or 2 of them)."""
    a, b, c, d = g.m.ravel()
    pts = []
    if abs(c) < tol:
        pts.append(np.array([0.0, 0.0, 1.0]))  # infinity of the half-space maps to j
        if abs(d - a) > tol:
            z = b / (d - a)
            pts.append(eta(np.array([z.real, z.imag, 0.0])))
    else:
        disc = np.sqrt((d - a) ** 2 + 4 * b * c + 0j)
        for s in (1, -1):
            z = (a - d + s * disc) / (2 * c)
            pts.append(eta(np.array([z.real, z.imag, 0.0])))
        if abs(disc) < tol:
            pts = pts[:1]
    return [p / np.linalg.norm(p) for p in pts]


def classify(g, tol=1e-9):
    """'identity', 'elliptic', 'parabolic' or 'loxodromic' from the trace."""
    if g.is_identity(tol):
        return "identity"
    tr = g.trace
    if abs(tr.imag) > tol:
        return "loxodromic"
    t = abs(tr.real)
    if t < 2 - tol:
        return "elliptic"
    if t <= 2 + tol:
        return "parabolic"
    return "loxodromic"
