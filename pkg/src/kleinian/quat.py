"""Quaternion algebras over ATR fields, orders, the splitting map rho and
the covolume formula for maximal orders."""
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
import math

import numpy as np

from .errors import ConfigError, NotKleinian, NotMaximal
from .field import SIGMA, FieldElement, dedekind_zeta_2, embed, trace_to_Q
from .rational import inverse as qinverse, frac_str


class QuaternionAlgebra:
    """B = (a, b | F): i^2 = a, j^2 = b, ji = -ij."""

    def __init__(self, field, a, b):
        self.field = field
        self.a = field(a)
        self.b = field(b)
        if self.a.is_zero() or self.b.is_zero():
            raise ConfigError("structure constants must be nonzero")
        self.ab = self.a * self.b

    def __call__(self, x=0, y=0, z=0, t=0):
        F = self.field
        return QuatElement(self, F(x), F(y), F(z), F(t))

    def element(self, coords):
        """Element from a list of four field-element descriptions."""
        return self(*coords)

    @property
    def one(self):
        return self(1)

    def __repr__(self):
        return f"QuaternionAlgebra(a={self.a!r}, b={self.b!r} | {self.field!r})"


def validate_kleinian(alg):
    """True iff F is ATR and a, b are negative at every real place."""
    F = alg.field
    if F.r2 != 1:
        return False
    for v in range(F.r1):
        if embed(alg.a, v).real >= 0 or embed(alg.b, v).real >= 0:
            return False
    return True


class QuatElement:
    __slots__ = ("alg", "x", "y", "z", "t")

    def __init__(self, alg, x, y, z, t):
        self.alg = alg
        self.x, self.y, self.z, self.t = x, y, z, t

    def __add__(self, o):
        return QuatElement(self.alg, self.x + o.x, self.y + o.y, self.z + o.z, self.t + o.t)

    def __sub__(self, o):
        return QuatElement(self.alg, self.x - o.x, self.y - o.y, self.z - o.z, self.t - o.t)

    def __neg__(self):
        return QuatElement(self.alg, -self.x, -self.y, -self.z, -self.t)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction, FieldElement)):
            return QuatElement(self.alg, self.x * o, self.y * o, self.z * o, self.t * o)
        A = self.alg
        a, b, ab = A.a, A.b, A.ab
        x1, y1, z1, t1 = self.x, self.y, self.z, self.t
        x2, y2, z2, t2 = o.x, o.y, o.z, o.t
        x = x1 * x2 + a * (y1 * y2) + b * (z1 * z2) - ab * (t1 * t2)
        y = x1 * y2 + y1 * x2 + b * (t1 * z2 - z1 * t2)
        z = x1 * z2 + z1 * x2 + a * (y1 * t2 - t1 * y2)
        t = x1 * t2 + t1 * x2 + y1 * z2 - z1 * y2
        return QuatElement(A, x, y, z, t)

    def __rmul__(self, o):
        return self * o

    def conj(self):
        return QuatElement(self.alg, self.x, -self.y, -self.z, -self.t)

    def trd(self):
        return self.x * 2

    def nrd(self):
        A = self.alg
        return self.x * self.x - A.a * (self.y * self.y) - A.b * (self.z * self.z) + A.ab * (self.t * self.t)

    def inverse(self):
        return self.conj() * self.nrd().inverse()

    def coeffs(self):
        return (self.x, self.y, self.z, self.t)

    def __eq__(self, o):
        return isinstance(o, QuatElement) and self.coeffs() == o.coeffs()

    def __hash__(self):
        return hash(tuple(c.c for c in self.coeffs()))

    def __repr__(self):
        return f"({self.x!r}) + ({self.y!r})i + ({self.z!r})j + ({self.t!r})ij"

    def to_json(self):
        return [c.to_json() for c in self.coeffs()]


def conj(x):
    return x.conj()


def trd(x):
    return x.trd()


def nrd(x):
    return x.nrd()


@dataclass(frozen=True)
class SplittingData:
    """Data fixing rho: B -> M_2(C).

    ``alpha`` is the principal square root of sigma(a), ``beta`` = sigma(b).
    ``conjugator`` is an extra SL_2(C) matrix h, the split map becomes
    x -> h rho(x) h^-1 (used to move the base point off special positions).
    """
    alpha: complex
    beta: complex
    place: str = SIGMA
    conjugator: tuple = ((1, 0), (0, 1))

    @property
    def h(self):
        return np.array(self.conjugator, dtype=complex)

    def with_conjugator(self, h):
        h = np.asarray(h, dtype=complex)
        return SplittingData(self.alpha, self.beta, self.place,
                             tuple(tuple(complex(v) for v in row) for row in h))


def make_splitting(alg, conjugator=None):
    a = embed(alg.a, SIGMA)
    s = SplittingData(complex(np.sqrt(complex(a))), embed(alg.b, SIGMA))
    if conjugator is not None:
        s = s.with_conjugator(conjugator)
    return s


def _split_plain(coeffs, s):
    x, y, z, t = coeffs
    al, be = s.alpha, s.beta
    return np.array([[x + y * al, z + t * al], [(z - t * al) * be, x - y * al]], dtype=complex)


def split(x, s, prec=None):
    """rho(x) as a 2x2 complex array."""
    vals = [embed(c, s.place, prec) for c in x.coeffs()]
    m = _split_plain(vals, s)
    if s.conjugator != ((1, 0), (0, 1)):
        h = s.h
        hinv = np.array([[h[1, 1], -h[0, 1]], [-h[1, 0], h[0, 0]]]) / (h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])
        m = h @ m @ hinv
    return m


def _qcoords(q):
    out = []
    for c in q.coeffs():
        out.extend(c.c)
    return out


class QuatOrder:
    """A Z-lattice of rank 4n in B that is a ring containing 1.

    Elements are handled as integer coordinate vectors on ``basis``.  The
    multiplication table, conjugation and reduced norm are precomputed as
    integer tensors so that membership and nrd(x) = 1 are decided exactly.
    """

    def __init__(self, alg, basis, maximal=True, ramified_prime_norms=()):
        self.alg = alg
        F = alg.field
        self.field = F
        n = F.degree
        self.rank = 4 * n
        if len(basis) != self.rank:
            raise ConfigError(f"order basis needs {self.rank} elements, got {len(basis)}")
        self.basis = list(basis)
        self.maximal = bool(maximal)
        self.ramified_prime_norms = tuple(int(q) for q in ramified_prime_norms)
        rows = [_qcoords(b) for b in self.basis]
        try:
            self._inv = qinverse(rows)  # Q-coords -> lattice coords: c = q * inv
        except ZeroDivisionError:
            raise ConfigError("order basis is not linearly independent") from None
        one = self.coords(alg.one)
        if one is None:
            raise ConfigError("1 is not in the order")
        self.one_coords = np.array(one, dtype=np.int64)
        r = self.rank
        mult = np.zeros((r, r, r), dtype=np.int64)
        for k in range(r):
            for l in range(r):
                c = self.coords(self.basis[k] * self.basis[l])
                if c is None:
                    raise ConfigError("order basis is not closed under multiplication")
                mult[k, l] = c
        self.mult = mult
        conjm = np.zeros((r, r), dtype=np.int64)
        for k in range(r):
            c = self.coords(self.basis[k].conj())
            if c is None:
                raise ConfigError("order is not stable under conjugation")
            conjm[k] = c
        self.conj_matrix = conjm  # row k = coords of conj(b_k)
        # reduced norm as an F-valued quadratic form, coordinates on the power basis
        nr = [[None] * r for _ in range(r)]
        den = 1
        for k in range(r):
            for l in range(k, r):
                v = (self.basis[k] * self.basis[l].conj() + self.basis[l] * self.basis[k].conj())
                val = [x * Fraction(1, 2) for x in v.x.c]
                nr[k][l] = nr[l][k] = val
                for x in val:
                    den = den * x.denominator // math.gcd(den, x.denominator)
        self.nrd_den = den
        self.nrd_tensor = np.array([[[int(x * den) for x in nr[k][l]] for l in range(r)] for k in range(r)],
                                   dtype=np.int64)
        tr = [[trace_to_Q(F(nr[k][l])) for l in range(r)] for k in range(r)]
        self.trace_form = tr  # exact: x -> tr_{F/Q}(nrd(x)) = c^T tr c
        self._trace_form_float = np.array([[float(v) for v in row] for row in tr])

    # -- coordinates --------------------------------------------------------
    def coords(self, q, exact=False):
        """Integer coordinates of q on the basis, or None if q is not in the order."""
        v = _qcoords(q)
        r = self.rank
        c = [sum((v[i] * self._inv[i][j] for i in range(r)), Fraction(0)) for j in range(r)]
        if exact:
            return c
        if any(x.denominator != 1 for x in c):
            return None
        return [int(x) for x in c]

    def contains(self, q):
        return self.coords(q) is not None

    def element(self, c):
        out = self.alg(0)
        for ck, b in zip(c, self.basis):
            ck = int(ck)
            if ck:
                out = out + b * ck
        return out

    def mul_coords(self, c1, c2):
        c1 = np.asarray(c1, dtype=np.int64)
        c2 = np.asarray(c2, dtype=np.int64)
        return np.einsum("k,l,klm->m", c1, c2, self.mult)

    def conj_coords(self, c):
        return np.asarray(c, dtype=np.int64) @ self.conj_matrix

    def nrd_coords(self, C):
        """Reduced norms (times nrd_den) of coordinate rows C, as (N, n) integers."""
        C = np.atleast_2d(np.asarray(C, dtype=np.int64))
        return np.einsum("ik,il,klm->im", C, C, self.nrd_tensor)

    def is_norm_one(self, C):
        """Exact test nrd(x) = 1 for every row of C."""
        N = self.nrd_coords(C)
        target = np.zeros(self.field.degree, dtype=np.int64)
        target[0] = self.nrd_den
        return np.all(N == target, axis=1)

    def trace_nrd(self, C):
        C = np.atleast_2d(np.asarray(C, dtype=np.int64))
        return np.einsum("ik,kl,il->i", C, self._trace_form_float, C)

    def split_basis(self, s):
        """rho(b_k) for every basis element, shape (4n, 2, 2)."""
        return np.array([split(b, s) for b in self.basis])

    def to_config(self):
        return {"basis": [b.to_json() for b in self.basis], "maximal": self.maximal,
                "ramified_prime_norms": list(self.ramified_prime_norms)}


def order_from_zf_generators(alg, gens, **kw):
    """Order with Z_F-basis ``gens`` (4 quaternions): Z-basis g_i * omega_j."""
    F = alg.field
    omegas = [F(row) for row in F.integral_basis]
    basis = [g * w for g in gens for w in omegas]
    return QuatOrder(alg, basis, **kw)


def matrix_order(F):
    """M_2(Z_F) inside (1, 1 | F) via i -> diag(1,-1), j -> antidiag(1,1)."""
    alg = QuaternionAlgebra(F, 1, 1)
    h = Fraction(1, 2)
    gens = [alg(h, h, 0, 0), alg(h, -h, 0, 0), alg(0, 0, h, h), alg(0, 0, h, -h)]
    return order_from_zf_generators(alg, gens, maximal=True)


def covolume(order, prime_bound=100000, zeta=None):
    """|Delta_F|^{3/2} zeta_F(2) Phi(Delta_B) / (4 pi^2)^{n-1} for a maximal order.

    Returns ``(value, error_estimate)``.
    """
    if not order.maximal:
        raise NotMaximal("covolume formula requires a maximal order")
    F = order.field
    if zeta is None:
        z, zerr = dedekind_zeta_2(F, prime_bound)
    else:
        z, zerr = zeta, 0.0
    phi = 1
    for q in order.ramified_prime_norms:
        phi *= q - 1
    n = F.degree
    scale = abs(F.disc) ** 1.5 * phi / (4 * math.pi ** 2) ** (n - 1)
    return scale * z, scale * zerr


def parse_algebra(F, cfg):
    alg = QuaternionAlgebra(F, F(cfg["a"]), F(cfg["b"]))
    if not validate_kleinian(alg):
        raise NotKleinian("algebra is not ramified at every real place")
    return alg


def parse_order(alg, cfg):
    """Order block: either ``{"type": "matrix"}``, ``zf_basis`` or a full ``basis``."""
    F = alg.field
    kw = dict(maximal=cfg.get("maximal", True), ramified_prime_norms=cfg.get("ramified_prime_norms", []))
    if cfg.get("type") == "matrix":
        return matrix_order(F)
    if "zf_basis" in cfg:
        gens = [alg.element(row) for row in cfg["zf_basis"]]
        return order_from_zf_generators(alg, gens, **kw)
    if "basis" in cfg:
        return QuatOrder(alg, [alg.element(row) for row in cfg["basis"]], **kw)
    raise ConfigError("order block needs 'type', 'zf_basis' or 'basis'")
