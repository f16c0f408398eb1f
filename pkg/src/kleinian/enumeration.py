"""Quadratic forms on the order lattice, Fincke-Pohst enumeration and the
deterministic and probabilistic Enumerate backends."""
from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from . import _kernels
from .ball import Isometry, boost
from .errors import NotPositiveDefinite
from .vol import ball_volume, inverse_ball_volume


@dataclass
class GramForm:
    """Symmetric positive definite matrix of a quadratic form on Z^d."""
    G: np.ndarray
    kind: str = "Q"
    w1: tuple = None
    w2: tuple = None

    @property
    def dim(self):
        return self.G.shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return float(x @ self.G @ x)


def _invrad_vectors(mats):
    """Complex 2-vectors v with invrad(sum c_k m_k) = |sum c_k v_k|^2 for real c."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return np.stack([c + np.conj(b), d - np.conj(a)], axis=1)


def _gram_from_mats(order, mats, kind, w1=None, w2=None, check=True):
    V = _invrad_vectors(mats)
    G = np.real(np.conj(V) @ V.T) + order._trace_form_float
    G = 0.5 * (G + G.T)
    if check:
        _, ok = _kernels.fp_decompose(G)
        if not ok:
            raise NotPositiveDefinite(f"Gram matrix of {kind} is not positive definite")
    return GramForm(G, kind, None if w1 is None else tuple(w1), None if w2 is None else tuple(w2))


def gram_of_Q(order, splitting):
    """Gram matrix of Q(x) = invrad(rho(x)) + tr_{F/Q} nrd(x) on the order basis."""
    return _gram_from_mats(order, order.split_basis(splitting), "Q")


def gram_of_Q_centers(order, splitting, w1, w2, mats=None):
    """Gram matrix of Q_{w1,w2}(x) = invrad(h2^-1 rho(x) h1) + tr nrd(x).

    w1, w2 are ball points; h_i is the boost sending 0 to w_i.
    """
    if mats is None:
        mats = order.split_basis(splitting)
    h1 = boost(w1).m
    h2 = boost(w2).m
    h2i = np.array([[h2[1, 1], -h2[0, 1]], [-h2[1, 0], h2[0, 0]]])
    conj_mats = np.einsum("ij,kjl,lm->kim", h2i, mats, h1)
    return _gram_from_mats(order, conj_mats, "Q_centers", w1, w2)


# ---------------------------------------------------------------------------

def lll_gram(G, delta=0.99):
    """LLL reduction of the lattice with Gram matrix G.

    Returns (U, G') with U unimodular (columns = new basis in old
    coordinates) and G' = U^T G U.
    """
    G = np.array(G, dtype=float)
    d = G.shape[0]
    U = np.eye(d, dtype=np.int64)

    def gso(G):
        mu = np.zeros((d, d))
        B = np.zeros(d)
        for i in range(d):
            for j in range(i):
                mu[i, j] = (G[i, j] - sum(mu[j, k] * mu[i, k] * B[k] for k in range(j))) / B[j]
            B[i] = G[i, i] - sum(mu[i, k] ** 2 * B[k] for k in range(i))
        return mu, B

    k = 1
    mu, B = gso(G)
    it = 0
    while k < d and it < 100000:
        it += 1
        for j in range(k - 1, -1, -1):
            r = int(round(mu[k, j]))
            if r:
                U[:, k] -= r * U[:, j]
                G[k, :] -= r * G[j, :]
                G[:, k] -= r * G[:, j]
                mu[k, :j + 1] -= r * mu[j, :j + 1]
                mu[k, j] = mu[k, j]  # mu[j, j] = 1 implied
                mu, B = gso(G)
        if B[k] >= (delta - mu[k, k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            U[:, [k, k - 1]] = U[:, [k - 1, k]]
            G[[k, k - 1], :] = G[[k - 1, k], :]
            G[:, [k, k - 1]] = G[:, [k - 1, k]]
            mu, B = gso(G)
            k = max(k - 1, 1)
    return U, G


def fincke_pohst(G, bound, symmetric=True, lll=True):
    """Integer vectors x with x^T G x <= bound (one of +-x when ``symmetric``).

    Returns (X, values) sorted by value then lexicographically, with X an
    (m, d) int64 array in the original coordinates.
    """
    G = np.asarray(G.G if isinstance(G, GramForm) else G, dtype=float)
    d = G.shape[0]
    if lll and d > 1:
        U, Gr = lll_gram(G)
    else:
        U, Gr = np.eye(d, dtype=np.int64), G
    q, ok = _kernels.fp_decompose(np.ascontiguousarray(Gr))
    if not ok:
        raise NotPositiveDefinite("form is not positive definite")
    Y = _kernels.fp_enumerate(q, float(bound), bool(symmetric))
    X = Y @ U.T
    if symmetric and len(X):
        # canonical sign in the original coordinates: first nonzero entry positive
        nz = np.argmax(X != 0, axis=1)
        s = np.sign(X[np.arange(len(X)), nz])
        s[s == 0] = 1
        X = X * s[:, None]
    vals = _kernels.quad_values(X, G) if len(X) else np.zeros(0)
    keep = vals <= bound + 1e-9 * (abs(bound) + 1)
    X, vals = X[keep], vals[keep]
    if len(X):
        order = np.lexsort(tuple(X[:, i] for i in range(d - 1, -1, -1)) + (np.round(vals, 9),))
        X, vals = X[order], vals[order]
    return X, vals


def brute_force(G, bound, box):
    """All x in [-box, box]^d with x^T G x <= bound, one of +-x (test oracle)."""
    import itertools
    G = np.asarray(G, dtype=float)
    d = G.shape[0]
    out = []
    for x in itertools.product(range(-box, box + 1), repeat=d):
        nz = next((v for v in x if v != 0), 1)
        if nz < 0:
            continue
        xv = np.array(x, dtype=float)
        if xv @ G @ xv <= bound + 1e-9 * (abs(bound) + 1):
            out.append(tuple(x))
    return out


# ---------------------------------------------------------------------------

def random_ball_point(R, rng):
    """Point uniformly distributed w.r.t. hyperbolic volume in ball(0, R)."""
    u = rng.uniform(0.0, ball_volume(R))
    r = inverse_ball_volume(u)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return math.tanh(r / 2) * d


@dataclass
class EnumSchedule:
    """Parameters of both enumeration strategies.

    Deterministic bounds A_n = n_deg + 2^n.  Probabilistic: bound
    A = alpha * |disc_F N(disc_B)|^(1/4n), N_n = ceil((1+eta)^n beta covol^2)
    centres in ball(0, R_n), R_n = R_0 + eps n with vol(ball(R_0)) = covol^gamma.
    """
    degree: int
    covol: float
    disc: int = 1
    disc_B_norm: int = 1
    alpha: float = 10.0
    beta: float = 2.0
    gamma: float = 2.2
    eta: float = 0.5
    eps: float = 0.3

    def A_det(self, n):
        return self.degree + 2.0 ** n

    @property
    def A_prob(self):
        return self.alpha * abs(self.disc * self.disc_B_norm) ** (1.0 / (4 * self.degree))

    def N(self, n):
        return max(1, int(math.ceil((1 + self.eta) ** n * self.beta * self.covol ** 2)))

    @property
    def R0(self):
        return inverse_ball_volume(self.covol ** self.gamma)

    def R(self, n):
        return self.R0 + self.eps * n


class Enumerator:
    """Both Enumerate backends for Gamma(O) under a fixed splitting."""

    def __init__(self, order, splitting, schedule, rng=None):
        self.order = order
        self.splitting = splitting
        self.schedule = schedule
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.mats = order.split_basis(splitting)
        self.gram = gram_of_Q(order, splitting)
        self.scanned = 0
        self.stabilizer_hits = []

    def to_isometries(self, X):
        """Norm one rows of X mapped through rho (elements fixing 0 set aside)."""
        if len(X) == 0:
            return []
        O = self.order
        tr = O.trace_nrd(X)
        cand = X[np.abs(tr - O.field.degree) < 0.5]
        if len(cand) == 0:
            return []
        cand = cand[O.is_norm_one(cand)]
        out = []
        for c in cand:
            m = np.einsum("k,kij->ij", c.astype(float), self.mats)
            g = Isometry(m, coords=c, renormalize=True)
            if g.invrad < 1e-9:
                if not g.is_identity(1e-6):
                    self.stabilizer_hits.append(g)
                continue
            out.append(g)
        return out

    def deterministic(self, n):
        X, _ = fincke_pohst(self.gram, self.schedule.A_det(n))
        self.scanned += len(X)
        return self.to_isometries(X)

    def probabilistic(self, n):
        sch = self.schedule
        R = sch.R(n)
        found = {}
        for _ in range(sch.N(n)):
            w = random_ball_point(R, self.rng)
            G = gram_of_Q_centers(self.order, self.splitting, np.zeros(3), w, mats=self.mats)
            X, _ = fincke_pohst(G, sch.A_prob)
            self.scanned += len(X)
            for g in self.to_isometries(X):
                found.setdefault(g.key, g)
        return [found[k] for k in sorted(found, key=lambda k: (found[k].norm2, k))]
