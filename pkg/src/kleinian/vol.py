"""Hyperbolic volumes: the Lobachevsky function, orthoschemes, convex
polyhedra in the ball and balls of given radius."""
import math
from functools import lru_cache

import mpmath
import numpy as np

from .errors import UnboundedDomain


class LobachevskyTable:
    """Coefficients (zeta(2n) - 1) / (n (2n + 1)) of the accelerated series.

    ``nterms`` is chosen so that the tail bound for theta in [0, pi/2]
    stays below ``prec``.
    """

    def __init__(self, prec=1e-17, rmax=200):
        self.prec = prec
        x = 0.25  # theta / (2 pi) at theta = pi/2
        r = 1
        while r < rmax and (math.pi / 2) * x ** (2 * r + 2) / (1 - x * x) > prec:
            r += 1
        self.nterms = r
        with mpmath.workdps(30):
            self.coeffs = np.array([float((mpmath.zeta(2 * k) - 1) / (k * (2 * k + 1)))
                                    for k in range(1, rmax + 1)])

    @staticmethod
    def tail_bound(theta, r):
        """Bound for sum_{n>r} (zeta(2n)-1)/(n(2n+1)) (theta/pi)^{2n}."""
        x = abs(theta) / (2 * math.pi)
        return x ** (2 * r + 2) / (1 - x * x)

    def series(self, theta, r=None):
        r = self.nterms if r is None else r
        y = (theta / math.pi) ** 2
        acc = 0.0
        for c in self.coeffs[:r][::-1]:
            acc = acc * y + c
        return acc * y

    def value(self, theta, r=None):
        """L(theta) for theta in (-pi, pi), no range reduction."""
        if theta == 0.0:
            return 0.0
        a = abs(theta)
        x = theta / math.pi
        s = self.series(theta, r)
        return (math.pi * math.log((math.pi - theta) / (math.pi + theta))
                + theta * (3 - math.log(2 * a * (1 - x * x)) + s))


@lru_cache(maxsize=None)
def _table(prec):
    return LobachevskyTable(prec)


def lobachevsky(theta, prec=1e-17):
    """L(theta) = -int_0^theta ln|2 sin u| du (odd, period pi)."""
    tab = _table(prec)
    t = math.fmod(float(theta), math.pi)
    if t > math.pi / 2:
        t -= math.pi
    elif t < -math.pi / 2:
        t += math.pi
    if t < 0:
        return -tab.value(-t)
    return tab.value(t)


def orthoscheme_volume(alpha, gamma):
    """Volume of the orthoscheme with an ideal vertex, angles alpha and gamma."""
    L = lobachevsky
    return 0.25 * (L(alpha + gamma) + L(alpha - gamma) + 2 * L(math.pi / 2 - alpha))


def ball_volume(r):
    """Hyperbolic volume pi (sinh 2r - 2r) of a ball of radius r."""
    r = float(r)
    if r < 0.05:
        x = 2 * r
        # sinh x - x = x^3/6 + x^5/120 + ...
        term = x ** 3 / 6
        s = 0.0
        k = 3
        while abs(term) > 1e-18 * max(s, 1e-300) and k < 60:
            s += term
            term *= x * x / ((k + 1) * (k + 2))
            k += 2
        return math.pi * s
    return math.pi * (math.sinh(2 * r) - 2 * r)


def inverse_ball_volume(v, tol=1e-15):
    """Radius r with ball_volume(r) = v (Newton safeguarded by bisection)."""
    v = float(v)
    if v <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while ball_volume(hi) < v:
        lo, hi = hi, hi * 2
    # starting guess from the small or large radius asymptotics
    r = (3 * v / (4 * math.pi)) ** (1 / 3) if v < 1 else 0.5 * math.log(2 * v / math.pi + 1)
    r = min(max(r, lo), hi)
    for _ in range(200):
        f = ball_volume(r) - v
        if f > 0:
            hi = r
        else:
            lo = r
        d = 4 * math.pi * math.sinh(r) ** 2
        step = f / d if d > 0 else float("inf")
        nr = r - step
        if not (lo < nr < hi):
            nr = 0.5 * (lo + hi)
        if abs(nr - r) <= tol * max(1.0, r):
            return nr
        r = nr
    return r


# ---------------------------------------------------------------------------
# tetrahedra and polyhedra

def _ball_to_upper(p):
    from .ball import eta_inv
    return eta_inv(p)


def _ideal_tetra_infinity(xi, pts):
    """Volume of the tetrahedron (xi, p1, p2, p3) with xi on the sphere at infinity.

    Everything is moved to the upper half-space with xi at infinity; the three
    finite vertices then lie on a hemisphere, which is normalized to the unit
    hemisphere centred at 0.  The volume of the region above the hemisphere
    over a triangle PQR equals the signed sum of orthoscheme volumes over the
    triangles (0, X, H), (0, H, Y) for each side XY with foot H.
    """
    from .ball import eta_inv
    # reflect the ball so that xi sits at -j, well away from the pole of eta_inv at j
    target = np.array([0.0, 0.0, -1.0])
    v = np.asarray(xi, dtype=float) - target
    nv = np.linalg.norm(v)
    X = np.vstack([xi, pts])
    if nv > 1e-12:
        v /= nv
        X = X - 2 * np.outer(X @ v, v)
    # ball -> upper half space, then z -> -1/(z - z0) sends xi to infinity
    q = eta_inv(X)
    z0 = complex(q[0, 0], q[0, 1])
    zs = q[1:, 0] + 1j * q[1:, 1] - z0
    ts = q[1:, 2]
    n2 = np.abs(zs) ** 2 + ts ** 2
    # inversion w -> -1/w on (z, t) with z->-conj(z)/|w|^2, t -> t/|w|^2
    zi = -np.conj(zs) / n2
    ti = ts / n2
    # hemisphere |z - c|^2 + t^2 = R^2 through the three points: linear in (c, R^2 - |c|^2)
    M = np.column_stack([2 * zi.real, 2 * zi.imag, np.ones(3)])
    rhs = np.abs(zi) ** 2 + ti ** 2
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return 0.0
    c = complex(sol[0], sol[1])
    R2 = sol[2] + abs(c) ** 2
    if R2 <= 0:
        return 0.0
    R = math.sqrt(R2)
    P = (zi - c) / R  # projections onto the unit disc
    return _prism_volume(P)


def _tri_sign(a, b, c):
    d = (b - a).real * (c - a).imag - (b - a).imag * (c - a).real
    return 1.0 if d > 0 else -1.0 if d < 0 else 0.0


def _right_piece(H, X):
    """Signed volume above the unit hemisphere over the right triangle (0, H, X)."""
    dh = abs(H)
    dx = abs(X - H)
    if dx < 1e-300:
        return 0.0
    alpha = math.atan2(dx, dh)
    gamma = math.acos(min(1.0, dh))
    return orthoscheme_volume(alpha, gamma)


def _prism_volume(P):
    """Volume above the unit hemisphere over the triangle with vertices P (in the disc)."""
    p, q, r = P
    s = _tri_sign(p, q, r)
    if s == 0.0:
        return 0.0
    total = 0.0
    for X, Y in ((p, q), (q, r), (r, p)):
        d = Y - X
        L2 = abs(d) ** 2
        if L2 < 1e-300:
            continue
        u = -(X.conjugate() * d).real / L2
        H = X + u * d
        if abs(H) < 1e-15:
            # side through the origin contributes nothing
            continue
        total += _tri_sign(0, X, H) * _right_piece(H, X) + _tri_sign(0, H, Y) * _right_piece(H, Y)
    return s * total


def _klein_boundary_hit(a, b):
    """Point where the ray from a through b (Klein model) meets the unit sphere."""
    d = b - a
    A = d @ d
    B = 2 * a @ d
    C = a @ a - 1
    disc = max(B * B - 4 * A * C, 0.0)
    s = (-B + math.sqrt(disc)) / (2 * A)
    return a + s * d


def tetra_volume_klein(K, ideal=None, tol=1e-9):
    """Volume of the hyperbolic tetrahedron with Klein-model vertices K (4 x 3).

    ``ideal`` flags vertices on the sphere at infinity.  If no vertex is
    ideal, the longest edge is extended to the sphere at infinity and the
    volume is written as the difference of two tetrahedra with an ideal
    vertex.
    """
    from .ball import klein_to_ball
    K = np.asarray(K, dtype=float)
    if ideal is None:
        ideal = np.abs(np.linalg.norm(K, axis=1) - 1) <= tol
    # degenerate (flat) tetrahedra have zero volume
    vol6 = abs(np.linalg.det(K[1:] - K[0]))
    scale = max(np.linalg.norm(K[1:] - K[0], axis=1).max(), 1e-300)
    if vol6 <= 1e-14 * scale ** 3:
        return 0.0
    idx = [i for i in range(4) if ideal[i]]
    if idx:
        i = idx[0]
        rest = [j for j in range(4) if j != i]
        xi = K[i] / np.linalg.norm(K[i])
        return abs(_ideal_tetra_infinity(klein_to_ball(xi), klein_to_ball(K[rest])))
    best = None
    for i in range(4):
        for j in range(i + 1, 4):
            L = np.linalg.norm(K[i] - K[j])
            if best is None or L > best[0]:
                best = (L, i, j)
    _, i, j = best
    xi = _klein_boundary_hit(K[i], K[j])  # beyond K[j]
    xi = xi / np.linalg.norm(xi)
    others = [k for k in range(4) if k not in (i, j)]
    B = klein_to_ball
    xib = B(xi)
    v_far = abs(_ideal_tetra_infinity(xib, B(np.array([K[i], K[others[0]], K[others[1]]]))))
    v_near = abs(_ideal_tetra_infinity(xib, B(np.array([K[j], K[others[0]], K[others[1]]]))))
    return v_far - v_near


def polyhedron_volume(P, center=None):
    """Hyperbolic volume of a bounded (or finite-volume) exterior domain.

    The boundary faces are fan-triangulated and coned off to an interior
    point (the origin by default, which always lies inside).
    """
    if not P.finite_volume:
        raise UnboundedDomain("domain has infinite volume")
    o = np.zeros(3) if center is None else np.asarray(center, dtype=float)
    total = 0.0
    V = P.vertices
    ideal = P.ideal
    for tri in P.triangles():
        K = np.vstack([o, V[list(tri)]])
        flags = np.concatenate([[False], ideal[list(tri)]])
        total += tetra_volume_klein(K, flags)
    return total


def convex_hull_volume(points_klein, ideal_tol=1e-9):
    """Volume of the convex hull of Klein-model points (test helper and splitting)."""
    from scipy.spatial import ConvexHull
    pts = np.asarray(points_klein, dtype=float)
    hull = ConvexHull(pts)
    o = pts.mean(axis=0)
    ideal = np.abs(np.linalg.norm(pts, axis=1) - 1) <= ideal_tol
    total = 0.0
    for simplex in hull.simplices:
        K = np.vstack([o, pts[simplex]])
        flags = np.concatenate([[False], ideal[simplex]])
        total += tetra_volume_klein(K, flags)
    return total
