"""Combinatorics of exterior domains Ext(S) = intersection of the Ext(g).

Each isometric sphere is orthogonal to the unit sphere, so in the Klein model
its exterior becomes the Euclidean half-space c.x <= 1 (c the sphere centre).
The domain is therefore a convex polytope, built here by clipping a bounding
cube with these half-spaces in order of decreasing radius.
"""
from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from .ball import (Isometry, act, ball_to_klein, boundary_fixed_points, has_sphere,
                   isometric_sphere, klein_to_ball, psl_distance)
from .errors import DegenerateIncidence, NotPaired, OriginFixed

CUBE = 2.0


@dataclass
class EdgeCycle:
    edges: list          # edge ids e_1..e_m
    faces: list          # face (element index) used to leave each edge
    transformations: list  # element indices g_1..g_m
    h: Isometry
    angle: float
    nu: object = None    # int or math.inf
    kind: str = ""       # identity / elliptic / parabolic / loxodromic
    fixes_pointwise: bool = False

    @property
    def length(self):
        return len(self.edges)


@dataclass
class TangencyCycle:
    vertices: list       # tangency vertex ids
    transformations: list
    h: Isometry


class _Builder:
    def __init__(self, tol):
        self.tol = tol
        s = CUBE
        self.V = [np.array([x, y, z], dtype=float) for x in (-s, s) for y in (-s, s) for z in (-s, s)]
        idx = lambda x, y, z: (x > 0) * 4 + (y > 0) * 2 + (z > 0)
        self.faces = {
            -1: [idx(0, 0, 0), idx(0, 0, 1), idx(0, 1, 1), idx(0, 1, 0)],  # x = -s
            -2: [idx(1, 0, 0), idx(1, 1, 0), idx(1, 1, 1), idx(1, 0, 1)],  # x = +s
            -3: [idx(0, 0, 0), idx(1, 0, 0), idx(1, 0, 1), idx(0, 0, 1)],  # y = -s
            -4: [idx(0, 1, 0), idx(0, 1, 1), idx(1, 1, 1), idx(1, 1, 0)],  # y = +s
            -5: [idx(0, 0, 0), idx(0, 1, 0), idx(1, 1, 0), idx(1, 0, 0)],  # z = -s
            -6: [idx(0, 0, 1), idx(1, 0, 1), idx(1, 1, 1), idx(0, 1, 1)],  # z = +s
        }
        self.planes = {
            -1: (np.array([-1.0, 0, 0]), s), -2: (np.array([1.0, 0, 0]), s),
            -3: (np.array([0, -1.0, 0]), s), -4: (np.array([0, 1.0, 0]), s),
            -5: (np.array([0, 0, -1.0]), s), -6: (np.array([0, 0, 1.0]), s),
        }

    def clip(self, label, n, d):
        tol = self.tol
        V = np.array(self.V)
        s = V @ n - d
        st = np.where(s > tol, 1, np.where(s < -tol, -1, 0))
        used = sorted({v for cyc in self.faces.values() for v in cyc})
        if not any(st[v] > 0 for v in used):
            return False
        cut = {}
        new_faces = {}
        for lab, cyc in self.faces.items():
            out = []
            m = len(cyc)
            for k in range(m):
                a, b = cyc[k], cyc[(k + 1) % m]
                if st[a] <= 0:
                    out.append(a)
                if st[a] * st[b] < 0:
                    key = (min(a, b), max(a, b))
                    if key not in cut:
                        t = s[a] / (s[a] - s[b])
                        p = V[a] + t * (V[b] - V[a])
                        cut[key] = self._new_vertex(p, list(cut.values()))
                    out.append(cut[key])
            out = _dedupe_cycle(out)
            if len(out) >= 3:
                new_faces[lab] = out
        # the new face: vertices lying on the plane
        on = sorted({v for cyc in new_faces.values() for v in cyc
                     if v in cut.values() or (v < len(st) and st[v] == 0)})
        if len(on) >= 3:
            cap = _order_polygon([self.V[v] for v in on], n)
            cyc = [on[k] for k in cap]
            if len(cyc) >= 3:
                new_faces[label] = cyc
        self.faces = new_faces
        self.planes[label] = (n, d)
        return True

    def _new_vertex(self, p, recent):
        for v in recent:
            if np.linalg.norm(self.V[v] - p) <= self.tol:
                return v
        self.V.append(p)
        return len(self.V) - 1

    def compact(self):
        used = sorted({v for cyc in self.faces.values() for v in cyc})
        remap = {v: i for i, v in enumerate(used)}
        self.V = [self.V[v] for v in used]
        self.faces = {lab: [remap[v] for v in cyc] for lab, cyc in self.faces.items()}


def _dedupe_cycle(cyc):
    out = []
    for v in cyc:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _plane_basis(n):
    n = n / np.linalg.norm(n)
    a = np.array([1.0, 0, 0]) if abs(n[0]) < 0.9 else np.array([0, 1.0, 0])
    u = np.cross(n, a)
    u /= np.linalg.norm(u)
    w = np.cross(n, u)
    return u, w


def _order_polygon(points, n):
    """Indices of ``points`` (coplanar, convex position) in counter-clockwise
    order seen from the side ``n`` points to."""
    P = np.array(points)
    u, w = _plane_basis(n)
    c = P.mean(axis=0)
    ang = np.arctan2((P - c) @ w, (P - c) @ u)
    return list(np.argsort(ang, kind="stable"))


def _seg_point_dist(p, a, b):
    d = b - a
    L2 = d @ d
    t = 0.0 if L2 == 0 else min(1.0, max(0.0, (p - a) @ d / L2))
    return float(np.linalg.norm(a + t * d - p)), t


def _chord_in_ball(a, b):
    """Parameters [t0, t1] of the part of segment a->b inside the closed unit ball, or None."""
    d = b - a
    A = d @ d
    B = 2 * a @ d
    C = a @ a - 1
    disc = B * B - 4 * A * C
    if A == 0 or disc <= 0:
        return None
    r = math.sqrt(disc)
    t0 = max(0.0, (-B - r) / (2 * A))
    t1 = min(1.0, (-B + r) / (2 * A))
    if t0 >= t1:
        return None
    return t0, t1


class ExteriorDomain:
    """Face/edge/vertex lattice of Ext(S).

    Attributes
    ----------
    elements : list of Isometry
        The defining list S, in the given order; face labels index into it.
    centers, radii : arrays
        Isometric spheres of the elements.
    vertices : (V, 3) array
        Klein-model coordinates.
    ideal : (V,) bool
        Vertices on the sphere at infinity.
    faces : dict label -> list of vertex ids
        Counter-clockwise seen from outside.  Negative labels are faces of the
        bounding cube (the domain then has infinite volume).
    edges : list of (a, b, f1, f2)
    """

    def __init__(self, elements, tol=None, ideal_tol=1e-7, tangency_tol=1e-8):
        self.elements = list(elements)
        self.tol = 1e-9 if tol is None else tol
        self.ideal_tol = ideal_tol
        self.tangency_tol = tangency_tol
        m = len(self.elements)
        self.centers = np.zeros((m, 3))
        self.radii = np.zeros(m)
        for i, g in enumerate(self.elements):
            if not has_sphere(g):
                raise OriginFixed(g)
            self.centers[i], self.radii[i] = isometric_sphere(g)
        self._check_duplicates()
        self.insertion_order = sorted(range(m), key=lambda i: (-self.radii[i], tuple(self.centers[i])))
        self._build()

    # -- construction ---------------------------------------------------------
    def _check_duplicates(self):
        C, R = self.centers, self.radii
        dups = []
        for i in range(len(R)):
            d = np.linalg.norm(C[i + 1:] - C[i], axis=1) + np.abs(R[i + 1:] - R[i])
            for j in np.nonzero(d < 1e-9 * (1 + R[i]))[0]:
                dups.append((i, i + 1 + int(j)))
        if dups:
            raise DegenerateIncidence("coinciding isometric spheres", dups)

    def plane(self, label):
        return self._builder.planes[label]

    def _build(self):
        b = _Builder(self.tol)
        for i in self.insertion_order:
            c = self.centers[i]
            nc = np.linalg.norm(c)
            b.clip(i, c / nc, 1.0 / nc)
            b.compact()
        self._builder = b
        self.faces = b.faces
        V = np.array(b.V)
        # incident planes per vertex and snapping onto them
        inc = {}
        for lab, cyc in self.faces.items():
            for v in cyc:
                inc.setdefault(v, set()).add(lab)
        for v, labs in inc.items():
            if len(labs) >= 3:
                N = np.array([b.planes[l][0] for l in labs])
                d = np.array([b.planes[l][1] for l in labs])
                x, *_ = np.linalg.lstsq(N, d, rcond=None)
                if np.linalg.norm(x - V[v]) < 10 * self.tol + 1e-12:
                    V[v] = x
        r = np.linalg.norm(V, axis=1)
        self.ideal = np.abs(r - 1) <= self.ideal_tol
        V[self.ideal] /= r[self.ideal][:, None]
        self.vertices = V
        self.vertex_faces = inc
        self.outside = r > 1 + self.ideal_tol
        # orientation: counter-clockwise seen from outside
        for lab, cyc in self.faces.items():
            n = b.planes[lab][0]
            P = V[cyc]
            area = np.zeros(3)
            for k in range(len(cyc)):
                area += np.cross(P[k], P[(k + 1) % len(cyc)])
            if area @ n < 0:
                self.faces[lab] = cyc[::-1]
        self._split_reflection_edges()
        self._make_edges()
        self.finite_volume = (not any(l < 0 for l in self.faces)) and not self.outside.any()

    def _split_reflection_edges(self):
        """Insert the points where the axis of an involution g (I(g) = I(g^-1))
        crosses the boundary of its face, so that g maps edges onto edges."""
        V = list(self.vertices)
        ideal = list(self.ideal)
        outside = list(self.outside)
        changed = False
        for lab in [l for l in self.faces if l >= 0]:
            g = self.elements[lab]
            if abs(g.trace) > 1e-8:
                continue
            fps = boundary_fixed_points(g)
            if len(fps) != 2:
                continue
            p0, p1 = fps
            cyc = self.faces[lab]
            for k in range(len(cyc)):
                a, bb = cyc[k], cyc[(k + 1) % len(cyc)]
                x = _segment_line_crossing(V[a], V[bb], p0, p1, 1e-7)
                if x is None:
                    continue
                if min(np.linalg.norm(x - V[a]), np.linalg.norm(x - V[bb])) < 1e-7:
                    continue
                V.append(x)
                ideal.append(False)
                outside.append(bool(np.linalg.norm(x) > 1))
                new = len(V) - 1
                # insert into every face having the edge (a, bb)
                for l2, c2 in self.faces.items():
                    for q in range(len(c2)):
                        u, w = c2[q], c2[(q + 1) % len(c2)]
                        if {u, w} == {a, bb}:
                            c2.insert(q + 1, new)
                            break
                self.vertex_faces[new] = {l for l, c2 in self.faces.items() if new in c2}
                changed = True
                cyc = self.faces[lab]
        if changed:
            self.vertices = np.array(V)
            self.ideal = np.array(ideal)
            self.outside = np.array(outside)

    def _make_edges(self):
        emap = {}
        for lab, cyc in self.faces.items():
            for k in range(len(cyc)):
                a, b = cyc[k], cyc[(k + 1) % len(cyc)]
                emap.setdefault((min(a, b), max(a, b)), []).append(lab)
        bad = [k for k, fs in emap.items() if len(fs) != 2]
        if bad:
            raise DegenerateIncidence(f"{len(bad)} edges without exactly two faces")
        self.edges = [(a, b, fs[0], fs[1]) for (a, b), fs in sorted(emap.items())]
        self._edge_index = {(a, b): i for i, (a, b, _, _) in enumerate(self.edges)}
        self._pair_edges = {}
        for i, (a, b, f1, f2) in enumerate(self.edges):
            self._pair_edges.setdefault(frozenset((f1, f2)), []).append(i)

    # -- queries ---------------------------------------------------------------
    @property
    def sphere_faces(self):
        return sorted(l for l in self.faces if l >= 0)

    def n_faces(self):
        return len(self.faces)

    def face_meets_ball(self, lab):
        """True when the face polygon meets the open unit ball."""
        n, d = self.plane(lab)
        foot = n * d
        rad = math.sqrt(max(1 - d * d, 0.0))
        P = self.vertices[self.faces[lab]]
        u, w = _plane_basis(n)
        Q = np.column_stack([(P - foot) @ u, (P - foot) @ w])
        # inside test for the foot point (origin of Q)
        m = len(Q)
        inside = True
        for k in range(m):
            a, b = Q[k], Q[(k + 1) % m]
            if (b[0] - a[0]) * (0 - a[1]) - (b[1] - a[1]) * (0 - a[0]) < 0:
                inside = False
                break
        if inside:
            return True
        for k in range(m):
            dist, _ = _seg_point_dist(np.zeros(2), Q[k], Q[(k + 1) % m])
            if dist < rad * (1 - 1e-12):
                return True
        return False

    def active_faces(self):
        return [l for l in self.sphere_faces if self.face_meets_ball(l)]

    def edge_is_active(self, e):
        a, b = self.edges[e][:2]
        dist, _ = _seg_point_dist(np.zeros(3), self.vertices[a], self.vertices[b])
        return dist < 1 - 1e-12

    def active_edges(self):
        return [e for e in range(len(self.edges))
                if self.edges[e][2] >= 0 and self.edges[e][3] >= 0 and self.edge_is_active(e)]

    def edge_points(self, e, fractions=(0.5,)):
        """Ball-model points on the part of edge e inside the ball."""
        a, b = self.edges[e][:2]
        A, B = self.vertices[a], self.vertices[b]
        ch = _chord_in_ball(A, B)
        if ch is None:
            return np.zeros((0, 3))
        t0, t1 = ch
        ts = [t0 + f * (t1 - t0) for f in fractions]
        K = np.array([A + t * (B - A) for t in ts])
        return klein_to_ball(K)

    def face_point(self, lab):
        """A point in the relative interior of a face (ball model)."""
        P = self.vertices[self.faces[lab]]
        c = P.mean(axis=0)
        if np.linalg.norm(c) >= 1:
            n, d = self.plane(lab)
            c = 0.5 * (c / np.linalg.norm(c) * 0.999 + n * d)
        return klein_to_ball(c)

    def dihedral_angle(self, e):
        _, _, f1, f2 = self.edges[e]
        return dihedral_between(self.centers[f1], self.radii[f1], self.centers[f2], self.radii[f2])

    def triangles(self):
        """Fan triangulation of the sphere faces (vertex id triples)."""
        tris = []
        for lab in self.sphere_faces:
            cyc = self.faces[lab]
            for k in range(1, len(cyc) - 1):
                tris.append((cyc[0], cyc[k], cyc[k + 1]))
        return tris

    def euler_characteristic(self):
        used = {v for cyc in self.faces.values() for v in cyc}
        return len(self.faces) - len(self.edges) + len(used)

    def contains_klein(self, K, slack=0.0):
        K = np.atleast_2d(K)
        s = K @ self.centers.T - 1.0
        return np.all(s <= slack, axis=1)

    def contains(self, P, slack=0.0):
        """Ball-model points in the closed domain (up to slack in the Klein inequality)."""
        return self.contains_klein(ball_to_klein(np.atleast_2d(P)), slack)

    def key(self):
        """Hashable description of the face set (used to detect changes)."""
        return tuple(sorted(self.elements[l].key for l in self.sphere_faces))


def dihedral_between(c1, r1, c2, r2):
    """Interior angle of Ext(g1) ∩ Ext(g2) along I(g1) ∩ I(g2)."""
    cosv = (1 - float(np.dot(c1, c2))) / (r1 * r2)
    return math.acos(max(-1.0, min(1.0, cosv)))


def _segment_line_crossing(a, b, p0, p1, tol):
    """Point of segment [a, b] lying on the line p0 p1, if any."""
    d1 = b - a
    d2 = p1 - p0
    r = a - p0
    A = np.array([[d1 @ d1, -d1 @ d2], [-d1 @ d2, d2 @ d2]])
    rhs = np.array([-d1 @ r, d2 @ r])
    if abs(np.linalg.det(A)) < 1e-18:
        return None
    s, t = np.linalg.solve(A, rhs)
    if s < 0 or s > 1:
        return None
    x = a + s * d1
    y = p0 + t * d2
    if np.linalg.norm(x - y) > tol:
        return None
    return x


def compute_exterior(S, tol=None):
    """ExteriorDomain of the list S (raises OriginFixed / DegenerateIncidence)."""
    return ExteriorDomain(S, tol=tol)


def minimal_defining_set(E):
    """Elements whose isometric sphere carries a face meeting the open ball."""
    return [E.elements[l] for l in E.active_faces()]


# ---------------------------------------------------------------------------
# pairing structure

def inverse_map(E, labels=None, tol=1e-7):
    """face label -> label of the inverse element among the faces (or None)."""
    labels = E.sphere_faces if labels is None else labels
    out = {}
    for l in labels:
        m = E.elements[l].m
        minv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
        out[l] = None
        for l2 in labels:
            if psl_distance(E.elements[l2].m, minv) < tol * (1 + E.elements[l].norm2):
                out[l] = l2
                break
    return out


def map_vertex(E, g, v):
    """Image of vertex v (Klein) under g, returned in Klein coordinates."""
    p = klein_to_ball(E.vertices[v])
    q = act(g, p)
    if E.ideal[v]:
        q = q / np.linalg.norm(q)
    return ball_to_klein(q)


def check_face_pairing(E, inv=None, tol=1e-6):
    """Verify that each face is mapped onto the face of the inverse element.

    Returns a list of failures (empty when the domain has a face pairing).
    Requires a finite-volume domain (all vertices in the closed ball).
    """
    inv = inverse_map(E) if inv is None else inv
    fails = []
    for lab in E.sphere_faces:
        j = inv.get(lab)
        if j is None:
            fails.append((lab, "no inverse face"))
            continue
        if E.outside[E.faces[lab]].any():
            fails.append((lab, "face leaves the ball"))
            continue
        g = E.elements[lab]
        img = np.array([map_vertex(E, g, v) for v in E.faces[lab]])
        target = E.vertices[E.faces[j]]
        if len(img) != len(target):
            fails.append((lab, "vertex count"))
            continue
        D = np.linalg.norm(img[:, None, :] - target[None, :, :], axis=2)
        if D.min(axis=1).max() > tol or D.min(axis=0).max() > tol:
            fails.append((lab, f"vertex mismatch {D.min(axis=1).max():.2e}"))
    return fails


def edge_image(E, e, lab, inv, tol=1e-6):
    """Edge g e where g is the element of face ``lab`` (one of the faces of e).

    Returns (edge id, other face) or raises NotPaired.
    """
    j = inv.get(lab)
    if j is None:
        raise NotPaired(f"face {lab} has no inverse face")
    g = E.elements[lab]
    pts = E.edge_points(e, (0.3, 0.7))
    if len(pts) == 0:
        raise NotPaired(f"edge {e} is outside the ball")
    K = ball_to_klein(act(g, pts))
    n = E.centers
    s = np.abs(K @ n.T - 1.0) / np.linalg.norm(n, axis=1)  # (points, faces)
    worst = s.max(axis=0)
    # nearly coinciding planes can both pass the tolerance; try the closest first
    cands = sorted((worst[l], l) for l in E.sphere_faces if l != j and worst[l] < tol)
    for _, f2 in cands:
        best = None
        for e2 in E._pair_edges.get(frozenset((j, f2)), []):
            a, b = E.edges[e2][:2]
            dist = max(_seg_point_dist(k, E.vertices[a], E.vertices[b])[0] for k in K)
            if best is None or dist < best[0]:
                best = (dist, e2)
        if best is not None and best[0] <= tol:
            return best[1], f2
    raise NotPaired(f"image of edge {e} under face {lab} is not an edge")


def edge_cycles(E, inv=None, order=None, tol=1e-6, strict=True, ctx=None):
    """Partition the edges into cycles and compute cycle transformations.

    With ``strict=False`` edges whose cycle cannot be followed (the domain
    has no face pairing there) are skipped instead of raising NotPaired.
    """
    inv = inverse_map(E) if inv is None else inv
    if strict and any(v is None for v in inv.values()):
        missing = [l for l, v in inv.items() if v is None]
        raise NotPaired(f"faces without inverse: {missing}")
    seen = set()
    cycles = []
    nE = len(E.edges)
    for e0 in range(nE):
        if e0 in seen:
            continue
        f0 = E.edges[e0][2]
        if f0 < 0 or E.edges[e0][3] < 0 or not E.edge_is_active(e0):
            continue
        try:
            cyc = _follow_cycle(E, e0, f0, inv, order, tol, ctx)
        except NotPaired:
            if strict:
                raise
            continue
        seen.update(cyc.edges)
        cycles.append(cyc)
    return cycles


def _follow_cycle(E, e0, f0, inv, order, tol, ctx):
    nE = len(E.edges)
    state = (e0, f0)
    edges, faces, gens = [], [], []
    angle = 0.0
    for _ in range(2 * nE + 2):
        e, f = state
        edges.append(e)
        faces.append(f)
        gens.append(f)
        angle += E.dihedral_angle(e)
        e2, f2 = edge_image(E, e, f, inv, tol)
        state = (e2, f2)
        if state == (e0, f0):
            break
    else:
        raise NotPaired(f"edge cycle through edge {e0} does not close")
    h = None
    for f in gens:
        g = E.elements[f]
        if h is None:
            h = g
        else:
            h = ctx.compose(g, h) if ctx is not None else g.compose(h, order)
    cyc = EdgeCycle(edges, faces, gens, h, angle)
    _classify_cycle(E, cyc)
    return cyc


def _classify_cycle(E, cyc, tol=1e-6):
    from .ball import classify
    h = cyc.h
    cyc.kind = classify(h, tol)
    pts = E.edge_points(cyc.edges[0], (0.25, 0.75))
    if len(pts):
        img = act(h, pts)
        cyc.fixes_pointwise = bool(np.max(np.linalg.norm(img - pts, axis=1)) < 1e-6)
    if cyc.kind == "identity":
        cyc.nu = 1
    elif cyc.kind == "elliptic":
        cyc.nu = elliptic_order(h)
    else:
        cyc.nu = math.inf


def elliptic_order(h, cap=10000, tol=1e-7):
    """Order of an elliptic element in PSL_2 from its rotation angle (inf if none found)."""
    from fractions import Fraction
    t = max(-1.0, min(1.0, abs(h.trace.real) / 2))
    phi = 2 * math.acos(t)  # rotation angle in (0, pi]
    fr = Fraction(phi / (2 * math.pi)).limit_denominator(cap)
    if fr.numerator == 0 or abs(float(fr) * 2 * math.pi - phi) > tol * max(1, fr.denominator):
        return math.inf
    return fr.denominator


def tangency_vertices(E, tol=None):
    """Points z of the sphere at infinity where two faces are tangent.

    Returns a list of (z, f1, f2) with z in Klein coordinates (= ball
    coordinates on the boundary).
    """
    tol = E.tangency_tol if tol is None else tol
    labs = [l for l in E.sphere_faces]
    out = []
    for a_ in range(len(labs)):
        for b_ in range(a_ + 1, len(labs)):
            i, j = labs[a_], labs[b_]
            c1, c2 = E.centers[i], E.centers[j]
            cosv = (1 - c1 @ c2) / (E.radii[i] * E.radii[j])
            if abs(cosv - 1) > tol:
                continue
            G = np.array([[c1 @ c1, c1 @ c2], [c1 @ c2, c2 @ c2]])
            try:
                lam = np.linalg.solve(G, np.ones(2))
            except np.linalg.LinAlgError:
                continue
            z = lam[0] * c1 + lam[1] * c2
            if abs(np.linalg.norm(z) - 1) > 1e-5:
                continue
            z = z / np.linalg.norm(z)
            if not E.contains_klein(z, slack=1e-7)[0]:
                continue
            out.append((z, i, j))
    return out


def tangency_cycles(E, inv=None, order=None, tol=1e-6, ctx=None):
    """Periodic tangency vertex cycles and the finite chains (returned separately)."""
    inv = inverse_map(E) if inv is None else inv
    tv = tangency_vertices(E)
    index = {}
    for k, (z, i, j) in enumerate(tv):
        index.setdefault(i, []).append((k, j))
        index.setdefault(j, []).append((k, i))

    def find(z, f):
        for k, other in index.get(f, []):
            if np.linalg.norm(tv[k][0] - z) < tol:
                return k, other
        return None

    states = []
    for k, (z, i, j) in enumerate(tv):
        states.append((k, i, j))
        states.append((k, j, i))
    seen = set()
    cycles, chains = [], []
    for st in states:
        if st in seen:
            continue
        path = [st]
        gens = []
        cur = st
        closed = False
        for _ in range(2 * len(states) + 2):
            k, fprev, f = cur
            g = E.elements[f]
            jf = inv.get(f)
            if jf is None:
                break
            z2 = act(g, tv[k][0][None, :])[0]
            z2 = z2 / np.linalg.norm(z2)
            nxt = find(z2, jf)
            gens.append(f)
            if nxt is None:
                break
            cur = (nxt[0], jf, nxt[1])
            if cur == st:
                closed = True
                break
            if cur in path:
                break
            path.append(cur)
        seen.update(path)
        if closed:
            h = None
            for f in gens:
                g = E.elements[f]
                if h is None:
                    h = g
                else:
                    h = ctx.compose(g, h) if ctx is not None else g.compose(h, order)
            cycles.append(TangencyCycle([p[0] for p in path], gens, h))
        else:
            chains.append([p[0] for p in path])
    # a cycle and its reverse describe the same thing; keep one of each
    uniq = []
    keys = set()
    for c in cycles:
        key = frozenset(c.vertices), frozenset(frozenset((f, inv.get(f))) for f in c.transformations)
        if key in keys:
            continue
        keys.add(key)
        uniq.append(c)
    return uniq, chains
