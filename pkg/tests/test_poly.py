import math

import numpy as np
import pytest

from kleinian import errors
from kleinian.ball import Isometry, act, boost, dist
from kleinian.poly import (ExteriorDomain, check_face_pairing, dihedral_between, edge_cycles,
                           inverse_map, minimal_defining_set)


def bisector(q):
    """Element g with g^-1(0) = q, so I(g) is the bisector of 0 and q."""
    return boost(np.asarray(q, dtype=float)).inverse()


def _ball_radius_for_center_norm(cn):
    # Klein plane at distance 1/cn; the bisected point sits at twice the hyperbolic distance
    t = 1.0 / cn  # tanh(D/4) in terms of the ball radius of the midpoint, Klein radius = tanh(D/2)
    m = t / (1 + math.sqrt(1 - t * t))  # ball radius of the midpoint
    return 2 * m / (1 + m * m)


def _sphere_elt(c):
    c = np.asarray(c, dtype=float)
    cn = np.linalg.norm(c)
    return bisector(c / cn * _ball_radius_for_center_norm(cn))


def _brute_inside(S, x):
    o = np.zeros(3)
    return all(dist(x, o) <= dist(x, act(g.inverse(), o)) + 1e-12 for g in S)


def test_bisector_helper_places_spheres():
    E = ExteriorDomain([_sphere_elt([1, 1, 0]), _sphere_elt([1, 0, 1])])
    assert np.allclose(E.centers, [[1, 1, 0], [1, 0, 1]], atol=1e-12)
    assert np.allclose(E.radii, [1, 1])


def test_two_disjoint_spheres():
    E = ExteriorDomain([_sphere_elt([2, 0, 0]), _sphere_elt([-2, 0, 0])])
    assert sorted(E.sphere_faces) == [0, 1]
    assert [e for e in E.edges if e[2] >= 0 and e[3] >= 0] == []
    assert not E.finite_volume
    assert E.euler_characteristic() == 2


def test_three_spheres_right_angle():
    S = [_sphere_elt([1, 1, 0]), _sphere_elt([1, 0, 1]), _sphere_elt([1, -1, 0])]
    E = ExteriorDomain(S)
    sphere_edges = [e for e in range(len(E.edges)) if min(E.edges[e][2:]) >= 0]
    assert len(E.sphere_faces) == 3
    pairs = {frozenset(E.edges[e][2:]) for e in sphere_edges}
    assert frozenset({0, 1}) in pairs and frozenset({1, 2}) in pairs
    e01 = next(e for e in sphere_edges if set(E.edges[e][2:]) == {0, 1})
    assert abs(E.dihedral_angle(e01) - math.pi / 2) < 1e-12
    assert E.euler_characteristic() == 2


def test_dihedral_matches_sphere_intersection_angle(rng):
    """Euclidean angle between orthogonal spheres is the hyperbolic angle (conformal model)."""
    for _ in range(20):
        c1, c2 = rng.normal(size=3), rng.normal(size=3)
        c1 *= 1.5 / np.linalg.norm(c1)
        c2 *= 1.5 / np.linalg.norm(c2)
        r1, r2 = math.sqrt(c1 @ c1 - 1), math.sqrt(c2 @ c2 - 1)
        d2 = (c1 - c2) @ (c1 - c2)
        if not (r1 - r2) ** 2 < d2 < (r1 + r2) ** 2:
            continue
        sphere_angle = math.acos((r1 * r1 + r2 * r2 - d2) / (2 * r1 * r2))
        assert abs(dihedral_between(c1, r1, c2, r2) - (math.pi - sphere_angle)) < 1e-10


def test_membership_against_brute_force(rng):
    dirs = rng.normal(size=(8, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    S = [bisector(r * v) for r, v in zip(rng.uniform(0.3, 0.9, size=8), dirs)]
    E = ExteriorDomain(S)
    pts = rng.normal(size=(400, 3))
    pts *= (rng.uniform(size=400) ** (1 / 3) * 0.95 / np.linalg.norm(pts, axis=1))[:, None]
    got = E.contains(pts)
    expect = np.array([_brute_inside(S, p) for p in pts])
    assert (got == expect).all()


def test_origin_fixed_rejected():
    g = Isometry([[1j, 0], [0, -1j]])
    with pytest.raises(errors.OriginFixed):
        ExteriorDomain([g])


def test_coinciding_spheres_rejected():
    g = _sphere_elt([1, 1, 0])
    h = Isometry(-g.m)
    with pytest.raises(errors.DegenerateIncidence):
        ExteriorDomain([g, h])


def test_real_domain_structure(bianchi15, rng):
    E = bianchi15.domain
    assert E.finite_volume
    assert E.euler_characteristic() == 2
    # minimal defining set is idempotent and describes the same region
    M = minimal_defining_set(E)
    E2 = ExteriorDomain(M)
    assert E2.key() == E.key()
    assert {g.key for g in minimal_defining_set(E2)} == {g.key for g in M}
    pts = rng.normal(size=(300, 3))
    pts *= (rng.uniform(size=300) ** (1 / 3) * 0.99 / np.linalg.norm(pts, axis=1))[:, None]
    assert (E.contains(pts) == E2.contains(pts)).all()
    # faces are paired and every edge cycle closes up
    inv = inverse_map(E)
    assert all(v is not None for v in inv.values())
    assert check_face_pairing(E) == []
    cycles = edge_cycles(E)
    assert sum(c.length for c in cycles) == len(E.active_edges())
