import math

import mpmath
import numpy as np
import pytest

from kleinian.vol import (LobachevskyTable, ball_volume, convex_hull_volume, inverse_ball_volume,
                          lobachevsky, tetra_volume_klein)

# regular ideal tetrahedron, 3 L(pi/3): frozen from mpmath clsin(2, 2pi/3) * 3/2
REGULAR_IDEAL = 1.0149416064096536


def _lob_quad(theta):
    f = lambda u: mpmath.log(abs(2 * mpmath.sin(u)))
    with mpmath.workdps(30):
        # split at the log singularities 0 and pi for a clean quadrature
        pts = [0, theta] if theta <= math.pi else [0, math.pi, theta]
        return float(-mpmath.quad(f, pts))


def test_lobachevsky_against_quadrature():
    grid = np.linspace(0.0, math.pi, 101)[1:]
    err = max(abs(lobachevsky(t) - _lob_quad(t)) for t in grid)
    assert err < 1e-9


def test_lobachevsky_duplication_identity():
    # L(2t) = 2 L(t) + 2 L(t + pi/2)
    for t in np.linspace(0.01, 3.1, 60):
        assert abs(lobachevsky(2 * t) - 2 * lobachevsky(t) - 2 * lobachevsky(t + math.pi / 2)) < 1e-10


def test_lobachevsky_symmetries():
    for t in (0.3, 1.1, 2.5):
        assert abs(lobachevsky(-t) + lobachevsky(t)) < 1e-15
        assert abs(lobachevsky(t + math.pi) - lobachevsky(t)) < 1e-13
    assert abs(lobachevsky(math.pi / 2)) < 1e-15
    assert abs(3 * lobachevsky(math.pi / 3) - REGULAR_IDEAL) < 1e-12


def test_tail_bound_controls_truncation():
    tab = LobachevskyTable()
    full = LobachevskyTable(prec=1e-30)
    for r in (2, 4, 8):
        for t in (0.4, 1.0, math.pi / 2):
            diff = abs(tab.series(t, r) - full.series(t, full.nterms))
            assert diff <= LobachevskyTable.tail_bound(t, r) + 1e-16


def _regular_ideal_klein():
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return v / math.sqrt(3)


def test_regular_ideal_tetrahedron():
    K = _regular_ideal_klein()
    assert abs(tetra_volume_klein(K) - REGULAR_IDEAL) < 1e-9
    assert abs(convex_hull_volume(K) - REGULAR_IDEAL) < 1e-9


def test_finite_tetra_additivity(rng):
    """Splitting a tetrahedron at an interior point preserves volume."""
    for _ in range(10):
        K = rng.normal(size=(4, 3))
        K = 0.8 * K / np.linalg.norm(K, axis=1)[:, None] * rng.uniform(0.3, 1, size=(4, 1))
        p = rng.dirichlet(np.ones(4)) @ K
        whole = tetra_volume_klein(K)
        parts = sum(tetra_volume_klein(np.vstack([np.delete(K, i, axis=0), p])) for i in range(4))
        assert abs(whole - parts) < 1e-9 * max(1, whole)


def _klein_density(x):
    # hyperbolic volume element in the Klein model
    return (1 - x @ x) ** -2


def test_tetra_volume_monte_carlo(rng):
    K = np.array([[0, 0, 0], [0.7, 0, 0], [0, 0.7, 0], [0, 0, 0.7]])
    exact = tetra_volume_klein(K)
    n = 200000
    w = rng.dirichlet(np.ones(4), size=n)
    X = w @ K
    euc = abs(np.linalg.det(K[1:] - K[0])) / 6
    dens = (1 - np.einsum("ij,ij->i", X, X)) ** -2
    est = euc * dens.mean()
    se = euc * dens.std() / math.sqrt(n)
    assert abs(est - exact) < 5 * se


def test_ball_volume_inverse():
    for r in (1e-4, 0.01, 0.3, 1.0, 4.0):
        v = ball_volume(r)
        assert abs(v - math.pi * float(mpmath.sinh(2 * mpmath.mpf(r)) - 2 * r)) < 1e-12 * max(v, 1e-12) + 1e-18
        assert abs(inverse_ball_volume(v) - r) < 1e-10 * r
