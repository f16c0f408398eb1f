import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from kleinian.ball import Isometry, act, dist
from kleinian.enumeration import (EnumSchedule, Enumerator, brute_force, fincke_pohst, gram_of_Q,
                                  gram_of_Q_centers, lll_gram, random_ball_point)
from kleinian.quat import make_splitting
from kleinian.vol import ball_volume

from conftest import load_config


@pytest.fixture(scope="module")
def cfg3():
    return load_config("bianchi_3")


@pytest.fixture(scope="module")
def split3(cfg3):
    # small conjugation so that no enumerated element fixes the origin
    from kleinian.ball import boost
    return make_splitting(cfg3.algebra, conjugator=boost(np.array([0.021, -0.013, 0.008])).m)


def _spd(seed, d):
    r = np.random.default_rng(seed)
    A = r.normal(size=(d, d))
    return A @ A.T + 0.3 * np.eye(d)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4), st.floats(0.5, 6.0))
def test_fincke_pohst_matches_brute_force(seed, d, bound):
    G = _spd(seed, d)
    X, vals = fincke_pohst(G, bound)
    # box from the diagonal of G^-1: |x_i| <= sqrt(bound * (G^-1)_ii)
    box = int(math.ceil(math.sqrt(bound * np.max(np.diag(np.linalg.inv(G)))))) + 1
    expect = sorted(brute_force(G, bound, box))
    assert sorted(map(tuple, X.tolist())) == expect
    assert np.all(np.diff(vals) >= -1e-9)


def test_lll_is_unimodular(rng):
    G = _spd(7, 5) * 10
    U, Gr = lll_gram(G)
    assert abs(round(np.linalg.det(U))) == 1
    assert np.allclose(U.T @ G @ U, Gr, atol=1e-8)


def test_Q_equals_invrad_plus_degree(cfg3, split3):
    O = cfg3.order
    G = gram_of_Q(O, split3)
    mats = O.split_basis(split3)
    X, vals = fincke_pohst(G, 14.0)
    keep = O.is_norm_one(X)
    hits = 0
    for x, v in zip(X[keep], vals[keep]):
        g = Isometry(np.einsum("k,kij->ij", x.astype(float), mats))
        assert abs(v - (g.invrad + cfg3.field.degree)) < 1e-8 * (1 + v)
        hits += 1
    assert hits > 5


def test_Q_centers_is_displacement(cfg3, split3, rng):
    O = cfg3.order
    mats = O.split_basis(split3)
    n = cfg3.field.degree
    w1 = np.array([0.1, -0.2, 0.05])
    w2 = np.array([-0.3, 0.1, 0.2])
    G = gram_of_Q_centers(O, split3, w1, w2)
    X, vals = fincke_pohst(G, 12.0)
    keep = O.is_norm_one(X)
    hits = 0
    for x, v in zip(X[keep], vals[keep]):
        g = Isometry(np.einsum("k,kij->ij", x.astype(float), mats))
        d = dist(act(g, w1), w2)
        assert abs(v - (2 * math.cosh(d) - 2 + n)) < 1e-7 * (1 + v)
        hits += 1
    assert hits > 3


def test_random_ball_point_is_uniform(rng):
    R = 1.3
    pts = np.array([random_ball_point(R, rng) for _ in range(4000)])
    r = 2 * np.arctanh(np.linalg.norm(pts, axis=1))
    assert r.max() <= R + 1e-12
    cdf = lambda s: np.array([ball_volume(min(t, R)) for t in np.atleast_1d(s)]) / ball_volume(R)
    assert stats.kstest(r, cdf).pvalue > 1e-3
    # direction: mean of unit vectors close to 0
    u = pts / np.linalg.norm(pts, axis=1)[:, None]
    assert np.linalg.norm(u.mean(axis=0)) < 0.06


def test_enumeration_deterministic(cfg3, split3):
    sch = EnumSchedule(cfg3.field.degree, 0.0847, cfg3.field.disc)
    a = Enumerator(cfg3.order, split3, sch, np.random.default_rng(1))
    b = Enumerator(cfg3.order, split3, sch, np.random.default_rng(1))
    ka = [g.key for g in a.deterministic(3)]
    kb = [g.key for g in b.deterministic(3)]
    assert ka == kb and len(ka) > 0
    pa = [g.key for g in a.probabilistic(1)]
    pb = [g.key for g in b.probabilistic(1)]
    assert pa == pb and len(pa) > 0
    assert not a.stabilizer_hits
