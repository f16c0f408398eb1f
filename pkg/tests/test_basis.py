import math

import numpy as np
import pytest

from kleinian import basis as B
from kleinian.ball import Isometry, boost, classify, psl_distance
from kleinian.basis import (GeneratorSet, check_complete, check_cycle_condition, check_pairing,
                            check_pairing_alt, cycle_ok, is_normalized, keep_same_group, parse_text,
                            word_to_text)
from kleinian.poly import EdgeCycle, TangencyCycle, edge_cycles, inverse_map
from kleinian.reduce import GroupContext
from kleinian.vol import polyhedron_volume


def _rotation(order, axis_point):
    u = boost(np.asarray(axis_point, dtype=float)).m
    t = math.pi / order
    R = np.diag([np.exp(1j * t), np.exp(-1j * t)])
    return Isometry(u @ R @ np.linalg.inv(u))


def _has(S, g):
    return any(psl_distance(h.m, g.m) < 1e-8 for h in S.elements)


def test_generator_set_dedupes(bianchi3):
    S = bianchi3.basis
    T = S.copy()
    n = len(T)
    for g in S.elements:
        assert not T.add(g)
        assert not T.add(Isometry(-g.m, coords=None if g.coords is None else tuple(-np.asarray(g.coords))))
    assert not T.add(Isometry(np.eye(2)))
    assert len(T) == n


def test_keep_same_group_drops_redundant(bianchi3):
    S = bianchi3.basis
    E = bianchi3.domain
    els = S.elements
    T = S.copy()
    for a, b in [(0, 1), (1, 2), (2, 0)]:
        T.add(S.ctx.compose(els[a], els[b]))
    U = keep_same_group(T)
    assert U.domain_key() == E.key()
    assert {g.key for g in U.elements} == {E.elements[l].key for l in E.active_faces()}


def _drop_face(run):
    E = run.domain
    inv = inverse_map(E)
    lab = next(l for l in E.sphere_faces if inv[l] != l)
    keep = [E.elements[l] for l in E.sphere_faces if l != lab]
    return run.basis.copy(keep), E.elements[lab]


@pytest.mark.parametrize("routine", [check_pairing, check_pairing_alt])
def test_pairing_routines_restore_dropped_face(bianchi15, routine):
    T, missing = _drop_face(bianchi15)
    E0 = T.domain()
    assert not E0.finite_volume or polyhedron_volume(E0) > 1.01 * bianchi15.covolume
    for _ in range(10):
        before = T.domain_key()
        T = keep_same_group(routine(T))
        if T.domain_key() == before:
            break
    assert T.domain_key() == bianchi15.domain.key()
    assert is_normalized(T)


def test_elliptic_cycle_adds_powers():
    g = _rotation(5, [0.3, 0.1, 0.0])
    assert classify(g) == "elliptic"
    ctx = GroupContext()
    g2 = ctx.compose(g, g)
    S = GeneratorSet([g2, ctx.inverse(g2)], ctx=ctx)
    cyc = edge_cycles(S.domain(), strict=False, ctx=ctx)
    assert cyc and cyc[0].kind == "elliptic" and cyc[0].nu == 5
    assert abs(cyc[0].angle - 4 * math.pi / 5) < 1e-8
    assert not cycle_ok(cyc[0])
    T = check_cycle_condition(S)
    assert _has(T, g) or _has(T, ctx.inverse(g))
    T = keep_same_group(T)
    c = edge_cycles(T.domain(), strict=False, ctx=ctx)[0]
    assert abs(c.angle - 2 * math.pi / 5) < 1e-8 and cycle_ok(c)


def test_overlap_cycle_adds_partial_products(bianchi3, monkeypatch):
    """Injected identity cycle with angle 4 pi: the partial products are added."""
    S = bianchi3.basis
    E = S.domain()
    inv = inverse_map(E)
    a = E.sphere_faces[0]
    b = next(l for l in E.sphere_faces if l not in (a, inv[a]))
    f = [a, b, inv[a]]
    ctx = S.ctx
    p1 = E.elements[f[0]]
    p2 = ctx.compose(E.elements[f[1]], p1)
    fake = EdgeCycle([0, 1, 2], list(f), list(f), Isometry(np.eye(2)), 4 * math.pi)
    fake.kind = "identity"
    monkeypatch.setattr(B, "edge_cycles", lambda *a, **k: [fake])
    assert not p2.is_identity(1e-7)
    T = check_cycle_condition(S)
    assert _has(T, p2) and _has(T, ctx.inverse(p2))
    assert T.diag.counts.get("cycle_overlap", 0) >= 1


def test_check_complete_adds_loxodromic(bianchi3, monkeypatch):
    S = bianchi3.basis
    lox = Isometry([[2.0, 0.3], [0.1, 0.515]])
    lox = Isometry(lox.m / np.sqrt(np.linalg.det(lox.m)))
    assert classify(lox) == "loxodromic"
    para = Isometry([[1, 1], [0, 1]])
    fake = [TangencyCycle([0], [0], lox), TangencyCycle([1], [1], para)]
    monkeypatch.setattr(B, "tangency_cycles", lambda *a, **k: (fake, []))
    T = check_complete(S)
    assert _has(T, lox) and not _has(T, para)


def test_final_bases_are_normalized(bianchi3, bianchi23, sextic):
    for run in (bianchi3, bianchi23, sextic):
        assert is_normalized(run.basis)
        assert check_complete(run.basis).domain_key() == run.domain.key()


@pytest.mark.parametrize("name", ["bianchi3", "bianchi15", "bianchi23", "sextic"])
def test_presentation_relations_hold(name, request):
    run = request.getfixturevalue(name)
    P = run.presentation
    assert P.relations
    for r in P.relations:
        assert P.evaluate(r).is_identity(1e-6), word_to_text(r)
    ngens, rels = parse_text(P.to_text())
    assert ngens == len(P.generators) and rels == [tuple(r) for r in P.relations]


def test_routines_never_grow_volume(bianchi23, sextic):
    """Drop a face pair from a final basis, then watch the volume while the routines repair it."""
    vols_seen = 0
    for run in (bianchi23, sextic):
        E = run.domain
        inv = inverse_map(E)
        for lab in E.sphere_faces[:6]:
            drop = {lab, inv[lab]}
            S = run.basis.copy([E.elements[l] for l in E.sphere_faces if l not in drop])
            vols = []
            for _ in range(4):
                for routine in (check_pairing, check_cycle_condition, check_complete, keep_same_group):
                    S = routine(S)
                    D = S.domain()
                    if D.finite_volume:
                        vols.append(polyhedron_volume(D))
            vols_seen += len(vols)
            assert all(b <= a * (1 + 1e-9) for a, b in zip(vols, vols[1:]))
            if vols:
                assert abs(vols[-1] / run.covolume - 1) < 1e-6
    assert vols_seen > 10
