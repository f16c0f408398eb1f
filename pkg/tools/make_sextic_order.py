"""Derive a maximal order of (-1,-1 | F) for the sextic ATR field of discriminant -92779.

Starts from Z_F tensor the Hurwitz order (reduced discriminant 2 Z_F) and adds
integral elements of (1/2) O lying in the dual lattice until the trace-form
determinant equals |disc F|^4.  Writes configs/sextic_92779.json.
"""
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from kleinian.field import NumberField, trace_to_Q  # noqa: E402
from kleinian.quat import QuatOrder, QuaternionAlgebra, _qcoords  # noqa: E402

POLY = [1, -1, -2, 3, -1, -2, 1]
DISC = -92779


def lattice_basis(alg, vecs):
    """Z-basis (as quaternions) of the lattice spanned by rational vectors."""
    den = 1
    for v in vecs:
        for x in v:
            den = den * x.denominator // np.gcd(den, x.denominator)
    M = Matrix([[int(x * den) for x in v] for v in vecs]).T
    H = hermite_normal_form(M).T
    rows = [H.row(i) for i in range(H.rows) if any(H.row(i))]
    n = alg.field.degree
    out = []
    for r in rows:
        c = [Fraction(int(x), den) for x in r]
        out.append(alg(*[c[k * n:(k + 1) * n] for k in range(4)]))
    return out


def closure(alg, basis, max_den=2):
    """Smallest ring containing the lattice, or None if denominators grow."""
    while True:
        vecs = [_qcoords(b) for b in basis]
        vecs += [_qcoords(a * b) for a in basis for b in basis]
        if any(x.denominator > max_den for v in vecs for x in v):
            return None
        new = lattice_basis(alg, vecs)
        if len(new) == len(basis) and _same(alg, new, basis):
            return new
        basis = new


def _same(alg, a, b):
    try:
        QuatOrder(alg, a).coords  # noqa: B018
        o = QuatOrder(alg, a)
        return all(o.coords(x) is not None for x in b) and QuatOrder(alg, b).coords(a[0]) is not None and \
            all(QuatOrder(alg, b).coords(x) is not None for x in a)
    except Exception:
        return False


def trd_form(order):
    # order.trace_form is the polar form of tr(nrd), i.e. half of tr(trd(x conj(y)))
    return [[int(2 * v) for v in row] for row in order.trace_form]


def disc_det(order):
    return abs(Matrix(trd_form(order)).det())


def is_integral(x):
    F = x.alg.field
    return all(c.denominator == 1 for c in x.trd().c) and all(c.denominator == 1 for c in x.nrd().c)


def main():
    F = NumberField(POLY, disc=DISC)
    alg = QuaternionAlgebra(F, -1, -1)
    h = Fraction(1, 2)
    gens = [alg(1), alg(0, 1), alg(0, 0, 1), alg(h, h, h, h)]
    basis = [g * F(row) for g in gens for row in F.integral_basis]
    target = abs(DISC) ** 4
    while True:
        O = QuatOrder(alg, basis)
        d = disc_det(O)
        print("trace form determinant", d, "target", target, "ratio", Fraction(d, target))
        if d == target:
            break
        T = np.array(trd_form(O)) % 2
        # kernel of T mod 2 = elements c/2 of the dual lattice
        ker = _kernel_mod2(T)
        print("candidate space dimension", len(ker))
        grown = False
        for bits in itertools.product((0, 1), repeat=len(ker)):
            if not any(bits):
                continue
            c = np.zeros(len(basis), dtype=np.int64)
            for bit, v in zip(bits, ker):
                if bit:
                    c = (c + v) % 2
            x = O.element(c) * h
            if not is_integral(x):
                continue
            new = closure(alg, basis + [x])
            if new is None:
                continue
            basis = new
            grown = True
            break
        if not grown:
            raise SystemExit("no integral element found")
    O = QuatOrder(alg, basis)
    cfg = {
        "name": "sextic_92779",
        "field": F.to_config(),
        "algebra": {"a": -1, "b": -1},
        "order": {"basis": [b.to_json() for b in basis], "maximal": True, "ramified_prime_norms": []},
        "precision": {"eps": 1e-13, "slack": 1e-9},
        "enumeration": {"backend": "det", "alpha": 10, "beta": 2, "gamma": 2.2, "eta": 0.5, "eps": 0.3},
        "zeta": {"prime_bound": 20000},
        "budget": {"max_rounds": 12, "routine_passes": 25, "base_point_retries": 5},
        "seed": 0,
    }
    out = ROOT / "configs" / "sextic_92779.json"
    out.write_text(json.dumps(cfg, indent=1) + "\n")
    print("wrote", out)


def _kernel_mod2(T):
    T = T.copy() % 2
    n = T.shape[1]
    rows, piv = [], []
    A = T.copy()
    r = 0
    pivcols = []
    for col in range(n):
        p = next((i for i in range(r, A.shape[0]) if A[i, col]), None)
        if p is None:
            continue
        A[[r, p]] = A[[p, r]]
        for i in range(A.shape[0]):
            if i != r and A[i, col]:
                A[i] ^= A[r]
        pivcols.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivcols]
    ker = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivcols):
            v[pc] = A[i, f]
        ker.append(v)
    return ker


if __name__ == "__main__":
    main()
