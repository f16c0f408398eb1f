"""Normalized bases and presentations.

The engine keeps a finite set S of group elements and shrinks Ext(S) until
it is a fundamental domain: elements are reduced against each other, and
every failure of the face pairing, cycle or completeness conditions is
turned into new elements that cut the domain further.
"""
from dataclasses import dataclass, field as dc_field
import math
import time

import numpy as np

from .ball import Isometry, act, classify, denominator_sq
from .errors import (BudgetExceeded, DegenerateBasePoint, DegenerateIncidence, NonFiniteOrder,
                     NotPaired, OriginFixed)
from .poly import ExteriorDomain, edge_cycles, inverse_map, tangency_cycles
from .reduce import GroupContext, PrecisionBudget, reduce_element

TWO_PI = 2 * math.pi
ANGLE_TOL = 1e-6


@dataclass
class Diagnostics:
    timings: dict = dc_field(default_factory=dict)
    counts: dict = dc_field(default_factory=dict)
    log: list = dc_field(default_factory=list)

    def add_time(self, name, dt):
        self.timings[name] = self.timings.get(name, 0.0) + dt

    def bump(self, name, k=1):
        self.counts[name] = self.counts.get(name, 0) + k


class _timed:
    def __init__(self, diag, name):
        self.diag, self.name = diag, name

    def __enter__(self):
        self.t = time.perf_counter()

    def __exit__(self, *exc):
        self.diag.add_time(self.name, time.perf_counter() - self.t)


class GeneratorSet:
    """An ordered, duplicate free list of elements with a cached Ext(S)."""

    def __init__(self, elements=(), ctx=None, budget=None, diag=None):
        self.ctx = ctx or GroupContext()
        self.budget = budget or PrecisionBudget()
        self.diag = diag or Diagnostics()
        self._items = {}
        self._domain = None
        self._domain_keys = None
        for g in elements:
            self.add(g)

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self.elements)

    @property
    def elements(self):
        return [self._items[k] for k in sorted(self._items, key=lambda k: (round(self._items[k].norm2, 8), k))]

    def copy(self, elements=None):
        out = GeneratorSet(ctx=self.ctx, budget=self.budget, diag=self.diag)
        for g in (self.elements if elements is None else elements):
            out.add(g)
        return out

    def add(self, g):
        """Insert g unless it is +-1, already present or above the norm cap."""
        if g.is_identity(1e-7):
            return False
        if g.key in self._items:
            return False
        if g.norm > self.budget.norm_cap ** 4:
            # far beyond anything the floating point action can handle
            self.diag.bump("rejected_norm")
            return False
        self._items[g.key] = g
        return True

    def add_with_inverse(self, g):
        a = self.add(g)
        b = self.add(self.ctx.inverse(g))
        return a or b

    def domain(self):
        keys = tuple(sorted(self._items))
        if self._domain is None or keys != self._domain_keys:
            with _timed(self.diag, "exterior"):
                els = self.elements
                for g in els:
                    if g.invrad < 1e-9:
                        raise DegenerateBasePoint(f"element fixing the base point: {g}")
                try:
                    self._domain = ExteriorDomain(els)
                except OriginFixed as exc:
                    raise DegenerateBasePoint(str(exc)) from exc
                except DegenerateIncidence as exc:
                    # I(g) = I(h) with g != h means g^-1 h fixes the base point
                    raise DegenerateBasePoint(str(exc)) from exc
            self._domain_keys = keys
        return self._domain

    def domain_key(self):
        return self.domain().key()


def _minimal(S):
    E = S.domain()
    return S.copy([E.elements[l] for l in E.active_faces()])


def keep_same_group(S, max_rounds=50):
    """Replace S by its minimal defining set plus the nontrivial reductions of S."""
    with _timed(S.diag, "keep_same_group"):
        for _ in range(max_rounds):
            before = S.domain_key()
            U = _minimal(S)
            for g in S.elements:
                gbar, _ = reduce_element(g, U.elements, budget=S.budget, ctx=S.ctx)
                if not gbar.is_identity(1e-7):
                    U.add(gbar)
            S = U
            if S.domain_key() == before:
                return S
        raise BudgetExceeded("KeepSameGroup did not stabilise", partial=S)


def _edge_witnesses(E, e, floor=1e-8):
    pts = E.edge_points(e, (0.02, 0.15, 0.33, 0.5, 0.67, 0.85, 0.98))
    if len(pts) == 0:
        return pts
    return pts[1 - np.sum(pts ** 2, axis=1) > floor]


def check_pairing(S):
    """Add reductions of face elements at edge points that are mapped outside Ext(S)."""
    with _timed(S.diag, "check_pairing"):
        S = S.copy()
        for g in list(S.elements):
            S.add(S.ctx.inverse(g))
        E = S.domain()
        els = S.elements
        thresh = 4.0 / (1.0 + S.budget.slack)
        found = []
        for e in E.active_edges():
            a, b, f1, f2 = E.edges[e]
            X = _edge_witnesses(E, e)
            if len(X) == 0:
                continue
            for f in (f1, f2):
                g = E.elements[f]
                Y = act(g, X)
                dens = np.array([denominator_sq(h, Y) for h in els])  # (|S|, k)
                bad = np.nonzero(dens.min(axis=0) < thresh)[0]
                if len(bad) == 0:
                    continue
                S.diag.bump("unpaired_edges")
                x = X[bad[np.argmin(dens.min(axis=0)[bad])]]
                gbar, _ = reduce_element(g, els, w=x, budget=S.budget, ctx=S.ctx)
                if not gbar.is_identity(1e-7):
                    found.append(gbar)
        for g in found:
            S.add_with_inverse(g)
        return S


def check_pairing_alt(S):
    """Add g h^-1 and h g^-1 for every pair of intersecting isometric spheres."""
    with _timed(S.diag, "check_pairing_alt"):
        S = S.copy()
        for g in list(S.elements):
            S.add(S.ctx.inverse(g))
        E = S.domain()
        faces = E.active_faces()
        pairs = {frozenset((f1, f2)) for (_, _, f1, f2) in E.edges if f1 >= 0 and f2 >= 0}
        inv = inverse_map(E)
        cands = []
        for pr in sorted(tuple(sorted(p)) for p in pairs):
            i, j = pr
            if inv.get(i) == j or i not in faces or j not in faces:
                continue
            g, h = E.elements[i], E.elements[j]
            cands.append(S.ctx.compose(g, S.ctx.inverse(h)))
            cands.append(S.ctx.compose(h, S.ctx.inverse(g)))
        S.diag.bump("alt_candidates", len(cands))
        for c in cands:
            S.add(c)
        return S


def check_cycle_condition(S):
    """Add elements produced by edge cycles violating the cycle condition."""
    with _timed(S.diag, "check_cycle_condition"):
        E = S.domain()
        inv = inverse_map(E)
        cycles = edge_cycles(E, inv=inv, strict=False, ctx=S.ctx)
        S = S.copy()
        cap = 2 * S.budget.norm_cap ** 2
        for c in cycles:
            h = c.h
            if c.kind == "identity":
                if c.angle > TWO_PI + ANGLE_TOL:
                    S.diag.bump("cycle_overlap")
                    p = None
                    for f in c.transformations[:-1]:
                        g = E.elements[f]
                        p = g if p is None else S.ctx.compose(g, p)
                        S.add_with_inverse(p)
            elif c.kind == "elliptic" and c.fixes_pointwise:
                nu = c.nu
                if nu == math.inf or nu > cap:
                    raise NonFiniteOrder(f"elliptic cycle transformation with no finite order below {cap:.0f}")
                if abs(c.angle - TWO_PI / nu) > ANGLE_TOL:
                    S.diag.bump("cycle_elliptic")
                    p = h
                    for _ in range(1, nu):
                        S.add(p)
                        p = S.ctx.compose(h, p)
            else:
                S.diag.bump("cycle_loxodromic")
                S.add_with_inverse(h)
        return S


def check_complete(S):
    """Add loxodromic tangency vertex transformations."""
    with _timed(S.diag, "check_complete"):
        E = S.domain()
        if not E.ideal.any() and E.finite_volume:
            return S
        cycles, _ = tangency_cycles(E, ctx=S.ctx)
        S = S.copy()
        for c in cycles:
            if classify(c.h, 1e-7) == "loxodromic":
                S.diag.bump("tangency_loxodromic")
                S.add_with_inverse(c.h)
        return S


def is_normalized(S):
    """Face pairing, cycle condition and completeness on the final domain."""
    E = S.domain()
    if not E.finite_volume:
        return False
    if check_pairing(S).domain_key() != E.key():
        return False
    try:
        cycles = edge_cycles(E, ctx=S.ctx)
    except NotPaired:
        return False
    return all(cycle_ok(c) for c in cycles)


def cycle_ok(c, tol=ANGLE_TOL):
    if c.kind == "identity":
        return abs(c.angle - TWO_PI) <= tol
    if c.kind == "elliptic" and c.fixes_pointwise and c.nu != math.inf:
        return abs(c.angle - TWO_PI / c.nu) <= tol
    return False


def normalized_basis(enumerate_fn, is_full_group, ctx=None, budget=None, max_outer=12,
                     routine_passes=25, use_alt_pairing=False, diag=None, log=None):
    """Run the normalized basis loop.

    ``enumerate_fn(n)`` returns new elements, ``is_full_group(S)`` decides the
    outer loop.  Between two enumerations the four routines are repeated
    while they keep changing Ext(S), at most ``routine_passes`` times.
    """
    S = GeneratorSet(ctx=ctx, budget=budget, diag=diag)
    n = 0
    say = log or (lambda msg: None)
    while True:
        while True:
            n += 1
            if n > max_outer:
                raise BudgetExceeded(f"no normalized basis after {max_outer} enumeration rounds", partial=S)
            with _timed(S.diag, "enumerate"):
                new = enumerate_fn(n)
            for g in new:
                S.add(g)
            S.diag.bump("enumerated", len(new))
            if len(S) == 0:
                continue
            start = S.domain_key()
            for _ in range(routine_passes):
                key0 = S.domain_key()
                S = keep_same_group(S)
                S = check_pairing_alt(S) if use_alt_pairing else check_pairing(S)
                S = check_cycle_condition(S)
                S = check_complete(S)
                S = keep_same_group(S)
                if S.domain_key() == key0:
                    break
            E = S.domain()
            say(f"round {n}: |S|={len(S)} faces={len(E.sphere_faces)} bounded={E.finite_volume}")
            if S.domain_key() == start and E.finite_volume:
                break
            if E.finite_volume and is_normalized(S):
                break
        if is_full_group(S):
            return S


# ---------------------------------------------------------------------------
# presentations

def _canonical_relator(word):
    """Representative of a cyclic word up to rotation and inversion."""
    if not word:
        return ()
    forms = []
    for w in (tuple(word), tuple(-k for k in reversed(word))):
        for i in range(len(w)):
            forms.append(w[i:] + w[:i])
    return min(forms, key=lambda w: (sum(k < 0 for k in w), tuple(abs(k) for k in w), w))


@dataclass
class Presentation:
    """Generators (face pairings, one per inverse pair) and relators.

    Words are tuples of signed 1-based generator indices, read as products
    from left to right.
    """
    generators: list
    relations: list
    face_letter: dict
    faces: list
    ctx: object = None
    kinds: list = dc_field(default_factory=list)

    def evaluate(self, word):
        """Product of the letters of ``word``; exact when the generators carry order coordinates."""
        ctx = self.ctx
        if ctx is not None and ctx.order is not None and all(g.coords is not None for g in self.generators):
            out = ctx.from_coords(ctx.order.one_coords)
            for k in word:
                g = self.generators[abs(k) - 1]
                out = ctx.compose(out, g if k > 0 else ctx.inverse(g))
            return out
        out = np.eye(2, dtype=complex)
        for k in word:
            g = self.generators[abs(k) - 1]
            m = g.m if k > 0 else np.array([[g.m[1, 1], -g.m[0, 1]], [-g.m[1, 0], g.m[0, 0]]])
            out = out @ m
        return Isometry(out)

    def word_of(self, gamma, budget=None):
        """Word in the generators for gamma, or None if gamma is not in the group."""
        gbar, w = reduce_element(gamma, self.faces, budget=budget, ctx=self.ctx)
        if not gbar.is_identity(1e-6):
            return None
        # delta gamma = 1 with delta = F[w0] ... F[wm]; gamma = F[wm]^-1 ... F[w0]^-1
        out = []
        for k in reversed(w):
            out.append(-self.face_letter[k - 1])
        return _free_reduce(out)

    def to_text(self):
        gens = " ".join(f"g{i + 1}" for i in range(len(self.generators)))
        lines = [f"gens: {gens}", "rels:"]
        for r in self.relations:
            lines.append("  " + word_to_text(r))
        return "\n".join(lines) + "\n"


def _free_reduce(word):
    out = []
    for k in word:
        if out and out[-1] == -k:
            out.pop()
        else:
            out.append(k)
    return tuple(out)


def word_to_text(word):
    if not word:
        return "1"
    return "*".join(f"g{k}" if k > 0 else f"g{-k}^-1" for k in word)


def parse_text(text):
    """(number of generators, relations) from the text format."""
    ngens = 0
    rels = []
    mode = None
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("gens:"):
            ngens = len(s[5:].split())
            mode = "gens"
        elif s.startswith("rels:"):
            mode = "rels"
        elif s and mode == "rels":
            word = []
            if s != "1":
                for tok in s.split("*"):
                    if tok.endswith("^-1"):
                        word.append(-int(tok[1:-3]))
                    else:
                        word.append(int(tok[1:]))
            rels.append(tuple(word))
    return ngens, rels


def presentation(S):
    """Presentation of the group of a normalized basis from its domain."""
    E = S.domain()
    inv = inverse_map(E)
    faces = E.sphere_faces
    letter = {}
    gens = []
    kinds = []
    for l in faces:
        if l in letter:
            continue
        j = inv[l]
        if j is None:
            raise NotPaired(f"face {l} has no inverse face")
        gens.append(E.elements[l])
        k = len(gens)
        letter[l] = k
        if j != l:
            letter[j] = -k
            kinds.append("pair")
        else:
            kinds.append("reflection")
    rels = set()
    for l in faces:
        if inv[l] == l:
            rels.add(_canonical_relator((letter[l], letter[l])))
    for c in edge_cycles(E, inv=inv, ctx=S.ctx):
        if c.nu == math.inf:
            raise NonFiniteOrder("cycle transformation of infinite order in a normalized basis")
        w = tuple(letter[f] for f in reversed(c.transformations))
        rel = _free_reduce(w * int(c.nu))
        if rel:
            rels.add(_canonical_relator(rel))
    face_list = [E.elements[l] for l in faces]
    face_letter = {i: letter[l] for i, l in enumerate(faces)}
    return Presentation(gens, sorted(rels, key=lambda r: (len(r), r)), face_letter, face_list,
                        ctx=S.ctx, kinds=kinds)


# ---------------------------------------------------------------------------
# groups given by matrices

def word_enumerator(gens, ctx=None, max_size=20000):
    """Enumerate callback returning the elements given by words of length n."""
    ctx = ctx or GroupContext()
    letters = list(gens) + [ctx.inverse(g) for g in gens]
    layer = {(): Isometry(np.eye(2), word=())}
    state = {"n": 0, "layer": layer}

    def enumerate_fn(n):
        out = []
        while state["n"] < n:
            nxt = {}
            for w, g in state["layer"].items():
                for i, h in enumerate(letters):
                    k = i + 1 if i < len(gens) else -(i - len(gens) + 1)
                    if w and w[-1] == -k:
                        continue
                    nxt[w + (k,)] = Isometry(g.m @ h.m)
                    if len(nxt) >= max_size:
                        break
            state["layer"] = nxt
            state["n"] += 1
            out.extend(nxt.values())
        return [g for g in out if g.invrad > 1e-9]

    return enumerate_fn


def generators_is_full_group(gens):
    """IsFullGroup for a group given by generators: each one reduces to +-1."""
    def test(S):
        if not S.domain().finite_volume:
            return False
        els = S.elements
        for g in gens:
            gbar, _ = reduce_element(g, els, budget=S.budget, ctx=S.ctx)
            if not gbar.is_identity(1e-6):
                return False
        return True
    return test
