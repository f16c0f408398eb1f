"""Point and element reduction against a finite set S, and the precision guards.

A point w is S-reduced when no g in S moves it closer to the origin.  With
u a matrix sending 0 to w we have 2 cosh dist(0, g w) = ||g u||^2, so the
greedy loop runs on 2x2 matrices only.  The floating point stopping rule is
(||P||^2 + 2) / (||g P||^2 + 2) <= 1 + slack, which is the same quantity as
4 / |C w + D|^2 for the ball action.
"""
from dataclasses import dataclass
import math

import numpy as np

from ._kernels import reduce_loop
from .ball import Isometry, act, boost, identity
from .errors import PrecisionExhausted

_COORD_LIMIT = 2 ** 40


@dataclass
class PrecisionBudget:
    """Error bounds and caps used by the floating point algorithms.

    ``alpha`` is the slack for which termination of the reduction is proven
    when eps is tiny; in double precision it is far too coarse (about 0.64),
    so the loop stops on the separate ``slack`` instead.
    """
    eps: float = 1e-13
    slack: float = 1e-9
    max_steps: int = 5000
    max_word: int = 5000

    def __post_init__(self):
        if not (0 < self.eps < 1e-9):
            from .errors import ConfigError
            raise ConfigError("precision eps must lie in (0, 1e-9)")

    @property
    def eta(self):
        return 8 * self.eps / 3

    @property
    def alpha(self):
        return 18 * self.eps ** (1 / 9)

    @property
    def norm_cap(self):
        return self.eps ** (-1 / 9)

    @property
    def height_floor(self):
        return 2 * self.eps ** (2 / 9)

    @property
    def merge_tol(self):
        return self.eps ** (1 / 3)

    def admits(self, g, w=None):
        """Condition under which the floating point action of g at w is accurate."""
        delta = 1.0
        if w is not None:
            w = np.asarray(w, dtype=float)
            delta = 1.0 / max(1.0 - float(w @ w), 1e-300)
        return (g.norm * self.eps + 2 * self.eta) ** 2 <= 1.0 / (3 * delta)

    @classmethod
    def from_config(cls, cfg):
        cfg = cfg or {}
        return cls(eps=float(cfg.get("eps", 1e-13)), slack=float(cfg.get("slack", 1e-9)),
                   max_steps=int(cfg.get("max_steps", 5000)), max_word=int(cfg.get("max_word", 5000)))


class GroupContext:
    """How to multiply and invert group elements.

    With an order the product is computed on exact integer coordinates and
    the matrix is rebuilt from them, so products do not accumulate rounding.
    Without one, plain matrix products are used.
    """

    def __init__(self, order=None, mats=None):
        self.order = order
        self.mats = mats

    def from_coords(self, c, word=None):
        m = np.einsum("k,kij->ij", np.asarray(c, dtype=float), self.mats)
        return Isometry(m, coords=c, word=word)

    def compose(self, g, h):
        """g h."""
        word = None
        if g.word is not None and h.word is not None:
            from .ball import free_reduce
            word = free_reduce(g.word + h.word)
        if self.order is not None and g.coords is not None and h.coords is not None:
            c = self.order.mul_coords(g.coords, h.coords)
            if np.max(np.abs(c)) < _COORD_LIMIT:
                return self.from_coords(c, word)
        return Isometry(g.m @ h.m, word=word)

    def inverse(self, g):
        cm = self.order.conj_matrix if self.order is not None else None
        inv = g.inverse(cm)
        if inv.coords is not None and self.mats is not None:
            return self.from_coords(inv.coords, inv.word)
        return inv

    def power(self, g, k):
        out = identity()
        if self.order is not None and g.coords is not None:
            out = self.from_coords(self.order.one_coords, word=() if g.word is not None else None)
        elif g.word is not None:
            out = Isometry(np.eye(2), word=())
        for _ in range(k):
            out = self.compose(g, out)
        return out


def _stack(S):
    if isinstance(S, np.ndarray):
        return S
    if len(S) == 0:
        return np.zeros((0, 2, 2), dtype=complex)
    return np.array([g.m for g in S], dtype=complex)


def _run(P, S, budget):
    budget = budget or PrecisionBudget()
    mats = _stack(S)
    if len(mats) == 0:
        return P, np.zeros(0, dtype=np.int64)
    cur, steps, status = reduce_loop(mats, np.ascontiguousarray(P, dtype=complex),
                                     budget.slack, budget.max_steps)
    if status != 0:
        raise PrecisionExhausted(f"reduction did not stop after {budget.max_steps} steps")
    return cur, steps


def reduce_point(w, S, budget=None):
    """Return (w', delta, word) with w' = delta.w S-reduced.

    ``word`` lists 1-based indices into S with delta = S[word[0]] ... S[word[-1]]
    (the last letter acts first).
    """
    w = np.asarray(w, dtype=float)
    u = boost(w)
    cur, steps = _run(u.m, S, budget)
    delta = Isometry(cur @ np.linalg.inv(u.m))
    word = tuple(int(k) + 1 for k in steps[::-1])
    return act(Isometry(cur), np.zeros(3)), delta, word


def reduce_element(gamma, S, w=None, budget=None, ctx=None):
    """(S, w)-reduced representative gamma_bar = delta gamma and the word of delta.

    The word uses the same convention as :func:`reduce_point`.  With a
    GroupContext the result is recomputed exactly from integer coordinates.
    """
    u = None if w is None or not np.any(w) else boost(w).m
    if ctx is None:
        ctx = GroupContext()
    exact = ctx.order is not None and gamma.coords is not None
    gbar = gamma
    word = ()
    # with exact coordinates, restart from the recomputed element: for large
    # gamma the float loop can stop early on rounding noise
    for _ in range(8 if exact else 1):
        _, steps = _run(gbar.m if u is None else gbar.m @ u, S, budget)
        if len(steps) == 0:
            break
        for k in steps:
            gbar = ctx.compose(S[int(k)], gbar)
        word = tuple(int(k) + 1 for k in steps[::-1]) + word
    return gbar, word


def evaluate_word(word, S, ctx=None):
    """Product S[word[0]] S[word[1]] ...; negative letters stand for inverses."""
    ctx = ctx or GroupContext()
    out = Isometry(np.eye(2))
    for k in reversed(word):
        g = S[abs(k) - 1]
        if k < 0:
            g = ctx.inverse(g)
        out = Isometry(g.m @ out.m)
    return out


def is_reduced(w, S, slack=1e-9):
    """True when 4/|C w + D|^2 <= 1 + slack for every g in S."""
    from .ball import denominator_sq
    return all(4.0 / denominator_sq(g, w) <= 1 + slack for g in S)
