"""Number fields with exactly one complex place.

Elements are stored exactly as rational coordinates on the power basis
1, t, ..., t^{n-1} of the defining polynomial; embeddings are computed from
high precision roots of that polynomial.
"""
from fractions import Fraction
import math

import mpmath
import numpy as np

from . import _kernels
from .errors import ConfigError, IndexPrimeUnspecified, NotATR, ReduciblePoly
from .rational import det as qdet, frac_str, solve, to_fraction

SIGMA = "sigma"


def _divisors(m):
    m = abs(m)
    out = []
    d = 1
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            out.append(m // d)
        d += 1
    return out


def _poly_discriminant(c):
    """Discriminant of the monic polynomial with coefficients c (lowest first)."""
    n = len(c) - 1
    dc = [i * c[i] for i in range(1, n + 1)]
    # Sylvester matrix of f (degree n) and f' (degree n-1), highest first
    fh = list(reversed(c))
    gh = list(reversed(dc))
    size = 2 * n - 1
    rows = []
    for i in range(n - 1):
        rows.append([0] * i + fh + [0] * (size - i - len(fh)))
    for i in range(n):
        rows.append([0] * i + gh + [0] * (size - i - len(gh)))
    res = qdet(rows)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return int(sign * res)


class NumberField:
    """F = Q[t]/(f) with r2 = 1.

    Parameters
    ----------
    poly : sequence of int
        Monic defining polynomial, highest degree first (``[1, 0, 3]`` is x^2+3).
    integral_basis : n x n rationals, optional
        Rows are a Z-basis of the ring of integers on the power basis.
    disc : int, optional
        Field discriminant; checked against the computed one when given.
    sigma : complex, optional
        Approximate value of the distinguished complex root.
    prime_splitting : dict, optional
        ``{p: [f_1, ..., f_g]}`` residue degrees of the primes above p, needed
        for the primes dividing the index [Z_F : Z[t]].
    zeta2 : float, optional
        Override for zeta_F(2).
    """

    def __init__(self, poly, integral_basis=None, disc=None, sigma=None,
                 prime_splitting=None, zeta2=None, dps=40):
        poly = [int(a) for a in poly]
        if len(poly) < 2 or poly[0] != 1:
            raise ConfigError("defining polynomial must be monic of degree >= 1")
        self.poly = tuple(poly)
        self.coeffs = tuple(reversed(poly))  # lowest degree first
        n = len(poly) - 1
        self.degree = n
        if n >= 1:
            for d in _divisors(self.coeffs[0]) or [0]:
                for r in (d, -d):
                    if sum(a * r ** k for k, a in enumerate(self.coeffs)) == 0:
                        raise ReduciblePoly(f"{r} is a rational root of the defining polynomial")
            if self.coeffs[0] == 0:
                raise ReduciblePoly("0 is a root of the defining polynomial")

        self.dps = dps
        with mpmath.workdps(dps):
            if n == 1:
                roots = [mpmath.mpf(-self.coeffs[0])]
            else:
                roots = mpmath.polyroots([mpmath.mpf(a) for a in poly], maxsteps=400, extraprec=4 * dps)
            tol = mpmath.mpf(10) ** (-dps // 2)
            real = sorted((mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tol))
            cplx = [mpmath.mpc(r) for r in roots if abs(mpmath.im(r)) >= tol]
        self.r1 = len(real)
        self.r2 = (n - self.r1) // 2
        if self.r2 != 1:
            raise NotATR(f"field has {self.r2} complex places, expected exactly one")
        if sigma is not None:
            target = complex(sigma)
            s = min(cplx, key=lambda r: abs(complex(r) - target))
        else:
            s = next(r for r in cplx if mpmath.im(r) > 0)
        self._real_mp = real
        self._sigma_mp = s
        self.real_embeddings = [float(r) for r in real]
        self.sigma = complex(s)
        self._powers = {}
        for place, root in list(enumerate(real)) + [(SIGMA, s)]:
            self._powers[place] = np.array([complex(root ** k) for k in range(n)])

        # reduction of t^k for k = n .. 2n-2 on the power basis
        red = []
        cur = [Fraction(-a) for a in self.coeffs[:n]]  # t^n
        for _ in range(max(n - 1, 0)):
            red.append(cur)
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[i] - top * self.coeffs[i] for i in range(n)]
        red.append(cur)
        self._red = red

        # power sums of the roots give exact traces of t^k
        c = self.coeffs
        p = [Fraction(n)]
        for k in range(1, n):
            s_ = -k * c[n - k]
            for i in range(1, k):
                s_ -= c[n - i] * p[k - i]
            p.append(Fraction(s_))
        self._power_traces = p

        if integral_basis is None:
            integral_basis = [[int(i == j) for j in range(n)] for i in range(n)]
        ib = [[to_fraction(v) for v in row] for row in integral_basis]
        if len(ib) != n or any(len(r) != n for r in ib):
            raise ConfigError("integral basis must be n x n")
        dB = qdet(ib)
        if dB == 0:
            raise ConfigError("integral basis is singular")
        self.integral_basis = ib
        inv_index = abs(dB)
        if inv_index.numerator != 1:
            raise ConfigError("integral basis does not contain Z[t] with integral index")
        self.index = inv_index.denominator
        pd = _poly_discriminant(list(self.coeffs))
        computed = pd * dB * dB
        if computed.denominator != 1:
            raise ConfigError("integral basis inconsistent with the polynomial discriminant")
        computed = int(computed)
        if disc is not None and int(disc) != computed:
            raise ConfigError(f"supplied discriminant {disc} differs from computed {computed}")
        self.disc = computed
        self.poly_disc = pd
        self.prime_splitting = {int(k): [int(f) for f in v] for k, v in (prime_splitting or {}).items()}
        self.zeta2_override = None if zeta2 is None else float(zeta2)

    # -- elements ---------------------------------------------------------
    def __call__(self, value):
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (list, tuple)):
            coords = [to_fraction(v) for v in value]
            if len(coords) != self.degree:
                raise ValueError("wrong number of coordinates")
            return FieldElement(self, tuple(coords))
        return FieldElement(self, (to_fraction(value),) + (Fraction(0),) * (self.degree - 1))

    @property
    def one(self):
        return self(1)

    @property
    def zero(self):
        return self(0)

    @property
    def gen(self):
        if self.degree == 1:
            return self(-self.coeffs[0])
        return self([0, 1] + [0] * (self.degree - 2))

    def integral_element(self, ints):
        """Element with integer coordinates ``ints`` on the integral basis."""
        coords = [sum(Fraction(a) * row[j] for a, row in zip(ints, self.integral_basis))
                  for j in range(self.degree)]
        return FieldElement(self, tuple(coords))

    def integral_coords(self, x):
        """Coordinates of x on the integral basis (rationals)."""
        T = [[self.integral_basis[i][j] for i in range(self.degree)] for j in range(self.degree)]
        return solve(T, list(x.c))

    @property
    def places(self):
        return list(range(self.r1)) + [SIGMA]

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly and \
            self.integral_basis == other.integral_basis and self.sigma == other.sigma

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"NumberField(poly={list(self.poly)}, disc={self.disc})"

    def to_config(self):
        d = {"poly": list(self.poly),
             "basis": [[frac_str(v) for v in row] for row in self.integral_basis],
             "disc": self.disc,
             "sigma": [self.sigma.real, self.sigma.imag]}
        if self.prime_splitting:
            d["prime_splitting"] = {str(k): v for k, v in self.prime_splitting.items()}
        if self.zeta2_override is not None:
            d["zeta2"] = self.zeta2_override
        return d


class FieldElement:
    __slots__ = ("field", "c")

    def __init__(self, field, coords):
        self.field = field
        self.c = coords

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, tuple(a * other for a in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = self.field.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        out = prod[:n]
        red = self.field._red
        for k in range(n, 2 * n - 1):
            ck = prod[k]
            if ck:
                row = red[k - n]
                for i in range(n):
                    out[i] += ck * row[i]
        return FieldElement(self.field, tuple(out))

    __rmul__ = __mul__

    def mul_matrix(self):
        """Matrix of multiplication by self: column j = coords of self * t^j."""
        n = self.field.degree
        cols = []
        cur = self
        t = self.field.gen
        for _ in range(n):
            cols.append(cur.c)
            cur = cur * t
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.field.degree
        e = [Fraction(int(i == 0)) for i in range(n)]
        return FieldElement(self.field, tuple(solve(self.mul_matrix(), e)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        r = self.field.one
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def is_zero(self):
        return not any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.c[0] == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash(self.c)

    def __repr__(self):
        terms = []
        for k, a in enumerate(self.c):
            if a:
                terms.append(frac_str(a) + ("" if k == 0 else "*t" if k == 1 else f"*t^{k}"))
        return " + ".join(terms) if terms else "0"

    def to_json(self):
        return [frac_str(a) for a in self.c]


def embed(x, place=SIGMA, prec=None):
    """Value of x under a real place (index) or the complex place ``"sigma"``.

    ``prec`` requests the number of significant decimal digits; ``None`` means
    double precision.
    """
    F = x.field
    if prec is None or prec <= 15:
        val = complex(np.dot(np.array([float(a) for a in x.c]), F._powers[place]))
        if place != SIGMA:
            val = complex(val.real, 0.0)
        return val
    with mpmath.workdps(max(prec, F.dps)):
        root = F._sigma_mp if place == SIGMA else F._real_mp[place]
        val = mpmath.fsum(mpmath.mpf(a.numerator) / a.denominator * root ** k for k, a in enumerate(x.c))
        if place != SIGMA:
            val = mpmath.re(val)
        return val


def trace_to_Q(x):
    """Exact absolute trace of x."""
    return sum((a * p for a, p in zip(x.c, x.field._power_traces)), Fraction(0))


def norm_to_Q(x):
    return qdet(x.mul_matrix())


def parse_field(cfg):
    """Build a NumberField from the ``field`` block of a job config."""
    if "poly" not in cfg:
        raise ConfigError("field block needs 'poly'")
    sigma = cfg.get("sigma")
    if sigma is not None:
        sigma = complex(sigma[0], sigma[1])
    return NumberField(cfg["poly"], integral_basis=cfg.get("basis"), disc=cfg.get("disc"),
                       sigma=sigma, prime_splitting=cfg.get("prime_splitting"), zeta2=cfg.get("zeta2"))


def primes_up_to(n):
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def dedekind_zeta_2(field, prime_bound=100000, use_override=True):
    """Truncated Euler product for zeta_F(2).

    The product is taken against zeta(2) = pi^2/6: the remaining factors
    prod_p (1-p^-2) prod_{P|p} (1-N(P)^-2)^-1 oscillate around 1, which makes
    the truncation much more accurate in practice than the crude bound.

    Returns ``(value, error_estimate)``; the estimate is 2n * sum_{p > bound} p^-2,
    bounded by 2n/bound.
    """
    if use_override and field.zeta2_override is not None:
        return field.zeta2_override, 0.0
    n = field.degree
    primes = primes_up_to(int(prime_bound))
    skip = np.zeros(primes.shape[0], dtype=np.bool_)
    log_total = 0.0
    for i, p in enumerate(primes):
        if field.index % int(p) == 0:
            if int(p) not in field.prime_splitting:
                raise IndexPrimeUnspecified(int(p))
            skip[i] = True
    for p, degs in field.prime_splitting.items():
        if p <= prime_bound:
            local = math.log1p(-p ** -2.0)
            for f in degs:
                local -= math.log1p(-float(p) ** (-2.0 * f))
            log_total += local
            skip[np.searchsorted(primes, p)] = True
    f = np.array(field.coeffs, dtype=np.int64)
    log_total += _kernels.zeta_local_factors(f, primes, skip)
    value = math.pi ** 2 / 6 * math.exp(log_total)
    err = value * 2 * n / max(prime_bound, 1)
    return value, err
