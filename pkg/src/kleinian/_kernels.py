"""Hot loops: polynomial factorisation degrees mod p, Fincke-Pohst search,
and batched reduction scores.

Every function here is valid plain Python; ``njit`` compiles it with numba
unless ``KLEINIAN_DISABLE_NUMBA`` is set.  Compiled functions keep the
interpreted version on ``.py_func``, which the benchmark uses.
"""
import numpy as np

from ._accel import njit


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient arrays, lowest degree first)

@njit
def _mulmod(a, b, f, p):
    n = f.shape[0] - 1
    prod = np.zeros(2 * n - 1, dtype=np.int64)
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n):
            prod[i + j] = (prod[i + j] + ai * b[j]) % p
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c != 0:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * f[i]) % p
    return prod[:n].copy()


@njit
def _powmod_x(e, f, p):
    """x**e mod (f, p) by square and multiply."""
    n = f.shape[0] - 1
    result = np.zeros(n, dtype=np.int64)
    result[0] = 1
    base = np.zeros(n, dtype=np.int64)
    if n == 1:
        base[0] = (-f[0]) % p
    else:
        base[1] = 1
    while e > 0:
        if e & 1:
            result = _mulmod(result, base, f, p)
        base = _mulmod(base, base, f, p)
        e >>= 1
    return result


@njit
def _inv_mod(a, p):
    r = 1
    e = p - 2
    b = a % p
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


@njit
def _degree(a):
    for k in range(a.shape[0] - 1, -1, -1):
        if a[k] != 0:
            return k
    return -1


@njit
def _gcd_degree(a, b, p):
    """Degree of gcd(a, b) over F_p."""
    a = a.copy()
    b = b.copy()
    da = _degree(a)
    db = _degree(b)
    while db >= 0:
        inv = _inv_mod(b[db], p)
        while da >= db:
            c = (a[da] * inv) % p
            if c != 0:
                s = da - db
                for i in range(db + 1):
                    a[s + i] = (a[s + i] - c * b[i]) % p
            da = _degree(a)
            if da < 0:
                break
        a, b = b, a
        da, db = db, da
    return da


@njit
def root_counts_mod_p(f, p):
    """r[d] = number of distinct roots of f in F_{p^d}, d = 1..n (index d-1).

    ``f`` is monic with integer coefficients, lowest degree first.
    """
    n = f.shape[0] - 1
    fp = np.empty(n + 1, dtype=np.int64)
    for i in range(n + 1):
        fp[i] = f[i] % p
    out = np.zeros(n, dtype=np.int64)
    x1 = _powmod_x(p, fp, p)
    xd = x1.copy()
    for d in range(1, n + 1):
        if d > 1:
            # x^{p^d} = X_{d-1}(x^p) since raising to the p-th power is additive mod p
            acc = np.zeros(n, dtype=np.int64)
            for k in range(n - 1, -1, -1):
                acc = _mulmod(acc, x1, fp, p)
                acc[0] = (acc[0] + xd[k]) % p
            xd = acc
        h = xd.copy()
        if n > 1:
            h[1] = (h[1] - 1) % p
            g = np.zeros(n + 1, dtype=np.int64)
            for i in range(n):
                g[i] = h[i]
        else:
            g = np.zeros(n + 1, dtype=np.int64)
            g[0] = (h[0] - ((-fp[0]) % p)) % p
        if _degree(g) < 0:
            out[d - 1] = n
        else:
            out[d - 1] = _gcd_degree(fp, g, p)
    return out


@njit
def zeta_local_factors(f, primes, skip):
    """log of prod_p (1-p^-2) prod_{P|p} (1 - N(P)^-2)^-1 for p in primes, skip[i] set -> ignored."""
    n = f.shape[0] - 1
    total = 0.0
    for idx in range(primes.shape[0]):
        if skip[idx]:
            continue
        p = primes[idx]
        r = root_counts_mod_p(f, p)
        cnt = np.zeros(n + 1, dtype=np.int64)
        for d in range(1, n + 1):
            s = r[d - 1]
            for e in range(1, d):
                if d % e == 0:
                    s -= e * cnt[e]
            cnt[d] = s // d
        pf = float(p)
        local = np.log1p(-pf ** -2.0)
        for d in range(1, n + 1):
            if cnt[d] > 0:
                local -= cnt[d] * np.log1p(-pf ** (-2.0 * d))
        total += local
    return total


# ---------------------------------------------------------------------------
# Fincke-Pohst enumeration

@njit
def fp_decompose(G):
    """Upper-triangular form: Q(x) = sum_i q[i,i] (x_i + sum_{j>i} q[i,j] x_j)^2.

    Returns (q, ok); ok is False when a pivot is not positive.
    """
    d = G.shape[0]
    q = G.copy()
    for i in range(d):
        if q[i, i] <= 0.0:
            return q, False
        for j in range(i + 1, d):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for k in range(i + 1, d):
            for l in range(k, d):
                q[k, l] -= q[k, i] * q[i, l]
    for i in range(d):
        for j in range(i):
            q[i, j] = 0.0
    return q, True


@njit
def fp_enumerate(q, bound, symmetric):
    """All integer x with Q(x) <= bound, Q given by ``fp_decompose``.

    When ``symmetric`` is set only one of x, -x is emitted: the highest
    nonzero coordinate is positive.  Returns an (m, d) int64 array.
    """
    d = q.shape[0]
    cap = 1024
    out = np.empty((cap, d), dtype=np.int64)
    m = 0
    x = np.zeros(d, dtype=np.int64)
    T = np.zeros(d)
    ctr = np.zeros(d)
    ub = np.zeros(d, dtype=np.int64)
    slack = 1e-9 * (abs(bound) + 1.0)
    i = d - 1
    T[i] = bound
    ctr[i] = 0.0
    r = np.sqrt(max(T[i] + slack, 0.0) / q[i, i])
    lo = int(np.ceil(ctr[i] - r))
    ub[i] = int(np.floor(ctr[i] + r))
    if symmetric and lo < 0:
        lo = 0
    x[i] = lo - 1
    while True:
        x[i] += 1
        if x[i] > ub[i]:
            i += 1
            if i == d:
                break
            continue
        diff = x[i] - ctr[i]
        t = T[i] - q[i, i] * diff * diff
        if t < -slack:
            # below the lower end of the interval: keep going up
            if diff < 0:
                continue
            i += 1
            if i == d:
                break
            continue
        if i == 0:
            if m == cap:
                new = np.empty((cap * 2, d), dtype=np.int64)
                new[:cap] = out
                out = new
                cap *= 2
            out[m] = x
            m += 1
            continue
        i -= 1
        T[i] = t
        s = 0.0
        for j in range(i + 1, d):
            s += q[i, j] * x[j]
        ctr[i] = -s
        r = np.sqrt(max(T[i] + slack, 0.0) / q[i, i])
        lo = int(np.ceil(ctr[i] - r))
        ub[i] = int(np.floor(ctr[i] + r))
        if symmetric:
            allzero = True
            for j in range(i + 1, d):
                if x[j] != 0:
                    allzero = False
                    break
            if allzero and lo < 0:
                lo = 0
        x[i] = lo - 1
    return out[:m].copy()


@njit
def quad_values(X, G):
    m = X.shape[0]
    d = G.shape[0]
    out = np.empty(m)
    for k in range(m):
        s = 0.0
        for i in range(d):
            xi = X[k, i]
            if xi == 0:
                continue
            row = 0.0
            for j in range(d):
                row += G[i, j] * X[k, j]
            s += xi * row
        out[k] = s
    return out


# ---------------------------------------------------------------------------
# reduction scores

@njit
def norms_after(mats, P):
    """||g P||^2 for every g in mats (k, 2, 2) complex, P a 2x2 complex matrix."""
    k = mats.shape[0]
    out = np.empty(k)
    for i in range(k):
        s = 0.0
        for r in range(2):
            for c in range(2):
                v = mats[i, r, 0] * P[0, c] + mats[i, r, 1] * P[1, c]
                s += v.real * v.real + v.imag * v.imag
        out[i] = s
    return out


@njit
def reduce_loop(mats, P, slack, max_steps):
    """Greedy reduction of the matrix P against the list ``mats``.

    Repeatedly multiplies P on the left by the element minimising ||g P||
    while (||P||^2 + 2) / (||g P||^2 + 2) > 1 + slack.  Returns the final
    matrix, the sequence of chosen indices and a status flag (0 ok, 1 step cap).
    """
    steps = np.empty(max_steps, dtype=np.int64)
    nsteps = 0
    cur = P.copy()
    while True:
        n0 = 0.0
        for r in range(2):
            for c in range(2):
                n0 += cur[r, c].real ** 2 + cur[r, c].imag ** 2
        vals = norms_after(mats, cur)
        best = 0
        for i in range(1, vals.shape[0]):
            if vals[i] < vals[best]:
                best = i
        if (n0 + 2.0) / (vals[best] + 2.0) <= 1.0 + slack:
            return cur, steps[:nsteps].copy(), 0
        if nsteps == max_steps:
            return cur, steps[:nsteps].copy(), 1
        new = np.empty((2, 2), dtype=np.complex128)
        for r in range(2):
            for c in range(2):
                new[r, c] = mats[best, r, 0] * cur[0, c] + mats[best, r, 1] * cur[1, c]
        cur = new
        steps[nsteps] = best
        nsteps += 1
