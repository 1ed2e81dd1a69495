# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: character sums for point counting and mod-p linear
algebra used by exact resultants and characteristic polynomials.

Same signatures and semantics as ``multifrey._fallback``.
"""

from libc.stdlib cimport malloc, free

cdef enum:
    ZERO_LOG = -1


def charsum_log(coeffs, zech, long order):
    cdef Py_ssize_t ncoef = len(coeffs)
    cdef Py_ssize_t i, j
    cdef long *c = <long *> malloc(ncoef * sizeof(long))
    cdef long *z = <long *> malloc(order * sizeof(long))
    cdef long acc, d, zz, xl, total
    if c == NULL or z == NULL:
        free(c)
        free(z)
        raise MemoryError()
    try:
        for i in range(ncoef):
            c[i] = coeffs[i]
        for i in range(order):
            z[i] = zech[i]
        total = 0
        if c[ncoef - 1] != ZERO_LOG:
            total = 1 if c[ncoef - 1] % 2 == 0 else -1
        for xl in range(order):
            acc = c[0]
            for j in range(1, ncoef):
                if acc != ZERO_LOG:
                    acc += xl
                    if acc >= order:
                        acc -= order
                if c[j] == ZERO_LOG:
                    continue
                if acc == ZERO_LOG:
                    acc = c[j]
                    continue
                d = c[j] - acc
                if d < 0:
                    d += order
                zz = z[d]
                if zz == ZERO_LOG:
                    acc = ZERO_LOG
                else:
                    acc += zz
                    if acc >= order:
                        acc -= order
            if acc != ZERO_LOG:
                total += 1 if acc % 2 == 0 else -1
        return total
    finally:
        free(c)
        free(z)


def charsum_prime(coeffs, long p, chi):
    cdef Py_ssize_t ncoef = len(coeffs)
    cdef Py_ssize_t j
    cdef long x, acc, total = 0
    cdef long *c = <long *> malloc(ncoef * sizeof(long))
    cdef int *ch = <int *> malloc(p * sizeof(int))
    if c == NULL or ch == NULL:
        free(c)
        free(ch)
        raise MemoryError()
    try:
        for j in range(ncoef):
            c[j] = coeffs[j] % p
        for j in range(p):
            ch[j] = chi[j]
        for x in range(p):
            acc = 0
            for j in range(ncoef):
                acc = (acc * x + c[j]) % p
            total += ch[acc]
        return total
    finally:
        free(c)
        free(ch)


cdef long long _powmod(long long b, long long e, long long m):
    cdef long long r = 1
    b %= m
    if b < 0:
        b += m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


def resultant_modp(f, g, long long p):
    cdef Py_ssize_t na = len(f), nb = len(g)
    cdef Py_ssize_t cap = (na if na > nb else nb) + 1
    cdef long long *a = <long long *> malloc(cap * sizeof(long long))
    cdef long long *b = <long long *> malloc(cap * sizeof(long long))
    cdef long long *tmp
    cdef long long res = 1, inv, coef
    cdef Py_ssize_t da, db, dr, i, j, t
    if a == NULL or b == NULL:
        free(a)
        free(b)
        raise MemoryError()
    try:
        for i in range(na):
            a[i] = f[i] % p
        for i in range(nb):
            b[i] = g[i] % p
        da = na - 1
        while da >= 0 and a[da] == 0:
            da -= 1
        db = nb - 1
        while db >= 0 and b[db] == 0:
            db -= 1
        if da < 0 or db < 0:
            return 0
        while True:
            if db == 0:
                return res * _powmod(b[0], da, p) % p
            if da < db:
                if (da * db) % 2 == 1:
                    res = (p - res) % p
                tmp = a
                a = b
                b = tmp
                t = da
                da = db
                db = t
                continue
            inv = _powmod(b[db], p - 2, p)
            for i in range(da - db, -1, -1):
                coef = a[i + db] * inv % p
                if coef:
                    for j in range(db + 1):
                        a[i + j] = (a[i + j] - coef * b[j]) % p
                        if a[i + j] < 0:
                            a[i + j] += p
            dr = db - 1
            while dr >= 0 and a[dr] == 0:
                dr -= 1
            if dr < 0:
                return 0
            if (da * db) % 2 == 1:
                res = (p - res) % p
            res = res * _powmod(b[db], da - dr, p) % p
            tmp = a
            a = b
            b = tmp
            da = db
            db = dr
    finally:
        free(a)
        free(b)


def charpoly_modp(mat, Py_ssize_t n, long long p):
    cdef long long *h = <long long *> malloc((n * n + 1) * sizeof(long long))
    cdef long long *polys = <long long *> malloc(((n + 1) * (n + 1) + 1) * sizeof(long long))
    cdef Py_ssize_t i, j, k, m, piv, idx
    cdef long long u, inv, t, coef, sw, hk
    if h == NULL or polys == NULL:
        free(h)
        free(polys)
        raise MemoryError()
    try:
        for i in range(n * n):
            h[i] = mat[i] % p
            if h[i] < 0:
                h[i] += p
        for m in range(1, n - 1):
            piv = -1
            for i in range(m, n):
                if h[i * n + m - 1]:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != m:
                for j in range(n):
                    sw = h[piv * n + j]
                    h[piv * n + j] = h[m * n + j]
                    h[m * n + j] = sw
                for i in range(n):
                    sw = h[i * n + piv]
                    h[i * n + piv] = h[i * n + m]
                    h[i * n + m] = sw
            inv = _powmod(h[m * n + m - 1], p - 2, p)
            for i in range(m + 1, n):
                u = h[i * n + m - 1] * inv % p
                if not u:
                    continue
                for j in range(n):
                    h[i * n + j] = (h[i * n + j] - u * h[m * n + j]) % p
                    if h[i * n + j] < 0:
                        h[i * n + j] += p
                for j in range(n):
                    h[j * n + m] = (h[j * n + m] + u * h[j * n + i]) % p
        # polys row k holds the charpoly of the leading k x k block
        for i in range((n + 1) * (n + 1)):
            polys[i] = 0
        polys[0] = 1
        for k in range(1, n + 1):
            idx = k * (n + 1)
            for j in range(k):
                polys[idx + j + 1] = polys[(k - 1) * (n + 1) + j]
            hk = h[(k - 1) * n + k - 1]
            for j in range(k):
                polys[idx + j] = (polys[idx + j] - hk * polys[(k - 1) * (n + 1) + j]) % p
                if polys[idx + j] < 0:
                    polys[idx + j] += p
            t = 1
            for i in range(1, k):
                t = t * h[(k - i) * n + k - i - 1] % p
                coef = t * h[(k - i - 1) * n + k - 1] % p
                if coef:
                    for j in range(k - i):
                        polys[idx + j] = (polys[idx + j] - coef * polys[(k - i - 1) * (n + 1) + j]) % p
                        if polys[idx + j] < 0:
                            polys[idx + j] += p
        return [polys[n * (n + 1) + j] for j in range(n + 1)]
    finally:
        free(h)
        free(polys)
