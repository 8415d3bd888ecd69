# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: symmetric eigenvalues, MC indicator counts, circuit counts.

Signatures mirror :mod:`thetalink._fallback` one-for-one; the two are
interchangeable and are cross-checked in the test suite.
"""
import numpy as np

from libc.math cimport fabs, fmax, sqrt, hypot, copysign
from libc.float cimport DBL_EPSILON
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free


from thetalink.errors import ConvergenceError


cdef void _householder_lower(double* a, Py_ssize_t n, double* d, double* e,
                             double* v, double* w) noexcept nogil:
    # a is row-major n x n; only the lower triangle is read and it is destroyed.
    cdef Py_ssize_t i, r, c, m
    cdef double alpha, xnorm2, beta, tau, scal, s, vr, wr, dot, t
    cdef double* row
    for i in range(n - 1):
        m = n - i - 1
        alpha = a[(i + 1) * n + i]
        xnorm2 = 0.0
        for r in range(1, m):
            t = a[(i + 1 + r) * n + i]
            xnorm2 += t * t
        if xnorm2 == 0.0:
            e[i] = alpha
            d[i] = a[i * n + i]
            continue
        beta = -copysign(sqrt(alpha * alpha + xnorm2), alpha)
        tau = (beta - alpha) / beta
        scal = 1.0 / (alpha - beta)
        v[0] = 1.0
        for r in range(1, m):
            v[r] = a[(i + 1 + r) * n + i] * scal
        e[i] = beta

        # w = tau * A22 v, lower-triangle symmetric product
        for r in range(m):
            w[r] = 0.0
        for r in range(m):
            row = a + (i + 1 + r) * n + (i + 1)
            s = 0.0
            vr = v[r]
            for c in range(r):
                s += row[c] * v[c]
                w[c] += row[c] * vr
            w[r] += s + row[r] * vr
        dot = 0.0
        for r in range(m):
            w[r] *= tau
            dot += w[r] * v[r]
        dot *= -0.5 * tau
        for r in range(m):
            w[r] += dot * v[r]

        # A22 -= v w' + w v'
        for r in range(m):
            row = a + (i + 1 + r) * n + (i + 1)
            vr = v[r]
            wr = w[r]
            for c in range(r + 1):
                row[c] -= vr * w[c] + wr * v[c]
        d[i] = a[i * n + i]
    d[n - 1] = a[(n - 1) * n + n - 1]


cdef int _ql_implicit(double* d, double* e, Py_ssize_t n, int max_iter) noexcept nogil:
    # e[i] couples d[i] and d[i+1]; e[n-1] must be 0 on entry.
    cdef Py_ssize_t l, mm, i
    cdef int it
    cdef double dd, g, r, s, c, p, f, b
    cdef double floor_abs = 0.0
    # absolute floor eps*||T||: without it a cluster of (near) zero
    # eigenvalues never deflates under the purely relative test
    for i in range(n):
        floor_abs = fmax(floor_abs, fabs(d[i]) + fabs(e[i]) + (fabs(e[i - 1]) if i > 0 else 0.0))
    floor_abs *= DBL_EPSILON
    for l in range(n):
        it = 0
        while True:
            mm = l
            while mm < n - 1:
                dd = fabs(d[mm]) + fabs(d[mm + 1])
                if fabs(e[mm]) <= DBL_EPSILON * dd or fabs(e[mm]) <= floor_abs:
                    break
                mm += 1
            if mm == l:
                break
            it += 1
            if it > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[mm] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = mm - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[mm] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if r == 0.0 and i >= l:
                continue
            d[l] -= p
            e[l] = g
            e[mm] = 0.0
    return 0


def tridiagonalize(a):
    """Householder reduction of a symmetric matrix to (diagonal, offdiagonal)."""
    cdef double[:, ::1] work = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = work.shape[0]
    d = np.zeros(n)
    e = np.zeros(max(n - 1, 0) + 1)
    if n == 0:
        return d, e[:0]
    cdef double[::1] dv = d
    cdef double[::1] ev = e
    cdef double* v = <double*> malloc(n * sizeof(double))
    cdef double* w = <double*> malloc(n * sizeof(double))
    if v == NULL or w == NULL:
        free(v)
        free(w)
        raise MemoryError()
    with nogil:
        _householder_lower(&work[0, 0], n, &dv[0], &ev[0], v, w)
    free(v)
    free(w)
    return d, e[: n - 1]


def tridiagonal_eigenvalues(diag, offdiag, int max_iter=60):
    """Eigenvalues of a symmetric tridiagonal matrix, ascending."""
    d = np.array(diag, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = d.shape[0]
    e = np.zeros(n + 1)
    e[: n - 1] = offdiag
    if n == 0:
        return d
    cdef double[::1] dv = d
    cdef double[::1] ev = e
    cdef int status
    with nogil:
        status = _ql_implicit(&dv[0], &ev[0], n, max_iter)
    if status != 0:
        raise ConvergenceError("implicit QL did not converge")
    d.sort()
    return d


def mc_indicator_counts(const double[:, ::1] nu, const int64_t[:, ::1] coef,
                        const int64_t[:, ::1] offsets, double theta):
    """Per-sample count of offset rows whose interior constraints all hold.

    For sample s and offset row g the constraint is
    0 < sum_c coef[i, c] * nu[s, c] + offsets[g, i] < theta for every i.
    """
    cdef Py_ssize_t S = nu.shape[0], K1 = nu.shape[1]
    cdef Py_ssize_t NI = coef.shape[0], G = offsets.shape[0]
    out = np.zeros(S, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef double* lin = <double*> malloc((NI + 1) * sizeof(double))
    cdef Py_ssize_t s, i, c, g
    cdef int64_t cnt
    cdef double acc, x
    cdef bint ok
    if lin == NULL:
        raise MemoryError()
    with nogil:
        for s in range(S):
            for i in range(NI):
                acc = 0.0
                for c in range(K1):
                    acc += coef[i, c] * nu[s, c]
                lin[i] = acc
            cnt = 0
            for g in range(G):
                ok = True
                for i in range(NI):
                    x = lin[i] + offsets[g, i]
                    if x <= 0.0 or x >= theta:
                        ok = False
                        break
                if ok:
                    cnt += 1
            ov[s] = cnt
    free(lin)
    return out


cdef int64_t _dfs(Py_ssize_t p, Py_ssize_t h, int64_t n, int64_t m,
                  const int64_t* partner, int64_t* pi) noexcept nogil:
    cdef int64_t total = 0, v, c
    cdef Py_ssize_t i = partner[p]
    if i < 0:
        for v in range(1, n + 1):
            pi[p] = v
            total += _dfs(p + 1, h, n, m, partner, pi)
        return total
    c = (pi[i - 1] + pi[i] - pi[p - 1]) % m
    if c < 0:
        c += m
    if p == h:
        # closing vertex is pinned to pi[0]
        return 1 if (pi[0] - c) % m == 0 else 0
    v = c if c > 0 else m
    while v <= n:
        pi[p] = v
        total += _dfs(p + 1, h, n, m, partner, pi)
        v += m
    return total


cdef int64_t _grouped(Py_ssize_t p, Py_ssize_t h, int64_t m, const int64_t* partner,
                      const int64_t* size, const int64_t* occ, Py_ssize_t nocc,
                      int64_t* res) noexcept nogil:
    cdef int64_t total = 0, c
    cdef Py_ssize_t t, i = partner[p]
    if i < 0:
        for t in range(nocc):
            res[p] = occ[t]
            total += size[occ[t]] * _grouped(p + 1, h, m, partner, size, occ, nocc, res)
        return total
    c = (res[i - 1] + res[i] - res[p - 1]) % m
    if c < 0:
        c += m
    if p == h:
        # the closing vertex is pi(0) itself, not just congruent to it
        return 1 if c == res[0] else 0
    if size[c] == 0:
        return 0
    res[p] = c
    return size[c] * _grouped(p + 1, h, m, partner, size, occ, nocc, res)


def count_circuits(const int64_t[::1] partner, int64_t n, int64_t modulus):
    """Number of circuits pi: {0..h} -> {1..n} matching the word encoded by ``partner``.

    ``partner[p]`` (p = 1..h) is -1 at a first occurrence and the position of
    the first occurrence otherwise; ``partner[0]`` is unused. Every match is a
    congruence mod ``modulus``, so circuits are counted per residue pattern,
    weighted by how many values in 1..n carry each residue.
    """
    cdef Py_ssize_t h = partner.shape[0] - 1
    sizes = np.bincount(np.arange(1, n + 1) % modulus, minlength=modulus).astype(np.int64)
    occupied = np.flatnonzero(sizes).astype(np.int64)
    cdef const int64_t[::1] sv = sizes
    cdef const int64_t[::1] ov = occupied
    cdef Py_ssize_t nocc = occupied.shape[0], t
    cdef int64_t total = 0
    cdef int64_t* res = <int64_t*> malloc((h + 1) * sizeof(int64_t))
    if res == NULL:
        raise MemoryError()
    with nogil:
        for t in range(nocc):
            res[0] = ov[t]
            total += sv[ov[t]] * _grouped(1, h, modulus, &partner[0], &sv[0], &ov[0], nocc, res)
    free(res)
    return int(total)


def count_circuits_enumerate(const int64_t[::1] partner, int64_t n, int64_t modulus):
    """Same count by visiting every circuit: generating vertices range over 1..n,
    each second occurrence branches over the values in its residue class.
    """
    cdef Py_ssize_t h = partner.shape[0] - 1
    cdef int64_t total = 0, v0
    cdef int64_t* pi = <int64_t*> malloc((h + 1) * sizeof(int64_t))
    if pi == NULL:
        raise MemoryError()
    with nogil:
        for v0 in range(1, n + 1):
            pi[0] = v0
            total += _dfs(1, h, n, modulus, &partner[0], pi)
    free(pi)
    return int(total)
