"""Pure-Python/numpy versions of the kernels in ``_kernels.pyx``.

Used when the extension is not built, or when ``THETALINK_PURE=1``.
Same signatures and same results (bit-for-bit for the integer kernels).
"""
import math

import numpy as np

from thetalink.errors import ConvergenceError

_EPS = np.finfo(float).eps


def tridiagonalize(a):
    """Householder reduction of a symmetric matrix to (diagonal, offdiagonal)."""
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    d = np.zeros(n)
    e = np.zeros(max(n - 1, 0))
    for i in range(n - 1):
        x = a[i + 1:, i].copy()
        alpha = x[0]
        xnorm2 = float(x[1:] @ x[1:])
        if xnorm2 == 0.0:
            e[i] = alpha
            d[i] = a[i, i]
            continue
        beta = -math.copysign(math.sqrt(alpha * alpha + xnorm2), alpha)
        tau = (beta - alpha) / beta
        v = x / (alpha - beta)
        v[0] = 1.0
        e[i] = beta
        sub = a[i + 1:, i + 1:]
        w = tau * (sub @ v)
        w += (-0.5 * tau * (w @ v)) * v
        sub -= np.outer(v, w)
        sub -= np.outer(w, v)
        d[i] = a[i, i]
    if n:
        d[n - 1] = a[n - 1, n - 1]
    return d, e


def tridiagonal_eigenvalues(diag, offdiag, max_iter=60):
    """Eigenvalues of a symmetric tridiagonal matrix, ascending (implicit QL)."""
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    # absolute floor eps*||T|| so clusters of zero eigenvalues deflate
    floor_abs = _EPS * max((abs(d[i]) + abs(e[i]) + (abs(e[i - 1]) if i else 0.0) for i in range(n)), default=0.0)
    for l in range(n):
        it = 0
        while True:
            mm = l
            while mm < n - 1:
                dd = abs(d[mm]) + abs(d[mm + 1])
                if abs(e[mm]) <= _EPS * dd or abs(e[mm]) <= floor_abs:
                    break
                mm += 1
            if mm == l:
                break
            it += 1
            if it > max_iter:
                raise ConvergenceError("implicit QL did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[mm] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = mm - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
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
    return np.sort(np.array(d))


def mc_indicator_counts(nu, coef, offsets, theta, chunk=1 << 14):
    """Per-sample count of offset rows whose interior constraints all hold."""
    nu = np.asarray(nu, dtype=np.float64)
    coef = np.asarray(coef, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    out = np.zeros(nu.shape[0], dtype=np.int64)
    if offsets.shape[0] == 0:
        return out
    if coef.shape[0] == 0:
        out[:] = offsets.shape[0]
        return out
    for start in range(0, nu.shape[0], chunk):
        lin = nu[start:start + chunk] @ coef.T.astype(np.float64)
        ok = np.ones((lin.shape[0], offsets.shape[0]), dtype=bool)
        for i in range(coef.shape[0]):
            x = lin[:, i, None] + offsets[None, :, i]
            ok &= (x > 0.0) & (x < theta)
        out[start:start + chunk] = ok.sum(axis=1)
    return out


def count_circuits(partner, n, modulus, max_rows=1 << 21):
    """Number of circuits matching the word encoded by ``partner`` (see the extension).

    Every constraint except pi(h) = pi(0) is a congruence mod ``modulus``, so
    circuits are grouped by their residue pattern and each pattern is weighted
    by the product of residue-class sizes in {1..n}. Exact integer arithmetic.
    """
    partner = [int(p) for p in partner]
    h = len(partner) - 1
    n = int(n)
    m = int(modulus)
    size = np.bincount(np.arange(1, n + 1) % m, minlength=m).astype(np.int64)
    # only residues that actually occur in 1..n (all of them unless m > n)
    residues = np.flatnonzero(size).astype(np.int64)

    def walk(res, weight, p):
        if p == h:
            i = partner[h]
            c = (res[:, i - 1] + res[:, i] - res[:, h - 1]) % m
            return int(weight[res[:, 0] == c].sum())
        if partner[p] < 0:
            r = residues.size
            if res.shape[0] * r > max_rows and res.shape[0] > 1:
                half = res.shape[0] // 2
                return walk(res[:half], weight[:half], p) + walk(res[half:], weight[half:], p)
            new = np.column_stack([np.repeat(res, r, axis=0), np.tile(residues, res.shape[0])])
            return walk(new, np.repeat(weight, r) * np.tile(size[residues], res.shape[0]), p + 1)
        i = partner[p]
        c = (res[:, i - 1] + res[:, i] - res[:, p - 1]) % m
        keep = size[c] > 0
        return walk(np.column_stack([res[keep], c[keep]]), weight[keep] * size[c[keep]], p + 1)

    return walk(residues[:, None], size[residues].copy(), 1)


def count_circuits_enumerate(partner, n, modulus):
    """Circuit-by-circuit count; pure Python, small n only."""
    partner = [int(p) for p in partner]
    h = len(partner) - 1
    n, m = int(n), int(modulus)
    pi = [0] * (h + 1)

    def dfs(p):
        i = partner[p]
        if i < 0:
            total = 0
            for v in range(1, n + 1):
                pi[p] = v
                total += dfs(p + 1)
            return total
        c = (pi[i - 1] + pi[i] - pi[p - 1]) % m
        if p == h:
            return 1 if (pi[0] - c) % m == 0 else 0
        total = 0
        for v in range(c if c > 0 else m, n + 1, m):
            pi[p] = v
            total += dfs(p + 1)
        return total

    total = 0
    for v0 in range(1, n + 1):
        pi[0] = v0
        total += dfs(1)
    return total
