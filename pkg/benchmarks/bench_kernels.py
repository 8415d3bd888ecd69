"""Compiled extension vs pure-Python fallback on the hot kernels.

    python benchmarks/bench_kernels.py [--quick]

Prints one line per kernel with both timings and the speedup, and checks
that both backends produce the same numbers.
"""
import argparse
import time

import numpy as np

from thetalink import _backend
from thetalink.limits import _stream_key, admissible_gammas, linear_representation
from thetalink.matrix import build_matrix, make_rng, modulus
from thetalink.words import parse_word


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def mc_inputs(word, theta, samples):
    w = parse_word(word)
    rep = linear_representation(w)
    gammas = admissible_gammas(rep, theta)
    coef = np.ascontiguousarray(rep.coeffs[rep.interior], dtype=np.int64)
    offsets = np.ascontiguousarray(gammas @ rep.gamma[rep.interior].T, dtype=np.int64)
    nu = make_rng(0, *_stream_key(w), 0).uniform(0, theta, size=(samples, w.k + 1))
    return nu, coef, offsets


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    fast, slow = _backend.get("cython"), _backend.get("python")
    quick = args.quick
    n_eig = 200 if quick else 500
    repeat = 1 if quick else 3

    a = build_matrix(n_eig, 1.5, seed=0).entries
    d, e = fast.tridiagonalize(a)
    w_ql = parse_word("abcabc")
    cases = [
        (f"tridiagonalize n={n_eig}", lambda k: k.tridiagonalize(a)),
        (f"tridiagonal QL n={n_eig}", lambda k: k.tridiagonal_eigenvalues(d, e)),
    ]
    nu, coef, off = mc_inputs("abcabc", 2.5, 20000 if quick else 100000)
    cases.append((f"MC indicator counts S={nu.shape[0]}", lambda k: k.mc_indicator_counts(nu, coef, off, 2.5)))
    n_c = 30 if quick else 48
    partner = np.array(w_ql.partner(), dtype=np.int64)
    m = modulus(2.5, n_c)
    cases.append((f"circuit count abcabc n={n_c}", lambda k: k.count_circuits(partner, n_c, m)))
    n_e = 16 if quick else 24
    m_e = modulus(1.3, n_e)
    cases.append((f"circuit enumerate abcabc n={n_e}",
                  lambda k: k.count_circuits_enumerate(partner, n_e, m_e)))

    print(f"{'kernel':36s} {'cython [s]':>11s} {'python [s]':>11s} {'speedup':>8s}  same")
    for name, fn in cases:
        tf, of = best_of(lambda: fn(fast), repeat)
        ts, os_ = best_of(lambda: fn(slow), 1)
        if isinstance(of, tuple):
            # Householder signs may differ; compare the spectra of the two tridiagonals
            same = np.allclose(fast.tridiagonal_eigenvalues(*of), fast.tridiagonal_eigenvalues(*os_), atol=1e-10)
        else:
            same = np.allclose(of, os_, atol=1e-10)
        print(f"{name:36s} {tf:11.4f} {ts:11.4f} {ts / tf:8.1f}  {same}")


if __name__ == "__main__":
    main()
