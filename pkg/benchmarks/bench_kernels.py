"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the Hermitian eigensolver over dimensions 2..9 and the Givens
basis ascent on random operator sets, checks that both backends agree,
and prints one line per case.
"""

import argparse
import timeit

import numpy as np

from bellanomaly import _pykernels
from bellanomaly.quantum import haar_unitaries

try:
    from bellanomaly import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def random_hermitian(d, gen):
    z = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    return (z + z.conj().T) / 2


def bench(label, fn_py, fn_c, repeat):
    t_py = min(timeit.repeat(fn_py, number=1, repeat=repeat))
    if fn_c is None:
        print(f"{label:<28} python {t_py * 1e3:9.3f} ms   cython      n/a")
        return
    t_c = min(timeit.repeat(fn_c, number=1, repeat=repeat))
    print(f"{label:<28} python {t_py * 1e3:9.3f} ms   cython {t_c * 1e3:9.3f} ms   speedup {t_py / t_c:6.1f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    gen = np.random.default_rng(2024)
    for d in (2, 3, 4, 6, 9):
        mats = [random_hermitian(d, gen) for _ in range(50)]
        if _ckernels is not None:
            for m in mats[:5]:
                w_py, _ = _pykernels.jacobi_eigh(m)
                w_c, _ = _ckernels.jacobi_eigh(m)
                assert np.max(np.abs(w_py - w_c)) < 1e-10
        bench(f"jacobi_eigh d={d} x50",
              lambda: [_pykernels.jacobi_eigh(m) for m in mats],
              None if _ckernels is None else (lambda: [_ckernels.jacobi_eigh(m) for m in mats]),
              args.repeat)
    for d, n in ((3, 3), (4, 4), (9, 3)):
        ks = [np.array([random_hermitian(d, gen) for _ in range(n)]) for _ in range(20)]
        us = haar_unitaries(d, 20, gen)
        assign = np.arange(d) % n
        if _ckernels is not None:
            v_py = _pykernels.givens_ascent(ks[0], us[0], assign)[2]
            v_c = _ckernels.givens_ascent(ks[0], us[0], assign)[2]
            assert abs(v_py - v_c) < 1e-9
        bench(f"givens_ascent d={d} n={n} x20",
              lambda: [_pykernels.givens_ascent(k, u, assign) for k, u in zip(ks, us)],
              None if _ckernels is None else (lambda: [_ckernels.givens_ascent(k, u, assign) for k, u in zip(ks, us)]),
              args.repeat)


if __name__ == "__main__":
    main()
