"""Compare the compiled CSR kernels with the numpy fallback (and scipy.sparse for reference).

    python3 benchmarks/bench_kernels.py [--sizes 2x6,3x12,4x6] [--repeat 20] [--lanczos]
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from gsqc import _backend, _fallback
from gsqc.circuit import Circuit, rotation, single_layer
from gsqc.eigen import solve_lanczos
from gsqc.hamiltonian import BiasSpec, assemble

try:
    from gsqc import _kernels
except ImportError:
    _kernels = None


def circuit(m, n, seed=0):
    rng = np.random.default_rng(seed)
    stages = tuple(single_layer(*(rotation(float(t)) for t in rng.uniform(-3, 3, m))) for _ in range(n))
    return Circuit(m, stages)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_rows(H, repeat, width):
    indptr, indices, data = H._csr
    n = H.dim
    x = np.random.default_rng(1).standard_normal(n)
    X = np.random.default_rng(2).standard_normal((n, width))
    out, OUT = np.empty(n), np.empty((n, width))
    S = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    rows = []
    impls = [("numpy", _fallback)]
    if _kernels is not None:
        impls.insert(0, ("cython", _kernels))
    for name, mod in impls:
        rows.append((name, best_of(lambda: mod.csr_matvec(indptr, indices, data, x, out), repeat),
                     best_of(lambda: mod.csr_matmat(indptr, indices, data, X, OUT), repeat)))
    rows.append(("scipy", best_of(lambda: S @ x, repeat), best_of(lambda: S @ X, repeat)))
    return rows


def lanczos_time(H, backend_module):
    saved = _backend.csr_matvec, _backend.csr_matmat
    _backend.csr_matvec, _backend.csr_matmat = backend_module.csr_matvec, backend_module.csr_matmat
    try:
        t = time.perf_counter()
        solve_lanczos(H, 2, seed=0)
        return time.perf_counter() - t
    finally:
        _backend.csr_matvec, _backend.csr_matmat = saved


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="2x6,3x8,3x12,4x6", help="comma list of MxN instances")
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--width", type=int, default=8, help="block width for matmat")
    p.add_argument("--lanczos", action="store_true", help="also time a biased ground-state solve per backend")
    args = p.parse_args()

    print(f"# default backend: {_backend.BACKEND}")
    print(f"# {'instance':>9} {'dim':>8} {'nnz':>9} {'impl':>7} {'matvec ms':>10} {'matmat ms':>10}")
    for spec in args.sizes.split(","):
        m, n = (int(v) for v in spec.split("x"))
        H = assemble(circuit(m, n), BiasSpec((0,) * m))
        for name, mv, mm in kernel_rows(H, args.repeat, args.width):
            print(f"  {spec:>9} {H.dim:>8} {len(H._csr[1]):>9} {name:>7} {1e3 * mv:10.3f} {1e3 * mm:10.3f}")
        if args.lanczos:
            for name, mod in (("cython", _kernels), ("numpy", _fallback)):
                if mod is not None:
                    print(f"  {spec:>9} lanczos {name:>7} {lanczos_time(H, mod):8.2f} s")


if __name__ == "__main__":
    main()
