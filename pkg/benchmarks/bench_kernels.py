"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import timeit

from multifrey import _fallback
from multifrey.ffield import build_extension, legendre_table
from multifrey.frey import FreyC7

try:
    from multifrey import _kernels
except ImportError:  # not compiled
    _kernels = None


def workloads(rng: random.Random):
    q = 83
    chi = legendre_table(q)
    polys = [[c % q for c in FreyC7(x, y).coefficients] for x, y in ((1, 2), (3, 5), (1, 40), (7, 9))]
    yield "charsum_prime q=83", lambda m: [m.charsum_prime(f, q, chi) for f in polys]

    F = build_extension(13, 3)
    logs = [F.log_of(1 + rng.randrange(F.size - 1)) for _ in range(8)]
    yield "charsum_log 13^3", lambda m: m.charsum_log(logs, F.zech, F.size - 1)

    f = [rng.randint(-50, 50) for _ in range(8)]
    g = [rng.randint(-50, 50) for _ in range(7)]
    yield "resultant_modp deg 7x6", lambda m: m.resultant_modp(f, g, 1000003)

    n = 9
    mat = [rng.randint(-9, 9) for _ in range(n * n)]
    yield "charpoly_modp 9x9", lambda m: m.charpoly_modp(mat, n, 10007)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = random.Random(0)
    print(f"{'kernel':28} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, fn in workloads(rng):
        py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:28} {py:10.2f} {'-':>10} {'-':>8}")
            continue
        assert fn(_kernels) == fn(_fallback), name
        cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28} {py:10.2f} {cy:10.2f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
