"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--quick]

Workloads are drawn from real designs so the numbers reflect the hot paths of
``verify_tdesign``, ``build_design`` and the isomorphism search.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from opdlab import field_new, kernels
from opdlab.design import build_design, mask_of, nwords, slope_rows
from opdlab.poly import Poly, catalog


def workloads(quick: bool):
    F32 = field_new(2, 5)
    segre = build_design(Poly.monomial(F32, 6), 16)
    ext = build_design(catalog("cherowitzo", F32), 16, extended=True)
    F128 = field_new(2, 7)
    big = build_design(Poly.monomial(F128, 6), 64)
    vals, _, _ = slope_rows(Poly.monomial(F32, 6), extended=False)
    perm = np.random.default_rng(0).permutation(128)
    triples = np.array([mask_of((0, 1, z), 128) for z in range(2, 128)], dtype=np.uint64)

    out = [
        ("tsubset t=3  segre q=32 (992 blocks)", "tsubset_counts", (segre.blocks, 32, 3)),
        ("tsubset t=3  extended q=32 (30752 blocks)", "tsubset_counts", (ext.blocks, 32, 3)),
        ("translate    x^6 q=32", "translate_images", (vals, F32.add_table, nwords(32))),
        ("profile      segre q=32", "intersection_profile", (segre.blocks, 16)),
        ("supersets    x^6 q=128 orbit reps", "count_supersets", (big.blocks, triples)),
        ("permute      x^6 q=128", "permute_points", (big.blocks, perm)),
        ("fwht         n=2^16", "fwht", (np.random.default_rng(1).integers(-1, 2, 1 << 16),)),
    ]
    if not quick:
        out.insert(2, ("tsubset t=3  x^6 q=128 (16256 blocks)", "tsubset_counts", (big.blocks, 128, 3)))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the largest workload")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    names = sorted(backends, key=lambda n: n != "cython")
    print(f"backends: {', '.join(names)} (selected: {kernels.BACKEND})")
    header = f"{'workload':<44}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, fn, fargs in workloads(args.quick):
        times = []
        results = []
        for n in names:
            f = getattr(backends[n], fn)
            results.append(f(*fargs))
            best = min(timeit.repeat(lambda: f(*fargs), number=1, repeat=args.repeat))
            times.append(best)
        if len(results) == 2 and not np.array_equal(results[0], results[1]):
            raise SystemExit(f"{label}: backends disagree")
        row = f"{label:<44}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
