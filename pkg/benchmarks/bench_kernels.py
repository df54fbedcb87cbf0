"""Time the compiled and numpy kernels on one dataset, then a full fit with each.

    python benchmarks/bench_kernels.py data/wdbc.csv --repeat 5
"""
import argparse
import time

import numpy as np

from mdlrules import binarize, fit, load_csv, mine, remove_redundant
from mdlrules.bitset import pack
from mdlrules.encoding import PluginCode
from mdlrules.kernels import available, load


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--min-support", type=float, default=0.05)
    ap.add_argument("--max-length", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    data = binarize(load_csv(args.csv))
    cands = remove_redundant(mine(data, args.min_support, args.max_length))
    covers = pack(cands.covers, data.n)
    masks = pack(data.class_covers, data.n)
    code = PluginCode(data.num_classes, 1.0, data.n)
    removed = covers[len(cands) // 2].copy()
    print(f"{args.csv}: n={data.n} items={data.num_items} candidates={len(cands)}")
    print(f"{'backend':8s}" + "".join(f"{h:>14s}" for h in
                                     ("class_counts", "subtract", "blocks", "fit")))

    for name in available():
        k = load(name)
        counts = k.class_counts(covers, masks)

        def subtract():
            k.subtract_and_count(covers.copy(), removed, masks, counts.copy())

        row = [best_of(lambda: k.class_counts(covers, masks), args.repeat),
               best_of(subtract, args.repeat),
               best_of(lambda: k.block_lengths(counts, code.per_class.values, code.total.values),
                       args.repeat),
               best_of(lambda: fit(data, cands, backend=name), max(1, args.repeat // 2))]
        print(f"{name:8s}" + "".join(f"{t * 1e3:12.2f}ms" for t in row))
    if len(available()) == 2:
        a, b = (load(n).class_counts(covers, masks) for n in available())
        assert np.array_equal(a, b)


if __name__ == "__main__":
    main()
