"""Chunking throughput (median and IQR, MiB/s) with interleaved repetitions.

    python scripts/throughput.py --target 2048 --reps 10
"""

import argparse

from _common import ALL_CDC, corpus_args, load

from chunkbench.analysis import throughput_suite
from chunkbench.tuning import resolve_spec


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    corpus_args(parser)
    parser.add_argument("--algs", nargs="+", default=["fsc"] + ALL_CDC)
    parser.add_argument("--target", type=int, default=2048)
    parser.add_argument("--reps", type=int, default=10)
    args = parser.parse_args()
    data = load(args)

    specs = {alg: resolve_spec(alg, args.target, data=data, seed=args.seed).spec for alg in args.algs}
    results = throughput_suite(specs, data, args.reps)
    print(f"{'alg':<10} {'median':>10} {'iqr':>9}   (MiB/s, n={args.reps}, {len(data) >> 20} MiB)")
    for alg, r in sorted(results.items(), key=lambda kv: -kv[1].median_mibps):
        assert r.sum_of_sizes == len(data)
        print(f"{alg:<10} {r.median_mibps:>10.1f} {r.iqr_mibps:>9.1f}")


if __name__ == "__main__":
    main()
