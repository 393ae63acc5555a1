"""Deduplication ratio per algorithm and target over a corpus.

Random data has nothing to deduplicate; pass --input with real files, or
--doubled to append the corpus to itself as a sanity check.
"""

import argparse

import numpy as np
from _common import ALL_CDC, corpus_args, load

from chunkbench.analysis import summarize
from chunkbench.core import chunk_records
from chunkbench.tuning import resolve_spec


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    corpus_args(parser)
    parser.add_argument("--algs", nargs="+", default=["fsc"] + ALL_CDC)
    parser.add_argument("--targets", nargs="+", type=int, default=[1024, 2048, 4096, 8192])
    parser.add_argument("--doubled", action="store_true")
    args = parser.parse_args()
    data = load(args)
    if args.doubled:
        data = np.concatenate([data, data])

    print(f"{'alg':<10} {'target':>7} {'dedup':>8} {'mean':>10}")
    for alg in args.algs:
        for mu in args.targets:
            spec = resolve_spec(alg, mu, data=data, seed=args.seed).spec
            s = summarize(chunk_records(spec, data), target=mu)
            print(f"{alg:<10} {mu:>7} {s.dedup_ratio:>8.4f} {s.mean:>10.1f}")


if __name__ == "__main__":
    main()
