"""Mean and SD of chunk sizes for every algorithm over a range of targets.

    python scripts/chunk_size_distribution.py --targets 1024 2048 8192
"""

import argparse
import json

from _common import ALL_CDC, TARGETS, corpus_args, load

from chunkbench.core import chunk_lengths
from chunkbench.spec import ConfigError
from chunkbench.tuning import resolve_spec


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    corpus_args(parser)
    parser.add_argument("--algs", nargs="+", default=ALL_CDC)
    parser.add_argument("--targets", nargs="+", type=int, default=TARGETS)
    parser.add_argument("--json", action="store_true", help="emit JSON rows instead of a table")
    args = parser.parse_args()
    data = load(args)

    rows = []
    for alg in args.algs:
        for mu in args.targets:
            try:
                spec = resolve_spec(alg, mu, data=data, seed=args.seed).spec
            except ConfigError as exc:
                rows.append({"alg": alg, "target": mu, "error": str(exc)})
                continue
            lengths, _ = chunk_lengths(spec, data)
            mean = float(lengths.mean()) if len(lengths) else float("nan")
            sd = float(lengths.std()) if len(lengths) else float("nan")
            rows.append({"alg": alg, "target": mu, "chunks": int(len(lengths)), "mean": mean, "sd": sd,
                         "rel_error": (mean - mu) / mu, "params": spec.params()})
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'alg':<10} {'target':>7} {'chunks':>8} {'mean':>10} {'sd':>10} {'error':>8}")
    for r in rows:
        if "error" in r:
            print(f"{r['alg']:<10} {r['target']:>7}  unsupported: {r['error']}")
        else:
            print(f"{r['alg']:<10} {r['target']:>7} {r['chunks']:>8} {r['mean']:>10.1f} {r['sd']:>10.1f} {r['rel_error']:>+8.2%}")


if __name__ == "__main__":
    main()
