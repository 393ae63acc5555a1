"""Resolved parameters for every algorithm and target, as JSON.

PCI targets outside the built-in table are tuned by simulation, which takes
a few seconds each.
"""

import argparse

from _common import ALL_CDC, TARGETS, corpus_args, load

from chunkbench.spec import ConfigError
from chunkbench.tuning import ram_mu_exact, resolve_spec, tuning_document


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    corpus_args(parser)
    parser.add_argument("--targets", nargs="+", type=int, default=TARGETS)
    parser.add_argument("--ram-bias", action="store_true", help="also print the RAM formula bias per target")
    args = parser.parse_args()
    data = load(args)

    entries = []
    for alg in ["fsc"] + ALL_CDC:
        for mu in args.targets:
            try:
                entries.append(resolve_spec(alg, mu, data=data, seed=args.seed))
            except ConfigError:
                pass
    print(tuning_document(entries))
    if args.ram_bias:
        for r in entries:
            if r.spec.algorithm.value == "ram":
                h = r.spec.horizon
                print(f"ram mu={r.spec.target} h={h} formula={r.details['predicted_mean']:.1f} exact={ram_mu_exact(h):.1f}")


if __name__ == "__main__":
    main()
