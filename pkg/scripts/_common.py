"""Helpers shared by the experiment scripts."""

import argparse
import os

import numpy as np

from chunkbench.datasets import concat_corpus, generate_random

ALL_CDC = ["rabin", "buzhash", "gear", "gear-nc", "ae", "ram", "mii", "pci", "bfbc", "bfbc-star"]
TARGETS = [512, 770, 1024, 2048, 4096, 5482, 8192]


def corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", action="append", help="files to concatenate instead of random data")
    parser.add_argument("--seed", type=int, default=int(os.environ.get("CHUNKBENCH_SEED", "2024")))
    parser.add_argument("--len", type=int, default=64 << 20, dest="length")


def load(args) -> np.ndarray:
    if args.input:
        return concat_corpus(args.input)[0]
    return generate_random(args.seed, args.length)
