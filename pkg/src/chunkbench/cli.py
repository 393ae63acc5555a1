"""Command-line interface: ``chunkbench {chunk,tune,bench,analyze,gen}``.

Exit codes: 0 success, 1 failed self-check, 2 configuration error,
3 I/O error, 4 tuning failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

from . import __version__
from .analysis import StatsSummary, default_bucket_width, summarize, throughput_run
from .core import FINGERPRINT_ALGORITHM, ChunkRecord, iter_blocks, iter_records
from .datasets import PRNG_NAME, CorpusKind, CorpusSpec, concat_corpus, generate_random
from .spec import PARAM_FIELDS, Algorithm, ConfigError, DivisorSet, TuningError
from .tuning import Resolved, resolve_spec

EXIT_OK = 0
EXIT_SELF_CHECK = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TUNING = 4

SEED_ENV = "CHUNKBENCH_SEED"
DEFAULT_LENGTH = 64 << 20
CSV_HEADER = "ordinal,size,fingerprint,trailing"

_SUFFIXES = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30}


def parse_size(text: str) -> int:
    """Byte count with an optional K/M/G (binary) suffix, e.g. ``64M``."""
    t = text.strip().lower().removesuffix("ib").removesuffix("b")
    mult = 1
    if t and t[-1] in _SUFFIXES:
        mult = _SUFFIXES[t[-1]]
        t = t[:-1]
    try:
        value = int(t, 0) * mult
    except ValueError:
        raise ConfigError(f"not a byte count: {text!r}") from None
    if value < 0:
        raise ConfigError(f"byte count must be non-negative: {text!r}")
    return value


def parse_override(text: str) -> tuple[str, Any]:
    key, sep, value = text.partition("=")
    key = key.strip().replace("-", "_")
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    if key not in PARAM_FIELDS and key != "k":
        raise ConfigError(f"unknown parameter {key!r}")
    if key == "divisors":
        try:
            pairs = [int(p, 16) for p in value.split(",") if p]
        except ValueError:
            raise ConfigError(f"divisors must be comma-separated hex byte pairs, got {value!r}") from None
        return key, DivisorSet(pairs)
    try:
        return key, int(value, 0)
    except ValueError:
        raise ConfigError(f"parameter {key} needs an integer, got {value!r}") from None


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


@dataclass
class RunConfig:
    command: str
    algorithm: Algorithm | None = None
    target: int | None = None
    overrides: dict[str, Any] = field(default_factory=dict)
    inputs: list[str] = field(default_factory=list)
    seed: int = 0
    length: int = DEFAULT_LENGTH
    fmt: str = "csv"
    repetitions: int = 10
    output: str | None = None
    from_file: str | None = None
    manifest: str | None = None
    block_size: int = 1 << 20

    @property
    def corpus(self) -> CorpusSpec:
        if self.inputs:
            return CorpusSpec(CorpusKind.CONCAT, files=list(self.inputs))
        return CorpusSpec(CorpusKind.RANDOM, seed=self.seed, length=self.length)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cfg = cls(command=ns.command)
        cfg.seed = ns.seed if ns.seed is not None else default_seed()
        cfg.inputs = list(getattr(ns, "input", None) or [])
        if getattr(ns, "len", None) is not None:
            cfg.length = parse_size(ns.len)
        cfg.output = getattr(ns, "output", None)
        cfg.manifest = getattr(ns, "manifest", None)
        cfg.from_file = getattr(ns, "from_file", None)
        if getattr(ns, "format", None):
            cfg.fmt = ns.format
        if getattr(ns, "reps", None) is not None:
            if ns.reps < 1:
                raise ConfigError("--reps must be at least 1")
            cfg.repetitions = ns.reps
        if getattr(ns, "block_size", None) is not None:
            cfg.block_size = parse_size(ns.block_size)
            if cfg.block_size < 1:
                raise ConfigError("--block-size must be positive")
        alg = getattr(ns, "alg", None)
        if alg is not None:
            cfg.algorithm = Algorithm.parse(alg)
            cfg.overrides = dict(parse_override(o) for o in ns.override or [])
            size = getattr(ns, "size", None)
            if size is not None and cfg.algorithm is not Algorithm.FSC:
                raise ConfigError("--size only applies to fsc; use --target")
            cfg.target = parse_size(size) if size is not None else ns.target
            if cfg.target is None and cfg.from_file is None:
                raise ConfigError("a target size is required (--target, or --size for fsc)")
        return cfg


# --- shared plumbing -----------------------------------------------------------


@dataclass
class Loaded:
    data: np.ndarray
    sha256: str
    corpus: dict


def load_input(cfg: RunConfig) -> Loaded:
    corpus = cfg.corpus
    if corpus.kind is CorpusKind.CONCAT:
        data, manifest = concat_corpus(corpus.files)
        return Loaded(data, manifest.sha256, corpus.to_dict())
    data = generate_random(corpus.seed, corpus.length)
    return Loaded(data, hashlib.sha256(data).hexdigest(), corpus.to_dict())


def resolve(cfg: RunConfig, loaded: Loaded) -> Resolved:
    return resolve_spec(cfg.algorithm, cfg.target, data=loaded.data, overrides=cfg.overrides, seed=cfg.seed)


def metadata(cfg: RunConfig, resolved: Resolved | None, loaded: Loaded) -> dict:
    meta: dict[str, Any] = {
        "tool": "chunkbench",
        "version": __version__,
        "seed": cfg.seed,
        "input": {"sha256": loaded.sha256, "length": int(loaded.data.shape[0]), **loaded.corpus},
        "fingerprint": FINGERPRINT_ALGORITHM,
    }
    if resolved is not None:
        meta["spec"] = resolved.to_dict()
    return meta


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


class _Output:
    """Text destination: a file opened for writing, or standard output."""

    def __init__(self, path: str | None) -> None:
        self.path = path
        self._fh: TextIO | None = None

    def __enter__(self) -> TextIO:
        if self.path is None or self.path == "-":
            return sys.stdout
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        return self._fh

    def __exit__(self, *exc: object) -> None:
        if self._fh is not None:
            self._fh.close()


# --- chunk record formats ------------------------------------------------------


def write_records(out: TextIO, fmt: str, meta: dict, records: Iterable[ChunkRecord]) -> None:
    if fmt == "csv":
        out.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        out.write(CSV_HEADER + "\n")
        for r in records:
            out.write(f"{r.ordinal},{r.length},{r.hexdigest},{int(r.trailing)}\n")
        return
    rows = [
        {"ordinal": r.ordinal, "size": r.length, "fingerprint": r.hexdigest, "trailing": r.trailing}
        for r in records
    ]
    out.write(_dumps({"metadata": meta, "chunks": rows}))


def read_records(text: str) -> tuple[dict, list[ChunkRecord]]:
    """Parse the output of ``chunk`` in either format."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        rows = [
            (c["ordinal"], c["size"], c["fingerprint"], bool(c["trailing"])) for c in doc["chunks"]
        ]
        meta = doc.get("metadata", {})
    else:
        meta = {}
        rows = []
        lines = io.StringIO(text)
        for line in lines:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                meta = json.loads(line[1:])
                continue
            if line == CSV_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ConfigError(f"malformed chunk row: {line!r}")
            rows.append((int(parts[0]), int(parts[1]), parts[2], parts[3] == "1"))
    records = [ChunkRecord(o, s, bytes.fromhex(fp), t) for o, s, fp, t in rows]
    return meta, records


def analysis_document(meta: dict, stats: StatsSummary) -> dict:
    return {"metadata": meta, "summary": stats.to_dict()}


# --- commands ------------------------------------------------------------------


def cmd_chunk(cfg: RunConfig) -> int:
    loaded = load_input(cfg)
    resolved = resolve(cfg, loaded)
    records = iter_records(resolved.spec, iter_blocks(loaded.data, cfg.block_size))
    with _Output(cfg.output) as out:
        write_records(out, cfg.fmt, metadata(cfg, resolved, loaded), records)
    return EXIT_OK


def cmd_tune(cfg: RunConfig) -> int:
    loaded = load_input(cfg)
    resolved = resolve(cfg, loaded)
    doc = resolved.to_dict()
    doc["metadata"] = metadata(cfg, resolved, loaded)
    with _Output(cfg.output) as out:
        out.write(_dumps(doc))
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    loaded = load_input(cfg)
    resolved = resolve(cfg, loaded)
    result = throughput_run(resolved.spec, loaded.data, cfg.repetitions, cfg.block_size)
    doc = {
        "metadata": metadata(cfg, resolved, loaded),
        "algorithm": resolved.spec.algorithm.value,
        "target": resolved.spec.target,
        "median_MiBps": result.median_mibps,
        "iqr_MiBps": result.iqr_mibps,
        "n": result.repetitions,
        "sum_of_sizes": result.sum_of_sizes,
        "samples_MiBps": result.samples_mibps,
    }
    with _Output(cfg.output) as out:
        out.write(_dumps(doc))
    if result.sum_of_sizes != loaded.data.shape[0]:
        print(
            f"self-check failed: chunk sizes sum to {result.sum_of_sizes}, input has {loaded.data.shape[0]} bytes",
            file=sys.stderr,
        )
        return EXIT_SELF_CHECK
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    if cfg.from_file is not None:
        with open(cfg.from_file, encoding="utf-8") as fh:
            meta, records = read_records(fh.read())
        target = (meta.get("spec") or {}).get("target")
    else:
        loaded = load_input(cfg)
        resolved = resolve(cfg, loaded)
        meta = metadata(cfg, resolved, loaded)
        records = iter_records(resolved.spec, iter_blocks(loaded.data, cfg.block_size))
        target = resolved.spec.target
    stats = summarize(records, default_bucket_width(target))
    with _Output(cfg.output) as out:
        out.write(_dumps(analysis_document(meta, stats)))
    return EXIT_OK


def cmd_gen(cfg: RunConfig) -> int:
    corpus = cfg.corpus
    if corpus.kind is CorpusKind.CONCAT:
        data, manifest = concat_corpus(corpus.files)
        doc = json.loads(manifest.to_json())
    else:
        data = generate_random(corpus.seed, corpus.length)
        doc = {"files": [], "total_length": int(data.shape[0]), "sha256": hashlib.sha256(data).hexdigest()}
    doc.update(tool="chunkbench", version=__version__, seed=cfg.seed, corpus=corpus.to_dict())
    if cfg.output is None or cfg.output == "-":
        sys.stdout.buffer.write(data.tobytes())
        sys.stdout.buffer.flush()
    else:
        with open(cfg.output, "wb") as fh:
            fh.write(data.tobytes())
    if cfg.manifest is not None:
        with open(cfg.manifest, "w", encoding="utf-8") as fh:
            fh.write(_dumps(doc))
    return EXIT_OK


COMMANDS = {
    "chunk": cmd_chunk,
    "tune": cmd_tune,
    "bench": cmd_bench,
    "analyze": cmd_analyze,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chunkbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"chunkbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", action="append", metavar="PATH", help="input file; repeat to concatenate in order")
        p.add_argument("--seed", type=lambda s: int(s, 0), help=f"random corpus seed (default ${SEED_ENV} or 0)")
        p.add_argument("--len", metavar="BYTES", help="random corpus length, e.g. 64M (default 64 MiB)")
        p.add_argument("--output", "-o", metavar="PATH", help="write to PATH instead of standard output")

    def alg_args(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("--alg", required=required, help="algorithm: " + ", ".join(a.value for a in Algorithm))
        p.add_argument("--target", type=int, metavar="MU", help="target mean chunk size in bytes")
        p.add_argument("--size", metavar="BYTES", help="chunk size for fsc")
        p.add_argument("--override", action="append", metavar="KEY=VAL", help="force a parameter value")
        p.add_argument("--block-size", metavar="BYTES", help="streaming block size (default 1M)")

    p = sub.add_parser("chunk", help="emit one record per chunk")
    data_args(p)
    alg_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("tune", help="resolve parameters for a target size")
    data_args(p)
    alg_args(p)

    p = sub.add_parser("bench", help="measure chunking throughput")
    data_args(p)
    alg_args(p)
    p.add_argument("--reps", type=int, default=10, help="timed repetitions (default 10)")

    p = sub.add_parser("analyze", help="size statistics and deduplication ratio")
    data_args(p)
    alg_args(p, required=False)
    p.add_argument("--from-file", metavar="PATH", help="analyze the output of a previous chunk run")

    p = sub.add_parser("gen", help="write the input stream as raw bytes")
    data_args(p)
    p.add_argument("--manifest", metavar="PATH", help="also write a JSON manifest")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "analyze" and ns.from_file is None and ns.alg is None:
            raise ConfigError("analyze needs --alg and a target, or --from-file")
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except TuningError as exc:
        print(f"chunkbench: tuning failed: {exc}", file=sys.stderr)
        return EXIT_TUNING
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"chunkbench: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"chunkbench: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
