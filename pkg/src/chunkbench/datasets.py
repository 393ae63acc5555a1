"""Synthetic random corpus and concatenation of local files into one stream."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

PRNG_NAME = "philox4x64-10"


def generate_random(seed: int, length: int, offset: int = 0) -> np.ndarray:
    """Uniform random bytes from a counter-based Philox generator.

    Byte ``j`` of the stream depends only on ``(seed, j)``, so any window can
    be produced without generating what precedes it.
    """
    if length < 0 or offset < 0:
        raise ValueError("length and offset must be non-negative")
    if length == 0:
        return np.zeros(0, dtype=np.uint8)
    bitgen = np.random.Philox(key=seed & (2**64 - 1))
    # One counter step yields four 64-bit words (32 bytes).
    first_block = offset // 32
    if first_block:
        bitgen.advance(first_block)
    skip = offset - first_block * 32
    n_words = (skip + length + 7) // 8
    words = bitgen.random_raw(n_words).astype("<u8", copy=False)
    return words.view(np.uint8)[skip : skip + length].copy()


class CorpusKind(str, Enum):
    RANDOM = "random"
    CONCAT = "concat"


@dataclass
class CorpusSpec:
    kind: CorpusKind
    seed: int = 0
    length: int = 0
    files: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is CorpusKind.RANDOM:
            d.update(seed=self.seed, length=self.length, prng=PRNG_NAME)
        else:
            d["files"] = list(self.files)
        return d


@dataclass
class Manifest:
    files: list[dict]
    total_length: int
    sha256: str

    def to_json(self) -> str:
        return json.dumps(
            {"files": self.files, "total_length": self.total_length, "sha256": self.sha256}, indent=2
        )


class CorpusReadError(OSError):
    def __init__(self, path: str, cause: OSError) -> None:
        super().__init__(f"cannot read {path}: {cause.strerror or cause}")
        self.path = path


def concat_corpus(paths: Sequence[str | os.PathLike]) -> tuple[np.ndarray, Manifest]:
    """Concatenate files in the given order, recording each file's offset."""
    pieces = []
    entries = []
    offset = 0
    digest = hashlib.sha256()
    for p in paths:
        try:
            blob = Path(p).read_bytes()
        except OSError as exc:
            raise CorpusReadError(str(p), exc) from exc
        entries.append({"path": str(p), "offset": offset, "length": len(blob)})
        digest.update(blob)
        pieces.append(np.frombuffer(blob, dtype=np.uint8))
        offset += len(blob)
    data = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.uint8)
    return data, Manifest(entries, offset, digest.hexdigest())


def load_corpus(spec: CorpusSpec) -> np.ndarray:
    if spec.kind is CorpusKind.RANDOM:
        return generate_random(spec.seed, spec.length)
    return concat_corpus(spec.files)[0]
