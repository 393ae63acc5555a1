"""Streaming chunk emission shared by all algorithms.

A :class:`ChunkStream` accepts the input as consecutive blocks of any size
and reports boundaries as absolute stream offsets. Offset ``p`` means the
chunk ends with the stream's ``p``-th byte (1-indexed), so boundaries double
as exclusive end indices.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

import numpy as np

from .chunkers import Chunker, make_chunker
from .spec import ChunkerSpec, StreamStateError

Block = Union[bytes, bytearray, memoryview, np.ndarray]

FINGERPRINT_ALGORITHM = "sha256"
DEFAULT_BLOCK_SIZE = 1 << 20


def fingerprint(data: Block) -> bytes:
    return hashlib.sha256(as_array(data)).digest()


def as_array(block: Block) -> np.ndarray:
    if isinstance(block, np.ndarray):
        if block.dtype != np.uint8:
            raise TypeError(f"expected a uint8 array, got {block.dtype}")
        return np.ascontiguousarray(block)
    return np.frombuffer(block, dtype=np.uint8)


@dataclass(frozen=True)
class ChunkRecord:
    ordinal: int
    length: int
    fingerprint: bytes
    trailing: bool = False

    @property
    def hexdigest(self) -> str:
        return self.fingerprint.hex()


class ChunkStream:
    """Incremental chunker over a byte stream fed block by block.

    Boundaries do not depend on how the input is split into blocks. The bytes
    of the chunk in progress are retained so that ``finalize`` can fingerprint
    the trailing chunk.
    """

    def __init__(self, spec: ChunkerSpec) -> None:
        self.spec = spec
        self._chunker: Chunker = make_chunker(spec)
        self.bytes_consumed = 0
        self.chunks_emitted = 0
        self._pending: list[np.ndarray] = []
        self._pending_len = 0
        self._finalized = False

    @property
    def finalized(self) -> bool:
        return self._finalized

    def _push(self, block: Block) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
        if self._finalized:
            raise StreamStateError("cannot push into a finalized stream")
        data = as_array(block)
        if data.shape[0] == 0:
            return data, np.zeros(0, dtype=np.int64), []
        cuts = self._chunker.scan(data)
        previous = self._pending
        last = int(cuts[-1]) if cuts.shape[0] else 0
        if cuts.shape[0]:
            self._pending = []
            self._pending_len = 0
        if last < data.shape[0]:
            self._pending.append(data[last:].copy())
            self._pending_len += data.shape[0] - last
        base = self.bytes_consumed
        self.bytes_consumed += data.shape[0]
        self.chunks_emitted += cuts.shape[0]
        return data, cuts + base, previous

    def push_block(self, block: Block) -> np.ndarray:
        """Consume ``block``; return absolute offsets of boundaries found in it."""
        return self._push(block)[1]

    def push_records(self, block: Block) -> list[ChunkRecord]:
        """Consume ``block``; return fingerprinted records of the chunks it completes."""
        ordinal = self.chunks_emitted
        base = self.bytes_consumed
        data, cuts, previous = self._push(block)
        records = []
        start = 0
        for j, end in enumerate((cuts - base).tolist()):
            h = hashlib.sha256()
            length = end - start
            if j == 0 and previous:
                for piece in previous:
                    h.update(piece)
                    length += piece.shape[0]
            h.update(data[start:end])
            records.append(ChunkRecord(ordinal + j, length, h.digest()))
            start = end
        return records

    def finalize(self) -> ChunkRecord:
        """Close the stream and return the trailing chunk (possibly empty)."""
        if self._finalized:
            raise StreamStateError("stream already finalized")
        self._finalized = True
        h = hashlib.sha256()
        for piece in self._pending:
            h.update(piece)
        record = ChunkRecord(self.chunks_emitted, self._pending_len, h.digest(), trailing=True)
        self._pending = []
        return record


def iter_blocks(data: Block, block_size: int = DEFAULT_BLOCK_SIZE) -> Iterator[np.ndarray]:
    arr = as_array(data)
    for start in range(0, arr.shape[0], block_size):
        yield arr[start : start + block_size]


def chunk_boundaries(spec: ChunkerSpec, data: Block, block_size: int | None = None) -> np.ndarray:
    """All boundary offsets for ``data``, excluding the end of the trailing chunk."""
    stream = ChunkStream(spec)
    arr = as_array(data)
    if block_size is None:
        return stream.push_block(arr)
    parts = [stream.push_block(b) for b in iter_blocks(arr, block_size)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def chunk_lengths(spec: ChunkerSpec, data: Block, block_size: int | None = None) -> tuple[np.ndarray, int]:
    """Lengths of the completed chunks and the length of the trailing chunk."""
    arr = as_array(data)
    cuts = chunk_boundaries(spec, arr, block_size)
    lengths = np.diff(cuts, prepend=0)
    trailing = arr.shape[0] - (int(cuts[-1]) if cuts.shape[0] else 0)
    return lengths, trailing


def iter_records(spec: ChunkerSpec, blocks: Iterable[Block]) -> Iterator[ChunkRecord]:
    """Fingerprinted records for a block stream, trailing chunk last."""
    stream = ChunkStream(spec)
    for block in blocks:
        yield from stream.push_records(block)
    yield stream.finalize()


def chunk_records(spec: ChunkerSpec, data: Block, block_size: int = DEFAULT_BLOCK_SIZE) -> list[ChunkRecord]:
    return list(iter_records(spec, iter_blocks(data, block_size)))
