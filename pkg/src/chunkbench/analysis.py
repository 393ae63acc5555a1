"""Deduplication ratio, chunk-size statistics and throughput measurement."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import ChunkRecord, ChunkStream, as_array, iter_blocks
from .spec import ChunkerSpec

DEFAULT_REPETITIONS = 10
BENCH_BLOCK_SIZE = 1 << 20


class FingerprintIndex:
    """Distinct chunk fingerprints with the byte totals needed for dedup ratios."""

    def __init__(self) -> None:
        self.sizes: dict[bytes, int] = {}
        self.bytes_seen = 0
        self.bytes_unique = 0
        self.chunks_seen = 0

    def ingest(self, record: ChunkRecord) -> None:
        if record.trailing:
            raise ValueError("trailing chunks are excluded from deduplication statistics")
        self.chunks_seen += 1
        self.bytes_seen += record.length
        if record.fingerprint not in self.sizes:
            self.sizes[record.fingerprint] = record.length
            self.bytes_unique += record.length

    def merge(self, other: "FingerprintIndex") -> "FingerprintIndex":
        merged = FingerprintIndex()
        merged.sizes = dict(self.sizes)
        merged.bytes_seen = self.bytes_seen + other.bytes_seen
        merged.chunks_seen = self.chunks_seen + other.chunks_seen
        merged.bytes_unique = self.bytes_unique
        for fp, size in other.sizes.items():
            if fp not in merged.sizes:
                merged.sizes[fp] = size
                merged.bytes_unique += size
        return merged

    @property
    def dedup_ratio(self) -> float:
        if self.bytes_seen == 0:
            return 0.0
        return 1.0 - self.bytes_unique / self.bytes_seen


def ingest_chunk(index: FingerprintIndex, record: ChunkRecord) -> tuple[int, int]:
    index.ingest(record)
    return index.bytes_seen, index.bytes_unique


def dedup_ratio(records: Iterable[ChunkRecord]) -> float:
    index = FingerprintIndex()
    for r in records:
        if not r.trailing:
            index.ingest(r)
    return index.dedup_ratio


@dataclass
class StatsSummary:
    chunk_count: int
    total_bytes: int
    mean: float
    sd: float
    min: int
    max: int
    bucket_width: int
    histogram: list[tuple[int, int]] = field(default_factory=list)
    dedup_ratio: float | None = None
    trailing_omitted: bool = True
    sd_kind: str = "population"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["histogram"] = [list(b) for b in self.histogram]
        return d


def size_stats(lengths: Sequence[int] | np.ndarray, bucket_width: int = 64) -> StatsSummary:
    """Mean, population SD, extremes and histogram of chunk lengths."""
    arr = np.asarray(lengths, dtype=np.int64)
    if arr.shape[0] == 0:
        raise ValueError("no chunks to summarize")
    if bucket_width < 1:
        raise ValueError("bucket width must be positive")
    buckets, counts = np.unique(arr // bucket_width, return_counts=True)
    return StatsSummary(
        chunk_count=int(arr.shape[0]),
        total_bytes=int(arr.sum()),
        mean=float(arr.mean()),
        sd=float(arr.std()),
        min=int(arr.min()),
        max=int(arr.max()),
        bucket_width=bucket_width,
        histogram=[(int(b) * bucket_width, int(c)) for b, c in zip(buckets, counts)],
    )


def default_bucket_width(target: int | None) -> int:
    return max(1, (target or 4096) // 64)


def summarize(
    records: Iterable[ChunkRecord], bucket_width: int | None = None, target: int | None = None
) -> StatsSummary:
    """Statistics over the non-trailing records, dedup ratio included."""
    index = FingerprintIndex()
    lengths = []
    for r in records:
        if r.trailing:
            continue
        index.ingest(r)
        lengths.append(r.length)
    stats = size_stats(lengths, bucket_width or default_bucket_width(target))
    stats.dedup_ratio = index.dedup_ratio
    return stats


@dataclass
class ThroughputResult:
    median_mibps: float
    iqr_mibps: float
    repetitions: int
    sum_of_sizes: int
    samples_mibps: list[float]


def _chunk_sum(spec: ChunkerSpec, data: np.ndarray, block_size: int) -> int:
    stream = ChunkStream(spec)
    total = 0
    last = 0
    for block in iter_blocks(data, block_size):
        cuts = stream.push_block(block)
        if cuts.shape[0]:
            total += int(cuts[-1]) - last
            last = int(cuts[-1])
    return total + stream.finalize().length


def throughput_run(
    spec: ChunkerSpec,
    data,
    repetitions: int = DEFAULT_REPETITIONS,
    block_size: int = BENCH_BLOCK_SIZE,
) -> ThroughputResult:
    """Median and IQR of chunking throughput in MiB/s over in-memory ``data``.

    Only the chunking loop is timed; no fingerprints are computed. One
    untimed warm-up run precedes the measurements.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    arr = as_array(data)
    mib = arr.shape[0] / (1 << 20)
    _chunk_sum(spec, arr, block_size)
    samples = []
    total = 0
    for _ in range(repetitions):
        t0 = time.perf_counter()
        total = _chunk_sum(spec, arr, block_size)
        samples.append(mib / (time.perf_counter() - t0))
    q1, med, q3 = np.percentile(samples, [25, 50, 75])
    return ThroughputResult(float(med), float(q3 - q1), repetitions, total, samples)


def throughput_suite(
    specs: Mapping[str, ChunkerSpec],
    data,
    repetitions: int = DEFAULT_REPETITIONS,
    block_size: int = BENCH_BLOCK_SIZE,
) -> dict[str, ThroughputResult]:
    """Throughput of several configurations with their repetitions interleaved.

    Round ``r`` times every configuration once, rotating the order each round,
    so slow drifts in machine speed hit all contenders alike.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    arr = as_array(data)
    mib = arr.shape[0] / (1 << 20)
    names = list(specs)
    for name in names:
        _chunk_sum(specs[name], arr, block_size)
    samples: dict[str, list[float]] = {n: [] for n in names}
    totals: dict[str, int] = {}
    for r in range(repetitions):
        k = r % len(names)
        for name in names[k:] + names[:k]:
            t0 = time.perf_counter()
            totals[name] = _chunk_sum(specs[name], arr, block_size)
            samples[name].append(mib / (time.perf_counter() - t0))
    out = {}
    for name in names:
        q1, med, q3 = np.percentile(samples[name], [25, 50, 75])
        out[name] = ThroughputResult(float(med), float(q3 - q1), repetitions, totals[name], samples[name])
    return out
