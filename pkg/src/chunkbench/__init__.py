"""Content-defined chunking algorithms with tuning, analysis and benchmarking."""

from .analysis import FingerprintIndex, StatsSummary, summarize, throughput_run, throughput_suite
from .chunkers import Chunker, make_chunker
from .core import ChunkRecord, ChunkStream, chunk_boundaries, chunk_lengths, chunk_records
from .datasets import concat_corpus, generate_random
from .spec import (
    Algorithm,
    ChunkerSpec,
    ConfigError,
    DivisorSet,
    StreamStateError,
    TuningError,
    UnsupportedTargetError,
)
from .tuning import resolve_spec

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "ChunkRecord",
    "ChunkStream",
    "Chunker",
    "ChunkerSpec",
    "ConfigError",
    "DivisorSet",
    "FingerprintIndex",
    "StatsSummary",
    "StreamStateError",
    "TuningError",
    "UnsupportedTargetError",
    "chunk_boundaries",
    "chunk_lengths",
    "chunk_records",
    "concat_corpus",
    "generate_random",
    "make_chunker",
    "resolve_spec",
    "summarize",
    "throughput_run",
    "throughput_suite",
]
