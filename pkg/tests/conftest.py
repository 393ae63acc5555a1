import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chunkbench.datasets import generate_random
from chunkbench.spec import Algorithm, ChunkerSpec, DivisorSet

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

RAND_SEED = 2024
DESK_LEN = 64 << 20


@pytest.fixture(scope="session")
def rand64() -> np.ndarray:
    return generate_random(RAND_SEED, DESK_LEN)


@pytest.fixture(scope="session")
def rand1m() -> np.ndarray:
    return generate_random(7, 1 << 20)


def small_specs() -> list[ChunkerSpec]:
    """One configuration per algorithm with short expected chunks."""
    pairs = DivisorSet([DivisorSet.pair(a, b) for a, b in [(1, 2), (200, 7), (0, 0), (255, 3)]])
    common = DivisorSet([DivisorSet.pair(a, b) for a in range(0, 256, 16) for b in range(0, 256, 8)])
    return [
        ChunkerSpec(Algorithm.FSC, fixed_size=37),
        ChunkerSpec(Algorithm.BSW_RABIN, window=8, mask_bits=5),
        ChunkerSpec(Algorithm.BSW_BUZHASH, window=8, mask_bits=5),
        ChunkerSpec(Algorithm.BSW_GEAR, mask_bits=5),
        ChunkerSpec(Algorithm.BSW_GEAR, mask_bits=6, word_bits=64),
        ChunkerSpec(Algorithm.GEAR_NC, target=64, mask_bits=6, nc_level=2),
        ChunkerSpec(Algorithm.AE, horizon=12),
        ChunkerSpec(Algorithm.RAM, horizon=10),
        ChunkerSpec(Algorithm.MII, window=2),
        ChunkerSpec(Algorithm.PCI, window=6, threshold=30),
        ChunkerSpec(Algorithm.BFBC, divisors=common, min_chunk=10),
        ChunkerSpec(Algorithm.BFBC_STAR, divisors=pairs, min_chunk=0),
    ]


def spec_id(spec: ChunkerSpec) -> str:
    extra = "64" if spec.word_bits == 64 else ""
    return spec.algorithm.value + extra


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
