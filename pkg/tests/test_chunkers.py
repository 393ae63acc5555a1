import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chunkbench.chunkers import POPCOUNT, gear_top_mask, make_chunker
from chunkbench.core import chunk_boundaries, chunk_lengths
from chunkbench.datasets import generate_random
from chunkbench.spec import Algorithm, ChunkerSpec, ConfigError, DivisorSet

from conftest import small_specs, spec_id
from reference import all_cuts, oracle_for

SPECS = small_specs()

FIG_BYTES = [30, 138, 61, 117, 16, 44, 110, 194, 186, 123, 203, 104, 4, 89, 27, 98, 98, 230, 21, 192, 90, 128, 100, 27, 154, 128, 20, 149]


def cuts(spec, data, block_size=None):
    if isinstance(data, (bytes, bytearray)):
        data = list(data)
    return chunk_boundaries(spec, np.asarray(data, dtype=np.uint8), block_size).tolist()


# byte streams that sometimes come from a tiny alphabet, so pair- and
# run-based algorithms also see repeats
streams = st.one_of(
    st.binary(min_size=0, max_size=3000),
    st.lists(st.sampled_from([0, 1, 2, 3, 7, 200, 255]), max_size=3000).map(bytes),
)


# --- hand traces -------------------------------------------------------------


def test_ae_figure_first_cut():
    spec = ChunkerSpec(Algorithm.AE, horizon=4)
    assert cuts(spec, FIG_BYTES)[0] == 6


def test_ram_trace():
    assert cuts(ChunkerSpec(Algorithm.RAM, horizon=2), [5, 200, 3, 10, 250]) == [5]


def test_mii_trace():
    assert cuts(ChunkerSpec(Algorithm.MII, window=2), [9, 1, 2, 3]) == [4]


def test_pci_trace():
    assert cuts(ChunkerSpec(Algorithm.PCI, window=2, threshold=10), [0xFF, 0x03]) == [2]


def test_bfbc_trace():
    d = DivisorSet([DivisorSet.pair(ord("a"), ord("b"))])
    assert cuts(ChunkerSpec(Algorithm.BFBC, divisors=d, min_chunk=0), b"xaby") == [3]


def test_fsc_trace():
    spec = ChunkerSpec(Algorithm.FSC, fixed_size=4)
    lengths, trailing = chunk_lengths(spec, bytes(10))
    assert cuts(spec, bytes(10)) == [4, 8]
    assert trailing == 2 and lengths.tolist() == [4, 4]


def test_fsc_longer_than_input():
    assert cuts(ChunkerSpec(Algorithm.FSC, fixed_size=100), bytes(10)) == []


# --- degenerate inputs -------------------------------------------------------


def test_ae_increasing_never_cuts():
    assert cuts(ChunkerSpec(Algorithm.AE, horizon=3), list(range(256))) == []


@pytest.mark.parametrize("h", [1, 4, 9])
def test_ae_constant_input(h):
    assert cuts(ChunkerSpec(Algorithm.AE, horizon=h), [5] * (h + 1))[:1] == [h + 1]
    # zero bytes behave the same: the first byte seeds the maximum
    assert cuts(ChunkerSpec(Algorithm.AE, horizon=h), [0] * (3 * (h + 1))) == [h + 1, 2 * (h + 1), 3 * (h + 1)]


def test_ram_constant_input():
    assert cuts(ChunkerSpec(Algorithm.RAM, horizon=7), [9] * 8) == [8]


def test_ram_stuck_after_255():
    data = [1, 255, 3] + [0] * 5000
    assert cuts(ChunkerSpec(Algorithm.RAM, horizon=3), data) == []


def test_mii_non_increasing():
    assert cuts(ChunkerSpec(Algorithm.MII, window=1), list(range(255, -1, -1)) + [0] * 10) == []


def test_mii_window_one_cuts_at_first_ascent():
    assert cuts(ChunkerSpec(Algorithm.MII, window=1), [5, 5, 4, 6, 1]) == [4]


def test_pci_zero_input():
    assert cuts(ChunkerSpec(Algorithm.PCI, window=4, threshold=1), bytes(1000)) == []


def test_bsw_short_stream():
    spec = ChunkerSpec(Algorithm.BSW_RABIN, window=32, mask_bits=1)
    assert cuts(spec, bytes(31)) == []


def test_bfbc_minimum():
    # every pair is a divisor, so cuts land right after the minimum
    d = DivisorSet(range(65536))
    spec = ChunkerSpec(Algorithm.BFBC, divisors=d, min_chunk=384)
    c = cuts(spec, generate_random(3, 5000))
    assert c[:3] == [385, 770, 1155]


# --- configuration -------------------------------------------------------------


def test_gear_masks():
    assert gear_top_mask(11) == 0xFFE00000
    ch = make_chunker(ChunkerSpec(Algorithm.GEAR_NC, target=2048, mask_bits=11, nc_level=2))
    assert (ch.small_bits, ch.large_bits) == (13, 9)
    assert bin(int(ch.mask_small)).count("1") == 13


def test_popcount_table():
    assert POPCOUNT.tolist() == [bin(v).count("1") for v in range(256)]


def test_bfbc_rejects_empty_divisors():
    with pytest.raises(ConfigError):
        ChunkerSpec(Algorithm.BFBC, divisors=DivisorSet([]), min_chunk=0)


def test_step_matches_scan():
    spec = ChunkerSpec(Algorithm.PCI, window=5, threshold=24)
    data = generate_random(11, 600)
    ch = make_chunker(spec)
    hits = [i + 1 for i, b in enumerate(data.tolist()) if ch.step(b)]
    assert hits == cuts(spec, data)


def test_reset_forgets_state():
    spec = ChunkerSpec(Algorithm.BSW_BUZHASH, window=8, mask_bits=4)
    data = generate_random(12, 4000)
    ch = make_chunker(spec)
    ch.scan(data[:777])
    ch.reset()
    assert ch.scan(data).tolist() == cuts(spec, data)


# --- differential tests against the literal pseudocode --------------------------------


@pytest.mark.parametrize("spec", SPECS, ids=spec_id)
def test_matches_reference_on_random_stream(spec):
    data = generate_random(99, 6000)
    assert cuts(spec, data) == all_cuts(oracle_for(spec), data.tolist())


@pytest.mark.parametrize("spec", SPECS, ids=spec_id)
@settings(max_examples=40)
@given(data=streams)
def test_matches_reference(spec, data):
    assert cuts(spec, data) == all_cuts(oracle_for(spec), list(data))


def test_ae_figure_matches_reference():
    spec = ChunkerSpec(Algorithm.AE, horizon=4)
    assert cuts(spec, FIG_BYTES) == all_cuts(oracle_for(spec), FIG_BYTES)


# --- streaming properties ------------------------------------------------------


def partition(n, seed):
    """Random block sizes summing to ``n``."""
    if n < 2:
        return [n] if n else []
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, min(n - 1, 20) + 1))
    edges = np.sort(rng.choice(np.arange(1, n), size=k, replace=False))
    return np.diff(np.concatenate([[0], edges, [n]])).tolist()


@pytest.mark.parametrize("spec", SPECS, ids=spec_id)
@settings(max_examples=1000)
@given(data=streams, seed=st.integers(0, 2**32 - 1))
def test_block_independence_and_minimum(spec, data, seed):
    arr = np.frombuffer(data, dtype=np.uint8)
    whole = make_chunker(spec).scan(arr).tolist()
    ch = make_chunker(spec)
    pieces = []
    start = 0
    for size in partition(len(arr), seed):
        pieces.extend((ch.scan(arr[start : start + size]) + start).tolist())
        start += size
    assert pieces == whole
    lengths = np.diff([0] + whole)
    assert all(lengths >= make_chunker(spec).min_length)


@pytest.mark.parametrize("spec", SPECS, ids=spec_id)
def test_one_mib_block_independence(spec, rand1m):
    assert cuts(spec, rand1m) == cuts(spec, rand1m, 4096)


@pytest.mark.parametrize("spec", SPECS, ids=spec_id)
def test_no_dependence_on_previous_chunks(spec):
    # a chunk's own bytes decide its end: re-chunking from any cut reproduces the rest
    data = generate_random(5, 20000)
    c = cuts(spec, data)
    for k in c[: min(5, len(c))]:
        assert [x + k for x in cuts(spec, data[k:])] == [x for x in c if x > k]


@pytest.mark.parametrize(
    "spec",
    [
        ChunkerSpec(Algorithm.BSW_RABIN, window=32, mask_bits=8),
        ChunkerSpec(Algorithm.BSW_BUZHASH, window=32, mask_bits=8),
        ChunkerSpec(Algorithm.BSW_GEAR, mask_bits=8),
        ChunkerSpec(Algorithm.PCI, window=34, threshold=157),
        ChunkerSpec(Algorithm.BFBC, divisors=DivisorSet(range(0, 65536, 97)), min_chunk=0),
    ],
    ids=lambda s: s.algorithm.value,
)
def test_boundary_shift_localized(spec):
    data = generate_random(8, 1 << 20)
    q = 300_000
    edited = np.insert(data, q, np.uint8(0x5A))
    before = set(cuts(spec, data))
    after = cuts(spec, edited)
    # once both streams cut at the same content position past the edit, they agree from there on
    shifted = [p - 1 for p in after if p > q + 1]
    first_common = next(p for p in shifted if p in before)
    assert [p for p in shifted if p >= first_common] == sorted(p for p in before if p >= first_common)
    assert first_common - q < 100_000
